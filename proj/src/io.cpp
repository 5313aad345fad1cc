#include "lossnet/io.hpp"

#include <fstream>

namespace lossnet {

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* field) {
  if (!j.is_object()) throw InvalidArgument("document: expected a JSON object");
  auto it = j.find(field);
  if (it == j.end()) throw InvalidArgument(std::string("field '") + field + "': missing");
  return *it;
}

double require_number(const nlohmann::json& j, const char* field) {
  const auto& v = require(j, field);
  if (!v.is_number()) throw InvalidArgument(std::string("field '") + field + "': expected a number");
  return v.get<double>();
}

}  // namespace

Instance instance_from_json(const nlohmann::json& j) {
  const auto& m = require(j, "m");
  if (!m.is_number_integer()) throw InvalidArgument("field 'm': expected an integer");
  const auto& n = require(j, "n");
  if (!n.is_array()) throw InvalidArgument("field 'n': expected an array of integers");
  Instance inst;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!n[i].is_number_integer()) {
      throw InvalidArgument("field 'n[" + std::to_string(i) + "]': expected an integer");
    }
    inst.user_counts.push_back(n[i].get<int>());
  }
  if (m.get<long long>() < 1) throw InvalidArgument("field 'm': must be >= 1");
  if (static_cast<std::size_t>(m.get<long long>()) != inst.user_counts.size()) {
    throw InvalidArgument("field 'n': length " + std::to_string(inst.user_counts.size()) +
                          " does not match m = " + std::to_string(m.get<long long>()));
  }
  inst.phi = require_number(j, "phi");
  inst.mu = require_number(j, "mu");
  inst.q = require_number(j, "q");
  inst.validate();
  return inst;
}

nlohmann::json instance_to_json(const Instance& inst) {
  return {{"m", inst.m()}, {"n", inst.user_counts}, {"phi", inst.phi}, {"mu", inst.mu},
          {"q", inst.q}};
}

RoutingProfile profile_from_json(const nlohmann::json& j) {
  const auto& flow = require(j, "flow");
  if (!flow.is_array()) throw InvalidArgument("field 'flow': expected an array of rows");
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < flow.size(); ++i) {
    const auto& row = flow[i];
    if (!row.is_array()) {
      throw InvalidArgument("field 'flow[" + std::to_string(i) + "]': expected an array");
    }
    auto& out = rows.emplace_back();
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!row[k].is_number_integer()) {
        throw InvalidArgument("field 'flow[" + std::to_string(i) + "][" + std::to_string(k) +
                              "]': expected an integer");
      }
      out.push_back(row[k].get<int>());
    }
  }
  return RoutingProfile::from_rows(rows);
}

nlohmann::json profile_to_json(const RoutingProfile& prof) { return {{"flow", prof.rows()}}; }

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(path + ": cannot open file");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

Instance load_instance(const std::string& path) {
  const auto doc = read_json_file(path);
  try {
    return instance_from_json(doc);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

RoutingProfile load_profile(const std::string& path, const Instance& inst) {
  const auto doc = read_json_file(path);
  try {
    auto prof = profile_from_json(doc);
    validate_profile(inst, prof);
    return prof;
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

}  // namespace lossnet
