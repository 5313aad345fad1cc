#pragma once

// JSON interchange for instances and routing profiles:
//   instance: {"m": int, "n": [int, ...], "phi": float, "mu": float, "q": float}
//   profile:  {"flow": [[int, ...], ...]}

#include <string>

#include <json.hpp>

#include "lossnet/model.hpp"

namespace lossnet {

Instance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const Instance& inst);

RoutingProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const RoutingProfile& prof);

nlohmann::json read_json_file(const std::string& path);
Instance load_instance(const std::string& path);
// Also checks the profile against `inst`.
RoutingProfile load_profile(const std::string& path, const Instance& inst);

}  // namespace lossnet
