#include "lossnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lossnet {

int Instance::total_users() const {
  return std::accumulate(user_counts.begin(), user_counts.end(), 0);
}

int Instance::max_users() const {
  return user_counts.empty() ? 0 : *std::max_element(user_counts.begin(), user_counts.end());
}

int Instance::min_users() const {
  return user_counts.empty() ? 0 : *std::min_element(user_counts.begin(), user_counts.end());
}

void Instance::validate() const {
  if (user_counts.empty()) throw InvalidArgument("field 'n': at least one source is required");
  for (std::size_t i = 0; i < user_counts.size(); ++i) {
    if (user_counts[i] < 1) {
      throw InvalidArgument("field 'n[" + std::to_string(i) + "]': user count must be >= 1");
    }
  }
  if (!(phi > 0.0) || !std::isfinite(phi)) throw InvalidArgument("field 'phi': must be > 0");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("field 'mu': must be > 0");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("field 'q': must be in [0, 1]");
}

CanonicalInstance canonicalize(const Instance& inst) {
  CanonicalInstance out;
  out.order.resize(inst.m());
  std::iota(out.order.begin(), out.order.end(), SourceIndex{0});
  std::stable_sort(out.order.begin(), out.order.end(), [&](SourceIndex a, SourceIndex b) {
    return inst.user_counts[a] > inst.user_counts[b];
  });
  out.instance = inst;
  for (std::size_t k = 0; k < inst.m(); ++k) {
    out.instance.user_counts[k] = inst.user_counts[out.order[k]];
  }
  return out;
}

RoutingProfile RoutingProfile::all_direct(const Instance& inst) {
  RoutingProfile p(inst.m());
  for (std::size_t i = 0; i < inst.m(); ++i) p(i, i) = inst.user_counts[i];
  return p;
}

RoutingProfile RoutingProfile::from_rows(const std::vector<std::vector<int>>& rows) {
  RoutingProfile p(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      throw InvalidArgument("field 'flow[" + std::to_string(i) + "]': expected " +
                            std::to_string(rows.size()) + " entries");
    }
    for (std::size_t j = 0; j < rows.size(); ++j) p(i, j) = rows[i][j];
  }
  return p;
}

int RoutingProfile::incoming(SourceIndex i) const {
  int v = 0;
  for (std::size_t j = 0; j < m_; ++j) {
    if (j != i) v += (*this)(j, i);
  }
  return v;
}

int RoutingProfile::row_sum(SourceIndex i) const {
  return std::accumulate(flow_.begin() + static_cast<std::ptrdiff_t>(i * m_),
                         flow_.begin() + static_cast<std::ptrdiff_t>((i + 1) * m_), 0);
}

int RoutingProfile::relayed_users() const {
  int b = 0;
  for (std::size_t i = 0; i < m_; ++i) b += row_sum(i) - direct(i);
  return b;
}

void RoutingProfile::move_user(SourceIndex from, SourceIndex via, SourceIndex to) {
  if (from >= m_ || via >= m_ || to >= m_) throw InvalidArgument("move_user: index out of range");
  if ((*this)(from, via) < 1) throw InvalidArgument("move_user: route has no users");
  --(*this)(from, via);
  ++(*this)(from, to);
}

std::vector<std::vector<int>> RoutingProfile::rows() const {
  std::vector<std::vector<int>> out(m_, std::vector<int>(m_));
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = 0; j < m_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

RoutingProfile RoutingProfile::relabelled(std::span<const SourceIndex> order) const {
  RoutingProfile out(m_);
  for (std::size_t a = 0; a < m_; ++a)
    for (std::size_t b = 0; b < m_; ++b) out(order[a], order[b]) = (*this)(a, b);
  return out;
}

std::size_t RoutingProfileHash::operator()(const RoutingProfile& p) const {
  // FNV-1a over the flattened matrix.
  std::uint64_t h = 1469598103934665603ULL;
  for (int x : p.flat()) {
    h ^= static_cast<std::uint32_t>(x);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

void validate_profile(const Instance& inst, const RoutingProfile& prof) {
  if (prof.m() != inst.m()) {
    throw InvalidArgument("field 'flow': expected a " + std::to_string(inst.m()) + "x" +
                          std::to_string(inst.m()) + " matrix, got " + std::to_string(prof.m()) +
                          " rows");
  }
  for (std::size_t i = 0; i < prof.m(); ++i) {
    for (std::size_t j = 0; j < prof.m(); ++j) {
      if (prof(i, j) < 0) {
        throw InvalidArgument("field 'flow[" + std::to_string(i) + "][" + std::to_string(j) +
                              "]': must be non-negative");
      }
    }
    if (prof.row_sum(i) != inst.user_counts[i]) {
      throw InvalidArgument("field 'flow[" + std::to_string(i) + "]': row sums to " +
                            std::to_string(prof.row_sum(i)) + ", expected n[" +
                            std::to_string(i) + "] = " + std::to_string(inst.user_counts[i]));
    }
  }
}

std::vector<double> traffic_rates(const Instance& inst, const RoutingProfile& prof) {
  if (prof.m() != inst.m()) throw InvalidArgument("traffic_rates: dimension mismatch");
  const double relayed = inst.relay_success() * inst.phi;
  std::vector<double> t(inst.m());
  for (std::size_t i = 0; i < inst.m(); ++i) {
    t[i] = prof.direct(i) * inst.phi + prof.incoming(i) * relayed;
  }
  return t;
}

double loss_rate(const Instance& inst, std::span<const double> t, SourceIndex origin,
                 SourceIndex relay) {
  if (origin >= t.size() || relay >= t.size()) throw InvalidArgument("loss_rate: invalid index");
  const double blocked = t[relay] / (t[relay] + inst.mu);
  if (origin == relay) return inst.phi * blocked;
  return inst.phi * (inst.q + inst.relay_success() * blocked);
}

double loss_rate(const Instance& inst, const RoutingProfile& prof, SourceIndex origin,
                 SourceIndex relay) {
  const auto t = traffic_rates(inst, prof);
  return loss_rate(inst, t, origin, relay);
}

double total_traffic(double mu, std::span<const double> t) {
  double tr = 0.0;
  for (double ti : t) tr += ti * mu / (ti + mu);
  return tr;
}

double total_traffic(const Instance& inst, const RoutingProfile& prof) {
  const auto t = traffic_rates(inst, prof);
  return total_traffic(inst.mu, t);
}

double total_traffic_by_users(const Instance& inst, const RoutingProfile& prof) {
  const auto t = traffic_rates(inst, prof);
  double tr = 0.0;
  for (std::size_t i = 0; i < inst.m(); ++i) {
    for (std::size_t j = 0; j < inst.m(); ++j) {
      const int users = prof(i, j);
      if (users > 0) tr += users * (inst.phi - loss_rate(inst, t, i, j));
    }
  }
  return tr;
}

TrafficSummary summarize(const Instance& inst, const RoutingProfile& prof) {
  TrafficSummary s;
  s.t = traffic_rates(inst, prof);
  const std::size_t m = inst.m();
  s.no_congestion_prob.resize(m);
  for (std::size_t i = 0; i < m; ++i) s.no_congestion_prob[i] = inst.mu / (s.t[i] + inst.mu);
  s.class_loss_rate.resize(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) s.class_loss_rate[i * m + j] = loss_rate(inst, s.t, i, j);
  s.total_traffic = total_traffic(inst.mu, s.t);
  return s;
}

namespace {

// C(n + k - 1, k - 1) with saturation.
std::uint64_t compositions_count(int n, std::size_t parts) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (parts <= 1) return 1;
  const std::uint64_t k = parts - 1;
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t factor = static_cast<std::uint64_t>(n) + i;
    if (result > kMax / factor) return kMax;
    result = result * factor / i;
  }
  return result;
}

void build_compositions(int remaining, std::size_t parts, std::vector<int>& prefix,
                        std::vector<std::vector<int>>& out) {
  if (prefix.size() + 1 == parts) {
    prefix.push_back(remaining);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int first = 0; first <= remaining; ++first) {
    prefix.push_back(first);
    build_compositions(remaining - first, parts, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<std::vector<int>> compositions(int total, std::size_t parts) {
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  build_compositions(total, parts, prefix, out);
  return out;
}

std::uint64_t profile_count(const Instance& inst) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (int n : inst.user_counts) {
    const std::uint64_t c = compositions_count(n, inst.m());
    if (c == kMax || total > kMax / c) return kMax;
    total *= c;
  }
  return total;
}

void for_each_profile(const Instance& inst,
                      const std::function<bool(const RoutingProfile&)>& visit) {
  const std::size_t m = inst.m();
  std::vector<std::vector<std::vector<int>>> rows(m);
  for (std::size_t i = 0; i < m; ++i) rows[i] = compositions(inst.user_counts[i], m);
  std::vector<std::size_t> odometer(m, 0);
  RoutingProfile prof(m);
  auto load_row = [&](std::size_t i) {
    for (std::size_t j = 0; j < m; ++j) prof(i, j) = rows[i][odometer[i]][j];
  };
  for (std::size_t i = 0; i < m; ++i) load_row(i);
  while (true) {
    if (!visit(prof)) return;
    std::size_t i = m;
    while (i > 0) {
      --i;
      if (++odometer[i] < rows[i].size()) {
        load_row(i);
        break;
      }
      odometer[i] = 0;
      load_row(i);
      if (i == 0) return;
    }
  }
}

}  // namespace lossnet
