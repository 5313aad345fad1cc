#include "lossnet/optimizer.hpp"

#include <cmath>

namespace lossnet {

namespace {

// Assigns each sender's removed users to receivers in index order.
RoutingProfile realize(const Instance& inst, const std::vector<int>& u, const std::vector<int>& v) {
  const std::size_t m = inst.m();
  RoutingProfile prof(m);
  std::vector<int> room = v;
  std::size_t receiver = 0;
  for (std::size_t i = 0; i < m; ++i) {
    prof(i, i) = u[i];
    int senders = inst.user_counts[i] - u[i];
    while (senders > 0) {
      while (receiver < m && room[receiver] == 0) ++receiver;
      if (receiver >= m || receiver == i) {
        throw std::logic_error("realize: inconsistent direct/relayed counts");
      }
      const int moved = std::min(senders, room[receiver]);
      prof(i, receiver) += moved;
      room[receiver] -= moved;
      senders -= moved;
    }
  }
  return prof;
}

std::size_t split_index(const Instance& inst, const std::vector<int>& v) {
  const auto canon = canonicalize(inst);
  const std::size_t m = inst.m();
  // First canonical position that receives relayed users.
  for (std::size_t k = 0; k < m; ++k) {
    if (v[canon.order[k]] > 0) return k;
  }
  return m;
}

}  // namespace

OptimalSolution describe_solution(const Instance& inst, const RoutingProfile& prof) {
  OptimalSolution sol;
  const std::size_t m = inst.m();
  sol.u.resize(m);
  sol.v.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    sol.u[i] = prof.direct(i);
    sol.v[i] = prof.incoming(i);
  }
  sol.profile = prof;
  sol.tr = total_traffic(inst, prof);
  sol.relayed = prof.relayed_users();
  sol.threshold = split_index(inst, sol.v);
  if (sol.threshold == 0) sol.threshold = 1;
  return sol;
}

OptimalSolution solve_optimal(const Instance& inst) {
  inst.validate();
  const auto canon = canonicalize(inst);
  const Instance& c = canon.instance;
  const std::size_t m = c.m();
  const double phi = c.phi;
  const double mu = c.mu;
  const double relayed_rate = c.relay_success() * phi;
  const auto& n = c.user_counts;

  auto blocked_share = [mu](double t) { return mu / (t + mu); };

  std::vector<int> best_u = n;
  std::vector<int> best_v(m, 0);
  double all_direct_share = 0.0;
  for (std::size_t i = 0; i < m; ++i) all_direct_share += blocked_share(n[i] * phi);
  double best_tr = mu * (static_cast<double>(m) - all_direct_share);

  // A split with no receivers admits no relayed users; it is the all-direct
  // candidate above.
  for (std::size_t split = 1; split < m; ++split) {
    std::vector<int> u = n;
    std::vector<int> v(m, 0);
    double share = all_direct_share;
    int capacity = 0;
    for (std::size_t l = 0; l < split; ++l) capacity += n[l];

    for (int b = 1; b <= capacity; ++b) {
      // (a) take one user off the largest direct count on the sending side.
      std::size_t l = 0;
      for (std::size_t k = 1; k < split; ++k) {
        if (u[k] > u[l]) l = k;
      }
      share -= blocked_share(u[l] * phi);
      --u[l];
      share += blocked_share(u[l] * phi);

      // (b) relay it to the least loaded receiver.
      std::size_t j = split;
      for (std::size_t k = split + 1; k < m; ++k) {
        if (n[k] * phi + v[k] * relayed_rate < n[j] * phi + v[j] * relayed_rate) j = k;
      }
      share -= blocked_share(n[j] * phi + v[j] * relayed_rate);
      ++v[j];
      share += blocked_share(n[j] * phi + v[j] * relayed_rate);

      const double tr = mu * (static_cast<double>(m) - share);
      if (tr > best_tr) {
        best_tr = tr;
        best_u = u;
        best_v = v;
      }
    }
  }

  const RoutingProfile canonical_profile = realize(c, best_u, best_v);
  return describe_solution(inst, canonical_profile.relabelled(canon.order));
}

OptimalSolution brute_force_optimal(const Instance& inst, std::uint64_t cap) {
  inst.validate();
  const std::uint64_t count = profile_count(inst);
  if (count > cap) {
    throw CapacityExceeded("brute_force_optimal: " + std::to_string(count) +
                               " profiles exceed the cap of " + std::to_string(cap),
                           count, cap);
  }
  RoutingProfile best;
  double best_tr = -1.0;
  int best_relayed = 0;
  for_each_profile(inst, [&](const RoutingProfile& prof) {
    const double tr = total_traffic(inst, prof);
    const double tol = 1e-12 * std::max(1.0, std::abs(best_tr));
    const int relayed = prof.relayed_users();
    if (tr > best_tr + tol || (tr >= best_tr - tol && relayed < best_relayed)) {
      best = prof;
      best_tr = tr;
      best_relayed = relayed;
    }
    return true;
  });
  return describe_solution(inst, best);
}

std::string StructureViolation::describe() const {
  if (kind == Kind::kSendsAndReceives) {
    return "source " + std::to_string(i) + " both sends relayed users and receives them";
  }
  return "source " + std::to_string(i) + " receives relayed users while source " +
         std::to_string(j) + " (no larger) sends some";
}

std::vector<StructureViolation> check_optimal_structure(const Instance& inst,
                                                        std::span<const int> u,
                                                        std::span<const int> v) {
  const auto& n = inst.user_counts;
  const std::size_t m = inst.m();
  if (u.size() != m || v.size() != m) throw InvalidArgument("check_optimal_structure: size mismatch");
  std::vector<StructureViolation> out;
  for (std::size_t i = 0; i < m; ++i) {
    if (u[i] < n[i] && v[i] > 0) out.push_back({StructureViolation::Kind::kSendsAndReceives, i, i});
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j && n[i] >= n[j] && v[i] > 0 && u[j] < n[j]) {
        out.push_back({StructureViolation::Kind::kNoSplitIndex, i, j});
      }
    }
  }
  return out;
}

std::vector<StructureViolation> check_optimal_structure(const Instance& inst,
                                                        const OptimalSolution& sol) {
  return check_optimal_structure(inst, sol.u, sol.v);
}

}  // namespace lossnet
