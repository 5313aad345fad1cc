#include "lossnet/equilibrium.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_set>

#include "lossnet/optimizer.hpp"
#include "lossnet/parallel.hpp"
#include "lossnet/two_source.hpp"

namespace lossnet {

const char* to_string(NeViolation::Kind kind) {
  switch (kind) {
    case NeViolation::Kind::kDirectToRelay: return "direct-to-relay";
    case NeViolation::Kind::kRelayToDirect: return "relay-to-direct";
    case NeViolation::Kind::kRelayToRelay: return "relay-to-relay";
  }
  return "unknown";
}

const char* to_string(DynamicsResult::Outcome outcome) {
  switch (outcome) {
    case DynamicsResult::Outcome::kConverged: return "converged";
    case DynamicsResult::Outcome::kCycle: return "cycle";
    case DynamicsResult::Outcome::kBudgetExhausted: return "budget-exhausted";
  }
  return "unknown";
}

namespace {

std::vector<double> normalized_loads(const Instance& inst, const RoutingProfile& prof) {
  const double qbar = inst.relay_success();
  std::vector<double> a(inst.m());
  for (std::size_t i = 0; i < inst.m(); ++i) a[i] = prof.direct(i) + prof.incoming(i) * qbar;
  return a;
}

SourceIndex argmin_index(const std::vector<double>& a) {
  return static_cast<SourceIndex>(std::min_element(a.begin(), a.end()) - a.begin());
}

}  // namespace

NeVerdict is_nash_characterization(const Instance& inst, const RoutingProfile& prof) {
  validate_profile(inst, prof);
  NeVerdict verdict;
  const std::size_t m = inst.m();
  if (m == 1) return verdict;

  const double qbar = inst.relay_success();
  const double penalty = inst.q * inst.mu / inst.phi;
  const auto a = normalized_loads(inst, prof);
  const SourceIndex star = argmin_index(a);
  verdict.i_star = star;

  for (std::size_t i = 0; i < m; ++i) {
    if (prof.direct(i) > 0) {
      const double lhs = qbar * a[i];
      const double rhs = a[star] + qbar + penalty;
      if (lhs > rhs + kTolerance) {
        verdict.violations.push_back({NeViolation::Kind::kDirectToRelay, i, star, lhs, rhs});
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < m; ++l) {
      if (!prof.uses_relay(i, l)) continue;
      const double go_direct = qbar * (a[i] + 1.0) - penalty;
      const double switch_relay = a[star] + qbar;
      if (a[l] > go_direct + kTolerance) {
        verdict.violations.push_back({NeViolation::Kind::kRelayToDirect, i, l, a[l], go_direct});
      }
      if (a[l] > switch_relay + kTolerance) {
        verdict.violations.push_back({NeViolation::Kind::kRelayToRelay, i, l, a[l], switch_relay});
      }
    }
  }
  verdict.is_ne = verdict.violations.empty();
  return verdict;
}

double deviation_loss(const Instance& inst, std::span<const double> t, SourceIndex origin,
                      SourceIndex from, SourceIndex to) {
  const double relayed = inst.relay_success() * inst.phi;
  std::vector<double> moved(t.begin(), t.end());
  moved[from] -= from == origin ? inst.phi : relayed;
  moved[to] += to == origin ? inst.phi : relayed;
  return loss_rate(inst, moved, origin, to);
}

NeVerdict is_nash_deviation_oracle(const Instance& inst, const RoutingProfile& prof) {
  validate_profile(inst, prof);
  NeVerdict verdict;
  const std::size_t m = inst.m();
  verdict.i_star = argmin_index(normalized_loads(inst, prof));
  const auto t = traffic_rates(inst, prof);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t r = 0; r < m; ++r) {
      if (prof(i, r) == 0) continue;
      const double current = loss_rate(inst, t, i, r);
      for (std::size_t alt = 0; alt < m; ++alt) {
        if (alt == r) continue;
        const double deviated = deviation_loss(inst, t, i, r, alt);
        if (current > deviated + kTolerance) {
          const auto kind = r == i     ? NeViolation::Kind::kDirectToRelay
                            : alt == i ? NeViolation::Kind::kRelayToDirect
                                       : NeViolation::Kind::kRelayToRelay;
          verdict.violations.push_back({kind, i, r, current, deviated});
        }
      }
    }
  }
  verdict.is_ne = verdict.violations.empty();
  return verdict;
}

std::vector<NashEntry> enumerate_nash(const Instance& inst, std::uint64_t cap) {
  inst.validate();
  const std::uint64_t count = profile_count(inst);
  if (count > cap) {
    throw CapacityExceeded("enumerate_nash: " +
                               (count == std::numeric_limits<std::uint64_t>::max()
                                    ? std::string("more than 2^64")
                                    : std::to_string(count)) +
                               " profiles exceed the cap of " + std::to_string(cap),
                           count, cap);
  }
  const std::size_t m = inst.m();
  std::vector<std::vector<std::vector<int>>> rows(m);
  for (std::size_t i = 0; i < m; ++i) rows[i] = compositions(inst.user_counts[i], m);

  // One work item per first-row split; later rows are walked by an odometer.
  std::vector<std::vector<NashEntry>> found(rows[0].size());
  parallel_for(rows[0].size(), [&](std::size_t head) {
    RoutingProfile prof(m);
    std::vector<std::size_t> odometer(m, 0);
    odometer[0] = head;
    auto load_row = [&](std::size_t i) {
      for (std::size_t j = 0; j < m; ++j) prof(i, j) = rows[i][odometer[i]][j];
    };
    for (std::size_t i = 0; i < m; ++i) load_row(i);
    while (true) {
      if (is_nash_characterization(inst, prof).is_ne) {
        found[head].push_back({prof, summarize(inst, prof)});
      }
      std::size_t i = m;
      bool advanced = false;
      while (i > 1) {
        --i;
        if (++odometer[i] < rows[i].size()) {
          load_row(i);
          advanced = true;
          break;
        }
        odometer[i] = 0;
        load_row(i);
      }
      if (!advanced) break;
    }
  });

  std::vector<NashEntry> out;
  for (auto& part : found) {
    for (auto& e : part) out.push_back(std::move(e));
  }
  return out;
}

DynamicsResult best_response_dynamics(const Instance& inst, const RoutingProfile& start,
                                      int max_rounds, std::uint64_t seed) {
  validate_profile(inst, start);
  const std::size_t m = inst.m();
  DynamicsResult result;
  result.profile = start;
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> classes(m * m);
  std::iota(classes.begin(), classes.end(), std::size_t{0});
  std::unordered_set<RoutingProfile, RoutingProfileHash> seen{start};

  for (int round = 1; round <= max_rounds; ++round) {
    result.rounds = round;
    std::shuffle(classes.begin(), classes.end(), rng);
    bool moved = false;
    for (std::size_t cls : classes) {
      const SourceIndex origin = cls / m;
      const SourceIndex route = cls % m;
      if (result.profile(origin, route) == 0) continue;
      const auto t = traffic_rates(inst, result.profile);
      const double current = loss_rate(inst, t, origin, route);
      std::optional<SourceIndex> best_route;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t alt = 0; alt < m; ++alt) {
        if (alt == route) continue;
        const double lr = deviation_loss(inst, t, origin, route, alt);
        if (lr < best - kTolerance) {
          best = lr;
          best_route = alt;
        }
      }
      if (best_route && best < current - kTolerance) {
        result.profile.move_user(origin, route, *best_route);
        ++result.moves;
        moved = true;
      }
    }
    if (!moved) {
      result.outcome = DynamicsResult::Outcome::kConverged;
      return result;
    }
    if (!seen.insert(result.profile).second) {
      result.outcome = DynamicsResult::Outcome::kCycle;
      return result;
    }
  }
  result.outcome = DynamicsResult::Outcome::kBudgetExhausted;
  return result;
}

double anarchy_z(const Instance& inst) {
  const double m = static_cast<double>(inst.m());
  const double spread = inst.total_users() / (4.0 * m) - inst.relay_success() -
                        inst.q * inst.mu / inst.phi;
  return std::min(static_cast<double>(inst.min_users()), spread);
}

TrafficBounds ne_traffic_bounds(const Instance& inst) {
  inst.validate();
  const double m = static_cast<double>(inst.m());
  const double mu = inst.mu;
  TrafficBounds b;
  b.opt_upper = mu * m * (1.0 - mu / (inst.max_users() * inst.phi + mu));
  const double z = anarchy_z(inst);
  if (z > 0.0) b.ne_lower = mu * (m - m * mu / (z * inst.phi + mu));
  return b;
}

PoaReport poa_report(const Instance& inst, std::uint64_t cap) {
  inst.validate();
  PoaReport report;
  report.tr_opt = solve_optimal(inst).tr;
  report.z = anarchy_z(inst);
  if (report.z > 0.0) {
    const double n1 = inst.max_users();
    report.poa_bound = 1.0 + n1 * inst.mu / (n1 * report.z * inst.phi + report.z * inst.mu);
  }

  auto consider = [&](const RoutingProfile& prof, double tr) {
    ++report.ne_count;
    if (!report.tr_worst_ne || tr < *report.tr_worst_ne) {
      report.tr_worst_ne = tr;
      report.worst_ne = prof;
    }
  };

  if (inst.m() == 2) {
    const auto canon = canonicalize(inst);
    for (const auto& s : two_source::scan_nash(canon.instance)) {
      const auto prof = two_source::to_profile(canon.instance, s);
      consider(prof.relabelled(canon.order), total_traffic(canon.instance, prof));
    }
  } else {
    for (const auto& e : enumerate_nash(inst, cap)) consider(e.profile, e.summary.total_traffic);
  }
  if (report.tr_worst_ne) report.poa_exact = report.tr_opt / *report.tr_worst_ne;
  return report;
}

}  // namespace lossnet
