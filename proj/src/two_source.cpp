#include "lossnet/two_source.hpp"

#include <algorithm>
#include <cmath>

#include "lossnet/equilibrium.hpp"
#include "lossnet/optimizer.hpp"
#include "lossnet/parallel.hpp"

namespace lossnet::two_source {

const char* to_string(Case c) {
  switch (c) {
    case Case::k1a: return "1a";
    case Case::k1b: return "1b";
    case Case::k2: return "2";
    case Case::k3: return "3";
    case Case::k4: return "4";
  }
  return "?";
}

const char* to_string(Finding f) {
  switch (f) {
    case Finding::kPass: return "pass";
    case Finding::kFail: return "fail";
    case Finding::kNotApplicable: return "not-applicable";
  }
  return "?";
}

void require_two_source(const Instance& inst) {
  inst.validate();
  if (inst.m() != 2) throw InvalidArgument("two-source analysis needs m = 2");
  if (inst.user_counts[0] < inst.user_counts[1]) {
    throw InvalidArgument("two-source analysis needs n1 >= n2; canonicalize the instance first");
  }
}

namespace {

double threshold(const Instance& inst, int own_users, int other_users, int other_direct) {
  const double qbar = inst.relay_success();
  if (qbar <= 0.0) throw UndefinedThreshold("threshold undefined at q = 1");
  const double penalty = inst.q * inst.mu / inst.phi;
  return (penalty + other_direct * (1.0 + qbar * qbar) + (own_users + 1) * qbar -
          other_users * qbar * qbar) /
         (2.0 * qbar);
}

bool oracle_accepts(const Instance& inst, State s) {
  return is_nash_deviation_oracle(inst, to_profile(inst, s)).is_ne;
}

}  // namespace

double t1(const Instance& inst, int u2) {
  return threshold(inst, inst.user_counts.at(0), inst.user_counts.at(1), u2);
}

double t2(const Instance& inst, int u1) {
  return threshold(inst, inst.user_counts.at(1), inst.user_counts.at(0), u1);
}

RoutingProfile to_profile(const Instance& inst, State s) {
  const int n1 = inst.user_counts.at(0);
  const int n2 = inst.user_counts.at(1);
  if (s.u1 < 0 || s.u1 > n1 || s.u2 < 0 || s.u2 > n2) {
    throw InvalidArgument("two-source state (" + std::to_string(s.u1) + ", " +
                          std::to_string(s.u2) + ") outside [0, n1] x [0, n2]");
  }
  return RoutingProfile::from_rows({{s.u1, n1 - s.u1}, {n2 - s.u2, s.u2}});
}

State from_profile(const RoutingProfile& prof) {
  if (prof.m() != 2) throw InvalidArgument("from_profile: expected a 2x2 flow matrix");
  return {prof.direct(0), prof.direct(1)};
}

Verdict classify(const Instance& inst, State s) {
  require_two_source(inst);
  const int n1 = inst.user_counts[0];
  const int n2 = inst.user_counts[1];
  if (s.u1 < 0 || s.u1 > n1 || s.u2 < 0 || s.u2 > n2) {
    throw InvalidArgument("two-source state outside [0, n1] x [0, n2]");
  }
  const double qbar = inst.relay_success();
  const bool thresholds = qbar > 0.0;

  Verdict v;
  if (thresholds) {
    v.t1_at_u2 = t1(inst, s.u2);
    v.t2_at_u1 = t2(inst, s.u1);
  }

  if (s.u1 == n1 && s.u2 < n2) {
    v.case_id = Case::k1a;
    v.is_ne = false;
  } else if (s.u1 == 0 && s.u2 > 0) {
    v.case_id = Case::k1b;
    v.is_ne = false;
  } else if (s.u1 == n1 && s.u2 == n2) {
    v.case_id = Case::k4;
    v.is_ne = n1 * qbar <= inst.q * inst.mu / inst.phi + n2 + qbar + kTolerance;
  } else if (s.u2 < n2) {
    v.case_id = Case::k2;
    v.is_ne = thresholds ? (s.u1 >= *v.t1_at_u2 - 1.0 - kTolerance &&
                            s.u2 >= *v.t2_at_u1 - 1.0 - kTolerance)
                         : oracle_accepts(inst, s);
  } else {
    v.case_id = Case::k3;
    v.is_ne = thresholds ? (s.u1 >= *v.t1_at_u2 - 1.0 - kTolerance &&
                            s.u1 <= *v.t1_at_u2 + kTolerance)
                         : oracle_accepts(inst, s);
  }
  return v;
}

std::vector<State> scan_nash(const Instance& inst) {
  require_two_source(inst);
  const int n1 = inst.user_counts[0];
  const int n2 = inst.user_counts[1];
  std::vector<std::vector<State>> rows(static_cast<std::size_t>(n1) + 1);
  parallel_for(rows.size(), [&](std::size_t u1) {
    for (int u2 = 0; u2 <= n2; ++u2) {
      const State s{static_cast<int>(u1), u2};
      if (classify(inst, s).is_ne) rows[u1].push_back(s);
    }
  });
  std::vector<State> out;
  for (const auto& row : rows) out.insert(out.end(), row.begin(), row.end());
  return out;
}

State construct_existence_ne(const Instance& inst) {
  require_two_source(inst);
  const int n1 = inst.user_counts[0];
  const int n2 = inst.user_counts[1];
  const double qbar = inst.relay_success();
  if (n1 * qbar <= inst.q * inst.mu / inst.phi + n2 + qbar + kTolerance) return {n1, n2};
  // Here qbar > 0 and t1(n2) lies strictly inside (1, n1).
  const double t = t1(inst, n2);
  int u1 = static_cast<int>(std::floor(t + kTolerance));
  if (u1 < t - 1.0 - kTolerance) u1 = static_cast<int>(std::ceil(t - 1.0 - kTolerance));
  u1 = std::clamp(u1, 1, n1 - 1);
  return {u1, n2};
}

CorollaryFindings check_corollaries(const Instance& inst) {
  require_two_source(inst);
  const int n1 = inst.user_counts[0];
  const int n2 = inst.user_counts[1];
  const double q = inst.q;
  const double qbar = inst.relay_success();
  const double penalty = q * inst.mu / inst.phi;
  auto verdict = [](bool ok) { return ok ? Finding::kPass : Finding::kFail; };

  CorollaryFindings out;
  const State all_direct{n1, n2};
  const double tr_opt = solve_optimal(inst).tr;
  const double tr_all_direct = total_traffic(inst, to_profile(inst, all_direct));
  if (tr_all_direct >= tr_opt - kTolerance * std::max(1.0, tr_opt)) {
    out.optimal_all_direct_is_ne = verdict(classify(inst, all_direct).is_ne);
  }

  const bool zero_is_ne = classify(inst, {0, 0}).is_ne;
  const bool exact_condition =
      (n1 == n2 + 1 && q <= 0.0) ||
      (n1 == n2 && n1 * q * qbar <= qbar - penalty + kTolerance);
  out.all_relay_iff = verdict(zero_is_ne == exact_condition);
  if (n1 == n2 && n1 * (1.0 - qbar * qbar) <= qbar - penalty + kTolerance) {
    out.all_relay_sufficient = verdict(zero_is_ne);
  }

  const int n = n1 + n2;
  if (n1 * qbar < penalty + n2 + qbar - kTolerance && q > 2.0 / n + kTolerance) {
    const auto states = scan_nash(inst);
    out.unique_all_direct = verdict(states.size() == 1 && states.front() == all_direct);
  }
  return out;
}

}  // namespace lossnet::two_source
