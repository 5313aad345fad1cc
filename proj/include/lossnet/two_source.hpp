#pragma once

// Closed-form analysis of the two-source game. States are the direct-path
// counts (u1, u2); every function here expects n1 >= n2.

#include <compare>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lossnet/model.hpp"

namespace lossnet::two_source {

// The thresholds divide by 2 (1 - q) and do not exist at q = 1.
class UndefinedThreshold : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct State {
  int u1 = 0;
  int u2 = 0;
  auto operator<=>(const State&) const = default;
};

enum class Case { k1a, k1b, k2, k3, k4 };
const char* to_string(Case c);

struct Verdict {
  Case case_id = Case::k4;
  bool is_ne = false;
  std::optional<double> t1_at_u2;  // unset when q = 1
  std::optional<double> t2_at_u1;
};

// Throws InvalidArgument unless m = 2 and n1 >= n2.
void require_two_source(const Instance& inst);

// Largest u1 at which a direct user of source 1 does not want to relay.
double t1(const Instance& inst, int u2);
// Mirror image for source 2.
double t2(const Instance& inst, int u1);

RoutingProfile to_profile(const Instance& inst, State s);
State from_profile(const RoutingProfile& prof);

// Case partition of [0, n1] x [0, n2]:
//   1a  u1 = n1, u2 < n2          never an equilibrium
//   1b  u1 = 0,  u2 > 0           never an equilibrium
//   2   u1 < n1, u2 < n2          u1 >= t1(u2) - 1 and u2 >= t2(u1) - 1
//   3   0 < u1 < n1, u2 = n2      t1(n2) - 1 <= u1 <= t1(n2)
//   4   u1 = n1, u2 = n2          n1 (1-q) <= q mu / phi + n2 + (1-q)
// At q = 1 cases 2 and 3 are settled by the deviation oracle.
Verdict classify(const Instance& inst, State s);

// All equilibrium states ordered by (u1, u2). O(n1 n2).
std::vector<State> scan_nash(const Instance& inst);

// The all-direct state when it is an equilibrium, otherwise
// (floor(t1(n2)), n2) clamped to [1, n1 - 1].
State construct_existence_ne(const Instance& inst);

enum class Finding { kPass, kFail, kNotApplicable };
const char* to_string(Finding f);

struct CorollaryFindings {
  // All-direct optimal implies all-direct is an equilibrium.
  Finding optimal_all_direct_is_ne = Finding::kNotApplicable;
  // (0, 0) is an equilibrium iff (n1 = n2 + 1 and q = 0) or
  // (n1 = n2 and n1 q (1-q) <= (1-q) - q mu / phi).
  Finding all_relay_iff = Finding::kNotApplicable;
  // n1 = n2 and n1 (1 - (1-q)^2) <= (1-q) - q mu / phi implies (0, 0) is an
  // equilibrium. A weaker, sufficient-only form of the condition above.
  Finding all_relay_sufficient = Finding::kNotApplicable;
  // n1 (1-q) < q mu / phi + n2 + (1-q) and q > 2 / n imply the all-direct
  // state is the only equilibrium.
  Finding unique_all_direct = Finding::kNotApplicable;
};

CorollaryFindings check_corollaries(const Instance& inst);

}  // namespace lossnet::two_source
