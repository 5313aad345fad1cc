#pragma once

// Pure Nash equilibria of the routing game: a closed-form check on the
// aggregate loads, a definitional unilateral-deviation check, exhaustive
// enumeration, best-response dynamics and price-of-anarchy reporting.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lossnet/model.hpp"

namespace lossnet {

struct NeViolation {
  enum class Kind {
    kDirectToRelay,  // a direct-path user gains by relaying
    kRelayToDirect,  // a relayed user gains by going direct
    kRelayToRelay,   // a relayed user gains by switching relay
  };
  Kind kind;
  SourceIndex source;  // origin of the deviating user
  SourceIndex relay;   // route it currently uses (closed form: relay l, or i* for direct users)
  double lhs;
  double rhs;          // violated as lhs > rhs + kTolerance
};

const char* to_string(NeViolation::Kind kind);

struct NeVerdict {
  bool is_ne = true;
  SourceIndex i_star = 0;  // argmin of u_i + v_i (1 - q), lowest index on ties
  std::vector<NeViolation> violations;
};

// Closed-form test on the normalized loads a_i = u_i + v_i (1 - q):
//  (i)  every source with u_i > 0:  (1-q) a_i <= a_{i*} + (1-q) + q mu / phi
//  (ii) every used relay i -> l:    a_l <= min{(1-q)(a_i + 1) - q mu / phi, a_{i*} + (1-q)}
NeVerdict is_nash_characterization(const Instance& inst, const RoutingProfile& prof);

// Moves one user of every occupied class to every other route and compares
// its loss rate before and after.
NeVerdict is_nash_deviation_oracle(const Instance& inst, const RoutingProfile& prof);

// Loss rate a user of `origin` currently on `from` would see after moving to
// `to`, given the current link rates `t`.
double deviation_loss(const Instance& inst, std::span<const double> t, SourceIndex origin,
                      SourceIndex from, SourceIndex to);

struct NashEntry {
  RoutingProfile profile;
  TrafficSummary summary;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

// Every profile accepted by the closed-form test, ordered lexicographically
// by flattened flow. Throws CapacityExceeded when the profile space is larger
// than `cap`. The result may be empty.
std::vector<NashEntry> enumerate_nash(const Instance& inst,
                                      std::uint64_t cap = kDefaultEnumerationCap);

struct DynamicsResult {
  enum class Outcome { kConverged, kCycle, kBudgetExhausted };
  RoutingProfile profile;
  int rounds = 0;
  int moves = 0;
  Outcome outcome = Outcome::kBudgetExhausted;
};

const char* to_string(DynamicsResult::Outcome outcome);

// Asynchronous best responses. Each round visits all classes in a seeded
// random order and moves one user of each occupied class to its best route
// when that improves its loss rate by more than kTolerance (ties go to the
// lowest route index). Stops after a round without moves, when a profile
// seen at the end of an earlier round recurs, or after max_rounds rounds.
DynamicsResult best_response_dynamics(const Instance& inst, const RoutingProfile& start,
                                      int max_rounds, std::uint64_t seed);

struct TrafficBounds {
  double opt_upper = 0.0;               // mu m (1 - mu / (n_1 phi + mu))
  std::optional<double> ne_lower;       // mu (m - m mu / (z phi + mu)), when z > 0
};

// z = min{n_m, n / (4m) - (1 - q) - q mu / phi}
double anarchy_z(const Instance& inst);
TrafficBounds ne_traffic_bounds(const Instance& inst);

struct PoaReport {
  double tr_opt = 0.0;
  std::optional<double> tr_worst_ne;
  std::optional<double> poa_exact;  // unset when no equilibrium was found
  double z = 0.0;
  std::optional<double> poa_bound;  // 1 + n_1 mu / (n_1 z phi + z mu), when z > 0
  std::uint64_t ne_count = 0;
  std::optional<RoutingProfile> worst_ne;
};

// Exact PoA. Two-source instances use the aggregate scan; larger ones
// enumerate all profiles (throws CapacityExceeded above `cap`).
PoaReport poa_report(const Instance& inst, std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace lossnet
