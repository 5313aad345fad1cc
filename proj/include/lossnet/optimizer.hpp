#pragma once

// Traffic-maximizing allocation: the threshold/balancing search, an
// exhaustive oracle, and checks of the structure every optimum must have.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lossnet/model.hpp"

namespace lossnet {

struct OptimalSolution {
  std::vector<int> u;  // direct-path users per source
  std::vector<int> v;  // relayed users arriving per source
  RoutingProfile profile;
  double tr = 0.0;
  // Largest split index (1-based, in non-increasing n order) such that
  // sources at or before it receive nobody and sources after it send nobody.
  std::size_t threshold = 0;
  int relayed = 0;  // number of users on an indirect path
};

// Searches every split index and every number of relayed users, balancing
// direct users on the sending side and link rates on the receiving side.
// O(m^2 n) time.
OptimalSolution solve_optimal(const Instance& inst);

inline constexpr std::uint64_t kDefaultBruteForceCap = 10'000'000;

// Exhaustive maximization over every flow matrix. Among maximizers (within
// 1e-12 relative) the one with fewest relayed users wins, then the first in
// lexicographic order. Throws CapacityExceeded above `cap` profiles.
OptimalSolution brute_force_optimal(const Instance& inst,
                                    std::uint64_t cap = kDefaultBruteForceCap);

struct StructureViolation {
  enum class Kind {
    kSendsAndReceives,  // u_i < n_i while v_i > 0
    kNoSplitIndex,      // v_i > 0 and u_j < n_j although n_i >= n_j
  };
  Kind kind;
  SourceIndex i;
  SourceIndex j;  // equal to i for kSendsAndReceives
  std::string describe() const;
};

std::vector<StructureViolation> check_optimal_structure(const Instance& inst,
                                                        std::span<const int> u,
                                                        std::span<const int> v);
std::vector<StructureViolation> check_optimal_structure(const Instance& inst,
                                                        const OptimalSolution& sol);

// Builds the solution record (aggregates, threshold, TR) for a profile.
OptimalSolution describe_solution(const Instance& inst, const RoutingProfile& prof);

}  // namespace lossnet
