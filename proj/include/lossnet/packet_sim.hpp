#pragma once

// Packet-level Monte Carlo of the loss network: Poisson arrivals per route
// class, Bernoulli sidelink loss and bufferless direct links with
// exponential transmission times.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lossnet/model.hpp"

namespace lossnet {

// One reproducible random stream; `stream` selects an independent substream
// of `seed`.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);
  double uniform();  // [0, 1), 53 bits
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

struct SimConfig {
  Instance instance;
  RoutingProfile profile;
  double horizon = 1e6;
  std::uint64_t seed = 1;
  // Leading share of the horizon excluded from all counters.
  double warmup_fraction = 0.01;
};

struct ClassCounters {
  std::uint64_t generated = 0;
  std::uint64_t sidelink_lost = 0;
  std::uint64_t congestion_lost = 0;
  std::uint64_t delivered = 0;
};

struct LinkCounters {
  std::uint64_t offered = 0;
  std::uint64_t blocked = 0;
  double empirical_block_prob = 0.0;  // 0 when nothing was offered
  double std_err = 0.0;               // sqrt(p (1 - p) / offered)
};

struct SimOutcome {
  std::size_t m = 0;
  std::vector<ClassCounters> per_class;  // m*m, origin * m + relay
  std::vector<LinkCounters> per_link;
  double measured_time = 0.0;
  double empirical_tr = 0.0;  // delivered packets per unit of measured time

  const ClassCounters& at(SourceIndex origin, SourceIndex relay) const {
    return per_class[origin * m + relay];
  }
};

// Deterministic for a given config.
SimOutcome simulate(const SimConfig& cfg);

struct Assertion {
  std::string name;  // "link i" or "class i->j"
  double empirical = 0.0;
  double expected = 0.0;
  double std_err = 0.0;
  double margin = 0.0;  // sigmas * std_err - |empirical - expected|
  bool pass = false;
};

struct ValidationReport {
  std::vector<Assertion> assertions;
  bool all_pass() const;
};

// Compares an outcome with the blocking and loss probabilities implied by
// the link rates `t` (normally traffic_rates of the simulated profile).
ValidationReport validate_outcome(const Instance& inst, const RoutingProfile& prof,
                                  const SimOutcome& outcome, std::span<const double> t,
                                  double sigmas);

// Runs the simulation and validates it against the analytic rates.
ValidationReport validate_analytics(const SimConfig& cfg, double sigmas);

}  // namespace lossnet
