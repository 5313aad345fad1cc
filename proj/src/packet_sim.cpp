#include "lossnet/packet_sim.hpp"

#include <cmath>
#include <functional>
#include <queue>

namespace lossnet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

double RandomStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RandomStream::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

SimOutcome simulate(const SimConfig& cfg) {
  const Instance& inst = cfg.instance;
  inst.validate();
  validate_profile(inst, cfg.profile);
  if (!(cfg.horizon > 0.0)) throw InvalidArgument("field 'horizon': must be > 0");
  if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction < 1.0)) {
    throw InvalidArgument("field 'warmup_fraction': must be in [0, 1)");
  }

  const std::size_t m = inst.m();
  const std::size_t classes = m * m;
  const double warmup = cfg.horizon * cfg.warmup_fraction;
  const double qbar = inst.relay_success();

  SimOutcome out;
  out.m = m;
  out.per_class.resize(classes);
  out.per_link.resize(m);

  std::vector<RandomStream> class_rng;
  std::vector<RandomStream> link_rng;
  class_rng.reserve(classes);
  link_rng.reserve(m);
  for (std::size_t c = 0; c < classes; ++c) class_rng.emplace_back(cfg.seed, c);
  for (std::size_t j = 0; j < m; ++j) link_rng.emplace_back(cfg.seed, classes + j);

  std::vector<double> class_rate(classes, 0.0);
  using Event = std::pair<double, std::size_t>;  // arrival time, class
  std::priority_queue<Event, std::vector<Event>, std::greater<>> arrivals;
  for (std::size_t c = 0; c < classes; ++c) {
    const int users = cfg.profile(c / m, c % m);
    if (users == 0) continue;
    class_rate[c] = users * inst.phi;
    arrivals.emplace(class_rng[c].exponential(class_rate[c]), c);
  }

  std::vector<double> busy_until(m, 0.0);
  std::uint64_t delivered = 0;
  while (!arrivals.empty()) {
    const auto [now, c] = arrivals.top();
    if (now > cfg.horizon) break;
    arrivals.pop();
    const SourceIndex origin = c / m;
    const SourceIndex link = c % m;
    const bool counted = now >= warmup;
    auto& counters = out.per_class[c];
    if (counted) ++counters.generated;

    const bool relayed = link != origin;
    if (relayed && class_rng[c].uniform() >= qbar) {
      if (counted) ++counters.sidelink_lost;
    } else {
      auto& lc = out.per_link[link];
      if (counted) ++lc.offered;
      if (now < busy_until[link]) {
        if (counted) {
          ++lc.blocked;
          ++counters.congestion_lost;
        }
      } else {
        busy_until[link] = now + link_rng[link].exponential(inst.mu);
        if (counted) {
          ++counters.delivered;
          ++delivered;
        }
      }
    }
    arrivals.emplace(now + class_rng[c].exponential(class_rate[c]), c);
  }

  for (auto& lc : out.per_link) {
    if (lc.offered == 0) continue;
    const double n = static_cast<double>(lc.offered);
    lc.empirical_block_prob = static_cast<double>(lc.blocked) / n;
    lc.std_err = std::sqrt(lc.empirical_block_prob * (1.0 - lc.empirical_block_prob) / n);
  }
  out.measured_time = cfg.horizon - warmup;
  out.empirical_tr = static_cast<double>(delivered) / out.measured_time;
  return out;
}

bool ValidationReport::all_pass() const {
  for (const auto& a : assertions) {
    if (!a.pass) return false;
  }
  return true;
}

ValidationReport validate_outcome(const Instance& inst, const RoutingProfile& prof,
                                  const SimOutcome& outcome, std::span<const double> t,
                                  double sigmas) {
  const std::size_t m = inst.m();
  if (outcome.m != m || t.size() != m) throw InvalidArgument("validate_outcome: size mismatch");
  ValidationReport report;
  auto check = [&](std::string name, double empirical, double expected, double se,
                   std::uint64_t samples) {
    Assertion a{std::move(name), empirical, expected, se, 0.0, true};
    if (samples > 0) {
      a.margin = sigmas * se - std::abs(empirical - expected);
      a.pass = a.margin >= 0.0;
    }
    report.assertions.push_back(std::move(a));
  };

  for (std::size_t j = 0; j < m; ++j) {
    const auto& lc = outcome.per_link[j];
    check("link " + std::to_string(j), lc.empirical_block_prob, t[j] / (t[j] + inst.mu),
          lc.std_err, lc.offered);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (prof(i, j) == 0) continue;
      const auto& cc = outcome.at(i, j);
      const double g = static_cast<double>(cc.generated);
      const double lost = static_cast<double>(cc.sidelink_lost + cc.congestion_lost);
      const double p = cc.generated ? lost / g : 0.0;
      const double se = cc.generated ? std::sqrt(p * (1.0 - p) / g) : 0.0;
      check("class " + std::to_string(i) + "->" + std::to_string(j), p,
            loss_rate(inst, t, i, j) / inst.phi, se, cc.generated);
    }
  }
  return report;
}

ValidationReport validate_analytics(const SimConfig& cfg, double sigmas) {
  const auto outcome = simulate(cfg);
  const auto t = traffic_rates(cfg.instance, cfg.profile);
  return validate_outcome(cfg.instance, cfg.profile, outcome, t, sigmas);
}

}  // namespace lossnet
