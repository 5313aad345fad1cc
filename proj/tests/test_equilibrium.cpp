#include <doctest.h>

#include <random>

#include "lossnet/equilibrium.hpp"
#include "lossnet/optimizer.hpp"
#include "test_support.hpp"

using namespace lossnet;
using lossnet::testing::make_instance;

TEST_CASE("all-direct equilibrium for n = (3, 2), q = 0.5") {
  const auto inst = make_instance({3, 2}, 1, 1, 0.5);
  const auto p = RoutingProfile::all_direct(inst);
  CHECK(is_nash_characterization(inst, p).is_ne);
  CHECK(is_nash_deviation_oracle(inst, p).is_ne);

  const auto one_off = RoutingProfile::from_rows({{3, 0}, {1, 1}});
  CHECK_FALSE(is_nash_characterization(inst, one_off).is_ne);
  CHECK_FALSE(is_nash_deviation_oracle(inst, one_off).is_ne);

  const auto ne = enumerate_nash(inst);
  REQUIRE(ne.size() == 1);
  CHECK(ne.front().profile == p);
}

TEST_CASE("trivial and degenerate cases") {
  const auto single = make_instance({4}, 1, 1, 0.3);
  CHECK(is_nash_characterization(single, RoutingProfile::all_direct(single)).is_ne);
  CHECK(is_nash_deviation_oracle(single, RoutingProfile::all_direct(single)).is_ne);
  CHECK(enumerate_nash(single).size() == 1);

  const auto pair = make_instance({1, 1}, 1, 1, 1.0);
  CHECK(is_nash_deviation_oracle(pair, RoutingProfile::all_direct(pair)).is_ne);
  CHECK(is_nash_characterization(pair, RoutingProfile::all_direct(pair)).is_ne);
}

TEST_CASE("frozen equilibrium sets") {
  // Exhaustive exact-rational enumeration with unilateral deviations.
  const auto inst = make_instance({2, 2}, 1, 1, 0.05);
  const auto ne = enumerate_nash(inst);
  REQUIRE(ne.size() == 3);
  CHECK(ne[0].profile == RoutingProfile::from_rows({{0, 2}, {2, 0}}));
  CHECK(ne[1].profile == RoutingProfile::from_rows({{1, 1}, {1, 1}}));
  CHECK(ne[2].profile == RoutingProfile::from_rows({{2, 0}, {0, 2}}));
  CHECK(std::abs(ne[0].summary.total_traffic - 1.3103448275862069) <= 1e-12);
  CHECK(std::abs(ne[1].summary.total_traffic - 1.3220338983050848) <= 1e-12);
  CHECK(std::abs(ne[2].summary.total_traffic - 1.3333333333333333) <= 1e-12);
}

TEST_CASE("closed form agrees with deviations, exhaustive small instances") {
  const double qs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  const double ratios[] = {0.5, 1.0, 3.0};
  std::size_t checked = 0;
  for (int a = 1; a <= 4; ++a)
    for (int b = 1; b <= a; ++b)
      for (int c = 0; c <= b; ++c)
        for (double q : qs)
          for (double r : ratios) {
            std::vector<int> n{a, b};
            if (c > 0) n.push_back(c);
            const auto inst = make_instance(n, 1.0, r, q);
            for_each_profile(inst, [&](const RoutingProfile& p) {
              const bool closed = is_nash_characterization(inst, p).is_ne;
              const bool dev = is_nash_deviation_oracle(inst, p).is_ne;
              REQUIRE(closed == dev);
              ++checked;
              return true;
            });
          }
  CHECK(checked > 10000);
}

TEST_CASE("closed form agrees with deviations, random samples") {
  std::mt19937_64 rng(17);
  int equilibria = 0;
  for (int k = 0; k < 5000; ++k) {
    const auto inst = lossnet::testing::random_instance(rng, 4, 12, 2);
    const auto p = lossnet::testing::random_profile(rng, inst);
    const bool closed = is_nash_characterization(inst, p).is_ne;
    REQUIRE(closed == is_nash_deviation_oracle(inst, p).is_ne);
    equilibria += closed;
  }
  CHECK(equilibria > 0);
}

TEST_CASE("argmin coinciding with the deviating source or its relay") {
  // i* equals the relay used.
  const auto inst = make_instance({4, 1, 3}, 1, 1, 0.1);
  const auto p = RoutingProfile::from_rows({{3, 1, 0}, {0, 1, 0}, {0, 0, 3}});
  const auto v = is_nash_characterization(inst, p);
  CHECK(v.i_star == 1);
  CHECK(v.is_ne == is_nash_deviation_oracle(inst, p).is_ne);

  // i* equals the origin of a relayed user.
  const auto p2 = RoutingProfile::from_rows({{4, 0, 0}, {0, 0, 1}, {0, 0, 3}});
  const auto v2 = is_nash_characterization(inst, p2);
  CHECK(v2.i_star == 1);
  CHECK_FALSE(v2.is_ne);
  CHECK_FALSE(is_nash_deviation_oracle(inst, p2).is_ne);

  // Exhaustive over all profiles whose argmin hits an endpoint of a relay.
  std::mt19937_64 rng(8);
  int hits = 0;
  for (int k = 0; k < 300; ++k) {
    const auto r = lossnet::testing::random_instance(rng, 3, 5, 3);
    for_each_profile(r, [&](const RoutingProfile& q) {
      const auto cv = is_nash_characterization(r, q);
      bool endpoint = false;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t l = 0; l < 3; ++l)
          endpoint |= q.uses_relay(i, l) && (cv.i_star == i || cv.i_star == l);
      if (endpoint) {
        ++hits;
        REQUIRE(cv.is_ne == is_nash_deviation_oracle(r, q).is_ne);
      }
      return true;
    });
  }
  CHECK(hits > 1000);
}

TEST_CASE("violation kinds") {
  const auto inst = make_instance({6, 1}, 1, 1, 0.0);
  const auto v = is_nash_deviation_oracle(inst, RoutingProfile::all_direct(inst));
  REQUIRE_FALSE(v.is_ne);
  CHECK(v.violations.front().kind == NeViolation::Kind::kDirectToRelay);
  const auto back = is_nash_deviation_oracle(inst, RoutingProfile::from_rows({{0, 6}, {0, 1}}));
  REQUIRE_FALSE(back.is_ne);
  CHECK(back.violations.front().kind == NeViolation::Kind::kRelayToDirect);
  CHECK(std::string(to_string(NeViolation::Kind::kRelayToRelay)) == "relay-to-relay");
}

TEST_CASE("enumeration cap") {
  const auto inst = make_instance({30, 30, 30, 30}, 1, 1, 0.5);
  CHECK_THROWS_AS(enumerate_nash(inst, 1000), CapacityExceeded);
  CHECK_THROWS_AS(poa_report(inst, 1000), CapacityExceeded);
}

TEST_CASE("enumeration is sorted and complete") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 40; ++k) {
    const auto inst = lossnet::testing::random_instance(rng, 3, 5, 2);
    const auto ne = enumerate_nash(inst);
    for (std::size_t i = 1; i < ne.size(); ++i) CHECK(ne[i - 1].profile < ne[i].profile);
    std::size_t expected = 0;
    for_each_profile(inst, [&](const RoutingProfile& p) {
      expected += is_nash_deviation_oracle(inst, p).is_ne;
      return true;
    });
    CHECK(ne.size() == expected);
  }
}

TEST_CASE("best-response dynamics") {
  const auto inst = make_instance({3, 2}, 1, 1, 0.5);
  const auto ne = RoutingProfile::all_direct(inst);
  const auto fixed = best_response_dynamics(inst, ne, 50, 1);
  CHECK(fixed.outcome == DynamicsResult::Outcome::kConverged);
  CHECK(fixed.rounds == 1);
  CHECK(fixed.moves == 0);

  std::mt19937_64 rng(31);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto start = lossnet::testing::random_profile(rng, inst);
    const auto r = best_response_dynamics(inst, start, 200, seed);
    CHECK(r.outcome == DynamicsResult::Outcome::kConverged);
    CHECK(r.profile == ne);
  }

  for (int k = 0; k < 30; ++k) {
    const auto r_inst = lossnet::testing::random_instance(rng, 4, 10, 2);
    const auto start = lossnet::testing::random_profile(rng, r_inst);
    const auto a = best_response_dynamics(r_inst, start, 300, k);
    const auto b = best_response_dynamics(r_inst, start, 300, k);
    CHECK(a.profile == b.profile);
    CHECK(a.rounds == b.rounds);
    if (a.outcome == DynamicsResult::Outcome::kConverged) {
      CHECK(is_nash_deviation_oracle(r_inst, a.profile).is_ne);
    }
  }
  CHECK(std::string(to_string(DynamicsResult::Outcome::kCycle)) == "cycle");
}

TEST_CASE("price of anarchy report") {
  const auto inst = make_instance({3, 2}, 1, 1, 0.5);
  const auto r = poa_report(inst);
  CHECK(r.z == doctest::Approx(-0.375));
  CHECK_FALSE(r.poa_bound.has_value());
  CHECK(ne_traffic_bounds(inst).opt_upper == doctest::Approx(1.5));
  CHECK_FALSE(ne_traffic_bounds(inst).ne_lower.has_value());
  REQUIRE(r.poa_exact.has_value());
  CHECK(*r.poa_exact >= 1.0);

  std::mt19937_64 rng(41);
  for (int k = 0; k < 50; ++k) {
    auto q1 = lossnet::testing::random_instance(rng, 3, 6, 2);
    q1.q = 1.0;
    const auto rep = poa_report(q1);
    REQUIRE(rep.poa_exact.has_value());
    CHECK(*rep.poa_exact == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Two-source path and the general enumeration agree, including when the
  // larger source is listed second.
  for (int k = 0; k < 40; ++k) {
    const auto two = lossnet::testing::random_instance(rng, 2, 8, 2);
    const auto fast = poa_report(two);
    double worst = std::numeric_limits<double>::infinity();
    const auto ne = enumerate_nash(two);
    for (const auto& e : ne) worst = std::min(worst, e.summary.total_traffic);
    CHECK(fast.ne_count == ne.size());
    REQUIRE(fast.tr_worst_ne.has_value());
    CHECK(*fast.tr_worst_ne == doctest::Approx(worst).epsilon(1e-12));
    REQUIRE(fast.worst_ne.has_value());
    CHECK(is_nash_deviation_oracle(two, *fast.worst_ne).is_ne);
  }
}
