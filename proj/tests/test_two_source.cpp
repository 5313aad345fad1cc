#include <doctest.h>

#include <algorithm>
#include <random>

#include "lossnet/equilibrium.hpp"
#include "lossnet/optimizer.hpp"
#include "lossnet/two_source.hpp"
#include "test_support.hpp"

using namespace lossnet;
using namespace lossnet::two_source;
using lossnet::testing::make_instance;

namespace {

Instance random_pair(std::mt19937_64& rng, int max_n) {
  auto inst = lossnet::testing::random_instance(rng, 2, max_n, 2);
  std::sort(inst.user_counts.rbegin(), inst.user_counts.rend());
  return inst;
}

}  // namespace

TEST_CASE("thresholds") {
  const auto inst = make_instance({3, 2}, 1, 1, 0.5);
  CHECK(t1(inst, 2) == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(t2(inst, 3) == doctest::Approx(5.0).epsilon(1e-12));

  const auto flat = make_instance({7, 7}, 1, 2, 0.0);
  for (int u = 0; u <= 7; ++u) {
    CHECK(t1(flat, u) == doctest::Approx(u + 0.5).epsilon(1e-12));
    CHECK(t1(flat, u) == t2(flat, u));
  }
  const auto sym = make_instance({5, 5}, 1.3, 2.1, 0.37);
  for (int u = 0; u <= 5; ++u) CHECK(t1(sym, u) == t2(sym, u));

  CHECK_THROWS_AS(t1(make_instance({3, 2}, 1, 1, 1.0), 1), UndefinedThreshold);
  CHECK_THROWS_AS(t2(make_instance({3, 2}, 1, 1, 1.0), 1), UndefinedThreshold);
}

TEST_CASE("all-direct threshold identity") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    auto inst = random_pair(rng, 50);
    if (inst.q >= 1.0) inst.q = 0.5;
    const int n1 = inst.user_counts[0], n2 = inst.user_counts[1];
    const double qbar = 1 - inst.q;
    const double slack_a = t1(inst, n2) - n1;
    const double slack_b = (inst.q * inst.mu / inst.phi + n2 + qbar - n1 * qbar) / (2 * qbar);
    CHECK(slack_a == doctest::Approx(slack_b).epsilon(1e-9));
  }
}

TEST_CASE("classification examples") {
  const auto inst = make_instance({3, 2}, 1, 1, 0.5);
  auto v = classify(inst, {3, 2});
  CHECK(v.case_id == Case::k4);
  CHECK(v.is_ne);
  v = classify(inst, {3, 1});
  CHECK(v.case_id == Case::k1a);
  CHECK_FALSE(v.is_ne);
  CHECK(classify(inst, {0, 1}).case_id == Case::k1b);
  CHECK(classify(inst, {1, 1}).case_id == Case::k2);
  CHECK(classify(inst, {1, 2}).case_id == Case::k3);
  CHECK(scan_nash(inst) == std::vector<State>{{3, 2}});
  CHECK_THROWS_AS(classify(inst, {4, 0}), InvalidArgument);
  CHECK_THROWS_AS(classify(make_instance({2, 3}, 1, 1, 0.5), {0, 0}), InvalidArgument);
  CHECK_THROWS_AS(classify(make_instance({2, 2, 2}, 1, 1, 0.5), {0, 0}), InvalidArgument);
}

TEST_CASE("case regions partition the grid") {
  const auto inst = make_instance({6, 4}, 1, 1, 0.2);
  int counts[5] = {};
  for (int u1 = 0; u1 <= 6; ++u1)
    for (int u2 = 0; u2 <= 4; ++u2) ++counts[static_cast<int>(classify(inst, {u1, u2}).case_id)];
  CHECK(counts[0] == 4);       // u1 = n1, u2 < n2
  CHECK(counts[1] == 4);       // u1 = 0, u2 > 0
  CHECK(counts[4] == 1);       // all direct
  CHECK(counts[3] == 5);       // 0 < u1 < n1, u2 = n2
  CHECK(counts[0] + counts[1] + counts[2] + counts[3] + counts[4] == 35);
}

TEST_CASE("closed form agrees with general checks on full grids") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 60; ++k) {
    const auto inst = random_pair(rng, 15);
    const int n1 = inst.user_counts[0], n2 = inst.user_counts[1];
    for (int u1 = 0; u1 <= n1; ++u1)
      for (int u2 = 0; u2 <= n2; ++u2) {
        const auto p = to_profile(inst, {u1, u2});
        const bool c = classify(inst, {u1, u2}).is_ne;
        REQUIRE(c == is_nash_characterization(inst, p).is_ne);
        REQUIRE(c == is_nash_deviation_oracle(inst, p).is_ne);
      }
  }
}

TEST_CASE("existence") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 300; ++k) {
    const auto inst = random_pair(rng, 40);
    const auto states = scan_nash(inst);
    REQUIRE_FALSE(states.empty());
    const int n2 = inst.user_counts[1];
    CHECK(std::any_of(states.begin(), states.end(),
                      [&](State s) { return s.u1 > 0 && s.u2 == n2; }));
    const auto s = construct_existence_ne(inst);
    CHECK(s.u2 == n2);
    CHECK(s.u1 > 0);
    CHECK(classify(inst, s).is_ne);
    CHECK(is_nash_deviation_oracle(inst, to_profile(inst, s)).is_ne);
  }
  CHECK(construct_existence_ne(make_instance({3, 2}, 1, 1, 0.5)) == State{3, 2});
  CHECK(construct_existence_ne(make_instance({100, 1}, 1, 1, 0.1)) == State{51, 1});
}

TEST_CASE("aggregates determine the verdict") {
  const auto inst = make_instance({5, 3}, 1, 2, 0.3);
  for (int u1 = 0; u1 <= 5; ++u1)
    for (int u2 = 0; u2 <= 3; ++u2) {
      const auto p = to_profile(inst, {u1, u2});
      CHECK(from_profile(p) == State{u1, u2});
      CHECK(classify(inst, {u1, u2}).is_ne == is_nash_characterization(inst, p).is_ne);
    }
}

TEST_CASE("swap equilibrium at q = 0") {
  for (int k = 1; k <= 8; ++k) {
    const auto inst = make_instance({k + 1, k}, 1, 1.5, 0.0);
    const auto states = scan_nash(inst);
    CHECK(std::find(states.begin(), states.end(), State{0, 0}) != states.end());
  }
}

TEST_CASE("corollaries") {
  const auto q1 = make_instance({7, 3}, 1, 2, 1.0);
  auto f = check_corollaries(q1);
  CHECK(f.optimal_all_direct_is_ne == Finding::kPass);

  const auto small_q = make_instance({5, 5}, 1, 1, 0.02);
  f = check_corollaries(small_q);
  CHECK(f.all_relay_sufficient == Finding::kPass);
  CHECK(f.all_relay_iff == Finding::kPass);
  const auto states = scan_nash(small_q);
  CHECK(std::find(states.begin(), states.end(), State{0, 0}) != states.end());

  // (0, 0) is an equilibrium here although the sufficient inequality fails:
  // 5 q (1 - q) = 0.45 <= 0.9 - 0.1 but 5 (1 - 0.81) = 0.95 > 0.8.
  const auto gap = make_instance({5, 5}, 1, 1, 0.1);
  CHECK(classify(gap, {0, 0}).is_ne);
  f = check_corollaries(gap);
  CHECK(f.all_relay_iff == Finding::kPass);
  CHECK(f.all_relay_sufficient == Finding::kNotApplicable);

  std::mt19937_64 rng(9);
  int unique_checked = 0;
  for (int k = 0; k < 3000 && unique_checked < 100; ++k) {
    const auto inst = random_pair(rng, 20);
    const auto r = check_corollaries(inst);
    CHECK(r.optimal_all_direct_is_ne != Finding::kFail);
    CHECK(r.all_relay_iff == Finding::kPass);
    CHECK(r.all_relay_sufficient != Finding::kFail);
    CHECK(r.unique_all_direct != Finding::kFail);
    unique_checked += r.unique_all_direct == Finding::kPass;
  }
  CHECK(unique_checked == 100);
}

TEST_CASE("case 3 interval implies the source-2 condition") {
  std::mt19937_64 rng(13);
  int states = 0;
  for (int k = 0; k < 2000; ++k) {
    auto inst = random_pair(rng, 60);
    if (inst.q >= 1.0) continue;
    const int n1 = inst.user_counts[0], n2 = inst.user_counts[1];
    const double t = t1(inst, n2);
    for (int u1 = 1; u1 < n1; ++u1) {
      if (u1 < t - 1.0 - kTolerance || u1 > t + kTolerance) continue;
      ++states;
      CHECK(n2 <= t2(inst, u1) + kTolerance);
    }
  }
  CHECK(states > 100);
}
