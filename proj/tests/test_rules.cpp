/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "wvote/rng.hpp"
#include "wvote/rules.hpp"

using namespace wvote;

namespace {

const std::vector<double> kWorkedCommittee{0.9, 0.9, 0.6, 0.6, 0.6};

DecisionProfile votes_from(std::initializer_list<int> xs) {
  DecisionProfile v;
  for (int x : xs) v.push_back(x > 0 ? Vote::approve : Vote::reject);
  return v;
}

DecisionProfile votes_from_mask(std::uint32_t mask, std::size_t n) {
  DecisionProfile v(n, Vote::reject);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask >> i & 1u) v[i] = Vote::approve;
  }
  return v;
}

}  // namespace

TEST_CASE("unweighted decisions") {
  CHECK(unweighted_decision(votes_from({1, 1, 1, 1, -1}), 2.0 / 3.0) ==
        ConsensusOutcome::approve);
  CHECK(unweighted_decision(votes_from({1, 1, 1, -1, -1}), 2.0 / 3.0) ==
        ConsensusOutcome::reject);
  for (double q : {0.5, 0.6, 2.0 / 3.0, 0.75, 1.0}) {
    CHECK(unweighted_decision(votes_from({1, 1, 1, 1, 1}), q) ==
          ConsensusOutcome::approve);
  }
  CHECK_THROWS_WITH_AS(unweighted_decision({}, 0.5), "empty committee",
                       std::invalid_argument);
  CHECK_THROWS_AS(unweighted_decision(votes_from({1}), 0.4), std::invalid_argument);
  CHECK_THROWS_AS(unweighted_decision(votes_from({1}), 1.1), std::invalid_argument);
}

TEST_CASE("weighted decisions reproduce the worked example") {
  const std::vector<double> w{0.392, 0.392, 0.072, 0.072, 0.072};
  // Two high-profile validators agreeing decide the block on their own.
  CHECK(weighted_decision(votes_from({1, 1, -1, -1, -1}), w, 0.5) ==
        ConsensusOutcome::approve);
  // When they disagree, two of the three remaining validators suffice.
  CHECK(weighted_decision(votes_from({1, -1, 1, 1, -1}), w, 0.5) ==
        ConsensusOutcome::approve);
  CHECK(weighted_decision(votes_from({1, -1, 1, -1, -1}), w, 0.5) ==
        ConsensusOutcome::reject);
  CHECK(weighted_decision(votes_from({-1, 1, -1, 1, 1}), w, 0.5) ==
        ConsensusOutcome::approve);

  const std::vector<double> equal(5, 0.2);
  CHECK(weighted_decision(votes_from({1, 1, 1, 1, -1}), equal, 2.0 / 3.0) ==
        ConsensusOutcome::approve);

  CHECK_THROWS_AS(weighted_decision(votes_from({1, 1}), w, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(
      weighted_decision(votes_from({1, 1}), std::vector<double>{0.5, -0.1}, 0.5),
      std::invalid_argument);
}

TEST_CASE("equal weights reduce to the unweighted rule on every profile") {
  SubRng rng(11, RngPurpose::generic);
  for (std::size_t n = 1; n <= 12; ++n) {
    const double c = 0.05 + 5.0 * rng.uniform01();
    const std::vector<double> w(n, c);
    for (double q : {0.5, 0.6, 2.0 / 3.0, 0.75, 1.0}) {
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const DecisionProfile votes = votes_from_mask(mask, n);
        CHECK(weighted_decision(votes, w, q) == unweighted_decision(votes, q));
      }
    }
  }
}

TEST_CASE("reduced form agrees with the weighted rule") {
  SUBCASE("trivial directions") {
    const std::vector<double> w{0.25, 0.25, 0.25, 0.25};
    CHECK(reduced_decision(votes_from({1, 1, 1, 1}), w, 1.0) == ConsensusOutcome::approve);
    CHECK(reduced_decision(votes_from({-1, -1, -1, -1}), w, 0.5) ==
          ConsensusOutcome::reject);
  }

  SUBCASE("worked eclipse-committee case") {
    std::vector<double> profiles{0.99};
    profiles.insert(profiles.end(), 9, 0.7);
    const auto normalized = normalize_weights(optimal_weights(profiles));
    const double quota =
        optimal_quota(optimal_weights(profiles), WelfareParams{0.5, 1e-2, 12.0}).clamped;
    DecisionProfile only_first(10, Vote::reject);
    only_first[0] = Vote::approve;
    CHECK(normalized[0] == doctest::Approx(0.376).epsilon(0.005));
    CHECK(quota == doctest::Approx(0.604).epsilon(0.005));
    CHECK(reduced_decision(only_first, normalized, quota) == ConsensusOutcome::reject);
  }

  SUBCASE("requires normalized weights") {
    CHECK_THROWS_AS(reduced_decision(votes_from({1, 1}), std::vector<double>{0.7, 0.4}, 0.5),
                    std::invalid_argument);
  }

  SUBCASE("equivalence on all profiles, random weights and quotas") {
    SubRng rng(23, RngPurpose::generic);
    for (std::size_t n = 1; n <= 12; ++n) {
      std::vector<double> w(n);
      for (auto& x : w) x = rng.uniform01() + 1e-3;
      const auto normalized = normalize_weights(w);
      const double quota = 0.5 + 0.5 * rng.uniform01();
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const DecisionProfile votes = votes_from_mask(mask, n);
        CHECK(reduced_decision(votes, normalized, quota) ==
              weighted_decision(votes, normalized, quota));
      }
    }
  }
}

TEST_CASE("optimal log-odds weights") {
  CHECK(optimal_weight(0.9) == doctest::Approx(2.197).epsilon(5e-4));
  CHECK(optimal_weight(0.99) == doctest::Approx(4.595).epsilon(5e-4));
  CHECK(optimal_weight(0.5) == 0.0);
  CHECK(optimal_weight(0.99) / optimal_weight(0.9) > 2.0);

  CHECK_THROWS_AS(optimal_weight(0.0), std::invalid_argument);
  CHECK_THROWS_AS(optimal_weight(1.0), std::invalid_argument);
  CHECK_THROWS_AS(optimal_weight(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(optimal_weight(1.1), std::invalid_argument);

  SUBCASE("antisymmetry and monotonicity") {
    double prev = -1e300;
    for (int i = 1; i < 200; ++i) {
      const double p = i / 200.0;
      const double w = optimal_weight(p);
      CHECK(std::abs(w + optimal_weight(1.0 - p)) <= 1e-12);
      CHECK(w > prev);
      prev = w;
    }
  }
}

TEST_CASE("weight normalization") {
  const auto w1 = normalize_weights(optimal_weights(kWorkedCommittee));
  CHECK(w1[0] == doctest::Approx(0.392).epsilon(0.003));
  CHECK(w1[2] == doctest::Approx(0.072).epsilon(0.015));

  const auto sym = normalize_weights(std::vector<double>{1, 1, 1, 1});
  for (double w : sym) CHECK(w == 0.25);

  std::vector<double> committee2{0.99};
  committee2.insert(committee2.end(), 9, 0.95);
  CHECK(normalize_weights(optimal_weights(committee2))[0] ==
        doctest::Approx(0.148).epsilon(0.007));

  CHECK_THROWS_AS(normalize_weights(std::vector<double>{0.0, 0.0}),
                  DegenerateCommitteeError);

  SubRng rng(5, RngPurpose::generic);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> w(1 + static_cast<std::size_t>(rng.uniform01() * 15));
    for (auto& x : w) x = rng.uniform01() * 10.0;
    w[0] += 1e-6;
    const auto norm = normalize_weights(w);
    double total = 0.0;
    for (double x : norm) total += x;
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("optimal quota") {
  const WelfareParams params{0.5, 1e-2, 12.0};

  std::vector<double> c1{0.99};
  c1.insert(c1.end(), 9, 0.7);
  std::vector<double> c2{0.99};
  c2.insert(c2.end(), 9, 0.95);
  std::vector<double> c3{0.99, 0.99, 0.95};
  c3.insert(c3.end(), 7, 0.7);

  CHECK(optimal_quota(optimal_weights(c1), params).clamped ==
        doctest::Approx(0.604).epsilon(0.002));
  CHECK(optimal_quota(optimal_weights(c2), params).clamped ==
        doctest::Approx(0.540).epsilon(0.004));
  CHECK(optimal_quota(optimal_weights(c3), params).clamped ==
        doctest::Approx(0.570).epsilon(0.004));

  SUBCASE("symmetric parameters give exactly one half") {
    const WelfareParams symmetric{0.5, 3.0, 3.0};
    CHECK(optimal_quota(optimal_weights(kWorkedCommittee), symmetric).clamped == 0.5);
    CHECK(optimal_quota(std::vector<double>{2.197}, symmetric).unclamped == 0.5);
  }

  SUBCASE("clamping binds for extreme priors and is surfaced") {
    const WelfareParams skewed{0.1, 0.1, 0.2};
    const QuotaResult q = optimal_quota(optimal_weights(std::vector<double>{0.6}), skewed);
    CHECK(q.unclamped < 0.5);
    CHECK(q.clamped == 0.5);
  }

  CHECK_THROWS_AS(optimal_quota(std::vector<double>{0.0}, params),
                  DegenerateCommitteeError);
}

TEST_CASE("exact consensus probability") {
  SUBCASE("worked five-validator committee") {
    const auto unweighted = DecisionRule::make_unweighted(2.0 / 3.0);
    const double p_unweighted =
        consensus_probability_exact(kWorkedCommittee, unweighted, BlockValidity::valid);
    CHECK(p_unweighted == doctest::Approx(0.5638).epsilon(0.005));
    // Closed form: all five correct, one high wrong, or one low wrong.
    const double direct = 0.9 * 0.9 * 0.6 * 0.6 * 0.6 +
                          2 * 0.9 * 0.1 * 0.6 * 0.6 * 0.6 +
                          3 * 0.9 * 0.9 * 0.6 * 0.6 * 0.4;
    CHECK(p_unweighted == doctest::Approx(direct).epsilon(1e-12));

    const WelfareParams symmetric{0.5, 1.0, 1.0};
    const auto optimal = theorem_rule(kWorkedCommittee, symmetric);
    const double p_optimal =
        consensus_probability_exact(kWorkedCommittee, optimal, BlockValidity::valid);
    CHECK(p_optimal == doctest::Approx(0.9266).epsilon(0.005));
    const double direct_opt =
        0.9 * 0.9 + 2 * 0.9 * 0.1 * (0.6 * 0.6 * 0.6 + 3 * 0.6 * 0.6 * 0.4);
    CHECK(p_optimal == doctest::Approx(direct_opt).epsilon(1e-12));

    // De-facto 2/3 weighted majorities with the optimal and the coarse weights.
    const auto w_rule = DecisionRule::make_weighted(optimal_weights(kWorkedCommittee), 2.0 / 3.0);
    CHECK(consensus_probability_exact(kWorkedCommittee, w_rule, BlockValidity::valid) ==
          doctest::Approx(0.81).epsilon(0.005));
    const auto v_rule = DecisionRule::make_weighted(
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0}, 2.0 / 3.0);
    CHECK(consensus_probability_exact(kWorkedCommittee, v_rule, BlockValidity::valid) ==
          doctest::Approx(0.85).epsilon(0.005));
  }

  SUBCASE("single validator") {
    const auto rule = DecisionRule::make_unweighted(0.5);
    CHECK(consensus_probability_exact(std::vector<double>{0.9}, rule,
                                      BlockValidity::valid) == doctest::Approx(0.9));
    CHECK(consensus_probability_exact(std::vector<double>{0.9}, rule,
                                      BlockValidity::invalid) == doctest::Approx(0.9));
  }

  SUBCASE("condorcet consistency against the binomial oracle") {
    const auto rule = DecisionRule::make_unweighted(0.5);
    for (int n = 1; n <= 15; n += 2) {
      for (double p : {0.5, 0.55, 0.6, 0.7, 0.8, 0.9, 0.99}) {
        const std::vector<double> profiles(static_cast<std::size_t>(n), p);
        const double exact =
            consensus_probability_exact(profiles, rule, BlockValidity::valid);
        const double tail = oracles::binomial_tail(n, (n + 1) / 2, p);
        CHECK(std::abs(exact - tail) <= 1e-12);
      }
    }
  }

  SUBCASE("errors") {
    const auto rule = DecisionRule::make_unweighted(0.5);
    CHECK_THROWS_AS(consensus_probability_exact({}, rule, BlockValidity::valid),
                    std::invalid_argument);
    const std::vector<double> too_big(21, 0.7);
    CHECK_THROWS_WITH_AS(
        consensus_probability_exact(too_big, rule, BlockValidity::valid),
        "committee size 21 exceeds the 2^20 enumeration limit; use "
        "consensus_probability_mc",
        std::invalid_argument);
    const auto short_rule = DecisionRule::make_weighted({1.0, 1.0}, 0.5);
    CHECK_THROWS_AS(
        consensus_probability_exact(kWorkedCommittee, short_rule, BlockValidity::valid),
        std::invalid_argument);
  }

  SUBCASE("serial and chunked kernels agree, independent of thread count") {
    SubRng rng(31, RngPurpose::generic);
    std::vector<double> profiles(16);
    for (auto& p : profiles) p = 0.5 + 0.49 * rng.uniform01();
    const auto rule = theorem_rule(profiles, WelfareParams{0.4, 0.5, 6.0});
    const double serial =
        kernels::probability_enumerate_serial(profiles, rule, BlockValidity::valid);
    const double parallel =
        kernels::probability_enumerate_parallel(profiles, rule, BlockValidity::valid);
    CHECK(parallel == doctest::Approx(serial).epsilon(1e-13));
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const double one_thread =
        kernels::probability_enumerate_parallel(profiles, rule, BlockValidity::valid);
    omp_set_num_threads(saved);
    CHECK(one_thread == parallel);  // bitwise: fixed chunk grid
#endif
    // The log-product path (n > 12) matches the direct-product path.
    const std::vector<double> head(profiles.begin(), profiles.begin() + 10);
    const auto head_rule = theorem_rule(head, WelfareParams{0.4, 0.5, 6.0});
    CHECK(kernels::probability_enumerate_serial(head, head_rule, BlockValidity::valid) ==
          doctest::Approx(consensus_probability_exact(head, head_rule,
                                                      BlockValidity::valid))
              .epsilon(1e-13));
  }
}

TEST_CASE("monte carlo estimator") {
  SUBCASE("matches the worked committee value") {
    const auto rule = theorem_rule(kWorkedCommittee, WelfareParams{0.5, 1.0, 1.0});
    const double exact =
        consensus_probability_exact(kWorkedCommittee, rule, BlockValidity::valid);
    const McEstimate est =
        consensus_probability_mc(kWorkedCommittee, rule, BlockValidity::valid, 1000000, 2024);
    CHECK(est.half_width_95 < 0.0011);
    CHECK(std::abs(est.estimate - exact) <= est.half_width_95);
    CHECK(est.estimate == doctest::Approx(0.927).epsilon(0.002));
  }

  SUBCASE("binomial committee against the independent oracle") {
    const std::vector<double> profiles(5, 0.7);
    const auto rule = DecisionRule::make_unweighted(0.5);
    const McEstimate est =
        consensus_probability_mc(profiles, rule, BlockValidity::valid, 1000000, 7);
    CHECK(std::abs(est.estimate - oracles::binomial_tail(5, 3, 0.7)) <= est.half_width_95);
  }

  SUBCASE("near-certain committee") {
    const std::vector<double> profiles(5, 1.0 - 1e-5);
    const auto rule = DecisionRule::make_unweighted(2.0 / 3.0);
    const McEstimate est =
        consensus_probability_mc(profiles, rule, BlockValidity::valid, 100000, 1);
    CHECK(est.estimate >= 0.999);
  }

  SUBCASE("deterministic in the seed; serial kernel identical") {
    const auto rule = DecisionRule::make_unweighted(2.0 / 3.0);
    const McEstimate a =
        consensus_probability_mc(kWorkedCommittee, rule, BlockValidity::valid, 250000, 99);
    const McEstimate b =
        consensus_probability_mc(kWorkedCommittee, rule, BlockValidity::valid, 250000, 99);
    CHECK(a.estimate == b.estimate);
    CHECK(kernels::mc_hits_serial(kWorkedCommittee, rule, BlockValidity::valid, 250000, 99) ==
          kernels::mc_hits_parallel(kWorkedCommittee, rule, BlockValidity::valid, 250000, 99));
    CHECK_THROWS_AS(consensus_probability_mc(kWorkedCommittee, rule, BlockValidity::valid, 0, 0),
                    std::invalid_argument);
  }

  SUBCASE("coverage: the 95% half-width covers the exact value") {
    const auto rule = theorem_rule(kWorkedCommittee, WelfareParams{0.5, 1.0, 1.0});
    const double exact =
        consensus_probability_exact(kWorkedCommittee, rule, BlockValidity::valid);
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const McEstimate est =
          consensus_probability_mc(kWorkedCommittee, rule, BlockValidity::valid, 1000000, seed);
      if (std::abs(est.estimate - exact) <= est.half_width_95) ++covered;
    }
    CHECK(covered >= 93);
  }
}

TEST_CASE("expected welfare") {
  SUBCASE("symmetric losses reduce to the probability sum") {
    const WelfareParams symmetric{0.5, 1.0, 1.0};
    const auto rule = theorem_rule(kWorkedCommittee, symmetric);
    const double welfare = expected_welfare(kWorkedCommittee, rule, symmetric);
    const double pi1 = consensus_probability_exact(kWorkedCommittee, rule, BlockValidity::valid);
    const double pi_1 =
        consensus_probability_exact(kWorkedCommittee, rule, BlockValidity::invalid);
    CHECK(welfare == doctest::Approx(pi1 + pi_1).epsilon(1e-12));
  }

  SUBCASE("single validator closed form") {
    const WelfareParams symmetric{0.5, 1.0, 1.0};
    const std::vector<double> one{0.9};
    CHECK(expected_welfare(one, theorem_rule(one, symmetric), symmetric) ==
          doctest::Approx(1.8).epsilon(1e-12));
  }

  SUBCASE("optimal rule beats the worked unweighted rule") {
    const WelfareParams symmetric{0.5, 1.0, 1.0};
    CHECK(expected_welfare(kWorkedCommittee, theorem_rule(kWorkedCommittee, symmetric), symmetric) >
          expected_welfare(kWorkedCommittee, DecisionRule::make_unweighted(2.0 / 3.0),
                           symmetric));
  }

  SUBCASE("optimal rule dominates every unweighted quota") {
    SubRng rng(77, RngPurpose::generic);
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() * 8);
      std::vector<double> profiles(n);
      for (auto& p : profiles) p = 0.5 + 0.49 * rng.uniform01();
      const double la = 0.1 + 19.9 * rng.uniform01();
      const double lr = la * (0.05 + 0.9 * rng.uniform01());
      const WelfareParams params{0.1 + 0.8 * rng.uniform01(), lr, la};
      const double best = expected_welfare(profiles, theorem_rule(profiles, params), params);
      for (int k = 0; k <= 100; ++k) {
        const double q = 0.5 + 0.5 * k / 100.0;
        const double e =
            expected_welfare(profiles, DecisionRule::make_unweighted(q), params);
        CHECK(best >= e - 1e-12);
      }
    }
  }
}

TEST_CASE("brute-force optimal rule") {
  SUBCASE("single validator approves its own vote") {
    const OptimalRuleTable t =
        oracle_optimal_rule(std::vector<double>{0.9}, WelfareParams{0.5, 1.0, 1.0});
    CHECK(t.at(1) == ConsensusOutcome::approve);
    CHECK(t.at(0) == ConsensusOutcome::reject);
    CHECK(!t.boundary[0]);
  }

  SUBCASE("worked committee: approvals are exactly the table families") {
    const OptimalRuleTable t = oracle_optimal_rule(kWorkedCommittee, WelfareParams{0.5, 1.0, 1.0});
    for (std::uint32_t mask = 0; mask < 32; ++mask) {
      const int high = (mask & 1u) + (mask >> 1 & 1u);
      const int low = (mask >> 2 & 1u) + (mask >> 3 & 1u) + (mask >> 4 & 1u);
      const bool family = high == 2 || (high == 1 && low >= 2);
      CHECK((t.at(mask) == ConsensusOutcome::approve) == family);
    }
  }

  SUBCASE("uninformative committee is all boundary") {
    const OptimalRuleTable t = oracle_optimal_rule(std::vector<double>{0.5, 0.5},
                                                   WelfareParams{0.5, 1.0, 1.0});
    for (std::uint32_t mask = 0; mask < 4; ++mask) {
      CHECK(t.boundary[mask]);
      CHECK(t.at(mask) == ConsensusOutcome::approve);  // ties resolve approve
    }
  }
}

TEST_CASE("theorem verification") {
  CHECK(verify_theorem1(kWorkedCommittee, WelfareParams{0.5, 1.0, 1.0}));

  std::vector<double> c1{0.99};
  c1.insert(c1.end(), 9, 0.7);
  std::vector<double> c2{0.99};
  c2.insert(c2.end(), 9, 0.95);
  std::vector<double> c3{0.99, 0.99, 0.95};
  c3.insert(c3.end(), 7, 0.7);
  const WelfareParams params{0.5, 1e-2, 12.0};
  CHECK(verify_theorem1(c1, params));
  CHECK(verify_theorem1(c2, params));
  CHECK(verify_theorem1(c3, params));

  SUBCASE("random committees agree with the oracle") {
    SubRng rng(123, RngPurpose::generic);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() * 8);
      std::vector<double> profiles(n);
      for (auto& p : profiles) p = 0.5 + 0.49 * rng.uniform01();
      const double la = 0.1 + 19.9 * rng.uniform01();
      const double lr = la * (0.05 + 0.9 * rng.uniform01());
      const WelfareParams draw{0.1 + 0.8 * rng.uniform01(), lr, la};
      CHECK(verify_theorem1(profiles, draw));
    }
  }

  SUBCASE("the clamped quota would not verify: pins why the raw quota is used") {
    const WelfareParams skewed{0.1, 0.1, 0.2};
    const std::vector<double> profiles{0.6};
    CHECK(verify_theorem1(profiles, skewed));
    const OptimalRuleTable t = oracle_optimal_rule(profiles, skewed);
    CHECK(t.at(0) == ConsensusOutcome::approve);  // rejecting loses more welfare
    const auto weights = optimal_weights(profiles);
    const double clamped = optimal_quota(weights, skewed).clamped;
    CHECK(weighted_decision(votes_from({-1}), weights, clamped) ==
          ConsensusOutcome::reject);
  }
}
