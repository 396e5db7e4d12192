/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "wvote/core.hpp"

namespace wvote {

enum class ConsensusOutcome : int { reject = -1, approve = 1 };

// Raised when every committee weight is zero (all profiles at 0.5). Callers
// fall back to the plain 2/3 rule; approving everything silently would not be
// safe.
struct DegenerateCommitteeError : std::domain_error {
  using std::domain_error::domain_error;
};

// A majority rule: plain quota over vote counts, or quota over a fixed
// weight vector.
struct DecisionRule {
  enum class Kind { unweighted, weighted };

  Kind kind = Kind::unweighted;
  std::vector<double> weights;  // weighted only; length must match the votes
  double quota = 0.5;

  static DecisionRule make_unweighted(double quota);
  static DecisionRule make_weighted(std::vector<double> weights, double quota);

  ConsensusOutcome apply(const DecisionProfile& votes) const;
};

// Plain majority: approve iff sum x_i >= (2q - 1) n, q in [0.5, 1].
ConsensusOutcome unweighted_decision(const DecisionProfile& votes, double quota);

// Weighted majority: approve iff sum w_i x_i >= (2q - 1) sum w_i. The quota is
// not range-checked here; theorem verification legitimately passes raw quotas
// outside [0.5, 1].
ConsensusOutcome weighted_decision(const DecisionProfile& votes,
                                   std::span<const double> weights, double quota);

// Reduced form over normalized weights: approve iff the approving voters'
// weight share reaches the quota. Equivalent to weighted_decision; requires
// |sum w - 1| <= 1e-9.
ConsensusOutcome reduced_decision(const DecisionProfile& votes,
                                  std::span<const double> normalized_weights,
                                  double quota);

// Signed distance from the approval threshold, sum w_i x_i - (2q-1) sum w_i,
// accumulated with exact fma residuals so profiles that tie the threshold in
// real arithmetic keep a clean sign. approve <=> margin >= 0.
double decision_margin(const DecisionProfile& votes, std::span<const double> weights,
                       double quota);

// Log-odds weight ln(p / (1 - p)); requires p in the open unit interval.
double optimal_weight(double profile);
std::vector<double> optimal_weights(std::span<const double> profiles);

// Scales weights to sum 1. Throws DegenerateCommitteeError when the total is
// not positive.
std::vector<double> normalize_weights(std::span<const double> weights);

struct QuotaResult {
  double unclamped = 0.5;  // raw value; leaves [0.5, 1] for extreme priors
  double clamped = 0.5;    // operational quota, forced into [0.5, 1]
};

// Welfare-optimal quota 1/2 [1 - (ln((1-a)/a) + ln((1+l_r)/(1+l_a))) / w_total].
QuotaResult optimal_quota(std::span<const double> weights, const WelfareParams& params);

// The welfare-optimal rule for a committee: log-odds weights with the raw
// (unclamped) quota. This is the rule the brute-force oracle certifies.
DecisionRule theorem_rule(std::span<const double> profiles, const WelfareParams& params);

inline constexpr int kEnumerationLimit = 20;

// Probability that the rule reaches the correct outcome conditioned on the
// block's validity, by exact enumeration of all 2^n decision profiles.
// Correct means approve for a valid block and reject for an invalid one; each
// member independently votes correctly with their profile probability.
// Committees beyond kEnumerationLimit must use consensus_probability_mc.
double consensus_probability_exact(std::span<const double> profiles,
                                   const DecisionRule& rule,
                                   BlockValidity conditioned_on);

struct McEstimate {
  double estimate = 0.0;
  double half_width_95 = 0.0;
  std::uint64_t trials = 0;
};

// Monte-Carlo estimate of the same probability with a 95% normal half-width.
// Trials are split into fixed 4096-trial chunks; chunk c draws from substream
// (seed, mc_chunk, c), so the estimate is bit-identical for any thread count.
McEstimate consensus_probability_mc(std::span<const double> profiles,
                                    const DecisionRule& rule,
                                    BlockValidity conditioned_on,
                                    std::uint64_t trials, std::uint64_t seed);

// Expected collective welfare (1-a)(1+l_r) pi_1 + a(1+l_a) pi_-1, constant
// terms omitted.
double expected_welfare(std::span<const double> profiles, const DecisionRule& rule,
                        const WelfareParams& params);

// Brute-force welfare-optimal rule: for each decision profile, approve iff the
// profile's welfare contribution when accepted exceeds its contribution when
// rejected. outcome[mask] uses bit i of mask for member i's approval; entries
// within relative 1e-9 of a welfare tie are flagged as boundary.
struct OptimalRuleTable {
  int n = 0;
  std::vector<ConsensusOutcome> outcome;
  std::vector<std::uint8_t> boundary;

  ConsensusOutcome at(std::uint32_t mask) const { return outcome[mask]; }
};

OptimalRuleTable oracle_optimal_rule(std::span<const double> profiles,
                                     const WelfareParams& params);

// True iff the log-odds weighted rule with the raw optimal quota agrees with
// the brute-force oracle on every decision profile, boundary ties exempt.
bool verify_theorem1(std::span<const double> profiles, const WelfareParams& params);

// Kernels behind the probability entry points. The serial versions are the
// reference the tests compare against; the parallel versions split the work
// into fixed chunks (OpenMP when available) and are what the public functions
// dispatch to for large inputs. Chunking is fixed, so parallel results do not
// depend on the thread count.
namespace kernels {

double probability_enumerate_serial(std::span<const double> profiles,
                                    const DecisionRule& rule,
                                    BlockValidity conditioned_on);
double probability_enumerate_parallel(std::span<const double> profiles,
                                      const DecisionRule& rule,
                                      BlockValidity conditioned_on);

std::uint64_t mc_hits_serial(std::span<const double> profiles, const DecisionRule& rule,
                             BlockValidity conditioned_on, std::uint64_t trials,
                             std::uint64_t seed);
std::uint64_t mc_hits_parallel(std::span<const double> profiles,
                               const DecisionRule& rule, BlockValidity conditioned_on,
                               std::uint64_t trials, std::uint64_t seed);

}  // namespace kernels

}  // namespace wvote
