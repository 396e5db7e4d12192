/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "wvote/rules.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "margin_eval.hpp"

namespace wvote {

namespace {

void check_weights(std::span<const double> weights) {
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weights must be non-negative and finite");
    }
  }
}

void check_lengths(const DecisionProfile& votes, std::span<const double> weights) {
  if (votes.size() != weights.size()) {
    throw std::invalid_argument("vote/weight length mismatch: " +
                                std::to_string(votes.size()) + " vs " +
                                std::to_string(weights.size()));
  }
}

void check_probabilities(std::span<const double> profiles) {
  if (profiles.empty()) throw std::invalid_argument("empty committee");
  for (double p : profiles) {
    if (!(p >= 0.0) || !(p <= 1.0)) {
      throw std::invalid_argument("profile " + std::to_string(p) +
                                  " outside [0, 1]");
    }
  }
}

void check_enumeration_limit(std::size_t n) {
  if (n > kEnumerationLimit) {
    throw std::invalid_argument(
        "committee size " + std::to_string(n) + " exceeds the 2^" +
        std::to_string(kEnumerationLimit) +
        " enumeration limit; use consensus_probability_mc");
  }
}

double neumaier_total(std::span<const double> xs) {
  detail::CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

}  // namespace

DecisionRule DecisionRule::make_unweighted(double quota) {
  if (!(quota >= 0.5) || !(quota <= 1.0)) {
    throw std::invalid_argument("unweighted quota must lie in [0.5, 1], got " +
                                std::to_string(quota));
  }
  DecisionRule r;
  r.kind = Kind::unweighted;
  r.quota = quota;
  return r;
}

DecisionRule DecisionRule::make_weighted(std::vector<double> weights, double quota) {
  check_weights(weights);
  if (!std::isfinite(quota)) throw std::invalid_argument("quota must be finite");
  DecisionRule r;
  r.kind = Kind::weighted;
  r.weights = std::move(weights);
  r.quota = quota;
  return r;
}

ConsensusOutcome DecisionRule::apply(const DecisionProfile& votes) const {
  if (kind == Kind::unweighted) return unweighted_decision(votes, quota);
  return weighted_decision(votes, weights, quota);
}

ConsensusOutcome unweighted_decision(const DecisionProfile& votes, double quota) {
  if (votes.empty()) throw std::invalid_argument("empty committee");
  if (!(quota >= 0.5) || !(quota <= 1.0)) {
    throw std::invalid_argument("unweighted quota must lie in [0.5, 1], got " +
                                std::to_string(quota));
  }
  long sum = 0;
  for (Vote v : votes) sum += vote_value(v);
  const double threshold = (2.0 * quota - 1.0) * static_cast<double>(votes.size());
  return static_cast<double>(sum) >= threshold ? ConsensusOutcome::approve
                                               : ConsensusOutcome::reject;
}

double decision_margin(const DecisionProfile& votes, std::span<const double> weights,
                       double quota) {
  check_lengths(votes, weights);
  return detail::MarginEvaluator(weights, quota).margin(votes);
}

ConsensusOutcome weighted_decision(const DecisionProfile& votes,
                                   std::span<const double> weights, double quota) {
  if (votes.empty()) throw std::invalid_argument("empty committee");
  check_lengths(votes, weights);
  check_weights(weights);
  return decision_margin(votes, weights, quota) >= 0.0 ? ConsensusOutcome::approve
                                                       : ConsensusOutcome::reject;
}

ConsensusOutcome reduced_decision(const DecisionProfile& votes,
                                  std::span<const double> normalized_weights,
                                  double quota) {
  if (votes.empty()) throw std::invalid_argument("empty committee");
  check_lengths(votes, normalized_weights);
  check_weights(normalized_weights);
  const double total = neumaier_total(normalized_weights);
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("weights not normalized: sum = " +
                                std::to_string(total));
  }
  detail::CompensatedSum share;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (votes[i] == Vote::approve) share.add(normalized_weights[i]);
  }
  return share.value() >= quota ? ConsensusOutcome::approve : ConsensusOutcome::reject;
}

double optimal_weight(double profile) {
  if (!(profile > 0.0) || !(profile < 1.0)) {
    throw std::invalid_argument("profile out of open unit interval: " +
                                std::to_string(profile));
  }
  return std::log(profile / (1.0 - profile));
}

std::vector<double> optimal_weights(std::span<const double> profiles) {
  std::vector<double> out;
  out.reserve(profiles.size());
  for (double p : profiles) out.push_back(optimal_weight(p));
  return out;
}

std::vector<double> normalize_weights(std::span<const double> weights) {
  check_weights(weights);
  const double total = neumaier_total(weights);
  if (!(total > 0.0)) {
    throw DegenerateCommitteeError("degenerate committee: total weight is zero");
  }
  std::vector<double> out;
  out.reserve(weights.size());
  for (double w : weights) out.push_back(w / total);
  return out;
}

QuotaResult optimal_quota(std::span<const double> weights, const WelfareParams& params) {
  params.validate();
  check_weights(weights);
  const double total = neumaier_total(weights);
  if (!(total > 0.0)) {
    throw DegenerateCommitteeError("degenerate committee: total weight is zero");
  }
  const double offset = std::log((1.0 - params.alpha) / params.alpha) +
                        std::log((1.0 + params.loss_reject_valid) /
                                 (1.0 + params.loss_accept_invalid));
  QuotaResult q;
  q.unclamped = 0.5 * (1.0 - offset / total);
  q.clamped = std::min(1.0, std::max(0.5, q.unclamped));
  return q;
}

DecisionRule theorem_rule(std::span<const double> profiles, const WelfareParams& params) {
  auto weights = optimal_weights(profiles);
  const double quota = optimal_quota(weights, params).unclamped;
  return DecisionRule::make_weighted(std::move(weights), quota);
}

double consensus_probability_exact(std::span<const double> profiles,
                                   const DecisionRule& rule,
                                   BlockValidity conditioned_on) {
  check_probabilities(profiles);
  check_enumeration_limit(profiles.size());
  if (rule.kind == DecisionRule::Kind::weighted &&
      rule.weights.size() != profiles.size()) {
    throw std::invalid_argument("rule weight length does not match committee");
  }
  // Dispatch by problem size only, so results never depend on the machine.
  if (profiles.size() >= 14) {
    return kernels::probability_enumerate_parallel(profiles, rule, conditioned_on);
  }
  return kernels::probability_enumerate_serial(profiles, rule, conditioned_on);
}

McEstimate consensus_probability_mc(std::span<const double> profiles,
                                    const DecisionRule& rule,
                                    BlockValidity conditioned_on,
                                    std::uint64_t trials, std::uint64_t seed) {
  check_probabilities(profiles);
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (rule.kind == DecisionRule::Kind::weighted &&
      rule.weights.size() != profiles.size()) {
    throw std::invalid_argument("rule weight length does not match committee");
  }
  const std::uint64_t hits =
      kernels::mc_hits_parallel(profiles, rule, conditioned_on, trials, seed);
  McEstimate est;
  est.trials = trials;
  est.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  est.half_width_95 =
      1.96 * std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials));
  return est;
}

double expected_welfare(std::span<const double> profiles, const DecisionRule& rule,
                        const WelfareParams& params) {
  params.validate();
  const double pi_approve =
      consensus_probability_exact(profiles, rule, BlockValidity::valid);
  const double pi_reject =
      consensus_probability_exact(profiles, rule, BlockValidity::invalid);
  return (1.0 - params.alpha) * (1.0 + params.loss_reject_valid) * pi_approve +
         params.alpha * (1.0 + params.loss_accept_invalid) * pi_reject;
}

OptimalRuleTable oracle_optimal_rule(std::span<const double> profiles,
                                     const WelfareParams& params) {
  params.validate();
  check_probabilities(profiles);
  check_enumeration_limit(profiles.size());
  const int n = static_cast<int>(profiles.size());
  const std::uint32_t count = 1u << n;
  const double gain_accept = (1.0 - params.alpha) * (1.0 + params.loss_reject_valid);
  const double gain_reject = params.alpha * (1.0 + params.loss_accept_invalid);

  OptimalRuleTable table;
  table.n = n;
  table.outcome.resize(count);
  table.boundary.resize(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    double prob_given_valid = 1.0;
    double prob_given_invalid = 1.0;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1u) {
        prob_given_valid *= profiles[i];
        prob_given_invalid *= 1.0 - profiles[i];
      } else {
        prob_given_valid *= 1.0 - profiles[i];
        prob_given_invalid *= profiles[i];
      }
    }
    const double lhs = gain_accept * prob_given_valid;
    const double rhs = gain_reject * prob_given_invalid;
    table.outcome[mask] =
        lhs >= rhs ? ConsensusOutcome::approve : ConsensusOutcome::reject;
    table.boundary[mask] =
        std::abs(lhs - rhs) <= 1e-9 * std::max(lhs, rhs) ? 1 : 0;
  }
  return table;
}

bool verify_theorem1(std::span<const double> profiles, const WelfareParams& params) {
  const OptimalRuleTable table = oracle_optimal_rule(profiles, params);
  const auto weights = optimal_weights(profiles);
  const double quota = optimal_quota(weights, params).unclamped;
  const detail::MarginEvaluator eval(weights, quota);

  double scale = 1.0;
  for (double w : weights) scale += w;
  scale += std::abs(std::log((1.0 - params.alpha) / params.alpha) +
                    std::log((1.0 + params.loss_reject_valid) /
                             (1.0 + params.loss_accept_invalid)));

  const std::uint32_t count = 1u << table.n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    if (table.boundary[mask]) continue;
    const double margin = eval.margin(mask);
    if (std::abs(margin) <= 1e-9 * scale) continue;
    const ConsensusOutcome rule_outcome =
        margin >= 0.0 ? ConsensusOutcome::approve : ConsensusOutcome::reject;
    if (rule_outcome != table.outcome[mask]) return false;
  }
  return true;
}

}  // namespace wvote
