/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "margin_eval.hpp"
#include "wvote/rng.hpp"
#include "wvote/rules.hpp"

namespace wvote::kernels {

namespace {

// Rule predicate shared by the enumeration and Monte-Carlo kernels, evaluated
// the same way the public decision functions evaluate it.
struct RulePredicate {
  bool weighted = false;
  int n = 0;
  double unweighted_threshold = 0.0;
  std::optional<detail::MarginEvaluator> margin;

  RulePredicate(const DecisionRule& rule, std::size_t members) : n(static_cast<int>(members)) {
    if (rule.kind == DecisionRule::Kind::weighted) {
      weighted = true;
      margin.emplace(rule.weights, rule.quota);
    } else {
      unweighted_threshold = (2.0 * rule.quota - 1.0) * static_cast<double>(members);
    }
  }

  bool approves(std::uint32_t mask) const {
    if (!weighted) {
      const int k = std::popcount(mask);
      return static_cast<double>(2 * k - n) >= unweighted_threshold;
    }
    return margin->margin(mask) >= 0.0;
  }

  bool approves(const DecisionProfile& votes) const {
    if (!weighted) {
      long sum = 0;
      for (Vote v : votes) sum += vote_value(v);
      return static_cast<double>(sum) >= unweighted_threshold;
    }
    return margin->margin(votes) >= 0.0;
  }
};

// Per-mask profile likelihood. Small committees multiply directly; larger
// ones accumulate log-probabilities per term to limit underflow.
struct TermProbability {
  bool use_logs = false;
  std::vector<double> on_set;    // factor when the mask bit is set
  std::vector<double> on_unset;  // factor when it is clear

  TermProbability(std::span<const double> profiles, BlockValidity conditioned_on) {
    const std::size_t n = profiles.size();
    use_logs = n > 12;
    on_set.resize(n);
    on_unset.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      // A set bit means vote +1; that is the correct vote only for a valid
      // block.
      const double correct = profiles[i];
      const double wrong = 1.0 - profiles[i];
      const double set_prob = conditioned_on == BlockValidity::valid ? correct : wrong;
      const double unset_prob = conditioned_on == BlockValidity::valid ? wrong : correct;
      on_set[i] = use_logs ? std::log(set_prob) : set_prob;
      on_unset[i] = use_logs ? std::log(unset_prob) : unset_prob;
    }
  }

  double operator()(std::uint32_t mask) const {
    double acc = use_logs ? 0.0 : 1.0;
    for (std::size_t i = 0; i < on_set.size(); ++i) {
      const double f = (mask >> i & 1u) ? on_set[i] : on_unset[i];
      if (use_logs) {
        acc += f;
      } else {
        acc *= f;
      }
    }
    return use_logs ? std::exp(acc) : acc;
  }
};

double chunk_sum(const RulePredicate& pred, const TermProbability& term,
                 bool want_approve, std::uint32_t begin, std::uint32_t end) {
  detail::CompensatedSum acc;
  for (std::uint32_t mask = begin; mask < end; ++mask) {
    if (pred.approves(mask) == want_approve) acc.add(term(mask));
  }
  return acc.value();
}

constexpr std::uint64_t kMcChunk = 4096;

std::uint64_t mc_chunk_hits(std::span<const double> profiles, const RulePredicate& pred,
                            BlockValidity conditioned_on, bool want_approve,
                            std::uint64_t seed, std::uint64_t chunk,
                            std::uint64_t trials_in_chunk) {
  SubRng rng(seed, RngPurpose::mc_chunk, chunk);
  const std::size_t n = profiles.size();
  DecisionProfile votes(n);
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials_in_chunk; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const bool correct = rng.uniform01() < profiles[i];
      const bool approve = conditioned_on == BlockValidity::valid ? correct : !correct;
      votes[i] = approve ? Vote::approve : Vote::reject;
    }
    if (pred.approves(votes) == want_approve) ++hits;
  }
  return hits;
}

}  // namespace

double probability_enumerate_serial(std::span<const double> profiles,
                                    const DecisionRule& rule,
                                    BlockValidity conditioned_on) {
  const RulePredicate pred(rule, profiles.size());
  const TermProbability term(profiles, conditioned_on);
  const bool want_approve = conditioned_on == BlockValidity::valid;
  const std::uint32_t count = 1u << profiles.size();
  return chunk_sum(pred, term, want_approve, 0, count);
}

double probability_enumerate_parallel(std::span<const double> profiles,
                                      const DecisionRule& rule,
                                      BlockValidity conditioned_on) {
  const RulePredicate pred(rule, profiles.size());
  const TermProbability term(profiles, conditioned_on);
  const bool want_approve = conditioned_on == BlockValidity::valid;
  const std::uint64_t count = 1ull << profiles.size();

  // Fixed chunk grid: partials are combined in index order, so the result is
  // identical for any thread count.
  const std::uint64_t chunks = std::min<std::uint64_t>(count, 1024);
  const std::uint64_t width = count / chunks;
  std::vector<double> partial(chunks);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    const auto begin = static_cast<std::uint32_t>(c * width);
    const auto end = static_cast<std::uint32_t>(c + 1 == static_cast<std::int64_t>(chunks)
                                                    ? count
                                                    : (c + 1) * width);
    partial[static_cast<std::size_t>(c)] = chunk_sum(pred, term, want_approve, begin, end);
  }
  detail::CompensatedSum acc;
  for (double p : partial) acc.add(p);
  return acc.value();
}

std::uint64_t mc_hits_serial(std::span<const double> profiles, const DecisionRule& rule,
                             BlockValidity conditioned_on, std::uint64_t trials,
                             std::uint64_t seed) {
  const RulePredicate pred(rule, profiles.size());
  const bool want_approve = conditioned_on == BlockValidity::valid;
  const std::uint64_t chunks = (trials + kMcChunk - 1) / kMcChunk;
  std::uint64_t hits = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    const std::uint64_t in_chunk = std::min(kMcChunk, trials - c * kMcChunk);
    hits += mc_chunk_hits(profiles, pred, conditioned_on, want_approve, seed, c, in_chunk);
  }
  return hits;
}

std::uint64_t mc_hits_parallel(std::span<const double> profiles,
                               const DecisionRule& rule, BlockValidity conditioned_on,
                               std::uint64_t trials, std::uint64_t seed) {
  const RulePredicate pred(rule, profiles.size());
  const bool want_approve = conditioned_on == BlockValidity::valid;
  const auto chunks = static_cast<std::int64_t>((trials + kMcChunk - 1) / kMcChunk);
  std::uint64_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::uint64_t done = static_cast<std::uint64_t>(c) * kMcChunk;
    const std::uint64_t in_chunk = std::min(kMcChunk, trials - done);
    hits += mc_chunk_hits(profiles, pred, conditioned_on, want_approve, seed,
                          static_cast<std::uint64_t>(c), in_chunk);
  }
  return hits;
}

}  // namespace wvote::kernels
