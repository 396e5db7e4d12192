/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "wvote/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "wvote/rng.hpp"

namespace wvote {

void ScenarioConfig::validate() const {
  if (population == 0) throw std::invalid_argument("scenario: population must be >= 1");
  if (committee_size == 0 || committee_size > population) {
    throw std::invalid_argument("scenario: committee_size must lie in [1, population]");
  }
  if (!(adversary_fraction >= 0.0) || !(adversary_fraction <= 1.0)) {
    throw std::invalid_argument("scenario: adversary_fraction must lie in [0, 1], got " +
                                std::to_string(adversary_fraction));
  }
  if (horizon == 0) throw std::invalid_argument("scenario: horizon must be >= 1");
  if (!(initial_stake >= 0.0) || !std::isfinite(initial_stake)) {
    throw std::invalid_argument("scenario: initial_stake must be non-negative");
  }
  welfare.validate();
  update.validate();
  const double cap = 1.0 - update.cap_margin;
  if (!(initial_profile >= kProfileFloor) || !(initial_profile <= cap)) {
    throw std::invalid_argument("scenario: initial_profile must lie in [0.5, 1 - cap_margin]");
  }
  if (quota_policy == QuotaPolicy::fixed &&
      (!(fixed_quota >= 0.5) || !(fixed_quota <= 1.0))) {
    throw std::invalid_argument("scenario: fixed_quota must lie in [0.5, 1], got " +
                                std::to_string(fixed_quota));
  }
  if (voting_behavior.kind == BehaviorPolicy::Kind::mixed) voting_behavior.mix.validate();
}

std::uint32_t ScenarioConfig::blocked_count() const {
  return static_cast<std::uint32_t>(
      std::llround(adversary_fraction * static_cast<double>(population)));
}

std::vector<ValidatorState> make_population(const ScenarioConfig& config) {
  config.validate();
  const std::uint32_t blocked = config.blocked_count();
  std::vector<ValidatorState> out;
  out.reserve(config.population);
  for (std::uint32_t i = 0; i < config.population; ++i) {
    ValidatorState v;
    v.id = i;
    v.stake = config.initial_stake;
    v.profile = config.initial_profile;
    v.status = ValidatorStatus::active;
    v.behavior = i < blocked ? BehaviorPolicy::blocked() : config.voting_behavior;
    out.push_back(v);
  }
  return out;
}

Committee select_committee(std::span<const ValidatorState> validators, std::uint32_t n,
                           std::uint64_t slot, std::uint64_t seed, double cap_margin) {
  std::vector<const ValidatorState*> active;
  active.reserve(validators.size());
  for (const auto& v : validators) {
    if (v.status == ValidatorStatus::active && v.stake > 0.0) active.push_back(&v);
  }
  if (active.size() < n) {
    throw std::runtime_error("insufficient active validators: need " + std::to_string(n) +
                             ", have " + std::to_string(active.size()));
  }

  std::vector<CommitteeMember> members;
  members.reserve(n);
  if (active.size() == n) {
    for (const auto* v : active) members.push_back({v->id, v->profile, v->stake});
    return make_committee(slot, std::move(members), cap_margin);
  }

  // Sequential stake-proportional sampling without replacement.
  SubRng rng(seed, RngPurpose::committee, slot);
  double remaining = 0.0;
  for (const auto* v : active) remaining += v->stake;
  for (std::uint32_t k = 0; k < n; ++k) {
    const double target = rng.uniform01() * remaining;
    double cum = 0.0;
    std::size_t pick = active.size() - 1;
    for (std::size_t i = 0; i < active.size(); ++i) {
      cum += active[i]->stake;
      if (target < cum) {
        pick = i;
        break;
      }
    }
    const ValidatorState* chosen = active[pick];
    members.push_back({chosen->id, chosen->profile, chosen->stake});
    remaining -= chosen->stake;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return make_committee(slot, std::move(members), cap_margin);
}

BlockValidity propose_block(std::uint64_t slot, ValidityPolicy policy, double alpha,
                            std::uint64_t seed) {
  if (policy == ValidityPolicy::all_valid) return BlockValidity::valid;
  SubRng rng(seed, RngPurpose::validity, slot);
  return rng.uniform01() < alpha ? BlockValidity::invalid : BlockValidity::valid;
}

DecisionProfile collect_votes(const Committee& committee,
                              std::span<const BehaviorPolicy> behaviors,
                              BlockValidity validity, std::uint64_t slot,
                              std::uint64_t seed, std::vector<VoteOrigin>* origins) {
  if (behaviors.size() != committee.size()) {
    throw std::invalid_argument("behavior count does not match committee size");
  }
  DecisionProfile votes(committee.size(), Vote::reject);
  if (origins) origins->assign(committee.size(), VoteOrigin::abstained);
  const Vote match_validity = validity == BlockValidity::valid ? Vote::approve : Vote::reject;

  for (std::size_t i = 0; i < committee.size(); ++i) {
    const BehaviorPolicy& b = behaviors[i];
    Vote vote = Vote::reject;
    VoteOrigin origin = VoteOrigin::abstained;
    switch (b.kind) {
      case BehaviorPolicy::Kind::honest:
        vote = match_validity;
        origin = VoteOrigin::cast;
        break;
      case BehaviorPolicy::Kind::blocked:
        break;
      case BehaviorPolicy::Kind::mixed: {
        VoteClassification action;
        if (b.schedule == ScheduleKind::periodic) {
          action = scheduled_action(b.mix, slot);
        } else {
          SubRng rng(seed, RngPurpose::behavior, slot, committee.members[i].id);
          const double u = rng.uniform01();
          action = u < b.mix.correct ? VoteClassification::correct
                   : u < b.mix.correct + b.mix.abstain
                       ? VoteClassification::abstained_or_rejected_valid
                       : VoteClassification::approved_invalid;
        }
        if (action == VoteClassification::correct) {
          vote = match_validity;
          origin = VoteOrigin::cast;
        } else if (action == VoteClassification::approved_invalid) {
          vote = Vote::approve;  // approves whatever was proposed
          origin = VoteOrigin::cast;
        }
        break;
      }
    }
    votes[i] = vote;
    if (origins) (*origins)[i] = origin;
  }
  return votes;
}

namespace {

double plus_share(const DecisionProfile& votes, std::span<const double> normalized) {
  double share = 0.0;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (votes[i] == Vote::approve) share += normalized[i];
  }
  return share;
}

}  // namespace

SlotRecord process_slot(std::vector<ValidatorState>& population, std::uint64_t slot,
                        const ScenarioConfig& config) {
  const std::uint32_t want =
      config.committee_mode == CommitteeMode::whole_population
          ? static_cast<std::uint32_t>(std::count_if(
                population.begin(), population.end(),
                [](const ValidatorState& v) {
                  return v.status == ValidatorStatus::active && v.stake > 0.0;
                }))
          : config.committee_size;
  Committee committee =
      select_committee(population, want, slot, config.seed, config.update.cap_margin);

  std::vector<BehaviorPolicy> behaviors;
  behaviors.reserve(committee.size());
  for (const auto& m : committee.members) behaviors.push_back(population[m.id].behavior);

  const BlockValidity validity =
      propose_block(slot, config.validity_policy, config.welfare.alpha, config.seed);

  SlotRecord rec;
  rec.slot = slot;
  for (const auto& m : committee.members) rec.committee.push_back(m.id);
  rec.block_validity = validity;
  rec.votes = collect_votes(committee, behaviors, validity, slot, config.seed, &rec.origins);

  const auto profiles = committee.profiles();
  try {
    const auto weights = optimal_weights(profiles);
    rec.weights = normalize_weights(weights);
    rec.quota_used = config.quota_policy == QuotaPolicy::fixed
                         ? config.fixed_quota
                         : optimal_quota(weights, config.welfare).clamped;
    rec.outcome = weighted_decision(rec.votes, weights, rec.quota_used);
    rec.weighted_approval_fraction = plus_share(rec.votes, rec.weights);
  } catch (const DegenerateCommitteeError&) {
    // All profiles at the floor: every weight is zero. Fall back to the plain
    // 2/3 rule and report plain vote shares.
    rec.unweighted_fallback = true;
    rec.weights.assign(committee.size(), 1.0 / static_cast<double>(committee.size()));
    rec.quota_used = 2.0 / 3.0;
    rec.outcome = unweighted_decision(rec.votes, rec.quota_used);
    rec.weighted_approval_fraction = plus_share(rec.votes, rec.weights);
  }

  rec.profiles_after.reserve(committee.size());
  for (std::size_t i = 0; i < committee.size(); ++i) {
    ValidatorState& v = population[committee.members[i].id];
    const VoteClassification cls = classify_vote(rec.votes[i], validity);
    const double raw = mwu_raw_update(v.profile, cls, config.update);
    if (suspension_check(raw, slot, config.update)) v.status = ValidatorStatus::suspended;
    v.profile = clamp_profile(raw, kProfileFloor, config.update.cap_margin);
    rec.profiles_after.push_back(v.profile);
  }
  return rec;
}

std::vector<SlotRecord> run_scenario(const ScenarioConfig& config) {
  auto population = make_population(config);
  std::vector<SlotRecord> records;
  records.reserve(config.horizon);
  for (std::uint64_t t = 0; t < config.horizon; ++t) {
    records.push_back(process_slot(population, t, config));
  }
  return records;
}

std::optional<std::uint64_t> recovery_slot(std::span<const SlotRecord> records,
                                           double threshold) {
  for (const auto& r : records) {
    if (r.weighted_approval_fraction >= threshold) return r.slot;
  }
  return std::nullopt;
}

std::vector<double> approval_series(std::span<const SlotRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.weighted_approval_fraction);
  return out;
}

}  // namespace wvote
