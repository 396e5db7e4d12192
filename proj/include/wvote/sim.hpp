/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wvote/core.hpp"
#include "wvote/mwu.hpp"
#include "wvote/rules.hpp"

namespace wvote {

enum class ValidatorStatus { active, suspended };

// What a validator does when selected. honest always votes correctly; blocked
// never votes (adversary-censored or offline); mixed follows a BehaviorMix via
// a periodic or seeded-random schedule. An approve-invalid intent on a valid
// block realizes as approving it, which is a correct vote.
struct BehaviorPolicy {
  enum class Kind { honest, blocked, mixed };

  Kind kind = Kind::honest;
  BehaviorMix mix{};
  ScheduleKind schedule = ScheduleKind::seeded_random;

  static BehaviorPolicy honest() { return {}; }
  static BehaviorPolicy blocked() { return {Kind::blocked, {}, ScheduleKind::periodic}; }
  static BehaviorPolicy mixed(BehaviorMix mix, ScheduleKind schedule) {
    return {Kind::mixed, mix, schedule};
  }
};

struct ValidatorState {
  ValidatorId id = 0;
  double stake = 0.0;
  double profile = kProfileFloor;
  ValidatorStatus status = ValidatorStatus::active;
  BehaviorPolicy behavior{};
};

enum class QuotaPolicy { theorem1_optimal, fixed };
enum class ValidityPolicy { all_valid, prior };
// whole_population keeps every active validator in the committee each slot
// (the recovery-figure regime); stake_sampled re-draws a committee of
// committee_size per slot, proportionally to stake without replacement.
enum class CommitteeMode { whole_population, stake_sampled };

// Why a -1 entry is -1: a cast counter-vote or silence. Classification for
// the profile update never uses this; it is observability metadata.
enum class VoteOrigin { cast, abstained };

struct ScenarioConfig {
  std::uint32_t population = 100;
  std::uint32_t committee_size = 100;
  double initial_profile = 0.9;
  double initial_stake = 1.0;
  double adversary_fraction = 0.4;  // v: leading ids are blocked
  BehaviorPolicy voting_behavior{};  // behavior of the non-blocked validators
  WelfareParams welfare{};
  UpdateParams update{};
  QuotaPolicy quota_policy = QuotaPolicy::fixed;
  double fixed_quota = 2.0 / 3.0;
  ValidityPolicy validity_policy = ValidityPolicy::all_valid;
  CommitteeMode committee_mode = CommitteeMode::whole_population;
  std::uint64_t horizon = 600;
  std::uint64_t seed = 0;

  void validate() const;
  std::uint32_t blocked_count() const;
};

struct SlotRecord {
  std::uint64_t slot = 0;
  std::vector<ValidatorId> committee;
  BlockValidity block_validity = BlockValidity::valid;
  DecisionProfile votes;
  std::vector<VoteOrigin> origins;
  std::vector<double> weights;  // normalized weights used for the decision
  double quota_used = 0.5;
  ConsensusOutcome outcome = ConsensusOutcome::reject;
  double weighted_approval_fraction = 0.0;  // weight share of the +1 voters
  bool unweighted_fallback = false;         // degenerate committee fell back to f_{2/3}
  std::vector<double> profiles_after;       // member profiles post update
};

std::vector<ValidatorState> make_population(const ScenarioConfig& config);

// n distinct active validators, drawn without replacement with probability
// proportional to stake at each draw. Returns all active validators when n
// equals their number. Deterministic in (seed, slot).
Committee select_committee(std::span<const ValidatorState> validators, std::uint32_t n,
                           std::uint64_t slot, std::uint64_t seed, double cap_margin);

BlockValidity propose_block(std::uint64_t slot, ValidityPolicy policy, double alpha,
                            std::uint64_t seed);

// Vote entries are +1 iff the member's vote message matches the proposed
// block. Honest members match the ground truth, blocked members never vote.
DecisionProfile collect_votes(const Committee& committee,
                              std::span<const BehaviorPolicy> behaviors,
                              BlockValidity validity, std::uint64_t slot,
                              std::uint64_t seed,
                              std::vector<VoteOrigin>* origins = nullptr);

// One slot of Algorithm-style processing: select, propose, vote, decide with
// fresh log-odds weights, then update member profiles (and suspend when
// enabled). Non-members keep their profiles.
SlotRecord process_slot(std::vector<ValidatorState>& population, std::uint64_t slot,
                        const ScenarioConfig& config);

std::vector<SlotRecord> run_scenario(const ScenarioConfig& config);

// First slot whose weighted approval fraction reaches the threshold.
std::optional<std::uint64_t> recovery_slot(std::span<const SlotRecord> records,
                                           double threshold = 2.0 / 3.0);

std::vector<double> approval_series(std::span<const SlotRecord> records);

}  // namespace wvote
