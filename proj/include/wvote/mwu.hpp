/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wvote/core.hpp"

namespace wvote {

// How a member's vote relates to the block's ground-truth validity. Rejecting
// an invalid block is correct; the two error types carry different loss
// exponents.
enum class VoteClassification {
  correct,
  abstained_or_rejected_valid,  // vote -1 on a valid block (l_r exponent)
  approved_invalid,             // vote +1 on an invalid block (l_a exponent)
};

VoteClassification classify_vote(Vote vote, BlockValidity validity);

struct UpdateParams {
  double delta = 1e-3;
  double loss_reject_valid = 1e-2;    // l_r
  double loss_accept_invalid = 12.0;  // l_a
  std::uint64_t grace_period = 1;     // g, slots before suspension can trigger
  double cap_margin = kDefaultCapMargin;
  bool suspension_enabled = false;

  void validate() const;
};

// A long-run behavior mix: correct votes a fraction `correct` of slots (q),
// no vote on valid blocks a fraction `abstain` (q1), approving invalid blocks
// the rest of the time.
struct BehaviorMix {
  double correct = 0.8;
  double abstain = 0.1;

  void validate() const;
  double approve_invalid() const { return 1.0 - correct - abstain; }
};

// Entering validators start at the uninformative prior.
double initialize_profile();

// One multiplicative update before clamping: correct votes multiply by
// (1+delta), the two error types by (1-delta)^l_r and (1-delta)^l_a.
double mwu_raw_update(double profile, VoteClassification cls, const UpdateParams& params);

// Raw update followed by the [0.5, 1 - cap_margin] clamp.
double mwu_update(double profile, VoteClassification cls, const UpdateParams& params);

// Suspension consults the raw pre-clamp value: the clamped profile can never
// fall below the floor.
bool suspension_check(double raw_profile, std::uint64_t slot, const UpdateParams& params);

struct ToleranceConstants {
  double c1 = 0.0;  // (1 - ln(1+d) / (l_a ln(1-d)))^-1, in (0, 1)
  double c2 = 0.0;  // 1 - l_r / l_a, in (0, 1)
};

// Requires l_r < l_a; both constants land in (0, 1).
ToleranceConstants tolerance_constants(const UpdateParams& params);

// True iff the mix sustains or improves the profile: q >= c1 (1 - c2 q1).
bool sustains_profile(const BehaviorMix& mix, const UpdateParams& params);

// Lower bound on the correct fraction that no sustaining mix can go below,
// independent of the abstention rate: (c1 - c1 c2) / (1 - c1 c2).
double minimum_correct_fraction(const UpdateParams& params);

// Clamped profile sequence after applying the schedule entry by entry.
std::vector<double> run_trajectory(double p0, std::span<const VoteClassification> schedule,
                                   const UpdateParams& params);
// Per-slot parameter override; per_slot.size() must equal schedule.size().
std::vector<double> run_trajectory(double p0, std::span<const VoteClassification> schedule,
                                   std::span<const UpdateParams> per_slot);

enum class ScheduleKind { periodic, seeded_random };

// The classification a mixed-behavior validator produces at schedule position
// `slot` under a periodic (largest-remainder interleave) schedule. Class
// counts over any prefix stay within one of the exact fractions.
VoteClassification scheduled_action(const BehaviorMix& mix, std::uint64_t slot);

std::vector<VoteClassification> make_schedule(const BehaviorMix& mix, std::size_t length,
                                              ScheduleKind kind, std::uint64_t seed);

}  // namespace wvote
