/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "wvote/mwu.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "wvote/rng.hpp"

namespace wvote {

VoteClassification classify_vote(Vote vote, BlockValidity validity) {
  if (vote == Vote::approve) {
    return validity == BlockValidity::valid ? VoteClassification::correct
                                            : VoteClassification::approved_invalid;
  }
  return validity == BlockValidity::invalid
             ? VoteClassification::correct
             : VoteClassification::abstained_or_rejected_valid;
}

void UpdateParams::validate() const {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("update: delta must lie in (0, 1), got " +
                                std::to_string(delta));
  }
  if (!(loss_reject_valid > 0.0) || !std::isfinite(loss_reject_valid)) {
    throw std::invalid_argument("update: loss_reject_valid must be positive");
  }
  if (!(loss_accept_invalid > 0.0) || !std::isfinite(loss_accept_invalid)) {
    throw std::invalid_argument("update: loss_accept_invalid must be positive");
  }
  if (!(cap_margin > 0.0) || !(cap_margin < 0.5)) {
    throw std::invalid_argument("update: cap_margin must lie in (0, 0.5), got " +
                                std::to_string(cap_margin));
  }
}

void BehaviorMix::validate() const {
  if (!(correct >= 0.0) || !(correct <= 1.0)) {
    throw std::invalid_argument("behavior: correct fraction must lie in [0, 1]");
  }
  if (!(abstain >= 0.0) || !(abstain <= 1.0)) {
    throw std::invalid_argument("behavior: abstain fraction must lie in [0, 1]");
  }
  if (correct + abstain > 1.0 + 1e-12) {
    throw std::invalid_argument("behavior: correct + abstain must not exceed 1");
  }
}

double initialize_profile() { return 0.5; }

double mwu_raw_update(double profile, VoteClassification cls, const UpdateParams& params) {
  switch (cls) {
    case VoteClassification::correct:
      return profile * (1.0 + params.delta);
    case VoteClassification::abstained_or_rejected_valid:
      return profile * std::pow(1.0 - params.delta, params.loss_reject_valid);
    case VoteClassification::approved_invalid:
      return profile * std::pow(1.0 - params.delta, params.loss_accept_invalid);
  }
  return profile;
}

double mwu_update(double profile, VoteClassification cls, const UpdateParams& params) {
  return clamp_profile(mwu_raw_update(profile, cls, params), kProfileFloor,
                       params.cap_margin);
}

bool suspension_check(double raw_profile, std::uint64_t slot, const UpdateParams& params) {
  return params.suspension_enabled && slot >= params.grace_period && raw_profile < 0.5;
}

ToleranceConstants tolerance_constants(const UpdateParams& params) {
  params.validate();
  if (!(params.loss_reject_valid < params.loss_accept_invalid)) {
    throw std::invalid_argument(
        "tolerance constants require loss_reject_valid < loss_accept_invalid");
  }
  ToleranceConstants c;
  c.c1 = 1.0 / (1.0 - std::log1p(params.delta) /
                          (params.loss_accept_invalid * std::log1p(-params.delta)));
  c.c2 = 1.0 - params.loss_reject_valid / params.loss_accept_invalid;
  return c;
}

bool sustains_profile(const BehaviorMix& mix, const UpdateParams& params) {
  mix.validate();
  const ToleranceConstants c = tolerance_constants(params);
  return mix.correct >= c.c1 * (1.0 - c.c2 * mix.abstain);
}

double minimum_correct_fraction(const UpdateParams& params) {
  const ToleranceConstants c = tolerance_constants(params);
  return (c.c1 - c.c1 * c.c2) / (1.0 - c.c1 * c.c2);
}

std::vector<double> run_trajectory(double p0, std::span<const VoteClassification> schedule,
                                   const UpdateParams& params) {
  params.validate();
  std::vector<double> out;
  out.reserve(schedule.size());
  double p = p0;
  for (VoteClassification cls : schedule) {
    p = mwu_update(p, cls, params);
    out.push_back(p);
  }
  return out;
}

std::vector<double> run_trajectory(double p0, std::span<const VoteClassification> schedule,
                                   std::span<const UpdateParams> per_slot) {
  if (per_slot.size() != schedule.size()) {
    throw std::invalid_argument("per-slot parameter count does not match schedule");
  }
  std::vector<double> out;
  out.reserve(schedule.size());
  double p = p0;
  for (std::size_t t = 0; t < schedule.size(); ++t) {
    per_slot[t].validate();
    p = mwu_update(p, schedule[t], per_slot[t]);
    out.push_back(p);
  }
  return out;
}

VoteClassification scheduled_action(const BehaviorMix& mix, std::uint64_t slot) {
  mix.validate();
  const double q = mix.correct;
  const auto t = static_cast<double>(slot);
  // Correct slots first by error diffusion on q; remaining slots split between
  // abstentions and invalid approvals by a second diffusion.
  if (std::floor((t + 1.0) * q) - std::floor(t * q) >= 1.0) {
    return VoteClassification::correct;
  }
  if (q >= 1.0) return VoteClassification::correct;
  const double j = t - std::floor((t + 1.0) * q);
  const double r = mix.abstain / (1.0 - q);
  if (std::floor((j + 1.0) * r) - std::floor(j * r) >= 1.0) {
    return VoteClassification::abstained_or_rejected_valid;
  }
  return VoteClassification::approved_invalid;
}

std::vector<VoteClassification> make_schedule(const BehaviorMix& mix, std::size_t length,
                                              ScheduleKind kind, std::uint64_t seed) {
  mix.validate();
  std::vector<VoteClassification> out;
  out.reserve(length);
  if (kind == ScheduleKind::periodic) {
    for (std::size_t t = 0; t < length; ++t) out.push_back(scheduled_action(mix, t));
    return out;
  }
  SubRng rng(seed, RngPurpose::behavior);
  for (std::size_t t = 0; t < length; ++t) {
    const double u = rng.uniform01();
    if (u < mix.correct) {
      out.push_back(VoteClassification::correct);
    } else if (u < mix.correct + mix.abstain) {
      out.push_back(VoteClassification::abstained_or_rejected_valid);
    } else {
      out.push_back(VoteClassification::approved_invalid);
    }
  }
  return out;
}

}  // namespace wvote
