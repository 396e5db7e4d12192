/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "wvote/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace wvote {

void WelfareParams::validate() const {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("welfare: alpha must lie in (0, 1), got " +
                                std::to_string(alpha));
  }
  if (!(loss_reject_valid > 0.0) || !std::isfinite(loss_reject_valid)) {
    throw std::invalid_argument("welfare: loss_reject_valid must be positive");
  }
  if (!(loss_accept_invalid > 0.0) || !std::isfinite(loss_accept_invalid)) {
    throw std::invalid_argument("welfare: loss_accept_invalid must be positive");
  }
}

std::optional<std::string> WelfareParams::warning() const {
  if (loss_reject_valid >= loss_accept_invalid) {
    return "welfare: loss_reject_valid >= loss_accept_invalid; the model assumes "
           "rejecting valid blocks is much cheaper than accepting invalid ones";
  }
  return std::nullopt;
}

std::vector<double> Committee::profiles() const {
  std::vector<double> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.profile);
  return out;
}

std::vector<double> Committee::stakes() const {
  std::vector<double> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.stake);
  return out;
}

Committee make_committee(std::uint64_t slot, std::vector<CommitteeMember> members,
                         double cap_margin) {
  if (members.empty()) throw std::invalid_argument("empty committee");
  const double cap = 1.0 - cap_margin;
  std::unordered_set<ValidatorId> seen;
  seen.reserve(members.size());
  for (const auto& m : members) {
    if (!seen.insert(m.id).second) {
      throw std::invalid_argument("duplicate validator id " + std::to_string(m.id));
    }
    if (!(m.profile >= kProfileFloor) || !(m.profile <= cap)) {
      throw std::invalid_argument("profile " + std::to_string(m.profile) +
                                  " of validator " + std::to_string(m.id) +
                                  " outside [0.5, 1 - cap_margin]");
    }
    if (!(m.stake >= 0.0) || !std::isfinite(m.stake)) {
      throw std::invalid_argument("negative stake for validator " +
                                  std::to_string(m.id));
    }
  }
  return Committee{slot, std::move(members)};
}

double clamp_profile(double raw, double floor, double cap_margin) {
  return std::min(1.0 - cap_margin, std::max(floor, raw));
}

}  // namespace wvote
