/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wvote {

using ValidatorId = std::uint32_t;

// Voting profiles live in [0.5, 1 - cap_margin]. The floor is fixed by the
// protocol; the cap keeps the log-odds weight ln(p/(1-p)) finite.
inline constexpr double kProfileFloor = 0.5;
inline constexpr double kDefaultCapMargin = 1e-5;
// Alternative cap used by the clamp formula variant; weights reach ~34.5
// instead of ~11.5 under it.
inline constexpr double kTightCapMargin = 1e-15;

// A vote on the proposed block. reject also encodes abstention / no-vote.
enum class Vote : int { reject = -1, approve = 1 };

enum class BlockValidity : int { invalid = -1, valid = 1 };

inline constexpr int vote_value(Vote v) { return static_cast<int>(v); }

// Votes of one committee for one slot, aligned with committee member order.
using DecisionProfile = std::vector<Vote>;

// Collective welfare parametrization: a correct decision earns 1, rejecting a
// valid block loses loss_reject_valid (l_r), accepting an invalid block loses
// loss_accept_invalid (l_a); alpha is the prior probability that a proposed
// block is invalid.
struct WelfareParams {
  double alpha = 0.5;
  double loss_reject_valid = 1e-2;
  double loss_accept_invalid = 12.0;

  // Throws std::invalid_argument on hard violations (alpha outside (0,1),
  // non-positive losses). l_r >= l_a is legal but against the model's
  // assumption l_r << l_a; warning() reports it.
  void validate() const;
  std::optional<std::string> warning() const;
};

struct CommitteeMember {
  ValidatorId id = 0;
  double profile = kProfileFloor;
  double stake = 0.0;
};

// A selected committee for one slot: an ordered snapshot of member ids,
// profiles and stakes.
struct Committee {
  std::uint64_t slot = 0;
  std::vector<CommitteeMember> members;

  std::size_t size() const { return members.size(); }
  std::vector<double> profiles() const;
  std::vector<double> stakes() const;
};

// Validating constructor: rejects empty committees, duplicate ids, profiles
// outside [0.5, 1 - cap_margin] and negative stakes.
Committee make_committee(std::uint64_t slot, std::vector<CommitteeMember> members,
                         double cap_margin = kDefaultCapMargin);

// min(1 - cap_margin, max(floor, raw)). Total on all inputs.
double clamp_profile(double raw, double floor = kProfileFloor,
                     double cap_margin = kDefaultCapMargin);

}  // namespace wvote
