/**
 * Copyright wvote contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "wvote/core.hpp"

namespace wvote::detail {

// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

// Evaluates the approval margin sum_i w_i x_i - (2q - 1) sum_i w_i as one
// compensated accumulation of per-member terms w_i (x_i - (2q - 1)), each
// carried together with its exact fma residual. Profiles that tie the
// threshold in real arithmetic (the worked five-validator committee's coarse weights under the 2/3 rule do)
// then resolve by the true sign instead of summation noise.
class MarginEvaluator {
 public:
  MarginEvaluator(std::span<const double> weights, double quota) {
    const double shift = 2.0 * quota - 1.0;
    const double ca = 1.0 - shift;
    const double cr = -1.0 - shift;
    approve_.reserve(weights.size());
    reject_.reserve(weights.size());
    for (double w : weights) {
      approve_.push_back(make_term(w, ca));
      reject_.push_back(make_term(w, cr));
    }
  }

  std::size_t size() const { return approve_.size(); }

  // bit i of approve_mask set <=> member i votes approve.
  double margin(std::uint32_t approve_mask) const {
    CompensatedSum acc;
    for (std::size_t i = 0; i < approve_.size(); ++i) {
      const Term& t = (approve_mask >> i & 1u) ? approve_[i] : reject_[i];
      acc.add(t.value);
      acc.add(t.err);
    }
    return acc.value();
  }

  double margin(const DecisionProfile& votes) const {
    CompensatedSum acc;
    for (std::size_t i = 0; i < votes.size(); ++i) {
      const Term& t = votes[i] == Vote::approve ? approve_[i] : reject_[i];
      acc.add(t.value);
      acc.add(t.err);
    }
    return acc.value();
  }

 private:
  struct Term {
    double value;
    double err;
  };

  static Term make_term(double w, double coeff) {
    const double v = w * coeff;
    return Term{v, std::fma(w, coeff, -v)};
  }

  std::vector<Term> approve_;
  std::vector<Term> reject_;
};

}  // namespace wvote::detail
