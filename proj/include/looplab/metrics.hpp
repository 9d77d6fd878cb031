// Copyright 2026 The Looplab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "looplab/rng.hpp"

namespace looplab::metrics {

/// Whitespace-split, lowercased tokens. May be empty; tokens never contain
/// whitespace.
using TokenSeq = std::vector<std::string>;

/// Lowercases (ASCII), splits on whitespace runs, strips leading/trailing
/// punctuation from each token, and drops tokens that strip to nothing.
TokenSeq tokenize(std::string_view text);

/// Joins tokens with single spaces.
std::string join(const TokenSeq& tokens);

/// Length of the longest common subsequence. 0 when either side is empty.
std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b);

/// F1 over LCS precision (LCS/|candidate|) and recall (LCS/|reference|).
/// Returns 0 when either sequence is empty or P+R is zero.
double rouge_l_f1(const TokenSeq& candidate, const TokenSeq& reference);

/// Fraction of exact matches. Both lists must be non-empty and equal length.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// FIFO window of per-generation mean validation scores, capacity 3.
class QualityHistory {
 public:
  static constexpr std::size_t kCapacity = 3;

  /// Appends a score in [0, 1], evicting the oldest entry when full.
  void push(double value);
  /// Arithmetic mean of the stored window; ContractViolation when empty.
  double moving_average() const;

  bool empty() const { return window_.empty(); }
  std::size_t size() const { return window_.size(); }
  const std::deque<double>& window() const { return window_; }

 private:
  std::deque<double> window_;
};

struct MetricSummary {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
  int resamples = 0;

  bool operator==(const MetricSummary&) const = default;
};

/// Percentile bootstrap over means of with-replacement resamples. The mean is
/// the plain sample mean; the bounds are the (1-level)/2 and 1-(1-level)/2
/// nearest-rank percentiles of the resampled means. Deterministic for a
/// fixed generator seed.
MetricSummary bootstrap_ci(std::span<const double> scores, Rng& rng,
                           int resamples = 1000, double level = 0.95);

}  // namespace looplab::metrics
