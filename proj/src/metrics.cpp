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

#include "looplab/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "looplab/common.hpp"
#include "looplab/kernels.hpp"

namespace looplab::metrics {

TokenSeq tokenize(std::string_view text) {
  TokenSeq tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) break;
    std::size_t lo = start;
    std::size_t hi = i;  // one past end
    while (lo < hi && std::ispunct(static_cast<unsigned char>(text[lo]))) ++lo;
    while (hi > lo && std::ispunct(static_cast<unsigned char>(text[hi - 1])))
      --hi;
    if (lo == hi) continue;  // token was all punctuation
    std::string token;
    token.reserve(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
      token.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(text[k]))));
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

std::string join(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  if (a.empty() || b.empty()) return 0;
  // Two-row dynamic program; keep the shorter sequence on the inner axis.
  const TokenSeq& outer = a.size() >= b.size() ? a : b;
  const TokenSeq& inner = a.size() >= b.size() ? b : a;
  std::vector<std::size_t> prev(inner.size() + 1, 0);
  std::vector<std::size_t> curr(inner.size() + 1, 0);
  for (std::size_t i = 1; i <= outer.size(); ++i) {
    for (std::size_t j = 1; j <= inner.size(); ++j) {
      if (outer[i - 1] == inner[j - 1]) {
        curr[j] = prev[j - 1] + 1;
      } else {
        curr[j] = std::max(prev[j], curr[j - 1]);
      }
    }
    std::swap(prev, curr);
  }
  return prev[inner.size()];
}

double rouge_l_f1(const TokenSeq& candidate, const TokenSeq& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  const double precision = lcs / static_cast<double>(candidate.size());
  const double recall = lcs / static_cast<double>(reference.size());
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.empty())
    throw ContractViolation("accuracy: inputs must be non-empty");
  if (predicted.size() != truth.size())
    throw ContractViolation("accuracy: label lists differ in length");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == truth[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

void QualityHistory::push(double value) {
  if (!(value >= 0.0 && value <= 1.0))
    throw ContractViolation("QualityHistory: value outside [0, 1]");
  if (window_.size() == kCapacity) window_.pop_front();
  window_.push_back(value);
}

double QualityHistory::moving_average() const {
  if (window_.empty())
    throw ContractViolation("QualityHistory: moving average of empty window");
  double total = 0.0;
  for (double v : window_) total += v;
  return total / static_cast<double>(window_.size());
}

namespace {

// Nearest-rank percentile of an ascending-sorted vector.
double nearest_rank(const std::vector<double>& sorted, double p) {
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::ptrdiff_t>(std::ceil(p * n));
  rank = std::clamp<std::ptrdiff_t>(rank, 1,
                                    static_cast<std::ptrdiff_t>(sorted.size()));
  return sorted[static_cast<std::size_t>(rank - 1)];
}

}  // namespace

MetricSummary bootstrap_ci(std::span<const double> scores, Rng& rng,
                           int resamples, double level) {
  if (scores.empty())
    throw ContractViolation("bootstrap_ci: scores must be non-empty");
  if (!(level > 0.0 && level < 1.0))
    throw ContractViolation("bootstrap_ci: level must be in (0, 1)");
  if (resamples < 1)
    throw ContractViolation("bootstrap_ci: resamples must be >= 1");

  const std::size_t n = scores.size();
  MetricSummary summary;
  summary.n = n;
  summary.resamples = resamples;
  summary.mean = kernels::sum(scores) / static_cast<double>(n);

  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += scores[rng.index(n)];
    m = total / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double alpha = (1.0 - level) / 2.0;
  summary.ci_low = nearest_rank(means, alpha);
  summary.ci_high = nearest_rank(means, 1.0 - alpha);
  return summary;
}

}  // namespace looplab::metrics
