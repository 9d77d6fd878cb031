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

#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "looplab/metrics.hpp"
#include "looplab/rng.hpp"

namespace looplab::feedback {

/// Probability that a feedback label is correct, pulled toward current model
/// quality by exponential smoothing with additive Gaussian noise.
struct FeedbackQuality {
  double q = 0.95;
  double coupling = 0.5;
  double noise_std = 0.02;
};

/// q' = clamp01(coupling * q + (1 - coupling) * model_quality + noise).
FeedbackQuality update_feedback_quality(FeedbackQuality state,
                                        double model_quality, Rng& rng);

/// Each label is kept with probability q, otherwise replaced by a uniformly
/// random different label in [0, class_count).
std::vector<int> corrupt_labels(std::span<const int> labels,
                                const FeedbackQuality& quality,
                                int class_count, Rng& rng);

/// Quality-filter state. The history holds per-generation mean validation
/// scores and is updated once per generation by the engine, never by the
/// filter itself.
struct FilterState {
  double threshold = 0.15;
  metrics::QualityHistory history;
  double last_accept_error_prob = 0.0;
};

struct ScoredCandidate {
  std::string id;
  std::string article_id;
  metrics::TokenSeq summary;
  double score = 0.0;  // ROUGE-L F1 against the article's reference
};

enum class DecisionReason {
  kAboveThreshold,
  kStochasticErrorAccept,
  kRejected,
  kRandomKeep,
  kRandomDrop,
  kPassthrough,
};

std::string_view decision_reason_name(DecisionReason reason);

struct FilterDecision {
  std::string candidate_id;
  bool accepted = false;
  DecisionReason reason = DecisionReason::kPassthrough;
};

struct FilterOutcome {
  std::vector<ScoredCandidate> selected;
  std::vector<FilterDecision> decisions;
};

struct QualityFilterOutcome : FilterOutcome {
  FilterState state;
};

/// Accepts candidates scoring at or above the threshold; accepts
/// sub-threshold candidates with probability 1 - moving_average(history).
/// Requires a non-empty history (seeded with the base model's validation
/// mean before the first generation). Order-preserving.
QualityFilterOutcome quality_filter(const std::vector<ScoredCandidate>& candidates,
                                    FilterState state, Rng& rng);

/// Uniform sample without replacement of exactly target_size candidates,
/// order-preserving.
FilterOutcome random_filter(const std::vector<ScoredCandidate>& candidates,
                            std::size_t target_size, Rng& rng);

/// Identity selection; every decision reason is passthrough.
FilterOutcome no_filter(const std::vector<ScoredCandidate>& candidates);

/// One audit line per decision: {"generation": g, "candidate": id,
/// "accepted": bool, "reason": name}.
void write_decisions_jsonl(std::ostream& out, int generation,
                           std::span<const FilterDecision> decisions);

}  // namespace looplab::feedback
