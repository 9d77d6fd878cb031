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

#include "looplab/feedback.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "looplab/common.hpp"

namespace looplab::feedback {

FeedbackQuality update_feedback_quality(FeedbackQuality state,
                                        double model_quality, Rng& rng) {
  if (!(model_quality >= 0.0 && model_quality <= 1.0))
    throw ContractViolation(
        "update_feedback_quality: model_quality outside [0, 1]");
  const double noise = rng.gaussian(0.0, state.noise_std);
  const double next = state.coupling * state.q +
                      (1.0 - state.coupling) * model_quality + noise;
  state.q = std::clamp(next, 0.0, 1.0);
  return state;
}

std::vector<int> corrupt_labels(std::span<const int> labels,
                                const FeedbackQuality& quality,
                                int class_count, Rng& rng) {
  if (class_count < 2)
    throw ContractViolation("corrupt_labels: class_count must be >= 2");
  std::vector<int> out;
  out.reserve(labels.size());
  for (const int label : labels) {
    if (rng.uniform() < quality.q) {
      out.push_back(label);
    } else {
      // Uniform over the class_count - 1 wrong labels.
      int wrong = static_cast<int>(rng.below(
          static_cast<std::uint64_t>(class_count - 1)));
      if (wrong >= label) ++wrong;
      out.push_back(wrong);
    }
  }
  return out;
}

std::string_view decision_reason_name(DecisionReason reason) {
  switch (reason) {
    case DecisionReason::kAboveThreshold:
      return "above_threshold";
    case DecisionReason::kStochasticErrorAccept:
      return "stochastic_error_accept";
    case DecisionReason::kRejected:
      return "rejected";
    case DecisionReason::kRandomKeep:
      return "random_keep";
    case DecisionReason::kRandomDrop:
      return "random_drop";
    case DecisionReason::kPassthrough:
      return "passthrough";
  }
  return "unknown";
}

QualityFilterOutcome quality_filter(
    const std::vector<ScoredCandidate>& candidates, FilterState state,
    Rng& rng) {
  if (state.history.empty())
    throw ContractViolation(
        "quality_filter: history must be seeded before filtering");
  if (!(state.threshold > 0.0 && state.threshold < 1.0))
    throw ContractViolation("quality_filter: threshold outside (0, 1)");

  const double accept_error_prob = 1.0 - state.history.moving_average();
  state.last_accept_error_prob = accept_error_prob;

  QualityFilterOutcome outcome;
  outcome.decisions.reserve(candidates.size());
  for (const auto& candidate : candidates) {
    FilterDecision decision;
    decision.candidate_id = candidate.id;
    if (candidate.score >= state.threshold) {
      decision.accepted = true;
      decision.reason = DecisionReason::kAboveThreshold;
    } else if (rng.uniform() < accept_error_prob) {
      decision.accepted = true;
      decision.reason = DecisionReason::kStochasticErrorAccept;
    } else {
      decision.accepted = false;
      decision.reason = DecisionReason::kRejected;
    }
    if (decision.accepted) outcome.selected.push_back(candidate);
    outcome.decisions.push_back(std::move(decision));
  }
  outcome.state = std::move(state);
  return outcome;
}

FilterOutcome random_filter(const std::vector<ScoredCandidate>& candidates,
                            std::size_t target_size, Rng& rng) {
  if (target_size > candidates.size())
    throw ContractViolation("random_filter: target exceeds candidate count");

  // Partial Fisher-Yates over the index set picks the kept subset.
  std::vector<std::size_t> indices(candidates.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  for (std::size_t i = 0; i < target_size; ++i) {
    const std::size_t j = i + rng.index(indices.size() - i);
    std::swap(indices[i], indices[j]);
  }
  std::vector<bool> keep(candidates.size(), false);
  for (std::size_t i = 0; i < target_size; ++i) keep[indices[i]] = true;

  FilterOutcome outcome;
  outcome.selected.reserve(target_size);
  outcome.decisions.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    FilterDecision decision;
    decision.candidate_id = candidates[i].id;
    decision.accepted = keep[i];
    decision.reason =
        keep[i] ? DecisionReason::kRandomKeep : DecisionReason::kRandomDrop;
    if (keep[i]) outcome.selected.push_back(candidates[i]);
    outcome.decisions.push_back(std::move(decision));
  }
  return outcome;
}

FilterOutcome no_filter(const std::vector<ScoredCandidate>& candidates) {
  FilterOutcome outcome;
  outcome.selected = candidates;
  outcome.decisions.reserve(candidates.size());
  for (const auto& candidate : candidates) {
    outcome.decisions.push_back(
        {candidate.id, true, DecisionReason::kPassthrough});
  }
  return outcome;
}

void write_decisions_jsonl(std::ostream& out, int generation,
                           std::span<const FilterDecision> decisions) {
  for (const auto& decision : decisions) {
    nlohmann::ordered_json obj;
    obj["generation"] = generation;
    obj["candidate"] = decision.candidate_id;
    obj["accepted"] = decision.accepted;
    obj["reason"] = decision_reason_name(decision.reason);
    out << obj.dump() << '\n';
  }
}

}  // namespace looplab::feedback
