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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "looplab/data.hpp"
#include "looplab/metrics.hpp"
#include "looplab/rng.hpp"

namespace looplab::learners {

/// Multinomial logistic regression. Features are scaled by 1/16 internally,
/// both in training and prediction.
struct SoftmaxModel {
  int class_count = data::kClassCount;
  std::size_t feature_count = data::kFeatureCount;
  std::vector<double> weights;  // row-major, class_count x feature_count
  std::vector<double> biases;   // class_count

  static SoftmaxModel zeros(int class_count = data::kClassCount,
                            std::size_t feature_count = data::kFeatureCount);
  std::span<const double> row(int c) const;
  std::span<double> row(int c);

  bool operator==(const SoftmaxModel&) const = default;
};

/// Class scores (logits) for one feature vector.
std::vector<double> class_scores(const SoftmaxModel& model,
                                 std::span<const double> features);

/// Softmax probabilities with max-shift for stability.
std::vector<double> class_probabilities(const SoftmaxModel& model,
                                        std::span<const double> features);

/// Per-sample cross-entropy loss and gradient at the given (sample, label).
/// Gradient layout matches the model: grad_weights row-major, grad_biases per
/// class. Exposed so the gradient can be checked against finite differences.
double cross_entropy_loss_and_gradient(const SoftmaxModel& model,
                                       std::span<const double> features,
                                       int label,
                                       std::span<double> grad_weights,
                                       std::span<double> grad_biases);

/// Per-sample SGD over shuffled data, `epochs` passes. Throws
/// TrainingFailure if the loss goes non-finite.
SoftmaxModel sgd_train(SoftmaxModel model, const data::VectorDataset& dataset,
                       int epochs, double learning_rate, Rng& rng);

/// Argmax of class scores; ties break toward the lowest class index.
int sgd_predict(const SoftmaxModel& model, std::span<const double> features);

/// Majority label among the k nearest training samples by Euclidean
/// distance. Distance ties break toward the lower sample index, vote ties
/// toward the lowest label.
int knn_label(const data::VectorDataset& train, std::span<const double> features,
              std::size_t k = 5);

/// Four classifiers plus their fitness (accuracy on the evaluation set used
/// by the last ea_step).
struct Population {
  static constexpr std::size_t kSize = 4;
  static constexpr std::size_t kParents = 2;
  std::array<SoftmaxModel, kSize> members;
  std::array<double, kSize> fitness{};

  static Population cloned_from(const SoftmaxModel& model);
};

struct EaParams {
  double mutation_std = 0.01;
  double learning_rate = 0.05;
};

/// One selection step: rank by accuracy on eval_set, keep the two fittest
/// unchanged, replace the rest with crossover+mutation children refined by a
/// single SGD epoch on train_pool, then re-evaluate everyone.
Population ea_step(Population population, const data::VectorDataset& train_pool,
                   const data::VectorDataset& eval_set, const EaParams& params,
                   Rng& rng);

/// Index of the fittest member (ties toward the lowest index).
std::size_t champion_index(const Population& population);

/// Order-2 Markov chain over tokens with an extractive bias: candidate
/// continuations that appear in the current article have their counts
/// multiplied by (1 + continuation_bias).
struct MarkovSummarizer {
  using Context = std::pair<std::string, std::string>;
  double continuation_bias = 1.0;
  std::map<Context, std::map<std::string, std::uint64_t>> transitions;

  std::uint64_t total_count() const;
  bool operator==(const MarkovSummarizer&) const = default;
};

struct TrainingPair {
  metrics::TokenSeq article;
  metrics::TokenSeq summary;
};

/// Samples up to max_len tokens. The output begins with the article's first
/// two tokens (one if the article is a single token) and extends while the
/// current 2-token context has continuations.
metrics::TokenSeq summarize(const MarkovSummarizer& model,
                            const metrics::TokenSeq& article,
                            std::size_t max_len, Rng& rng);

/// Adds every bigram -> next-token triple of each training summary to the
/// transition counts. Cumulative; the article side of each pair is unused.
MarkovSummarizer fine_tune_summarizer(MarkovSummarizer model,
                                      std::span<const TrainingPair> pairs);

// Checkpoint serialization: JSON objects with explicit field names and
// row-major weight arrays.
void save_model(const SoftmaxModel& model, const std::filesystem::path& path);
SoftmaxModel load_softmax_model(const std::filesystem::path& path);
void save_model(const MarkovSummarizer& model,
                const std::filesystem::path& path);
MarkovSummarizer load_summarizer(const std::filesystem::path& path);

}  // namespace looplab::learners
