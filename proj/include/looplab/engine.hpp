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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "looplab/data.hpp"
#include "looplab/feedback.hpp"
#include "looplab/learners.hpp"
#include "looplab/metrics.hpp"
#include "looplab/rng.hpp"

namespace looplab::engine {

enum class Exp1Arm { kBaseline, kRag, kEa, kEaRag };
enum class Exp2Arm { kControl, kRandomFilter, kQualityFilter };

std::string_view arm_name(Exp1Arm arm);
std::string_view arm_name(Exp2Arm arm);
std::optional<Exp1Arm> parse_exp1_arm(std::string_view name);
std::optional<Exp2Arm> parse_exp2_arm(std::string_view name);

/// Every tunable of both experiments, with defaults matching the reported
/// study protocol wherever one exists.
struct LoopConfig {
  // Shared.
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::uint64_t dataset_seed = 2026;
  int resamples = 1000;
  double ci_level = 0.95;
  int jobs = 1;

  // Experiment 1: recursive classifier loop.
  std::vector<Exp1Arm> exp1_arms{Exp1Arm::kBaseline, Exp1Arm::kRag,
                                 Exp1Arm::kEa, Exp1Arm::kEaRag};
  int iterations = 10;
  std::size_t digits_count = 1797;
  double train_fraction = 0.6;
  double pool_fraction = 0.2;  // held-out test set takes the remainder
  std::size_t batch_size = 200;
  int epochs_per_iteration = 5;
  double learning_rate = 0.05;
  std::size_t knn_k = 5;
  std::size_t population_size = learners::Population::kSize;
  std::size_t parent_count = learners::Population::kParents;
  double mutation_std = 0.01;
  double ea_learning_rate = 0.05;  // child refinement epoch
  std::size_t ea_eval_count = 200;
  double initial_feedback_q = 0.95;
  double coupling = 0.5;
  double feedback_noise_std = 0.02;
  double initial_accuracy_target = 0.88;
  int initial_training_max_epochs = 30;
  data::SynthDigitsParams digits;

  // Experiment 2: recursive summarizer loop.
  std::vector<Exp2Arm> exp2_arms{Exp2Arm::kControl, Exp2Arm::kRandomFilter,
                                 Exp2Arm::kQualityFilter};
  int generations = 5;
  std::size_t candidates_per_generation = 100;
  std::size_t corpus_generation_size = 500;
  std::size_t corpus_validation_size = 100;
  std::size_t test_count = 50;
  double threshold = 0.15;
  double continuation_bias = 1.0;
  std::size_t max_summary_len = 20;
  data::SynthCorpusParams corpus;
};

/// Throws ContractViolation naming the offending field.
void validate(const LoopConfig& config);

struct GenerationRecord {
  std::string experiment;
  std::string arm;
  std::uint64_t seed = 0;
  int generation = 0;
  metrics::MetricSummary metric;
  std::optional<double> validation_mean;
  std::size_t selected_count = 0;
  std::size_t discarded_count = 0;
  std::optional<double> feedback_q;

  bool operator==(const GenerationRecord&) const = default;
};

struct Trajectory {
  std::string experiment;
  std::string arm;
  std::uint64_t seed = 0;
  std::vector<GenerationRecord> records;
};

struct AuditRecord {
  std::string arm;
  std::uint64_t seed = 0;
  int generation = 0;
  std::vector<feedback::FilterDecision> decisions;
};

struct RunResult {
  std::vector<Trajectory> trajectories;
  std::vector<AuditRecord> audit;
};

// --- Experiment 2 building blocks ------------------------------------------

struct Exp2Streams {
  Rng data;        // which articles are drawn each generation
  Rng generation;  // token sampling while producing candidate summaries
  Rng filter;      // stochastic filter decisions
  Rng eval;        // token sampling for validation/test evaluation
  Rng bootstrap;   // CI resampling

  static Exp2Streams from(const Rng& master);
};

struct Exp2State {
  learners::MarkovSummarizer model;
  feedback::FilterState filter;
};

struct Exp2GenerationOutcome {
  GenerationRecord record;
  std::vector<feedback::FilterDecision> decisions;
};

/// One full generate -> score -> filter -> fine-tune -> evaluate cycle.
/// `random_target` is required for the random-filter arm and carries the
/// paired quality run's selected count for this generation.
Exp2GenerationOutcome run_generation_exp2(
    Exp2State& state, Exp2Arm arm, const data::CorpusPartitions& partitions,
    const LoopConfig& config, int generation,
    std::optional<std::size_t> random_target, Exp2Streams& streams,
    std::uint64_t seed);

RunResult run_experiment2(const LoopConfig& config);

// --- Experiment 1 building blocks ------------------------------------------

struct Exp1Datasets {
  data::VectorDataset train_store;  // pristine labels, RAG retrieval source
  data::VectorDataset pool;         // unlabeled batches come from here
  data::VectorDataset test;         // held-out evaluation
};

Exp1Datasets make_exp1_datasets(const LoopConfig& config, std::uint64_t seed);

struct Exp1Streams {
  Rng data;      // batch sampling
  Rng feedback;  // corruption and coupled-quality noise
  Rng training;  // SGD shuffling, crossover, mutation
  Rng bootstrap;

  static Exp1Streams from(const Rng& master);
};

struct Exp1State {
  std::variant<learners::SoftmaxModel, learners::Population> learner;
  feedback::FeedbackQuality quality;
};

/// One degrading-feedback iteration: predict on a fresh batch, produce
/// feedback labels (corrupted truth or k-NN retrieval), retrain, evaluate.
GenerationRecord run_generation_exp1(Exp1State& state, Exp1Arm arm,
                                     const Exp1Datasets& datasets,
                                     const LoopConfig& config, int iteration,
                                     Exp1Streams& streams, std::uint64_t seed);

RunResult run_experiment1(const LoopConfig& config);

}  // namespace looplab::engine
