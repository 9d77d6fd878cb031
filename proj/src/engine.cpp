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

#include "looplab/engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>

#include "looplab/common.hpp"
#include "looplab/kernels.hpp"

namespace looplab::engine {

std::string_view arm_name(Exp1Arm arm) {
  switch (arm) {
    case Exp1Arm::kBaseline:
      return "baseline";
    case Exp1Arm::kRag:
      return "rag";
    case Exp1Arm::kEa:
      return "ea";
    case Exp1Arm::kEaRag:
      return "ea_rag";
  }
  return "unknown";
}

std::string_view arm_name(Exp2Arm arm) {
  switch (arm) {
    case Exp2Arm::kControl:
      return "control";
    case Exp2Arm::kRandomFilter:
      return "random_filter";
    case Exp2Arm::kQualityFilter:
      return "quality_filter";
  }
  return "unknown";
}

std::optional<Exp1Arm> parse_exp1_arm(std::string_view name) {
  for (const Exp1Arm arm : {Exp1Arm::kBaseline, Exp1Arm::kRag, Exp1Arm::kEa,
                            Exp1Arm::kEaRag}) {
    if (name == arm_name(arm)) return arm;
  }
  return std::nullopt;
}

std::optional<Exp2Arm> parse_exp2_arm(std::string_view name) {
  for (const Exp2Arm arm : {Exp2Arm::kControl, Exp2Arm::kRandomFilter,
                            Exp2Arm::kQualityFilter}) {
    if (name == arm_name(arm)) return arm;
  }
  return std::nullopt;
}

void validate(const LoopConfig& config) {
  auto fail = [](const char* field, const char* what) {
    throw ContractViolation(std::string("config field '") + field + "': " +
                            what);
  };
  if (config.seeds.empty()) fail("seeds", "must list at least one seed");
  if (config.resamples < 1) fail("resamples", "must be >= 1");
  if (!(config.ci_level > 0.0 && config.ci_level < 1.0))
    fail("ci_level", "must be in (0, 1)");
  if (config.jobs < 1) fail("jobs", "must be >= 1");

  if (config.exp1_arms.empty()) fail("arms", "experiment 1 needs >= 1 arm");
  if (config.iterations < 1) fail("iterations", "must be >= 1");
  if (config.digits_count < 100) fail("digits-count", "must be >= 100");
  if (!(config.train_fraction > 0.0 && config.pool_fraction > 0.0 &&
        config.train_fraction + config.pool_fraction < 1.0))
    fail("train-fraction/pool-fraction",
         "must be positive and leave room for a test split");
  if (config.batch_size < 1) fail("batch-size", "must be >= 1");
  const auto pool_count = static_cast<std::size_t>(
      config.pool_fraction * static_cast<double>(config.digits_count));
  if (config.batch_size > pool_count)
    fail("batch-size", "exceeds the unlabeled pool");
  if (config.epochs_per_iteration < 0) fail("epochs", "must be >= 0");
  if (!(config.learning_rate > 0.0)) fail("learning-rate", "must be > 0");
  if (config.knn_k < 1) fail("knn-k", "must be >= 1");
  if (config.population_size != learners::Population::kSize)
    fail("population", "this build supports exactly 4 members");
  if (config.parent_count != learners::Population::kParents)
    fail("parents", "this build supports exactly 2 parents");
  if (!(config.mutation_std >= 0.0)) fail("mutation-std", "must be >= 0");
  if (!(config.ea_learning_rate > 0.0))
    fail("ea-learning-rate", "must be > 0");
  if (config.ea_eval_count < 1) fail("ea-eval-count", "must be >= 1");
  if (!(config.initial_feedback_q >= 0.0 && config.initial_feedback_q <= 1.0))
    fail("initial-feedback-q", "must be in [0, 1]");
  if (!(config.coupling >= 0.0 && config.coupling <= 1.0))
    fail("coupling", "must be in [0, 1]");
  if (!(config.feedback_noise_std >= 0.0))
    fail("feedback-noise-std", "must be >= 0");

  if (config.exp2_arms.empty()) fail("arms", "experiment 2 needs >= 1 arm");
  if (config.generations < 1) fail("generations", "must be >= 1");
  if (config.candidates_per_generation < 1)
    fail("candidates", "must be >= 1");
  if (config.candidates_per_generation > config.corpus_generation_size)
    fail("candidates", "exceeds the generation set");
  if (config.corpus_generation_size < 1 || config.corpus_validation_size < 1 ||
      config.test_count < 1)
    fail("corpus sizes", "generation/validation/test must each be >= 1");
  if (!(config.threshold > 0.0 && config.threshold < 1.0))
    fail("threshold", "must be in (0, 1)");
  if (!(config.continuation_bias >= 0.0))
    fail("continuation-bias", "must be >= 0");
  if (config.max_summary_len < 1) fail("max-summary-len", "must be >= 1");
}

namespace {

// Runs tasks on up to `jobs` worker threads; rethrows the first failure.
void run_tasks(std::vector<std::function<void()>>& tasks, int jobs) {
  if (jobs <= 1 || tasks.size() <= 1) {
    for (auto& task : tasks) task();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(tasks.size());
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), tasks.size());
  std::vector<std::thread> threads;
  threads.reserve(thread_count);
  for (std::size_t t = 0; t < thread_count; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<std::size_t> sample_without_replacement(std::size_t population,
                                                    std::size_t count,
                                                    Rng& rng) {
  std::vector<std::size_t> indices(population);
  for (std::size_t i = 0; i < population; ++i) indices[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.index(population - i);
    std::swap(indices[i], indices[j]);
  }
  indices.resize(count);
  return indices;
}

std::vector<double> rouge_scores(const learners::MarkovSummarizer& model,
                                 const std::vector<data::TextPair>& pairs,
                                 std::size_t max_len, Rng& rng) {
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (const auto& pair : pairs) {
    const metrics::TokenSeq summary =
        learners::summarize(model, pair.article, max_len, rng);
    scores.push_back(metrics::rouge_l_f1(summary, pair.reference));
  }
  return scores;
}

double mean_of(std::span<const double> values) {
  return kernels::sum(values) / static_cast<double>(values.size());
}

}  // namespace

// --- Experiment 2 -----------------------------------------------------------

Exp2Streams Exp2Streams::from(const Rng& master) {
  return Exp2Streams{master.substream("data"), master.substream("generation"),
                     master.substream("filter"), master.substream("eval"),
                     master.substream("bootstrap")};
}

Exp2GenerationOutcome run_generation_exp2(
    Exp2State& state, Exp2Arm arm, const data::CorpusPartitions& partitions,
    const LoopConfig& config, int generation,
    std::optional<std::size_t> random_target, Exp2Streams& streams,
    std::uint64_t seed) {
  const auto& gen_set = partitions.generation_set;
  if (config.candidates_per_generation > gen_set.size())
    throw ContractViolation("run_generation_exp2: candidate draw exceeds "
                            "generation set");

  // Draw articles without replacement within this generation.
  const std::vector<std::size_t> article_indices = sample_without_replacement(
      gen_set.size(), config.candidates_per_generation, streams.data);

  std::vector<feedback::ScoredCandidate> candidates;
  candidates.reserve(article_indices.size());
  for (const std::size_t idx : article_indices) {
    const auto& pair = gen_set[idx];
    feedback::ScoredCandidate candidate;
    candidate.id = "g" + std::to_string(generation) + "-" + pair.id;
    candidate.article_id = pair.id;
    candidate.summary = learners::summarize(state.model, pair.article,
                                            config.max_summary_len,
                                            streams.generation);
    candidate.score = metrics::rouge_l_f1(candidate.summary, pair.reference);
    candidates.push_back(std::move(candidate));
  }

  feedback::FilterOutcome outcome;
  switch (arm) {
    case Exp2Arm::kQualityFilter: {
      auto result = feedback::quality_filter(candidates, std::move(state.filter),
                                             streams.filter);
      state.filter = std::move(result.state);
      outcome.selected = std::move(result.selected);
      outcome.decisions = std::move(result.decisions);
      break;
    }
    case Exp2Arm::kRandomFilter: {
      if (!random_target)
        throw ContractViolation(
            "run_generation_exp2: random arm needs the paired quality arm's "
            "selected count");
      outcome = feedback::random_filter(candidates, *random_target,
                                        streams.filter);
      break;
    }
    case Exp2Arm::kControl:
      outcome = feedback::no_filter(candidates);
      break;
  }

  // Fine-tune on the selected (article, generated summary) pairs.
  std::vector<learners::TrainingPair> training;
  training.reserve(outcome.selected.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!outcome.decisions[i].accepted) continue;
    training.push_back(
        {gen_set[article_indices[i]].article, candidates[i].summary});
  }
  state.model = learners::fine_tune_summarizer(std::move(state.model),
                                               training);

  const std::vector<double> validation = rouge_scores(
      state.model, partitions.validation_set, config.max_summary_len,
      streams.eval);
  const double validation_mean = mean_of(validation);
  state.filter.history.push(validation_mean);

  const std::vector<double> test_scores = rouge_scores(
      state.model, partitions.test_set, config.max_summary_len, streams.eval);

  Exp2GenerationOutcome result;
  result.record.experiment = "exp2";
  result.record.arm = std::string(arm_name(arm));
  result.record.seed = seed;
  result.record.generation = generation;
  result.record.metric = metrics::bootstrap_ci(
      test_scores, streams.bootstrap, config.resamples, config.ci_level);
  result.record.validation_mean = validation_mean;
  result.record.selected_count = outcome.selected.size();
  result.record.discarded_count = candidates.size() - outcome.selected.size();
  result.decisions = std::move(outcome.decisions);
  return result;
}

namespace {

struct Exp2SeedOutput {
  std::vector<Trajectory> trajectories;
  std::vector<AuditRecord> audit;
};

struct Exp2ArmRun {
  Trajectory trajectory;
  std::vector<AuditRecord> audit;
  std::vector<std::size_t> selected_counts;  // per generation, 1-based order
};

Exp2ArmRun run_exp2_arm(Exp2Arm arm, std::uint64_t seed,
                        const GenerationRecord& generation_zero,
                        const learners::MarkovSummarizer& base_model,
                        double base_validation_mean,
                        const data::CorpusPartitions& partitions,
                        const LoopConfig& config,
                        const std::vector<std::size_t>* random_targets) {
  Exp2ArmRun run;
  const std::string name(arm_name(arm));
  Exp2Streams streams = Exp2Streams::from(
      Rng(seed).substream("exp2/arm/" + name));

  Exp2State state;
  state.model = base_model;
  state.filter.threshold = config.threshold;
  state.filter.history.push(base_validation_mean);

  run.trajectory.experiment = "exp2";
  run.trajectory.arm = name;
  run.trajectory.seed = seed;
  GenerationRecord zero = generation_zero;
  zero.arm = name;
  run.trajectory.records.push_back(std::move(zero));

  for (int g = 1; g <= config.generations; ++g) {
    std::optional<std::size_t> target;
    if (arm == Exp2Arm::kRandomFilter) {
      target = (*random_targets)[static_cast<std::size_t>(g - 1)];
    }
    Exp2GenerationOutcome outcome = run_generation_exp2(
        state, arm, partitions, config, g, target, streams, seed);
    run.selected_counts.push_back(outcome.record.selected_count);
    run.trajectory.records.push_back(std::move(outcome.record));
    run.audit.push_back({name, seed, g, std::move(outcome.decisions)});
  }
  return run;
}

}  // namespace

RunResult run_experiment2(const LoopConfig& config) {
  validate(config);

  const std::size_t corpus_total = config.corpus_generation_size +
                                   config.corpus_validation_size +
                                   config.test_count;
  Rng corpus_rng = Rng(config.dataset_seed).substream("exp2/corpus");
  const std::vector<data::TextPair> corpus =
      data::synth_corpus(corpus_total, corpus_rng, config.corpus);
  Rng partition_rng = Rng(config.dataset_seed).substream("exp2/partition");
  const data::CorpusPartitions partitions = data::partition(
      corpus,
      static_cast<double>(config.corpus_generation_size) /
          static_cast<double>(corpus_total),
      static_cast<double>(config.corpus_validation_size) /
          static_cast<double>(corpus_total),
      config.test_count, partition_rng);

  // The base summarizer stands in for the pretrained model: its transition
  // table is counted from the generation set's reference sentences. It never
  // sees validation or test references.
  learners::MarkovSummarizer base;
  base.continuation_bias = config.continuation_bias;
  {
    std::vector<learners::TrainingPair> pretraining;
    pretraining.reserve(partitions.generation_set.size());
    for (const auto& pair : partitions.generation_set) {
      pretraining.push_back({pair.article, pair.reference});
    }
    base = learners::fine_tune_summarizer(std::move(base), pretraining);
  }

  const bool want_quality =
      std::find(config.exp2_arms.begin(), config.exp2_arms.end(),
                Exp2Arm::kQualityFilter) != config.exp2_arms.end();
  const bool want_random =
      std::find(config.exp2_arms.begin(), config.exp2_arms.end(),
                Exp2Arm::kRandomFilter) != config.exp2_arms.end();

  std::vector<Exp2SeedOutput> outputs(config.seeds.size());
  std::vector<std::function<void()>> tasks;
  tasks.reserve(config.seeds.size());
  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    tasks.push_back([&, s] {
      const std::uint64_t seed = config.seeds[s];
      const Rng seed_root(seed);

      // One definitive generation-0 evaluation per seed, shared by all arms.
      Rng val_rng = seed_root.substream("exp2/base-validation");
      const double base_validation_mean = mean_of(rouge_scores(
          base, partitions.validation_set, config.max_summary_len, val_rng));
      Rng eval_rng = seed_root.substream("exp2/base-eval");
      const std::vector<double> base_test = rouge_scores(
          base, partitions.test_set, config.max_summary_len, eval_rng);
      Rng boot_rng = seed_root.substream("exp2/base-bootstrap");

      GenerationRecord zero;
      zero.experiment = "exp2";
      zero.seed = seed;
      zero.generation = 0;
      zero.metric = metrics::bootstrap_ci(base_test, boot_rng,
                                          config.resamples, config.ci_level);
      zero.validation_mean = base_validation_mean;

      // The random arm discards exactly as many candidates as the quality
      // arm, so the quality pass always runs first (a shadow pass when the
      // quality arm itself was not requested).
      std::optional<Exp2ArmRun> quality_run;
      if (want_quality || want_random) {
        quality_run = run_exp2_arm(Exp2Arm::kQualityFilter, seed, zero, base,
                                   base_validation_mean, partitions, config,
                                   nullptr);
      }

      Exp2SeedOutput& out = outputs[s];
      for (const Exp2Arm arm : config.exp2_arms) {
        Exp2ArmRun run;
        switch (arm) {
          case Exp2Arm::kQualityFilter:
            run = *quality_run;
            break;
          case Exp2Arm::kRandomFilter:
            run = run_exp2_arm(arm, seed, zero, base, base_validation_mean,
                               partitions, config,
                               &quality_run->selected_counts);
            break;
          case Exp2Arm::kControl:
            run = run_exp2_arm(arm, seed, zero, base, base_validation_mean,
                               partitions, config, nullptr);
            break;
        }
        out.trajectories.push_back(std::move(run.trajectory));
        for (auto& a : run.audit) out.audit.push_back(std::move(a));
      }
    });
  }
  run_tasks(tasks, config.jobs);

  RunResult result;
  for (auto& out : outputs) {
    for (auto& t : out.trajectories) result.trajectories.push_back(std::move(t));
    for (auto& a : out.audit) result.audit.push_back(std::move(a));
  }
  return result;
}

// --- Experiment 1 -----------------------------------------------------------

Exp1Streams Exp1Streams::from(const Rng& master) {
  return Exp1Streams{master.substream("data"), master.substream("feedback"),
                     master.substream("training"),
                     master.substream("bootstrap")};
}

Exp1Datasets make_exp1_datasets(const LoopConfig& config, std::uint64_t seed) {
  Rng digits_rng = Rng(config.dataset_seed).substream("exp1/digits");
  const data::VectorDataset all = data::synth_digits(
      config.digits_count, data::kClassCount, digits_rng, config.digits);

  std::vector<std::size_t> order(all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng split_rng = Rng(seed).substream("exp1/split");
  split_rng.shuffle(order);

  const auto train_count = static_cast<std::size_t>(
      config.train_fraction * static_cast<double>(all.size()));
  const auto pool_count = static_cast<std::size_t>(
      config.pool_fraction * static_cast<double>(all.size()));

  Exp1Datasets sets;
  sets.train_store.class_count = all.class_count;
  sets.pool.class_count = all.class_count;
  sets.test.class_count = all.class_count;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < train_count; ++i)
    sets.train_store.samples.push_back(all.samples[order[cursor++]]);
  for (std::size_t i = 0; i < pool_count; ++i)
    sets.pool.samples.push_back(all.samples[order[cursor++]]);
  while (cursor < order.size())
    sets.test.samples.push_back(all.samples[order[cursor++]]);
  return sets;
}

namespace {

const learners::SoftmaxModel& current_predictor(const Exp1State& state) {
  if (const auto* model = std::get_if<learners::SoftmaxModel>(&state.learner))
    return *model;
  // Population arms deploy the newest member (the latest generation's
  // product); its outputs are what the feedback channel reviews and what the
  // iteration's quality is measured on.
  const auto& population = std::get<learners::Population>(state.learner);
  return population.members.back();
}

std::vector<double> test_correctness(const learners::SoftmaxModel& model,
                                     const data::VectorDataset& test) {
  std::vector<double> correct;
  correct.reserve(test.size());
  for (const auto& sample : test.samples) {
    correct.push_back(
        learners::sgd_predict(model, sample.features) == sample.label ? 1.0
                                                                      : 0.0);
  }
  return correct;
}

bool uses_corrupted_feedback(Exp1Arm arm) {
  return arm == Exp1Arm::kBaseline || arm == Exp1Arm::kEa;
}

bool uses_population(Exp1Arm arm) {
  return arm == Exp1Arm::kEa || arm == Exp1Arm::kEaRag;
}

}  // namespace

GenerationRecord run_generation_exp1(Exp1State& state, Exp1Arm arm,
                                     const Exp1Datasets& datasets,
                                     const LoopConfig& config, int iteration,
                                     Exp1Streams& streams, std::uint64_t seed) {
  if (config.batch_size > datasets.pool.size())
    throw ContractViolation("run_generation_exp1: batch exceeds pool");

  const std::vector<std::size_t> batch_indices = sample_without_replacement(
      datasets.pool.size(), config.batch_size, streams.data);

  // The current model labels the fresh batch; agreement with the true labels
  // is recorded as this iteration's validation signal.
  const learners::SoftmaxModel& predictor = current_predictor(state);
  std::vector<int> predictions;
  std::vector<int> true_labels;
  predictions.reserve(batch_indices.size());
  true_labels.reserve(batch_indices.size());
  for (const std::size_t idx : batch_indices) {
    predictions.push_back(
        learners::sgd_predict(predictor, datasets.pool.samples[idx].features));
    true_labels.push_back(datasets.pool.samples[idx].label);
  }
  const double validation_mean = metrics::accuracy(predictions, true_labels);

  // Baseline-style feedback is recursive: the rater starts from the model's
  // own batch predictions and transmits them faithfully with probability q.
  // Errors the model already makes are confirmed instead of corrected, so
  // they propagate. The RAG arms retrieve labels from the pristine store,
  // cutting that loop.
  std::vector<int> feedback_labels;
  if (uses_corrupted_feedback(arm)) {
    feedback_labels = feedback::corrupt_labels(
        predictions, state.quality, datasets.pool.class_count,
        streams.feedback);
  } else {
    feedback_labels.reserve(batch_indices.size());
    for (const std::size_t idx : batch_indices) {
      feedback_labels.push_back(learners::knn_label(
          datasets.train_store, datasets.pool.samples[idx].features,
          config.knn_k));
    }
  }

  data::VectorDataset batch;
  batch.class_count = datasets.pool.class_count;
  batch.samples.reserve(batch_indices.size());
  for (std::size_t i = 0; i < batch_indices.size(); ++i) {
    data::LabeledSample sample = datasets.pool.samples[batch_indices[i]];
    sample.label = feedback_labels[i];
    batch.samples.push_back(sample);
  }

  if (uses_population(arm)) {
    auto& population = std::get<learners::Population>(state.learner);
    // Fitness is judged on a small evaluation slice of the same
    // feedback-labeled batch the children train on: the selection signal
    // degrades together with the feedback channel, and the slice is small
    // enough that ranking noise lets challengers through.
    data::VectorDataset eval_slice;
    eval_slice.class_count = batch.class_count;
    const std::size_t eval_count =
        std::min<std::size_t>(config.ea_eval_count, batch.size());
    eval_slice.samples.assign(batch.samples.begin(),
                              batch.samples.begin() + eval_count);
    population = learners::ea_step(
        std::move(population), batch, eval_slice,
        {config.mutation_std, config.ea_learning_rate}, streams.training);
  } else {
    auto& model = std::get<learners::SoftmaxModel>(state.learner);
    model = learners::sgd_train(std::move(model), batch,
                                config.epochs_per_iteration,
                                config.learning_rate, streams.training);
  }

  // Recorded model quality: the plain model, or the fitness champion for
  // population arms (selection's output; the deployed newest member is what
  // the feedback channel reviewed).
  const learners::SoftmaxModel* measured;
  if (const auto* model = std::get_if<learners::SoftmaxModel>(&state.learner)) {
    measured = model;
  } else {
    const auto& population = std::get<learners::Population>(state.learner);
    measured = &population.members[learners::champion_index(population)];
  }
  const std::vector<double> correct = test_correctness(*measured, datasets.test);
  const double model_quality = mean_of(correct);
  state.quality = feedback::update_feedback_quality(state.quality,
                                                    model_quality,
                                                    streams.feedback);

  GenerationRecord record;
  record.experiment = "exp1";
  record.arm = std::string(arm_name(arm));
  record.seed = seed;
  record.generation = iteration;
  record.metric = metrics::bootstrap_ci(correct, streams.bootstrap,
                                        config.resamples, config.ci_level);
  record.validation_mean = validation_mean;
  record.selected_count = config.batch_size;
  record.discarded_count = 0;
  record.feedback_q = state.quality.q;
  return record;
}

RunResult run_experiment1(const LoopConfig& config) {
  validate(config);

  std::vector<std::vector<Trajectory>> outputs(config.seeds.size());
  std::vector<std::function<void()>> tasks;
  tasks.reserve(config.seeds.size());
  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    tasks.push_back([&, s] {
      const std::uint64_t seed = config.seeds[s];
      const Exp1Datasets datasets = make_exp1_datasets(config, seed);

      // Shared initial model: clean training until the test accuracy first
      // reaches the target, or the epoch budget runs out.
      Rng init_rng = Rng(seed).substream("exp1/init-train");
      learners::SoftmaxModel initial = learners::SoftmaxModel::zeros(
          datasets.train_store.class_count, data::kFeatureCount);
      for (int epoch = 0; epoch < config.initial_training_max_epochs; ++epoch) {
        initial = learners::sgd_train(std::move(initial), datasets.train_store,
                                      1, config.learning_rate, init_rng);
        const std::vector<double> correct =
            test_correctness(initial, datasets.test);
        if (mean_of(correct) >= config.initial_accuracy_target) break;
      }

      const std::vector<double> initial_correct =
          test_correctness(initial, datasets.test);
      Rng init_boot = Rng(seed).substream("exp1/init-bootstrap");
      GenerationRecord zero;
      zero.experiment = "exp1";
      zero.seed = seed;
      zero.generation = 0;
      zero.metric = metrics::bootstrap_ci(initial_correct, init_boot,
                                          config.resamples, config.ci_level);
      zero.feedback_q = config.initial_feedback_q;

      for (const Exp1Arm arm : config.exp1_arms) {
        const std::string name(arm_name(arm));
        Exp1Streams streams =
            Exp1Streams::from(Rng(seed).substream("exp1/arm/" + name));

        Exp1State state;
        if (uses_population(arm)) {
          state.learner = learners::Population::cloned_from(initial);
        } else {
          state.learner = initial;
        }
        state.quality.q = config.initial_feedback_q;
        state.quality.coupling = config.coupling;
        state.quality.noise_std = config.feedback_noise_std;

        Trajectory trajectory;
        trajectory.experiment = "exp1";
        trajectory.arm = name;
        trajectory.seed = seed;
        GenerationRecord arm_zero = zero;
        arm_zero.arm = name;
        trajectory.records.push_back(std::move(arm_zero));

        for (int it = 1; it <= config.iterations; ++it) {
          trajectory.records.push_back(run_generation_exp1(
              state, arm, datasets, config, it, streams, seed));
        }
        outputs[s].push_back(std::move(trajectory));
      }
    });
  }
  run_tasks(tasks, config.jobs);

  RunResult result;
  for (auto& out : outputs) {
    for (auto& t : out) result.trajectories.push_back(std::move(t));
  }
  return result;
}

}  // namespace looplab::engine
