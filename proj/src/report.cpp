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

#include "looplab/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "looplab/common.hpp"
#include "looplab/feedback.hpp"
#include "looplab/kernels.hpp"

namespace looplab::report {

namespace {

std::string fixed6(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

const engine::GenerationRecord* find_generation(
    const engine::Trajectory& trajectory, int generation) {
  for (const auto& record : trajectory.records) {
    if (record.generation == generation) return &record;
  }
  return nullptr;
}

}  // namespace

std::string render_trajectory_csv(
    std::span<const engine::Trajectory> trajectories) {
  std::vector<const engine::GenerationRecord*> rows;
  for (const auto& trajectory : trajectories) {
    for (const auto& record : trajectory.records) rows.push_back(&record);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto* a, const auto* b) {
                     return std::tie(a->experiment, a->arm, a->seed,
                                     a->generation) <
                            std::tie(b->experiment, b->arm, b->seed,
                                     b->generation);
                   });

  std::string out =
      "experiment,arm,seed,generation,metric_mean,ci_low,ci_high,"
      "validation_mean,selected_count,discarded_count,feedback_q\n";
  for (const auto* r : rows) {
    out += r->experiment;
    out += ',';
    out += r->arm;
    out += ',';
    out += std::to_string(r->seed);
    out += ',';
    out += std::to_string(r->generation);
    out += ',';
    out += fixed6(r->metric.mean);
    out += ',';
    out += fixed6(r->metric.ci_low);
    out += ',';
    out += fixed6(r->metric.ci_high);
    out += ',';
    if (r->validation_mean) out += fixed6(*r->validation_mean);
    out += ',';
    out += std::to_string(r->selected_count);
    out += ',';
    out += std::to_string(r->discarded_count);
    out += ',';
    if (r->feedback_q) out += fixed6(*r->feedback_q);
    out += '\n';
  }
  return out;
}

void write_trajectory_csv(std::span<const engine::Trajectory> trajectories,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << render_trajectory_csv(trajectories);
}

void write_audit_jsonl(std::span<const engine::AuditRecord> audit,
                       const std::filesystem::path& directory) {
  // One file per (arm, seed), all generations appended in order.
  std::map<std::pair<std::string, std::uint64_t>, std::ofstream> files;
  for (const auto& record : audit) {
    const auto key = std::make_pair(record.arm, record.seed);
    auto it = files.find(key);
    if (it == files.end()) {
      const auto path = directory / ("audit_" + record.arm + "_seed" +
                                     std::to_string(record.seed) + ".jsonl");
      it = files.emplace(key, std::ofstream(path, std::ios::binary)).first;
      if (!it->second) throw LoadError("cannot write " + path.string());
    }
    feedback::write_decisions_jsonl(it->second, record.generation,
                                    record.decisions);
  }
}

namespace {

nlohmann::ordered_json config_to_json(const engine::LoopConfig& c) {
  nlohmann::ordered_json j;
  j["seeds"] = c.seeds;
  j["dataset_seed"] = c.dataset_seed;
  j["resamples"] = c.resamples;
  j["ci_level"] = c.ci_level;
  j["jobs"] = c.jobs;
  {
    std::vector<std::string> arms;
    for (auto arm : c.exp1_arms) arms.emplace_back(engine::arm_name(arm));
    j["exp1_arms"] = arms;
  }
  j["iterations"] = c.iterations;
  j["digits_count"] = c.digits_count;
  j["train_fraction"] = c.train_fraction;
  j["pool_fraction"] = c.pool_fraction;
  j["batch_size"] = c.batch_size;
  j["epochs_per_iteration"] = c.epochs_per_iteration;
  j["learning_rate"] = c.learning_rate;
  j["knn_k"] = c.knn_k;
  j["population_size"] = c.population_size;
  j["parent_count"] = c.parent_count;
  j["mutation_std"] = c.mutation_std;
  j["ea_learning_rate"] = c.ea_learning_rate;
  j["ea_eval_count"] = c.ea_eval_count;
  j["initial_feedback_q"] = c.initial_feedback_q;
  j["coupling"] = c.coupling;
  j["feedback_noise_std"] = c.feedback_noise_std;
  j["initial_accuracy_target"] = c.initial_accuracy_target;
  j["initial_training_max_epochs"] = c.initial_training_max_epochs;
  j["digits_noise_std"] = c.digits.noise_std;
  j["digits_center_low"] = c.digits.center_low;
  j["digits_center_high"] = c.digits.center_high;
  j["digits_subclusters_per_class"] = c.digits.subclusters_per_class;
  j["digits_smudge_fraction"] = c.digits.smudge_fraction;
  j["digits_smudge_scale"] = c.digits.smudge_scale;
  {
    std::vector<std::string> arms;
    for (auto arm : c.exp2_arms) arms.emplace_back(engine::arm_name(arm));
    j["exp2_arms"] = arms;
  }
  j["generations"] = c.generations;
  j["candidates_per_generation"] = c.candidates_per_generation;
  j["corpus_generation_size"] = c.corpus_generation_size;
  j["corpus_validation_size"] = c.corpus_validation_size;
  j["test_count"] = c.test_count;
  j["threshold"] = c.threshold;
  j["continuation_bias"] = c.continuation_bias;
  j["max_summary_len"] = c.max_summary_len;
  j["corpus_pool_size"] = c.corpus.pool_size;
  j["corpus_min_reference_len"] = c.corpus.min_reference_len;
  j["corpus_max_reference_len"] = c.corpus.max_reference_len;
  j["corpus_min_article_len"] = c.corpus.min_article_len;
  j["corpus_max_article_len"] = c.corpus.max_article_len;
  j["corpus_filler_rate"] = c.corpus.filler_rate;
  return j;
}

engine::LoopConfig config_from_json(const nlohmann::json& j) {
  engine::LoopConfig c;
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.dataset_seed = j.at("dataset_seed").get<std::uint64_t>();
  c.resamples = j.at("resamples").get<int>();
  c.ci_level = j.at("ci_level").get<double>();
  c.jobs = j.at("jobs").get<int>();
  c.exp1_arms.clear();
  for (const auto& name : j.at("exp1_arms")) {
    const auto arm = engine::parse_exp1_arm(name.get<std::string>());
    if (!arm) throw LoadError("manifest: unknown exp1 arm");
    c.exp1_arms.push_back(*arm);
  }
  c.iterations = j.at("iterations").get<int>();
  c.digits_count = j.at("digits_count").get<std::size_t>();
  c.train_fraction = j.at("train_fraction").get<double>();
  c.pool_fraction = j.at("pool_fraction").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.epochs_per_iteration = j.at("epochs_per_iteration").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.knn_k = j.at("knn_k").get<std::size_t>();
  c.population_size = j.at("population_size").get<std::size_t>();
  c.parent_count = j.at("parent_count").get<std::size_t>();
  c.mutation_std = j.at("mutation_std").get<double>();
  c.ea_learning_rate = j.at("ea_learning_rate").get<double>();
  c.ea_eval_count = j.at("ea_eval_count").get<std::size_t>();
  c.initial_feedback_q = j.at("initial_feedback_q").get<double>();
  c.coupling = j.at("coupling").get<double>();
  c.feedback_noise_std = j.at("feedback_noise_std").get<double>();
  c.initial_accuracy_target = j.at("initial_accuracy_target").get<double>();
  c.initial_training_max_epochs =
      j.at("initial_training_max_epochs").get<int>();
  c.digits.noise_std = j.at("digits_noise_std").get<double>();
  c.digits.center_low = j.at("digits_center_low").get<double>();
  c.digits.center_high = j.at("digits_center_high").get<double>();
  c.digits.subclusters_per_class =
      j.at("digits_subclusters_per_class").get<std::size_t>();
  c.digits.smudge_fraction = j.at("digits_smudge_fraction").get<double>();
  c.digits.smudge_scale = j.at("digits_smudge_scale").get<double>();
  c.exp2_arms.clear();
  for (const auto& name : j.at("exp2_arms")) {
    const auto arm = engine::parse_exp2_arm(name.get<std::string>());
    if (!arm) throw LoadError("manifest: unknown exp2 arm");
    c.exp2_arms.push_back(*arm);
  }
  c.generations = j.at("generations").get<int>();
  c.candidates_per_generation =
      j.at("candidates_per_generation").get<std::size_t>();
  c.corpus_generation_size = j.at("corpus_generation_size").get<std::size_t>();
  c.corpus_validation_size = j.at("corpus_validation_size").get<std::size_t>();
  c.test_count = j.at("test_count").get<std::size_t>();
  c.threshold = j.at("threshold").get<double>();
  c.continuation_bias = j.at("continuation_bias").get<double>();
  c.max_summary_len = j.at("max_summary_len").get<std::size_t>();
  c.corpus.pool_size = j.at("corpus_pool_size").get<std::size_t>();
  c.corpus.min_reference_len =
      j.at("corpus_min_reference_len").get<std::size_t>();
  c.corpus.max_reference_len =
      j.at("corpus_max_reference_len").get<std::size_t>();
  c.corpus.min_article_len = j.at("corpus_min_article_len").get<std::size_t>();
  c.corpus.max_article_len = j.at("corpus_max_article_len").get<std::size_t>();
  c.corpus.filler_rate = j.at("corpus_filler_rate").get<double>();
  return c;
}

}  // namespace

std::string manifest_to_json(const RunManifest& manifest) {
  nlohmann::ordered_json j;
  j["artifact_version"] = manifest.artifact_version;
  j["experiment"] = manifest.experiment;
  j["config"] = config_to_json(manifest.config);
  j["kernel_backend"] = manifest.kernel_backend;
  j["output_paths"] = manifest.output_paths;
  j["wall_clock_seconds"] = manifest.wall_clock_seconds;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("manifest: invalid JSON: ") + e.what());
  }
  RunManifest manifest;
  manifest.artifact_version = j.at("artifact_version").get<std::string>();
  manifest.experiment = j.at("experiment").get<std::string>();
  manifest.config = config_from_json(j.at("config"));
  manifest.kernel_backend = j.at("kernel_backend").get<std::string>();
  manifest.output_paths =
      j.at("output_paths").get<std::vector<std::string>>();
  manifest.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
  return manifest;
}

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << manifest_to_json(manifest);
}

std::vector<ArmSummary> summarize_arms(
    std::span<const engine::Trajectory> trajectories) {
  std::vector<ArmSummary> summaries;
  std::vector<std::size_t> counts;
  for (const auto& trajectory : trajectories) {
    if (trajectory.records.empty()) continue;
    auto it = std::find_if(summaries.begin(), summaries.end(),
                           [&](const ArmSummary& s) {
                             return s.arm == trajectory.arm;
                           });
    if (it == summaries.end()) {
      summaries.push_back({trajectory.arm, 0.0, 0.0});
      counts.push_back(0);
      it = summaries.end() - 1;
    }
    const std::size_t slot =
        static_cast<std::size_t>(it - summaries.begin());
    it->initial_mean += trajectory.records.front().metric.mean;
    it->final_mean += trajectory.records.back().metric.mean;
    ++counts[slot];
  }
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    summaries[i].initial_mean /= static_cast<double>(counts[i]);
    summaries[i].final_mean /= static_cast<double>(counts[i]);
  }
  return summaries;
}

std::vector<NetChange> net_changes(
    std::span<const engine::Trajectory> trajectories,
    bool distinct_quality_base) {
  std::vector<NetChange> changes;
  std::vector<std::size_t> counts;
  for (const auto& trajectory : trajectories) {
    if (trajectory.records.empty()) continue;
    const bool use_gen1 =
        distinct_quality_base && trajectory.arm == "quality_filter";
    const engine::GenerationRecord* base_record =
        use_gen1 ? find_generation(trajectory, 1) : &trajectory.records.front();
    if (!base_record) base_record = &trajectory.records.front();

    auto it = std::find_if(changes.begin(), changes.end(),
                           [&](const NetChange& n) {
                             return n.arm == trajectory.arm;
                           });
    if (it == changes.end()) {
      changes.push_back({trajectory.arm, 0.0, 0.0, 0.0});
      counts.push_back(0);
      it = changes.end() - 1;
    }
    const std::size_t slot = static_cast<std::size_t>(it - changes.begin());
    it->base += base_record->metric.mean;
    it->final_mean += trajectory.records.back().metric.mean;
    ++counts[slot];
  }
  for (std::size_t i = 0; i < changes.size(); ++i) {
    changes[i].base /= static_cast<double>(counts[i]);
    changes[i].final_mean /= static_cast<double>(counts[i]);
    changes[i].percent = changes[i].base == 0.0
                             ? 0.0
                             : 100.0 * (changes[i].final_mean - changes[i].base) /
                                   changes[i].base;
  }
  return changes;
}

}  // namespace looplab::report
