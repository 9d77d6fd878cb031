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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "looplab/engine.hpp"

namespace looplab::report {

/// Renders trajectories as CSV with the fixed column set
///   experiment,arm,seed,generation,metric_mean,ci_low,ci_high,
///   validation_mean,selected_count,discarded_count,feedback_q
/// Floats carry 6 decimal digits; optional columns render as empty cells.
/// Rows are sorted by (experiment, arm, seed, generation).
std::string render_trajectory_csv(
    std::span<const engine::Trajectory> trajectories);

void write_trajectory_csv(std::span<const engine::Trajectory> trajectories,
                          const std::filesystem::path& path);

void write_audit_jsonl(std::span<const engine::AuditRecord> audit,
                       const std::filesystem::path& directory);

/// Everything needed to reproduce a run: the resolved config, the seeds, the
/// kernel backend, the artifact version, the outputs, and the wall clock.
struct RunManifest {
  std::string artifact_version{kVersion};
  std::string experiment;
  engine::LoopConfig config;
  std::string kernel_backend;
  std::vector<std::string> output_paths;
  double wall_clock_seconds = 0.0;

  bool operator==(const RunManifest&) const = default;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);
void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path);

/// Seed-averaged first/last metric means per arm, in first-seen arm order.
struct ArmSummary {
  std::string arm;
  double initial_mean = 0.0;
  double final_mean = 0.0;
};
std::vector<ArmSummary> summarize_arms(
    std::span<const engine::Trajectory> trajectories);

/// Net change per arm, (final - base) / base. The base is the shared
/// generation-0 score; with distinct_quality_base the quality_filter arm is
/// measured from its generation-1 score instead (its distinct performance
/// after the first filtering step).
struct NetChange {
  std::string arm;
  double base = 0.0;
  double final_mean = 0.0;
  double percent = 0.0;
};
std::vector<NetChange> net_changes(
    std::span<const engine::Trajectory> trajectories,
    bool distinct_quality_base);

}  // namespace looplab::report
