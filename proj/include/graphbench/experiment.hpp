/*
 * Copyright 2026 The graphbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef GRAPHBENCH_EXPERIMENT_HPP
#define GRAPHBENCH_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphbench/graph_gen.hpp"
#include "graphbench/models.hpp"
#include "graphbench/training.hpp"

namespace graphbench::exp {

enum class SweepVariable { kNoise, kLayers, kBudget, kInnerSteps, kLearningSpeed };

std::string_view sweep_name(SweepVariable sweep);
SweepVariable parse_sweep(std::string_view name);

// One figure's grid. Every run is fixed by these fields alone.
struct ExperimentSpec {
  std::string name = "experiment";
  gen::Task task = gen::Task::kMatching;
  SweepVariable sweep = SweepVariable::kNoise;
  // Ignored for the learning-speed sweep, which has a single column.
  std::vector<double> values;
  std::vector<nn::Arch> archs;
  int layers = 6;
  int hidden = 0;  // 0: solve from `budget`
  std::int64_t budget = 100000;
  int inner_steps = 3;
  double q = 0.1;
  bool residual = true;
  bool batch_norm = true;
  int iterations = 5000;
  int eval_instances = 100;
  int eval_every = 0;
  int probe_instances = 20;
  int trials = 5;
  std::uint64_t seed = 1;
  // Measure batch time per cell (wall clock; written to the timing sidecar).
  bool timing = true;

  void validate() const;
  // The sweep column values actually run.
  std::vector<double> columns() const;
};

// `key = value` lines; `#` starts a comment. Lists are comma separated.
ExperimentSpec parse_spec(std::string_view text);
ExperimentSpec load_spec(const std::filesystem::path& path);
// Canonical text; parse_spec(to_text(s)) reproduces s.
std::string to_text(const ExperimentSpec& spec);
// Hex digest of to_text(spec), used to tag persisted state.
std::string fingerprint(const ExperimentSpec& spec);

std::uint64_t trial_seed(const ExperimentSpec& spec, int trial);

// Training config of one grid cell. Throws InfeasibleError when the budget
// admits no width.
train::TrainConfig cell_config(const ExperimentSpec& spec, nn::Arch arch,
                               double value, int trial);

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double accuracy_std = 0.0;
  double final_loss = 0.0;
  double train_time_ms = 0.0;
  std::vector<train::AccuracySample> curve;
  std::string error;  // empty on success
};

struct CellResult {
  nn::Arch arch = nn::Arch::kGatedGCN;
  double value = 0.0;
  int hidden = 0;
  std::size_t parameters = 0;
  std::vector<TrialResult> trials;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;  // across successful trials
  std::optional<double> batch_time_ms;
  std::string error;  // cell-level failure, e.g. infeasible budget

  int completed() const;
};

struct ExperimentResults {
  ExperimentSpec spec;
  std::vector<CellResult> cells;  // archs outer, sweep values inner
};

// Worker count from GRAPHBENCH_WORKERS, else the hardware concurrency.
int default_workers();

// Runs every (arch, value, trial) triple, persisting each finished trial
// under `out_dir`/cells so an interrupted run resumes where it stopped.
// Batch timings run afterwards, one at a time.
ExperimentResults run_experiment(const ExperimentSpec& spec,
                                 const std::filesystem::path& out_dir,
                                 int workers = 0);

// Writes <name>.csv, <name>.timing.csv, <name>.summary.json and, for the
// learning-speed sweep, <name>.curve.csv and <name>.curve.timing.csv.
// Only the .timing files carry wall-clock values.
void emit_plot_data(const ExperimentResults& results,
                    const std::filesystem::path& out_dir);

struct DirichletSummary {
  int instances = 0;
  int failures = 0;
  std::size_t flagged_nodes = 0;
  // Mean per-class recall, the metric used for the learned models.
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  // Fraction of nodes labeled correctly, for reference.
  double node_accuracy_mean = 0.0;
  std::vector<double> accuracies;  // successful instances, in order
  std::vector<std::string> warnings;
};

DirichletSummary run_dirichlet_baseline(int instances, double q_noise,
                                        std::uint64_t seed);

}  // namespace graphbench::exp

#endif  // GRAPHBENCH_EXPERIMENT_HPP
