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

#ifndef GRAPHBENCH_TRAINING_HPP
#define GRAPHBENCH_TRAINING_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "graphbench/graph_gen.hpp"
#include "graphbench/models.hpp"
#include "graphbench/tensor.hpp"

namespace graphbench::train {

enum class OptimizerKind { kAdam, kSgd };

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 0.00075;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  // Adam moments, one buffer per parameter in parameters() order.
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

OptimizerState make_optimizer(OptimizerKind kind, double learning_rate);

// Bias-corrected Adam.
void adam_step(std::span<nn::NamedParameter> params, OptimizerState& state);
// Plain p -= lr * g.
void sgd_step(std::span<nn::NamedParameter> params, OptimizerState& state);
void optimizer_step(std::span<nn::NamedParameter> params,
                    OptimizerState& state);

// w_c = n / (C * count_c) for classes present in `targets`, 0 otherwise.
std::vector<double> class_weights(std::span<const int> targets, int n_classes);

// Cross-entropy weighted by inverse class size over all nodes.
ad::Tensor weighted_loss(ad::Tape& tape, const ad::Tensor& logits,
                         std::span<const int> targets);

std::vector<int> predictions(const ad::Tensor& logits);

// Mean over present classes of per-class recall (normalized confusion
// diagonal).
double accuracy(std::span<const int> predicted, std::span<const int> targets);
double accuracy(const ad::Tensor& logits, std::span<const int> targets);

inline constexpr int kScheduleWindow = 100;
inline constexpr double kScheduleDecay = 1.25;
inline constexpr double kLearningRateFloor = 1e-6;

struct LrEvent {
  int iteration = 0;  // completed iterations when the decay fired
  double learning_rate = 0.0;
};

struct ScheduleState {
  int last_decay = 0;
  std::vector<LrEvent> events;
};

// Plateau schedule over non-overlapping 100-iteration windows. Fires only on
// window boundaries with at least two windows since the last decay; divides
// the rate by 1.25 unless the latest window mean is strictly lower than the
// one before. Returns true on decay.
bool lr_schedule_update(OptimizerState& optimizer, ScheduleState& schedule,
                        std::span<const double> losses);

struct OptimizerChoice {
  OptimizerKind kind;
  double learning_rate;
};

// Adam 0.00075 for everything except the Graph LSTM, which uses SGD at
// 0.075 on matching and 0.0075 on clustering.
OptimizerChoice default_optimizer(nn::Arch arch, gen::Task task);

struct TrainConfig {
  nn::ModelConfig model;
  gen::Task task = gen::Task::kMatching;
  double q_noise = 0.1;
  OptimizerChoice optimizer{OptimizerKind::kAdam, 0.00075};
  int iterations = 5000;
  int eval_instances = 100;
  // Accuracy samples every `eval_every` iterations on `probe_instances`
  // fresh graphs; 0 disables intermediate sampling.
  int eval_every = 0;
  int probe_instances = 20;
  // Evaluate with batch norm over the nodes of each evaluated graph, as in
  // training, instead of the running statistics.
  bool eval_graph_stats = true;
  std::uint64_t seed = 1;
};

// Model config with input/class dims set for `task` and paper defaults.
TrainConfig default_train_config(nn::Arch arch, gen::Task task, int layers,
                                 int hidden);

struct AccuracySample {
  int iteration = 0;
  double elapsed_ms = 0.0;
  double accuracy = 0.0;
};

struct TrainReport {
  std::uint64_t seed = 0;
  int hidden = 0;
  std::size_t parameter_count = 0;
  std::vector<double> loss;
  std::vector<double> rolling_loss;   // mean of the last <= 100 losses
  std::vector<double> learning_rate;  // rate used at each iteration
  std::vector<double> elapsed_ms;     // training wall clock, excludes evals
  std::vector<AccuracySample> accuracy_samples;
  std::vector<LrEvent> lr_events;
  double final_accuracy = 0.0;      // mean over evaluation instances
  double final_accuracy_std = 0.0;  // spread over evaluation instances

  // Deterministic per-iteration CSV: iteration,loss,rolling_loss,lr
  std::string csv() const;
  // Wall-clock sidecar: iteration,elapsed_ms
  std::string timing_csv() const;
  // JSON summary (string form of a single object).
  std::string summary_json() const;
};

struct Evaluation {
  double mean = 0.0;
  double stddev = 0.0;
};

// Accuracy of `model` over fresh instances, without gradients. With
// `graph_stats` batch norm normalizes each graph by its own node statistics
// (the model's running statistics are left untouched); otherwise it uses the
// running statistics.
Evaluation evaluate(const nn::Model& model, gen::Task task, double q_noise,
                    const gen::Graph* pattern, int instances,
                    std::uint64_t seed, bool graph_stats = true);

// One training run: a freshly generated graph per iteration, then a final
// evaluation on `eval_instances` held-out graphs. Throws DivergenceError on
// a non-finite loss. `model_out`, when given, receives the trained model.
TrainReport train(const TrainConfig& config, nn::Model* model_out = nullptr);

// Median over `repeats` of the wall clock for forward+backward over
// `graphs` freshly generated instances, in milliseconds.
double measure_batch_time(const TrainConfig& config, int graphs = 100,
                          int repeats = 3);

}  // namespace graphbench::train

#endif  // GRAPHBENCH_TRAINING_HPP
