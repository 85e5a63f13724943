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

#include "graphbench/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "format.hpp"
#include "graphbench/error.hpp"
#include "graphbench/random.hpp"

namespace graphbench::train {

using ad::Tape;
using ad::Tensor;
using Clock = std::chrono::steady_clock;

namespace {

// Stream tags for seed derivation.
enum : std::uint64_t {
  kInitStream = 1,
  kPatternStream = 2,
  kTrainStream = 3,
  kEvalStream = 4,
  kProbeStream = 5,
  kTimingStream = 6,
};

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

gen::TaskInstance make_instance(gen::Task task, double q_noise,
                                const gen::Graph* pattern,
                                std::uint64_t seed) {
  if (task == gen::Task::kMatching) {
    return gen::make_matching_instance(*pattern, q_noise, seed);
  }
  return gen::make_clustering_instance(q_noise, seed);
}

}  // namespace

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  throw ParseError("unknown optimizer '" + std::string(name) + "'");
}

OptimizerState make_optimizer(OptimizerKind kind, double learning_rate) {
  if (!(learning_rate > 0.0)) {
    throw ContractError("learning rate must be positive");
  }
  OptimizerState state;
  state.kind = kind;
  state.learning_rate = learning_rate;
  return state;
}

void adam_step(std::span<nn::NamedParameter> params, OptimizerState& state) {
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.tensor.size(), 0.0);
      state.v.emplace_back(p.tensor.size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw ContractError("adam_step: parameter set changed between steps");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correct1 = 1.0 - std::pow(state.beta1, t);
  const double correct2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = params[k].tensor;
    if (!p.has_grad()) continue;
    auto g = p.grad();
    auto w = p.mutable_data();
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correct1;
      const double v_hat = v[i] / correct2;
      w[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

void sgd_step(std::span<nn::NamedParameter> params, OptimizerState& state) {
  ++state.step;
  for (auto& p : params) {
    if (!p.tensor.has_grad()) continue;
    auto g = p.tensor.grad();
    auto w = p.tensor.mutable_data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] -= state.learning_rate * g[i];
    }
  }
}

void optimizer_step(std::span<nn::NamedParameter> params,
                    OptimizerState& state) {
  if (state.kind == OptimizerKind::kAdam) {
    adam_step(params, state);
  } else {
    sgd_step(params, state);
  }
}

std::vector<double> class_weights(std::span<const int> targets,
                                  int n_classes) {
  std::vector<double> counts(static_cast<std::size_t>(n_classes), 0.0);
  for (int y : targets) {
    if (y < 0 || y >= n_classes) {
      throw ContractError("target " + std::to_string(y) + " outside [0, " +
                          std::to_string(n_classes) + ")");
    }
    counts[static_cast<std::size_t>(y)] += 1.0;
  }
  const double n = static_cast<double>(targets.size());
  const double c = static_cast<double>(n_classes);
  std::vector<double> weights(counts.size(), 0.0);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] > 0.0) weights[k] = n / (c * counts[k]);
  }
  return weights;
}

Tensor weighted_loss(Tape& tape, const Tensor& logits,
                     std::span<const int> targets) {
  const auto weights =
      class_weights(targets, static_cast<int>(logits.cols()));
  return ad::softmax_cross_entropy(tape, logits, targets, weights);
}

std::vector<int> predictions(const Tensor& logits) {
  std::vector<int> pred(logits.rows());
  auto z = logits.data();
  const std::size_t c = logits.cols();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double* row = &z[i * c];
    pred[i] = static_cast<int>(std::max_element(row, row + c) - row);
  }
  return pred;
}

double accuracy(std::span<const int> predicted, std::span<const int> targets) {
  if (predicted.size() != targets.size()) {
    throw DimensionError("accuracy: prediction/target length mismatch");
  }
  int classes = 0;
  for (int y : targets) classes = std::max(classes, y + 1);
  std::vector<double> size(static_cast<std::size_t>(classes), 0.0);
  std::vector<double> hit(static_cast<std::size_t>(classes), 0.0);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto y = static_cast<std::size_t>(targets[i]);
    size[y] += 1.0;
    if (predicted[i] == targets[i]) hit[y] += 1.0;
  }
  double total = 0.0;
  int present = 0;
  for (std::size_t c = 0; c < size.size(); ++c) {
    if (size[c] == 0.0) continue;
    total += hit[c] / size[c];
    ++present;
  }
  return present ? total / present : 0.0;
}

double accuracy(const Tensor& logits, std::span<const int> targets) {
  const auto pred = predictions(logits);
  return accuracy(pred, targets);
}

bool lr_schedule_update(OptimizerState& optimizer, ScheduleState& schedule,
                        std::span<const double> losses) {
  const auto done = static_cast<int>(losses.size());
  if (done == 0 || done % kScheduleWindow != 0) return false;
  if (done - schedule.last_decay < 2 * kScheduleWindow) return false;
  const auto w = static_cast<std::size_t>(kScheduleWindow);
  const double current = detail::mean(losses.subspan(losses.size() - w, w));
  const double previous =
      detail::mean(losses.subspan(losses.size() - 2 * w, w));
  if (current < previous) return false;
  const double next = optimizer.learning_rate / kScheduleDecay;
  if (next < kLearningRateFloor) return false;
  optimizer.learning_rate = next;
  schedule.last_decay = done;
  schedule.events.push_back({done, next});
  return true;
}

OptimizerChoice default_optimizer(nn::Arch arch, gen::Task task) {
  if (arch == nn::Arch::kGLSTM) {
    return {OptimizerKind::kSgd,
            task == gen::Task::kMatching ? 0.075 : 0.0075};
  }
  return {OptimizerKind::kAdam, 0.00075};
}

TrainConfig default_train_config(nn::Arch arch, gen::Task task, int layers,
                                 int hidden) {
  TrainConfig cfg;
  cfg.task = task;
  cfg.model.arch = arch;
  cfg.model.layers = layers;
  cfg.model.hidden = hidden;
  cfg.model.inner_steps = 3;
  cfg.model.residual = true;
  cfg.model.batch_norm = true;
  cfg.model.input_dim = gen::input_dim(task);
  cfg.model.n_classes = gen::n_classes(task);
  cfg.optimizer = default_optimizer(arch, task);
  return cfg;
}

Evaluation evaluate(const nn::Model& model, gen::Task task, double q_noise,
                    const gen::Graph* pattern, int instances,
                    std::uint64_t seed, bool graph_stats) {
  // Parameters are shared handles; the copy only isolates running stats.
  nn::Model probe = model;
  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(std::max(instances, 0)));
  for (int k = 0; k < instances; ++k) {
    const auto inst = make_instance(task, q_noise, pattern,
                                    derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    Tape tape(false);
    const Tensor logits = probe.forward(tape, gen::node_features(inst),
                                        inst.graph.adjacency, graph_stats);
    scores.push_back(accuracy(logits, inst.targets));
  }
  return {detail::mean(scores), detail::stddev(scores)};
}

TrainReport train(const TrainConfig& config, nn::Model* model_out) {
  config.model.validate();
  if (config.model.input_dim != gen::input_dim(config.task) ||
      config.model.n_classes != gen::n_classes(config.task)) {
    throw ContractError("model input/class dims do not match the task");
  }
  nn::Model model(config.model, derive_seed(config.seed, {kInitStream}));
  gen::Graph pattern;
  if (config.task == gen::Task::kMatching) {
    pattern = gen::make_pattern(derive_seed(config.seed, {kPatternStream}));
  }
  const gen::Graph* pattern_ptr =
      config.task == gen::Task::kMatching ? &pattern : nullptr;

  auto params = model.parameters();
  OptimizerState optimizer =
      make_optimizer(config.optimizer.kind, config.optimizer.learning_rate);
  ScheduleState schedule;

  TrainReport report;
  report.seed = config.seed;
  report.hidden = config.model.hidden;
  report.parameter_count = model.parameter_count();
  const auto n_iter = static_cast<std::size_t>(std::max(config.iterations, 0));
  report.loss.reserve(n_iter);
  report.rolling_loss.reserve(n_iter);
  report.learning_rate.reserve(n_iter);
  report.elapsed_ms.reserve(n_iter);

  double train_ms = 0.0;
  for (int it = 0; it < config.iterations; ++it) {
    const auto start = Clock::now();
    const auto inst = make_instance(
        config.task, config.q_noise, pattern_ptr,
        derive_seed(config.seed, {kTrainStream, static_cast<std::uint64_t>(it)}));
    Tape tape;
    const Tensor logits = model.forward(tape, gen::node_features(inst),
                                        inst.graph.adjacency, true);
    const Tensor loss = weighted_loss(tape, logits, inst.targets);
    const double value = loss.item();
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "non-finite loss at iteration " << it << " (lr "
          << optimizer.learning_rate << ", arch "
          << nn::arch_name(config.model.arch) << ")";
      throw DivergenceError(msg.str());
    }
    model.zero_grad();
    tape.backward(loss);
    report.learning_rate.push_back(optimizer.learning_rate);
    optimizer_step(params, optimizer);
    train_ms += ms_since(start);

    report.loss.push_back(value);
    const std::size_t count = report.loss.size();
    const auto span = std::min<std::size_t>(count, kScheduleWindow);
    report.rolling_loss.push_back(detail::mean(
        std::span<const double>(report.loss).subspan(count - span, span)));
    report.elapsed_ms.push_back(train_ms);
    lr_schedule_update(optimizer, schedule, report.loss);

    if (config.eval_every > 0 && (it + 1) % config.eval_every == 0) {
      const auto probe = evaluate(
          model, config.task, config.q_noise, pattern_ptr,
          config.probe_instances,
          derive_seed(config.seed, {kProbeStream, static_cast<std::uint64_t>(it)}),
          config.eval_graph_stats);
      report.accuracy_samples.push_back({it + 1, train_ms, probe.mean});
    }
  }
  report.lr_events = schedule.events;

  const auto final_eval =
      evaluate(model, config.task, config.q_noise, pattern_ptr,
               config.eval_instances, derive_seed(config.seed, {kEvalStream}),
               config.eval_graph_stats);
  report.final_accuracy = final_eval.mean;
  report.final_accuracy_std = final_eval.stddev;
  if (model_out) *model_out = std::move(model);
  return report;
}

double measure_batch_time(const TrainConfig& config, int graphs, int repeats) {
  nn::Model model(config.model, derive_seed(config.seed, {kInitStream}));
  gen::Graph pattern;
  if (config.task == gen::Task::kMatching) {
    pattern = gen::make_pattern(derive_seed(config.seed, {kPatternStream}));
  }
  std::vector<gen::TaskInstance> batch;
  std::vector<Tensor> features;
  for (int k = 0; k < graphs; ++k) {
    batch.push_back(make_instance(
        config.task, config.q_noise, &pattern,
        derive_seed(config.seed, {kTimingStream, static_cast<std::uint64_t>(k)})));
    features.push_back(gen::node_features(batch.back()));
  }
  std::vector<double> times;
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    for (std::size_t k = 0; k < batch.size(); ++k) {
      Tape tape;
      const Tensor logits =
          model.forward(tape, features[k], batch[k].graph.adjacency, true);
      const Tensor loss = weighted_loss(tape, logits, batch[k].targets);
      model.zero_grad();
      tape.backward(loss);
    }
    times.push_back(ms_since(start));
  }
  std::sort(times.begin(), times.end());
  return times.empty() ? 0.0 : times[times.size() / 2];
}

std::string TrainReport::csv() const {
  std::ostringstream out;
  out << "# graphbench train log v1\n";
  out << "iteration,loss,rolling_loss,lr\n";
  for (std::size_t i = 0; i < loss.size(); ++i) {
    out << (i + 1) << ',' << detail::fmt(loss[i]) << ','
        << detail::fmt(rolling_loss[i]) << ',' << detail::fmt(learning_rate[i])
        << '\n';
  }
  return out.str();
}

std::string TrainReport::timing_csv() const {
  std::ostringstream out;
  out << "# graphbench train timing v1\n";
  out << "iteration,elapsed_ms\n";
  for (std::size_t i = 0; i < elapsed_ms.size(); ++i) {
    out << (i + 1) << ',' << detail::fmt(elapsed_ms[i]) << '\n';
  }
  return out.str();
}

std::string TrainReport::summary_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["hidden"] = hidden;
  j["parameter_count"] = parameter_count;
  j["iterations"] = loss.size();
  j["final_accuracy"] = final_accuracy;
  j["final_accuracy_std"] = final_accuracy_std;
  const double train_ms = elapsed_ms.empty() ? 0.0 : elapsed_ms.back();
  j["train_time_ms"] = train_ms;
  j["time_per_100_graphs_ms"] =
      loss.empty() ? 0.0 : 100.0 * train_ms / static_cast<double>(loss.size());
  j["final_rolling_loss"] = rolling_loss.empty() ? 0.0 : rolling_loss.back();
  j["lr_events"] = nlohmann::ordered_json::array();
  for (const auto& e : lr_events) {
    j["lr_events"].push_back({{"iteration", e.iteration},
                              {"learning_rate", e.learning_rate}});
  }
  j["accuracy_samples"] = nlohmann::ordered_json::array();
  for (const auto& s : accuracy_samples) {
    j["accuracy_samples"].push_back(
        {{"iteration", s.iteration},
         {"elapsed_ms", s.elapsed_ms},
         {"accuracy", s.accuracy}});
  }
  return j.dump(2);
}

}  // namespace graphbench::train
