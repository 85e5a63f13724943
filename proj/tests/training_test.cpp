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


#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "graphbench/error.hpp"
#include "graphbench/training.hpp"

namespace graphbench::train {
namespace {

using ad::Tape;
using ad::Tensor;

TEST(WeightsTest, InverseClassSize) {
  // 200 host nodes and a 20-node pattern.
  std::vector<int> targets(220, 0);
  std::fill(targets.begin() + 200, targets.end(), 1);
  const auto w = class_weights(targets, 2);
  EXPECT_DOUBLE_EQ(w[0], 0.55);
  EXPECT_DOUBLE_EQ(w[1], 5.5);
  // Each class contributes half of the total weight.
  EXPECT_DOUBLE_EQ(200 * w[0], 20 * w[1]);
}

TEST(WeightsTest, AbsentClassGetsZero) {
  const std::vector<int> targets = {0, 0, 2};
  const auto w = class_weights(targets, 3);
  EXPECT_DOUBLE_EQ(w[0], 0.5);
  EXPECT_EQ(w[1], 0.0);
  EXPECT_DOUBLE_EQ(w[2], 1.0);
  const std::vector<int> bad = {0, 3};
  EXPECT_THROW(class_weights(bad, 3), ContractError);
}

TEST(LossTest, UniformLogitsGiveLogC) {
  std::vector<int> targets(30);
  for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = (i * i) % 10;
  Tape tape;
  EXPECT_NEAR(weighted_loss(tape, Tensor::zeros(30, 10), targets).item(),
              std::log(10.0), 1e-14);
}

TEST(LossTest, BalancedWeightingEqualisesClasses) {
  // Wrong on every minority node, right on every majority node: the loss
  // equals the mean of the two per-class losses regardless of class sizes.
  const double good = std::log(1.0 + std::exp(-2.0));
  const double bad = std::log(1.0 + std::exp(2.0));
  std::vector<double> logits;
  std::vector<int> targets;
  for (int i = 0; i < 90; ++i) {
    logits.insert(logits.end(), {2.0, 0.0});
    targets.push_back(0);
  }
  for (int i = 0; i < 10; ++i) {
    logits.insert(logits.end(), {2.0, 0.0});
    targets.push_back(1);
  }
  Tape tape;
  const double loss =
      weighted_loss(tape, Tensor::from(100, 2, logits), targets).item();
  EXPECT_NEAR(loss, 0.5 * (good + bad), 1e-14);
}

TEST(AccuracyTest, MeanPerClassRecall) {
  const std::vector<int> targets = {0, 0, 0, 0, 1, 1};
  const std::vector<int> predicted = {0, 0, 0, 1, 1, 0};
  EXPECT_DOUBLE_EQ(accuracy(predicted, targets), (0.75 + 0.5) / 2.0);
  EXPECT_DOUBLE_EQ(accuracy(targets, targets), 1.0);
  // A class never seen in the targets does not count.
  const std::vector<int> sparse_targets = {0, 2};
  const std::vector<int> sparse_pred = {0, 1};
  EXPECT_DOUBLE_EQ(accuracy(sparse_pred, sparse_targets), 0.5);
  const std::vector<int> shorter = {0};
  EXPECT_THROW(accuracy(shorter, targets), DimensionError);
}

TEST(AccuracyTest, ArgmaxPredictions) {
  const Tensor logits = Tensor::from(3, 3, {0, 1, 2, 5, 1, 1, 0, 3, 3});
  EXPECT_EQ(predictions(logits), (std::vector<int>{2, 0, 1}));
}

std::vector<nn::NamedParameter> scalar_param(double value, double grad) {
  Tensor w = Tensor::from(1, 1, {value}, true);
  w.grad_buffer()[0] = grad;
  return {{"w", w}};
}

TEST(OptimizerTest, AdamFirstStepIsLearningRateTimesSign) {
  auto params = scalar_param(1.0, 4.0);
  auto state = make_optimizer(OptimizerKind::kAdam, 0.1);
  adam_step(params, state);
  EXPECT_NEAR(params[0].tensor.data()[0], 1.0 - 0.1 * 4.0 / (4.0 + 1e-8),
              1e-15);
  EXPECT_EQ(state.step, 1u);
}

TEST(OptimizerTest, AdamSecondStepByHand) {
  auto params = scalar_param(0.0, 1.0);
  auto state = make_optimizer(OptimizerKind::kAdam, 0.01);
  adam_step(params, state);
  params[0].tensor.grad_buffer()[0] = -2.0;
  adam_step(params, state);
  const double m = 0.9 * 0.1 + 0.1 * -2.0;
  const double v = 0.999 * 0.001 + 0.001 * 4.0;
  const double m_hat = m / (1.0 - 0.81), v_hat = v / (1.0 - 0.999 * 0.999);
  const double expected =
      -0.01 * 1.0 / (1.0 + 1e-8) - 0.01 * m_hat / (std::sqrt(v_hat) + 1e-8);
  EXPECT_NEAR(params[0].tensor.data()[0], expected, 1e-15);
}

TEST(OptimizerTest, SgdStep) {
  auto params = scalar_param(1.0, 4.0);
  auto state = make_optimizer(OptimizerKind::kSgd, 0.1);
  optimizer_step(params, state);
  EXPECT_DOUBLE_EQ(params[0].tensor.data()[0], 0.6);
  EXPECT_THROW(make_optimizer(OptimizerKind::kSgd, 0.0), ContractError);
  EXPECT_EQ(parse_optimizer("adam"), OptimizerKind::kAdam);
  EXPECT_THROW(parse_optimizer("rmsprop"), ParseError);
}

TEST(OptimizerTest, AdamMinimisesQuadratic) {
  Tensor w = Tensor::from(1, 2, {3.0, -2.0}, true);
  std::vector<nn::NamedParameter> params = {{"w", w}};
  auto state = make_optimizer(OptimizerKind::kAdam, 0.05);
  for (int it = 0; it < 2000; ++it) {
    w.zero_grad();
    Tape tape;
    tape.backward(ad::sum(tape, ad::hadamard(tape, w, w)));
    adam_step(params, state);
  }
  EXPECT_NEAR(w.data()[0], 0.0, 1e-3);
  EXPECT_NEAR(w.data()[1], 0.0, 1e-3);
}

TEST(ScheduleTest, FlatLossDecaysEveryTwoWindows) {
  auto opt = make_optimizer(OptimizerKind::kAdam, 1.0);
  ScheduleState sched;
  std::vector<double> losses;
  std::vector<int> fired;
  for (int it = 1; it <= 1000; ++it) {
    losses.push_back(1.0);
    if (lr_schedule_update(opt, sched, losses)) fired.push_back(it);
  }
  EXPECT_EQ(fired, (std::vector<int>{200, 400, 600, 800, 1000}));
  EXPECT_NEAR(opt.learning_rate, std::pow(1.25, -5), 1e-15);
  EXPECT_EQ(sched.events.size(), 5u);
}

TEST(ScheduleTest, DecreasingLossNeverDecays) {
  auto opt = make_optimizer(OptimizerKind::kAdam, 1.0);
  ScheduleState sched;
  std::vector<double> losses;
  for (int it = 1; it <= 1000; ++it) {
    losses.push_back(1.0 / it);
    EXPECT_FALSE(lr_schedule_update(opt, sched, losses));
  }
  EXPECT_EQ(opt.learning_rate, 1.0);
}

TEST(ScheduleTest, RespectsFloor) {
  auto opt = make_optimizer(OptimizerKind::kAdam, 1.2e-6);
  ScheduleState sched;
  std::vector<double> losses(200, 1.0);
  EXPECT_FALSE(lr_schedule_update(opt, sched, losses));
  EXPECT_EQ(opt.learning_rate, 1.2e-6);
}

TEST(DefaultsTest, OptimizerChoices) {
  EXPECT_EQ(default_optimizer(nn::Arch::kGLSTM, gen::Task::kMatching).kind,
            OptimizerKind::kSgd);
  EXPECT_EQ(default_optimizer(nn::Arch::kGLSTM, gen::Task::kMatching).learning_rate,
            0.075);
  EXPECT_EQ(default_optimizer(nn::Arch::kGatedGCN, gen::Task::kClustering).learning_rate,
            0.00075);
  const auto cfg = default_train_config(nn::Arch::kSGCN, gen::Task::kClustering, 4, 8);
  EXPECT_EQ(cfg.model.input_dim, 11);
  EXPECT_EQ(cfg.model.n_classes, 10);
  EXPECT_EQ(cfg.iterations, 5000);
}

TrainConfig tiny(gen::Task task) {
  auto cfg = default_train_config(nn::Arch::kGatedGCN, task, 2, 8);
  cfg.iterations = 30;
  cfg.eval_instances = 3;
  cfg.eval_every = 10;
  cfg.probe_instances = 2;
  cfg.seed = 5;
  return cfg;
}

TEST(TrainTest, ShortRunIsDeterministic) {
  for (auto task : {gen::Task::kMatching, gen::Task::kClustering}) {
    const auto a = train(tiny(task));
    const auto b = train(tiny(task));
    EXPECT_EQ(a.csv(), b.csv());
    EXPECT_EQ(a.final_accuracy, b.final_accuracy);
    ASSERT_EQ(a.loss.size(), 30u);
    EXPECT_EQ(a.accuracy_samples.size(), 3u);
    EXPECT_EQ(a.accuracy_samples.back().iteration, 30);
    for (double l : a.loss) EXPECT_TRUE(std::isfinite(l));
    EXPECT_EQ(a.csv().rfind("# graphbench train log v1\n", 0), 0u);
  }
}

TEST(TrainTest, SeedChangesTheRun) {
  auto cfg = tiny(gen::Task::kClustering);
  const auto a = train(cfg);
  cfg.seed = 6;
  EXPECT_NE(train(cfg).csv(), a.csv());
}

TEST(TrainTest, HugeStepsDiverge) {
  auto cfg = tiny(gen::Task::kMatching);
  cfg.optimizer = {OptimizerKind::kSgd, 1e250};
  EXPECT_THROW(train(cfg), DivergenceError);
}

TEST(TrainTest, MismatchedModelIsRejected) {
  auto cfg = tiny(gen::Task::kMatching);
  cfg.model.n_classes = 10;
  EXPECT_THROW(train(cfg), ContractError);
}

TEST(TrainTest, EvaluationLeavesRunningStatsAlone) {
  auto cfg = tiny(gen::Task::kClustering);
  nn::Model model(cfg.model, 1);
  train(cfg, &model);
  const std::string before = model.to_checkpoint();
  evaluate(model, cfg.task, 0.1, nullptr, 3, 9, true);
  evaluate(model, cfg.task, 0.1, nullptr, 3, 9, false);
  EXPECT_EQ(model.to_checkpoint(), before);
}

TEST(TrainTest, BatchTimeIsPositive) {
  EXPECT_GT(measure_batch_time(tiny(gen::Task::kMatching), 3, 1), 0.0);
}

}  // namespace
}  // namespace graphbench::train
