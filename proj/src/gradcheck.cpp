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

#include "graphbench/gradcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "graphbench/graph_gen.hpp"
#include "graphbench/models.hpp"
#include "graphbench/random.hpp"
#include "graphbench/training.hpp"
#include "layer_maps.hpp"

namespace graphbench::check {

using ad::Tape;
using ad::Tensor;

GradientComparison compare_gradients(const Objective& objective,
                                     std::vector<Tensor> wrt, double step,
                                     double floor) {
  for (auto& t : wrt) {
    t.grad_buffer();
    t.zero_grad();
  }
  {
    Tape tape;
    const Tensor loss = objective(tape);
    tape.backward(loss);
  }
  auto evaluate = [&]() {
    Tape tape(false);
    return objective(tape).item();
  };
  GradientComparison out;
  for (auto& t : wrt) {
    auto values = t.mutable_data();
    auto grad = t.grad();
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double saved = values[k];
      values[k] = saved + step;
      const double up = evaluate();
      values[k] = saved - step;
      const double down = evaluate();
      values[k] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = grad[k];
      const double scale =
          std::max({std::abs(analytic), std::abs(numeric), floor});
      out.max_relative_error =
          std::max(out.max_relative_error, std::abs(analytic - numeric) / scale);
      ++out.entries;
    }
  }
  return out;
}

bool SuiteReport::all_passed() const {
  return std::all_of(cases.begin(), cases.end(),
                     [](const CaseResult& c) { return c.passed; });
}

namespace {

Tensor random_tensor(Rng& rng, std::size_t rows, std::size_t cols,
                     double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = uniform(rng, lo, hi);
  return Tensor::from(rows, cols, std::move(v), true);
}

Tensor constant(Rng& rng, std::size_t rows, std::size_t cols) {
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = uniform(rng, -1.0, 1.0);
  return Tensor::from(rows, cols, std::move(v), false);
}

// Weighted sum with fixed random coefficients: a generic scalar readout.
Tensor project(Tape& tape, const Tensor& t, const Tensor& coeffs) {
  return ad::sum(tape, ad::hadamard(tape, t, coeffs));
}

gen::Graph random_graph(Rng& rng) {
  std::uniform_int_distribution<int> size(5, 15);
  const int n = size(rng);
  gen::SbmParams params;
  params.p = 0.6;
  params.q = 0.2;
  params.community_sizes = {static_cast<std::size_t>(n / 2),
                            static_cast<std::size_t>(n - n / 2)};
  return gen::sbm_generate(params, rng());
}

std::vector<Tensor> layer_tensors(nn::LayerParams& params) {
  std::vector<Tensor> out;
  nn::for_each_map(params, [&](std::string_view, nn::Linear& map) {
    out.push_back(map.weight);
    out.push_back(map.bias);
  });
  if (auto* bn = nn::layer_norm(params)) {
    out.push_back(bn->gamma);
    out.push_back(bn->beta);
  }
  return out;
}

}  // namespace

SuiteReport run_gradcheck_suite(std::uint64_t seed, double tolerance,
                                double step) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(seed);
  SuiteReport report;
  auto run = [&](std::string name, const Objective& f,
                 std::vector<Tensor> wrt) {
    const auto cmp = compare_gradients(f, std::move(wrt), step);
    report.cases.push_back({std::move(name), cmp.max_relative_error,
                            cmp.entries, cmp.max_relative_error < tolerance});
  };

  const gen::Graph graph = random_graph(rng);
  const auto& adj = graph.adjacency;
  const std::size_t n = graph.n_nodes, m = adj.n_edges();
  constexpr std::size_t H = 4;

  {
    Tensor a = random_tensor(rng, 3, 4), b = random_tensor(rng, 4, 2);
    Tensor r = constant(rng, 3, 2);
    run("matmul", [=](Tape& t) { return project(t, ad::matmul(t, a, b), r); },
        {a, b});
  }
  {
    Tensor a = random_tensor(rng, n, H), b = random_tensor(rng, n, H);
    Tensor r = constant(rng, n, H);
    run("add", [=](Tape& t) { return project(t, ad::add(t, a, b), r); },
        {a, b});
    run("sub", [=](Tape& t) { return project(t, ad::sub(t, a, b), r); },
        {a, b});
    run("hadamard",
        [=](Tape& t) { return project(t, ad::hadamard(t, a, b), r); }, {a, b});
    run("scale",
        [=](Tape& t) { return project(t, ad::scale(t, a, -1.7), r); }, {a});
    run("sigmoid",
        [=](Tape& t) { return project(t, ad::sigmoid(t, a), r); }, {a});
    run("tanh", [=](Tape& t) { return project(t, ad::tanh(t, a), r); }, {a});
    run("relu", [=](Tape& t) { return project(t, ad::relu(t, a), r); }, {a});
    Tensor bias = random_tensor(rng, 1, H);
    run("add_bias",
        [=](Tape& t) { return project(t, ad::add_bias(t, a, bias), r); },
        {a, bias});
    run("neighbor_sum",
        [=, &adj](Tape& t) { return project(t, ad::neighbor_sum(t, a, adj), r); },
        {a});
    Tensor gates = random_tensor(rng, m, H, 0.0, 1.0);
    run("gated_neighbor_sum",
        [=, &adj](Tape& t) {
          return project(t, ad::gated_neighbor_sum(t, a, gates, adj), r);
        },
        {a, gates});
    Tensor re = constant(rng, m, H);
    run("edge_combine",
        [=, &adj](Tape& t) {
          return project(t, ad::edge_combine(t, a, b, adj), re);
        },
        {a, b});
    run("edge_gate",
        [=, &adj](Tape& t) {
          return project(t, ad::edge_gate(t, a, b, adj), re);
        },
        {a, b});
    Tensor msg = random_tensor(rng, m, H);
    run("edge_scatter_sum",
        [=, &adj](Tape& t) {
          return project(t, ad::edge_scatter_sum(t, msg, adj), r);
        },
        {msg});
    Tensor gamma = random_tensor(rng, 1, H, 0.5, 1.5);
    Tensor beta = random_tensor(rng, 1, H);
    run("graph_batch_norm",
        [=](Tape& t) {
          ad::RunningStats stats(H);
          return project(t, ad::graph_batch_norm(t, a, gamma, beta, stats, true),
                         r);
        },
        {a, gamma, beta});
  }
  {
    constexpr std::size_t C = 3;
    Tensor logits = random_tensor(rng, n, C, -2.0, 2.0);
    std::vector<int> targets(n);
    std::vector<std::uint8_t> mask(n, 1);
    std::uniform_int_distribution<int> cls(0, C - 1);
    for (auto& y : targets) y = cls(rng);
    mask[0] = 0;
    std::vector<double> weights = {0.5, 1.0, 2.0};
    run("softmax_cross_entropy",
        [=](Tape& t) {
          return ad::softmax_cross_entropy(t, logits, targets, weights, mask);
        },
        {logits});
    run("weighted_loss",
        [=](Tape& t) { return train::weighted_loss(t, logits, targets); },
        {logits});
  }

  const Tensor r = constant(rng, n, H);
  for (nn::Arch arch : nn::kAllArchs) {
    auto params = std::make_shared<nn::LayerParams>(
        nn::make_layer_params(arch, H, true, rng));
    Tensor h = random_tensor(rng, n, H);
    auto wrt = layer_tensors(*params);
    wrt.push_back(h);
    run(std::string(nn::arch_name(arch)) + " layer",
        [=, &adj](Tape& t) -> Tensor {
          return std::visit(
              [&](auto& p) -> Tensor {
                using P = std::decay_t<decltype(p)>;
                Tensor out;
                if constexpr (std::is_same_v<P, nn::GvrnnParams>) {
                  out = nn::gvrnn_layer(t, h, adj, p, 2, true);
                } else if constexpr (std::is_same_v<P, nn::GgruParams>) {
                  out = nn::ggru_layer(t, h, adj, p, 2, true);
                } else if constexpr (std::is_same_v<P, nn::GlstmParams>) {
                  out = nn::glstm_layer(t, h, adj, p, 2, true);
                } else if constexpr (std::is_same_v<P, nn::CommNetParams>) {
                  out = nn::commnet_layer(t, h, adj, p, true);
                } else if constexpr (std::is_same_v<P, nn::SgcnParams>) {
                  out = nn::sgcn_layer(t, h, adj, p, true);
                } else {
                  out = nn::gated_gcn_layer(t, h, adj, p, true);
                }
                return project(t, out, r);
              },
              *params);
        },
        wrt);
  }
  {
    auto params = std::make_shared<nn::GatedGcnParams>(std::get<nn::GatedGcnParams>(
        nn::make_layer_params(nn::Arch::kGatedGCN, H, true, rng)));
    Tensor h = random_tensor(rng, n, H);
    run("residual_wrap",
        [=, &adj](Tape& t) {
          return project(
              t, nn::residual_wrap(t, nn::gated_gcn_layer(t, h, adj, *params, true), h),
              r);
        },
        {h});
  }

  gen::TaskInstance inst;
  inst.task = gen::Task::kMatching;
  inst.graph = graph;
  inst.targets.resize(n);
  for (std::size_t i = 0; i < n; ++i) inst.targets[i] = i % 3 == 0 ? 1 : 0;
  for (std::size_t i = 0; i < n; ++i) {
    inst.graph.signal[i] = static_cast<int>(rng() % gen::kSignalVocabulary);
  }
  inst.seed_mask.assign(n, 0);
  const Tensor x = gen::node_features(inst);
  for (nn::Arch arch : nn::kAllArchs) {
    nn::ModelConfig cfg;
    cfg.arch = arch;
    cfg.layers = 2;
    cfg.hidden = static_cast<int>(H);
    cfg.inner_steps = 2;
    cfg.input_dim = gen::input_dim(inst.task);
    cfg.n_classes = gen::n_classes(inst.task);
    auto model = std::make_shared<nn::Model>(cfg, rng());
    std::vector<Tensor> wrt;
    for (auto& p : model->parameters()) wrt.push_back(p.tensor);
    run(std::string(nn::arch_name(arch)) + " network",
        [=, &inst](Tape& t) {
          return train::weighted_loss(
              t, model->forward(t, x, inst.graph.adjacency, true), inst.targets);
        },
        wrt);
  }

  report.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

}  // namespace graphbench::check
