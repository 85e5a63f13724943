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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "graphbench/error.hpp"
#include "graphbench/graph_gen.hpp"
#include "graphbench/models.hpp"
#include "graphbench/random.hpp"

namespace graphbench::nn {
namespace {

using ad::SparseAdjacency;
using ad::Tape;
using ad::Tensor;

double sig(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void set(Linear& map, double w, double b) {
  map.weight = Tensor::from(1, 1, {w}, true);
  map.bias = Tensor::from(1, 1, {b}, true);
}

// Path 0 - 1 - 2 with scalar features.
struct PathFixture : ::testing::Test {
  SparseAdjacency adj = SparseAdjacency::undirected(3, {{0, 1}, {1, 2}});
  std::vector<double> h = {1.0, -2.0, 0.5};
  Tensor x = Tensor::from(3, 1, {1.0, -2.0, 0.5});
  std::vector<std::vector<int>> nbrs = {{1}, {0, 2}, {1}};
  Rng rng{1};
};

TEST_F(PathFixture, CommNetByHand) {
  CommNetParams p;
  set(p.U, 0.7, 0.1);
  set(p.V, -0.4, 0.2);
  Tape tape;
  const Tensor y = commnet_layer(tape, x, adj, p, true);
  for (int i = 0; i < 3; ++i) {
    double pre = 0.7 * h[i] + 0.1;
    for (int j : nbrs[i]) pre += -0.4 * h[j] + 0.2;
    EXPECT_DOUBLE_EQ(y.at(i, 0), std::max(pre, 0.0));
  }
}

TEST_F(PathFixture, GatedGcnByHand) {
  GatedGcnParams p;
  set(p.U, 0.7, 0.1);
  set(p.V, -0.4, 0.2);
  set(p.A, 0.3, -0.1);
  set(p.B, -0.6, 0.05);
  Tape tape;
  const Tensor y = gated_gcn_layer(tape, x, adj, p, true);
  for (int i = 0; i < 3; ++i) {
    double pre = 0.7 * h[i] + 0.1;
    for (int j : nbrs[i]) {
      const double eta = sig(0.3 * h[i] - 0.1 + -0.6 * h[j] + 0.05);
      pre += eta * (-0.4 * h[j] + 0.2);
    }
    EXPECT_NEAR(y.at(i, 0), std::max(pre, 0.0), 1e-15);
  }
}

TEST_F(PathFixture, SgcnByHand) {
  SgcnParams p;
  set(p.V, 0.9, -0.3);
  set(p.A, 0.3, -0.1);
  set(p.B, -0.6, 0.05);
  Tape tape;
  const Tensor y = sgcn_layer(tape, x, adj, p, true);
  for (int i = 0; i < 3; ++i) {
    double pre = 0.0;
    for (int j : nbrs[i]) {
      pre += sig(0.3 * h[i] - 0.1 - 0.6 * h[j] + 0.05) * (0.9 * h[j] - 0.3);
    }
    EXPECT_NEAR(y.at(i, 0), std::max(pre, 0.0), 1e-15);
  }
}

TEST_F(PathFixture, GvrnnByHand) {
  GvrnnParams p;
  set(p.U, 0.5, 0.1);
  set(p.V, -0.3, 0.2);
  set(p.B, 1.2, -0.4);
  set(p.A, 0.8, 0.3);
  const int steps = 2;
  std::vector<double> state(3, 0.0);
  for (int t = 0; t < steps; ++t) {
    std::vector<double> next(3, 0.0);
    for (int i = 0; i < 3; ++i) {
      for (int j : nbrs[i]) {
        const double inner = sig(0.5 * h[i] + 0.1 - 0.3 * state[j] + 0.2);
        next[i] += 0.8 * sig(1.2 * inner - 0.4) + 0.3;
      }
    }
    state = next;
  }
  Tape tape;
  const Tensor y = gvrnn_layer(tape, x, adj, p, steps, true);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(y.at(i, 0), state[i], 1e-14);
}

TEST_F(PathFixture, GgruByHand) {
  GgruParams p;
  set(p.Uz, 0.5, 0.1);
  set(p.Vz, -0.3, 0.2);
  set(p.Ur, 0.4, -0.2);
  set(p.Vr, 0.6, 0.0);
  set(p.Uh, -0.7, 0.3);
  set(p.Vh, 0.2, -0.1);
  const int steps = 2;
  std::vector<double> s = h;
  for (int t = 0; t < steps; ++t) {
    std::vector<double> next(3);
    for (int i = 0; i < 3; ++i) {
      double agg = 0.0;
      for (int j : nbrs[i]) agg += s[j];
      const double z = sig(0.5 * s[i] + 0.1 - 0.3 * agg + 0.2);
      const double r = sig(0.4 * s[i] - 0.2 + 0.6 * agg);
      const double cand = std::tanh(-0.7 * (r * s[i]) + 0.3 + 0.2 * agg - 0.1);
      next[i] = (1.0 - z) * s[i] + z * cand;
    }
    s = next;
  }
  Tape tape;
  const Tensor y = ggru_layer(tape, x, adj, p, steps, true);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(y.at(i, 0), s[i], 1e-14);
}

TEST_F(PathFixture, GlstmByHand) {
  GlstmParams p;
  set(p.Ui, 0.5, 0.1);
  set(p.Vi, -0.3, 0.2);
  set(p.Uo, 0.4, -0.2);
  set(p.Vo, 0.6, 0.0);
  set(p.Uc, -0.7, 0.3);
  set(p.Vc, 0.2, -0.1);
  set(p.Uf, 0.9, 0.05);
  set(p.Vf, -0.5, 0.15);
  const int steps = 3;
  std::vector<double> hs(3, 0.0), cs(3, 0.0);
  for (int t = 0; t < steps; ++t) {
    std::vector<double> hn(3), cn(3);
    for (int i = 0; i < 3; ++i) {
      double agg = 0.0;
      for (int j : nbrs[i]) agg += hs[j];
      const double in = sig(0.5 * h[i] + 0.1 - 0.3 * agg + 0.2);
      const double out = sig(0.4 * h[i] - 0.2 + 0.6 * agg);
      const double cand = std::tanh(-0.7 * h[i] + 0.3 + 0.2 * agg - 0.1);
      double carry = 0.0;
      for (int j : nbrs[i]) {
        carry += sig(0.9 * h[i] + 0.05 - 0.5 * hs[j] + 0.15) * cs[j];
      }
      cn[i] = in * cand + carry;
      hn[i] = out * std::tanh(cn[i]);
    }
    hs = hn;
    cs = cn;
  }
  Tape tape;
  const Tensor y = glstm_layer(tape, x, adj, p, steps, true);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(y.at(i, 0), hs[i], 1e-14);
}

TEST(LayerTest, RecurrentLayersNeedAStep) {
  Rng rng(1);
  auto p = std::get<GgruParams>(make_layer_params(Arch::kGGRU, 2, false, rng));
  const auto adj = SparseAdjacency::undirected(2, {{0, 1}});
  Tape tape;
  EXPECT_THROW(ggru_layer(tape, Tensor::zeros(2, 2), adj, p, 0, true),
               ContractError);
}

ModelConfig config_for(Arch arch, int layers, int hidden, bool bn = true) {
  ModelConfig c;
  c.arch = arch;
  c.layers = layers;
  c.hidden = hidden;
  c.inner_steps = 2;
  c.batch_norm = bn;
  c.input_dim = 3;
  c.n_classes = 2;
  return c;
}

TEST(GateReductionTest, OpenGatesGiveCommNetExactly) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = gen::make_matching_instance(
        gen::make_pattern(rng()), 0.1, rng());
    const auto& adj = inst.graph.adjacency;
    const std::size_t H = 6;
    auto gated = std::get<GatedGcnParams>(
        make_layer_params(Arch::kGatedGCN, H, true, rng));
    CommNetParams plain;
    plain.U = gated.U;
    plain.V = gated.V;
    plain.norm = gated.norm;
    std::vector<double> v(adj.n_nodes() * H);
    for (auto& e : v) e = uniform(rng, -1.0, 1.0);
    const Tensor h = Tensor::from(adj.n_nodes(), H, v);
    Tape tape;
    const Tensor a =
        gated_gcn_layer(tape, h, adj, gated, true, GateMode::kOpen);
    const Tensor b = commnet_layer(tape, h, adj, plain, true);
    for (std::size_t k = 0; k < a.size(); ++k) {
      ASSERT_EQ(a.data()[k], b.data()[k]);
    }
  }
}

TEST(GateReductionTest, ClosedGatesDropNeighbors) {
  Rng rng(3);
  const auto adj = SparseAdjacency::undirected(4, {{0, 1}, {1, 2}, {2, 3}});
  auto p = std::get<GatedGcnParams>(
      make_layer_params(Arch::kGatedGCN, 3, false, rng));
  const Tensor h = Tensor::from(4, 3, {1, 2, 3, -1, 0, 1, 2, 2, -2, 0.5, 1, 0});
  Tape tape;
  const Tensor y = gated_gcn_layer(tape, h, adj, p, true, GateMode::kClosed);
  const Tensor u = ad::relu(tape, p.U(tape, h));
  for (std::size_t k = 0; k < y.size(); ++k) EXPECT_EQ(y.data()[k], u.data()[k]);
}

class PerArchTest : public ::testing::TestWithParam<Arch> {};

TEST_P(PerArchTest, PermutationEquivariance) {
  const Arch arch = GetParam();
  Rng rng(derive_seed(17, {static_cast<std::uint64_t>(arch)}));
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + rng() % 13;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t u = 0; u < n; ++u) {
      for (std::uint32_t v = u + 1; v < n; ++v) {
        if (bernoulli(rng, 0.35)) edges.emplace_back(u, v);
      }
    }
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> moved;
    for (auto [u, v] : edges) {
      moved.emplace_back(std::min(perm[u], perm[v]), std::max(perm[u], perm[v]));
    }
    const auto adj = SparseAdjacency::undirected(n, edges);
    const auto adj_p = SparseAdjacency::undirected(n, moved);
    std::vector<double> feats(n * 3), feats_p(n * 3);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < 3; ++k) {
        feats[i * 3 + k] = uniform(rng, -1.0, 1.0);
        feats_p[perm[i] * 3 + k] = feats[i * 3 + k];
      }
    }
    Model model(config_for(arch, 2, 5), rng());
    Model twin = model;  // separate running stats
    Tape tape;
    const Tensor y = model.forward(tape, Tensor::from(n, 3, feats), adj, true);
    const Tensor y_p =
        twin.forward(tape, Tensor::from(n, 3, feats_p), adj_p, true);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < 2; ++c) {
        ASSERT_NEAR(y.at(i, c), y_p.at(perm[i], c), 1e-10)
            << arch_name(arch) << " node " << i;
      }
    }
  }
}

TEST_P(PerArchTest, ParameterCountMatchesModel) {
  const Arch arch = GetParam();
  for (int layers : {1, 3}) {
    for (int hidden : {1, 7}) {
      for (bool bn : {false, true}) {
        const auto config = config_for(arch, layers, hidden, bn);
        Model model(config, 1);
        std::size_t manual = 0;
        for (const auto& p : model.parameters()) manual += p.tensor.size();
        EXPECT_EQ(count_params(config), manual);
        EXPECT_EQ(model.parameter_count(), manual);
      }
    }
  }
}

TEST_P(PerArchTest, BudgetSolverBracketsBudget) {
  const Arch arch = GetParam();
  for (std::size_t budget : {25000u, 50000u, 75000u, 100000u, 150000u}) {
    const int h = solve_hidden_for_budget(arch, 6, 3, budget, 3, 2);
    auto config = config_for(arch, 6, h);
    config.inner_steps = 3;
    EXPECT_LE(count_params(config), budget);
    config.hidden = h + 1;
    EXPECT_GT(count_params(config), budget);
  }
  EXPECT_THROW(solve_hidden_for_budget(arch, 6, 3, 10, 3, 2), InfeasibleError);
}

TEST_P(PerArchTest, CheckpointRoundTrip) {
  const Arch arch = GetParam();
  Model model(config_for(arch, 2, 4), 9);
  const auto inst = gen::make_matching_instance(gen::make_pattern(1), 0.1, 2);
  const Tensor x = gen::node_features(inst);
  {
    Tape tape;  // populate running stats
    model.forward(tape, x, inst.graph.adjacency, true);
  }
  const std::string text = model.to_checkpoint();
  Model back = Model::from_checkpoint(text);
  EXPECT_EQ(back.config(), model.config());
  EXPECT_EQ(back.to_checkpoint(), text);
  Tape tape(false);
  const Tensor a = model.forward(tape, x, inst.graph.adjacency, false);
  const Tensor b = back.forward(tape, x, inst.graph.adjacency, false);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a.data()[k], b.data()[k]);
}

INSTANTIATE_TEST_SUITE_P(AllArchs, PerArchTest, ::testing::ValuesIn(kAllArchs),
                         [](const auto& info) {
                           return std::string(arch_name(info.param));
                         });

TEST(ModelTest, HandCountForSingleGatedLayer) {
  // embed 3*1+1, four 1x1 maps with bias, gamma+beta, readout 1*2+2.
  auto config = config_for(Arch::kGatedGCN, 1, 1);
  EXPECT_EQ(count_params(config), 4u + 8u + 2u + 4u);
}

TEST(ModelTest, ParameterNamesAreStable) {
  Model model(config_for(Arch::kCommNet, 1, 2), 1);
  std::vector<std::string> names;
  for (const auto& p : model.parameters()) names.push_back(p.name);
  const std::vector<std::string> expected = {
      "embed.weight",    "embed.bias",      "layer0.U.weight",
      "layer0.U.bias",   "layer0.V.weight", "layer0.V.bias",
      "layer0.bn.gamma", "layer0.bn.beta",  "readout.weight",
      "readout.bias"};
  EXPECT_EQ(names, expected);
}

TEST(ModelTest, ResidualWidthMismatch) {
  Tape tape;
  EXPECT_THROW(residual_wrap(tape, Tensor::zeros(2, 3), Tensor::zeros(2, 4)),
               ContractError);
}

TEST(ModelTest, ArchNames) {
  for (Arch a : kAllArchs) EXPECT_EQ(parse_arch(arch_name(a)), a);
  EXPECT_THROW(parse_arch("Transformer"), ParseError);
  EXPECT_TRUE(is_recurrent(Arch::kGLSTM));
  EXPECT_FALSE(is_recurrent(Arch::kGatedGCN));
}

TEST(ModelTest, CheckpointRejectsGarbage) {
  EXPECT_THROW(Model::from_checkpoint("not a model"), ParseError);
}

}  // namespace
}  // namespace graphbench::nn
