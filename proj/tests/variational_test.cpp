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

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "graphbench/error.hpp"
#include "graphbench/graph_gen.hpp"
#include "graphbench/random.hpp"
#include "graphbench/variational.hpp"

namespace graphbench::variational {
namespace {

gen::Graph make_graph(std::size_t n,
                      std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  gen::Graph g;
  g.n_nodes = n;
  g.n_communities = 1;
  std::sort(edges.begin(), edges.end());
  g.edges = std::move(edges);
  g.signal.assign(n, 0);
  g.community.assign(n, 0);
  g.finalize();
  return g;
}

// Two 4-cliques {0..3} and {4..7} joined by the single edge 3-4.
gen::Graph two_cliques() {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t base : {0u, 4u}) {
    for (std::uint32_t u = 0; u < 4; ++u) {
      for (std::uint32_t v = u + 1; v < 4; ++v) edges.emplace_back(base + u, base + v);
    }
  }
  edges.emplace_back(3, 4);
  return make_graph(8, edges);
}

TEST(LaplacianTest, RowsSumToZero) {
  const auto g = two_cliques();
  const auto lap = build_laplacian(g);
  for (std::size_t i = 0; i < 8; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < 8; ++j) row += lap.at(i, j);
    EXPECT_EQ(row, 0.0);
    EXPECT_EQ(lap.at(i, i), static_cast<double>(g.adjacency.degree(i)));
  }
  EXPECT_EQ(lap.at(3, 4), -1.0);
  EXPECT_EQ(lap.at(0, 5), 0.0);
}

TEST(DirichletTest, SeparatesCliques) {
  const auto g = two_cliques();
  std::vector<std::uint8_t> seeds(8, 0);
  seeds[0] = seeds[7] = 1;
  std::vector<int> labels(8, 0);
  labels[7] = 1;
  const auto r = dirichlet_solve(g, seeds, labels, 2);
  EXPECT_EQ(r.assignment, (std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1}));
  // The bridge nodes are symmetric images of each other.
  EXPECT_NEAR(r.potentials[0][3], r.potentials[1][4], 1e-9);
  EXPECT_EQ(std::count(r.flagged.begin(), r.flagged.end(), 1), 0);
}

TEST(DirichletTest, PathPotentialsAreLinear) {
  // Harmonic functions on a path interpolate linearly between the ends.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i + 1 < 6; ++i) edges.emplace_back(i, i + 1);
  const auto g = make_graph(6, edges);
  std::vector<std::uint8_t> seeds = {1, 0, 0, 0, 0, 1};
  std::vector<int> labels = {0, 0, 0, 0, 0, 1};
  const auto r = dirichlet_solve(g, seeds, labels, 2);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(r.potentials[1][i], i / 5.0, 1e-8);
}

TEST(DirichletTest, PartitionOfUnityAndMaximumPrinciple) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = gen::make_clustering_instance(0.2, derive_seed(3, {s}));
    const auto r = dirichlet_solve(inst);
    for (std::size_t i = 0; i < inst.graph.n_nodes; ++i) {
      double total = 0.0;
      for (const auto& pot : r.potentials) {
        EXPECT_GE(pot[i], -1e-9);
        EXPECT_LE(pot[i], 1.0 + 1e-9);
        total += pot[i];
      }
      EXPECT_NEAR(total, 1.0, 1e-6);
      if (inst.seed_mask[i]) EXPECT_EQ(r.assignment[i], inst.targets[i]);
    }
  }
}

TEST(CgTest, MatchesDenseSolve) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto inst = gen::make_clustering_instance(0.1, derive_seed(11, {s}));
    if (inst.graph.n_nodes > 200) continue;
    const auto sys = build_system(inst.graph, inst.seed_mask);
    const auto& a = sys.unlabeled_block;
    const auto n = static_cast<Eigen::Index>(a.rows);
    Eigen::MatrixXd dense(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) dense(i, j) = a.at(i, j);
    }
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) b(i) = std::sin(1.0 + i);
    const Eigen::VectorXd expected = dense.ldlt().solve(b);
    const std::vector<double> rhs(b.data(), b.data() + n);
    const auto cg = conjugate_gradient(a, rhs, 1e-12, 10 * static_cast<int>(n));
    ASSERT_TRUE(cg.converged);
    for (Eigen::Index i = 0; i < n; ++i) EXPECT_NEAR(cg.x[i], expected(i), 1e-6);
  }
}

TEST(CgTest, ReportsNonConvergence) {
  const auto g = two_cliques();
  std::vector<std::uint8_t> seeds(8, 0);
  seeds[0] = 1;
  const auto sys = build_system(g, seeds);
  std::vector<double> b(sys.unlabeled.size(), 1.0);
  const auto cg = conjugate_gradient(sys.unlabeled_block, b, 1e-14, 1);
  EXPECT_FALSE(cg.converged);
  EXPECT_EQ(cg.iterations, 1);
}

TEST(DirichletTest, UnseededComponentIsFlagged) {
  // Component {0,1,2} holds both seeds; {3,4} holds none.
  const auto g = make_graph(5, {{0, 1}, {1, 2}, {3, 4}});
  std::vector<std::uint8_t> seeds = {1, 0, 1, 0, 0};
  std::vector<int> labels = {2, 0, 2, 0, 0};
  const auto r = dirichlet_solve(g, seeds, labels, 3);
  EXPECT_EQ(r.flagged, (std::vector<std::uint8_t>{0, 0, 0, 1, 1}));
  EXPECT_EQ(r.fallback_class, 2);
  EXPECT_EQ(r.assignment, (std::vector<int>{2, 2, 2, 2, 2}));
  const auto sys = build_system(g, seeds);
  EXPECT_EQ(sys.unreachable, (std::vector<std::uint32_t>{3, 4}));
  EXPECT_EQ(sys.unlabeled, (std::vector<std::uint32_t>{1}));
}

TEST(DirichletTest, ContractViolations) {
  const auto g = two_cliques();
  std::vector<std::uint8_t> none(8, 0);
  std::vector<int> labels(8, 0);
  EXPECT_THROW(dirichlet_solve(g, none, labels, 2), ContractError);
  std::vector<std::uint8_t> seeds(8, 0);
  seeds[1] = 1;
  labels[1] = 5;
  EXPECT_THROW(dirichlet_solve(g, seeds, labels, 2), ContractError);
  std::vector<int> short_labels(3, 0);
  EXPECT_THROW(dirichlet_solve(g, seeds, short_labels, 2), DimensionError);
  const auto pattern = gen::make_pattern(1);
  EXPECT_THROW(dirichlet_solve(gen::make_matching_instance(pattern, 0.1, 2)),
               ContractError);
}

TEST(DirichletTest, DeterministicCsv) {
  const auto inst = gen::make_clustering_instance(0.1, 42);
  const std::string a = assignments_csv(inst, dirichlet_solve(inst));
  const std::string b = assignments_csv(inst, dirichlet_solve(inst));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("# graphbench dirichlet assignments v1\n", 0), 0u);
  EXPECT_NE(a.find("node,seed,target,assigned,flagged\n"), std::string::npos);
  EXPECT_EQ(static_cast<std::size_t>(std::count(a.begin(), a.end(), '\n')),
            inst.graph.n_nodes + 3);
}

}  // namespace
}  // namespace graphbench::variational
