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

#ifndef GRAPHBENCH_VARIATIONAL_HPP
#define GRAPHBENCH_VARIATIONAL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "graphbench/graph_gen.hpp"

namespace graphbench::variational {

// Compressed sparse rows, column indices ascending within a row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> diagonal() const;
};

// L = D - A with unit edge weights.
CsrMatrix build_laplacian(const gen::Graph& graph);

// Restriction of the Laplacian to the nodes that have a seeded node in their
// connected component, split into unlabeled and labeled blocks.
struct LaplacianSystem {
  std::vector<std::uint32_t> unlabeled;  // node ids, ascending
  std::vector<std::uint32_t> labeled;    // node ids, ascending
  CsrMatrix unlabeled_block;             // L_U
  CsrMatrix boundary_block;              // B: unlabeled x labeled
  // Nodes whose component holds no seed; they are outside the system.
  std::vector<std::uint32_t> unreachable;
};

LaplacianSystem build_system(const gen::Graph& graph,
                             std::span<const std::uint8_t> seed_mask);

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Jacobi-preconditioned conjugate gradient for symmetric positive definite A.
CgResult conjugate_gradient(const CsrMatrix& a, std::span<const double> b,
                            double tolerance, int max_iterations);

inline constexpr double kCgTolerance = 1e-8;

struct DirichletResult {
  std::vector<int> assignment;
  // potentials[c][i]: harmonic probability that node i belongs to class c.
  std::vector<std::vector<double>> potentials;
  std::vector<std::uint8_t> flagged;  // node lies in a component with no seed
  int fallback_class = 0;
  int max_cg_iterations = 0;
};

// Random-walker labeling. `labels[i]` is read only where seed_mask[i] is set.
// Unseeded components take the most frequent seed class (smallest id on
// ties) and are flagged. Throws SolverError if CG fails within 10 n steps.
DirichletResult dirichlet_solve(const gen::Graph& graph,
                                std::span<const std::uint8_t> seed_mask,
                                std::span<const int> labels, int n_classes);

// Convenience for clustering instances: seeds carry their community labels.
DirichletResult dirichlet_solve(const gen::TaskInstance& instance);

// CSV: node,seed,target,assigned,flagged with an accuracy comment line.
std::string assignments_csv(const gen::TaskInstance& instance,
                            const DirichletResult& result);

}  // namespace graphbench::variational

#endif  // GRAPHBENCH_VARIATIONAL_HPP
