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

#include "graphbench/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "format.hpp"
#include "graphbench/error.hpp"
#include "graphbench/training.hpp"

namespace graphbench::variational {

double CsrMatrix::at(std::size_t r, std::size_t c) const {
  const auto first = indices.begin() + static_cast<std::ptrdiff_t>(offsets[r]);
  const auto last =
      indices.begin() + static_cast<std::ptrdiff_t>(offsets[r + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(c));
  if (it == last || *it != c) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) {
      acc += values[k] * x[indices[k]];
    }
    y[r] = acc;
  }
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(rows, cols), 0.0);
  for (std::size_t r = 0; r < d.size(); ++r) d[r] = at(r, r);
  return d;
}

CsrMatrix build_laplacian(const gen::Graph& graph) {
  const auto& adj = graph.adjacency;
  CsrMatrix l;
  l.rows = l.cols = graph.n_nodes;
  l.offsets.assign(1, 0);
  for (std::size_t i = 0; i < graph.n_nodes; ++i) {
    // Neighbors of i arrive sorted; splice the diagonal in order.
    bool placed = false;
    for (std::size_t e = adj.row_begin(i); e < adj.row_end(i); ++e) {
      const auto j = adj.source(e);
      if (!placed && j > i) {
        l.indices.push_back(static_cast<std::uint32_t>(i));
        l.values.push_back(static_cast<double>(adj.degree(i)));
        placed = true;
      }
      l.indices.push_back(j);
      l.values.push_back(-1.0);
    }
    if (!placed) {
      l.indices.push_back(static_cast<std::uint32_t>(i));
      l.values.push_back(static_cast<double>(adj.degree(i)));
    }
    l.offsets.push_back(l.indices.size());
  }
  return l;
}

namespace {

std::vector<int> component_ids(const gen::Graph& graph) {
  const auto& adj = graph.adjacency;
  std::vector<int> comp(graph.n_nodes, -1);
  int next = 0;
  std::vector<std::uint32_t> stack;
  for (std::size_t s = 0; s < graph.n_nodes; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    stack.push_back(static_cast<std::uint32_t>(s));
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (std::size_t e = adj.row_begin(u); e < adj.row_end(u); ++e) {
        const auto v = adj.source(e);
        if (comp[v] < 0) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

LaplacianSystem build_system(const gen::Graph& graph,
                             std::span<const std::uint8_t> seed_mask) {
  if (seed_mask.size() != graph.n_nodes) {
    throw DimensionError("seed mask length does not match the graph");
  }
  const auto comp = component_ids(graph);
  const int n_comp =
      comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<char> seeded(static_cast<std::size_t>(n_comp), 0);
  for (std::size_t i = 0; i < graph.n_nodes; ++i) {
    if (seed_mask[i]) seeded[static_cast<std::size_t>(comp[i])] = 1;
  }

  LaplacianSystem sys;
  constexpr std::uint32_t kOutside = ~std::uint32_t{0};
  std::vector<std::uint32_t> local(graph.n_nodes, kOutside);
  for (std::size_t i = 0; i < graph.n_nodes; ++i) {
    const auto id = static_cast<std::uint32_t>(i);
    if (seed_mask[i]) {
      local[i] = static_cast<std::uint32_t>(sys.labeled.size());
      sys.labeled.push_back(id);
    } else if (seeded[static_cast<std::size_t>(comp[i])]) {
      local[i] = static_cast<std::uint32_t>(sys.unlabeled.size());
      sys.unlabeled.push_back(id);
    } else {
      sys.unreachable.push_back(id);
    }
  }

  const auto lap = build_laplacian(graph);
  auto& lu = sys.unlabeled_block;
  auto& bd = sys.boundary_block;
  lu.rows = lu.cols = sys.unlabeled.size();
  bd.rows = sys.unlabeled.size();
  bd.cols = sys.labeled.size();
  for (const auto i : sys.unlabeled) {
    for (std::size_t k = lap.offsets[i]; k < lap.offsets[i + 1]; ++k) {
      const auto j = lap.indices[k];
      // Unseeded components never touch seeded ones, so j is in the system.
      if (seed_mask[j]) {
        bd.indices.push_back(local[j]);
        bd.values.push_back(lap.values[k]);
      } else {
        lu.indices.push_back(local[j]);
        lu.values.push_back(lap.values[k]);
      }
    }
    lu.offsets.push_back(lu.indices.size());
    bd.offsets.push_back(bd.indices.size());
  }
  return sys;
}

CgResult conjugate_gradient(const CsrMatrix& a, std::span<const double> b,
                            double tolerance, int max_iterations) {
  const std::size_t n = a.rows;
  CgResult res;
  res.x.assign(n, 0.0);
  const double b_norm = norm2(b);
  if (b_norm == 0.0) {
    res.converged = true;
    return res;
  }
  auto inv_diag = a.diagonal();
  for (auto& d : inv_diag) d = d != 0.0 ? 1.0 / d : 1.0;

  std::vector<double> r(b.begin(), b.end()), z(n), p(n), ap(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
  res.relative_residual = 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    a.multiply(p, ap);
    const double p_ap = std::inner_product(p.begin(), p.end(), ap.begin(), 0.0);
    if (!(p_ap > 0.0)) break;  // not positive definite along p
    const double alpha = rz / p_ap;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    res.iterations = it + 1;
    res.relative_residual = norm2(r) / b_norm;
    if (res.relative_residual <= tolerance) {
      res.converged = true;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next =
        std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return res;
}

DirichletResult dirichlet_solve(const gen::Graph& graph,
                                std::span<const std::uint8_t> seed_mask,
                                std::span<const int> labels, int n_classes) {
  if (labels.size() != graph.n_nodes) {
    throw DimensionError("label vector length does not match the graph");
  }
  if (std::none_of(seed_mask.begin(), seed_mask.end(),
                   [](std::uint8_t s) { return s != 0; })) {
    throw ContractError("dirichlet_solve needs at least one seed");
  }
  const auto sys = build_system(graph, seed_mask);
  const std::size_t n = graph.n_nodes;
  const auto classes = static_cast<std::size_t>(n_classes);

  DirichletResult out;
  out.potentials.assign(classes, std::vector<double>(n, 0.0));
  out.flagged.assign(n, 0);
  out.assignment.assign(n, 0);

  std::vector<int> seed_count(classes, 0);
  for (const auto s : sys.labeled) {
    const int c = labels[s];
    if (c < 0 || c >= n_classes) {
      throw ContractError("seed label " + std::to_string(c) +
                          " outside [0, " + std::to_string(n_classes) + ")");
    }
    ++seed_count[static_cast<std::size_t>(c)];
    out.potentials[static_cast<std::size_t>(c)][s] = 1.0;
  }
  out.fallback_class = static_cast<int>(
      std::max_element(seed_count.begin(), seed_count.end()) -
      seed_count.begin());

  const int max_iter = static_cast<int>(10 * std::max<std::size_t>(n, 1));
  std::vector<double> indicator(sys.labeled.size()), rhs(sys.unlabeled.size());
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t k = 0; k < sys.labeled.size(); ++k) {
      indicator[k] = labels[sys.labeled[k]] == static_cast<int>(c) ? 1.0 : 0.0;
    }
    sys.boundary_block.multiply(indicator, rhs);
    for (auto& v : rhs) v = -v;
    const auto cg =
        conjugate_gradient(sys.unlabeled_block, rhs, kCgTolerance, max_iter);
    if (!cg.converged) {
      std::ostringstream msg;
      msg << "conjugate gradient did not converge for class " << c << " after "
          << cg.iterations << " iterations (relative residual "
          << cg.relative_residual << ")";
      throw SolverError(msg.str());
    }
    out.max_cg_iterations = std::max(out.max_cg_iterations, cg.iterations);
    for (std::size_t k = 0; k < sys.unlabeled.size(); ++k) {
      out.potentials[c][sys.unlabeled[k]] = cg.x[k];
    }
  }
  for (const auto i : sys.unreachable) {
    out.flagged[i] = 1;
    out.potentials[static_cast<std::size_t>(out.fallback_class)][i] = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (seed_mask[i]) {
      out.assignment[i] = labels[i];
      continue;
    }
    int best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (out.potentials[c][i] > out.potentials[static_cast<std::size_t>(best)][i]) {
        best = static_cast<int>(c);
      }
    }
    out.assignment[i] = best;
  }
  return out;
}

DirichletResult dirichlet_solve(const gen::TaskInstance& instance) {
  if (instance.task != gen::Task::kClustering) {
    throw ContractError("dirichlet baseline runs on clustering instances");
  }
  return dirichlet_solve(instance.graph, instance.seed_mask, instance.targets,
                         instance.n_classes());
}

std::string assignments_csv(const gen::TaskInstance& instance,
                            const DirichletResult& result) {
  std::ostringstream out;
  out << "# graphbench dirichlet assignments v1\n";
  out << "# accuracy=" << detail::fmt(train::accuracy(result.assignment,
                                                      instance.targets))
      << '\n';
  out << "node,seed,target,assigned,flagged\n";
  for (std::size_t i = 0; i < instance.graph.n_nodes; ++i) {
    out << i << ',' << static_cast<int>(instance.seed_mask[i]) << ','
        << instance.targets[i] << ',' << result.assignment[i] << ','
        << static_cast<int>(result.flagged[i]) << '\n';
  }
  return out.str();
}

}  // namespace graphbench::variational
