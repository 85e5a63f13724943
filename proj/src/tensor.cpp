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

#include "graphbench/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "graphbench/error.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace graphbench::ad {
namespace {

#if defined(__GLIBC__)
// Edge tensors routinely exceed glibc's mmap threshold, so every training
// step would map, fault in and unmap fresh pages. Keep them on the heap.
const bool kAllocatorTuned = [] {
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
  return true;
}();
#endif

}  // namespace

Tensor Tensor::zeros(std::size_t rows, std::size_t cols, bool requires_grad) {
  return filled(rows, cols, 0.0, requires_grad);
}

Tensor Tensor::filled(std::size_t rows, std::size_t cols, double value,
                      bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->rows = rows;
  node->cols = cols;
  node->data.assign(rows * cols, value);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::from(std::size_t rows, std::size_t cols,
                    std::vector<double> values, bool requires_grad) {
  if (values.size() != rows * cols) {
    std::ostringstream msg;
    msg << "tensor of shape " << rows << "x" << cols << " given "
        << values.size() << " values";
    throw DimensionError(msg.str());
  }
  auto node = std::make_shared<Node>();
  node->rows = rows;
  node->cols = cols;
  node->data.assign(values.begin(), values.end());
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::uninitialized(std::size_t rows, std::size_t cols,
                             bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->rows = rows;
  node->cols = cols;
  node->data.resize(rows * cols);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return filled(1, 1, value, requires_grad);
}

double Tensor::item() const {
  if (size() != 1) throw DimensionError("item() on a non-scalar tensor");
  return node_->data[0];
}

std::span<double> Tensor::grad_buffer() const {
  if (node_->grad.empty()) node_->grad.assign(node_->data.size(), 0.0);
  return node_->grad;
}

void Tensor::zero_grad() const {
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

// ---- Tape -----------------------------------------------------------------

bool Tape::wants(std::initializer_list<const Tensor*> inputs) const {
  if (!recording_) return false;
  return std::any_of(inputs.begin(), inputs.end(),
                     [](const Tensor* t) { return t->requires_grad(); });
}

void Tape::record(std::vector<Tensor> inputs, Tensor output,
                  std::function<void()> backward_rule) {
  ops_.push_back({std::move(inputs), std::move(output),
                  std::move(backward_rule)});
}

void Tape::backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw ContractError("backward() requires a scalar loss");
  }
  for (auto& op : ops_) {
    if (op.output.has_grad()) {
      op.output.zero_grad();
    } else {
      op.output.grad_buffer();
    }
    for (auto& in : op.inputs) {
      if (in.requires_grad()) in.grad_buffer();
    }
  }
  Tensor seed = loss;
  if (!seed.requires_grad()) return;
  seed.grad_buffer()[0] += 1.0;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) it->backward_rule();
}

// ---- SparseAdjacency ------------------------------------------------------

SparseAdjacency::SparseAdjacency(std::size_t n_nodes,
                                 std::vector<Edge> directed_edges)
    : n_nodes_(n_nodes) {
  for (const auto& [s, t] : directed_edges) {
    if (s >= n_nodes || t >= n_nodes) {
      std::ostringstream msg;
      msg << "edge (" << s << ", " << t << ") out of range for " << n_nodes
          << " nodes";
      throw StructuralError(msg.str());
    }
  }
  std::sort(directed_edges.begin(), directed_edges.end(),
            [](const Edge& a, const Edge& b) {
              return a.second != b.second ? a.second < b.second
                                          : a.first < b.first;
            });
  if (std::adjacent_find(directed_edges.begin(), directed_edges.end()) !=
      directed_edges.end()) {
    throw StructuralError("duplicate directed edge");
  }
  sources_.reserve(directed_edges.size());
  targets_.reserve(directed_edges.size());
  offsets_.assign(n_nodes + 1, 0);
  for (const auto& [s, t] : directed_edges) {
    sources_.push_back(s);
    targets_.push_back(t);
    ++offsets_[t + 1];
  }
  for (std::size_t i = 0; i < n_nodes; ++i) offsets_[i + 1] += offsets_[i];
}

SparseAdjacency SparseAdjacency::undirected(
    std::size_t n_nodes,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  std::vector<Edge> directed;
  directed.reserve(2 * edges.size());
  for (const auto& [u, v] : edges) {
    if (u == v) throw StructuralError("self-loop in undirected edge list");
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  return SparseAdjacency(n_nodes, std::move(directed));
}

std::size_t SparseAdjacency::find(std::uint32_t source,
                                  std::uint32_t target) const {
  if (target >= n_nodes_) return n_edges();
  auto first = sources_.begin() + static_cast<std::ptrdiff_t>(offsets_[target]);
  auto last =
      sources_.begin() + static_cast<std::ptrdiff_t>(offsets_[target + 1]);
  auto it = std::lower_bound(first, last, source);
  if (it == last || *it != source) return n_edges();
  return static_cast<std::size_t>(it - sources_.begin());
}

bool SparseAdjacency::is_symmetric() const {
  for (std::size_t e = 0; e < n_edges(); ++e) {
    if (find(targets_[e], sources_[e]) == n_edges()) return false;
  }
  return true;
}

bool SparseAdjacency::has_self_loops() const {
  for (std::size_t e = 0; e < n_edges(); ++e) {
    if (sources_[e] == targets_[e]) return true;
  }
  return false;
}

}  // namespace graphbench::ad
