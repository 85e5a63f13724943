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

#ifndef GRAPHBENCH_TENSOR_HPP
#define GRAPHBENCH_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <new>
#include <span>
#include <utility>
#include <vector>

namespace graphbench::ad {

inline constexpr std::size_t kTensorAlignment = 64;

// Tensor storage. Leaves elements uninitialised on resize, so ops that
// overwrite every entry skip the zero fill, and aligns every buffer the same
// way: vectorized kernels split work into scalar and packet parts by
// address, and a fixed alignment keeps results independent of where the
// allocator happened to place the data.
template <class T>
struct DefaultInitAllocator : std::allocator<T> {
  template <class U>
  struct rebind {
    using other = DefaultInitAllocator<U>;
  };
  using std::allocator<T>::allocator;
  DefaultInitAllocator() = default;
  template <class U>
  DefaultInitAllocator(const DefaultInitAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(
        n * sizeof(T), std::align_val_t{kTensorAlignment}));
  }
  void deallocate(T* p, std::size_t) noexcept {
    ::operator delete(p, std::align_val_t{kTensorAlignment});
  }
  template <class U>
  void construct(U* p) noexcept {
    ::new (static_cast<void*>(p)) U;
  }
  template <class U, class... Args>
  void construct(U* p, Args&&... args) {
    ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
  }
};

// Dense row-major 2-D array of doubles. Scalars are 1x1, vectors are 1xd.
// Copies share storage; the value is treated as immutable once an op has
// produced it, only the gradient buffer accumulates.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::size_t rows, std::size_t cols,
                      bool requires_grad = false);
  static Tensor filled(std::size_t rows, std::size_t cols, double value,
                       bool requires_grad = false);
  static Tensor from(std::size_t rows, std::size_t cols,
                     std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  // Contents unspecified; the caller must write every element.
  static Tensor uninitialized(std::size_t rows, std::size_t cols,
                              bool requires_grad = false);

  bool defined() const noexcept { return node_ != nullptr; }
  std::size_t rows() const noexcept { return node_->rows; }
  std::size_t cols() const noexcept { return node_->cols; }
  std::size_t size() const noexcept { return node_->data.size(); }
  bool requires_grad() const noexcept { return node_->requires_grad; }

  std::span<const double> data() const noexcept { return node_->data; }
  // Only optimizers and initializers write through this.
  std::span<double> mutable_data() noexcept { return node_->data; }
  double at(std::size_t r, std::size_t c) const {
    return node_->data[r * node_->cols + c];
  }
  double item() const;

  bool has_grad() const noexcept { return !node_->grad.empty(); }
  std::span<const double> grad() const noexcept { return node_->grad; }
  // Allocates a zero gradient on first use.
  std::span<double> grad_buffer() const;
  void zero_grad() const;

  bool same_node(const Tensor& other) const noexcept {
    return node_ == other.node_;
  }

 private:
  struct Node {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double, DefaultInitAllocator<double>> data;
    std::vector<double, DefaultInitAllocator<double>> grad;
    bool requires_grad = false;
  };
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  std::shared_ptr<Node> node_;
};

// Define-by-run record of differentiable operations. Ops append themselves
// in execution order, so the record is already topologically sorted.
class Tape {
 public:
  explicit Tape(bool recording = true) : recording_(recording) {}

  bool recording() const noexcept { return recording_; }
  std::size_t size() const noexcept { return ops_.size(); }

  // True when an op over `inputs` must be recorded.
  bool wants(std::initializer_list<const Tensor*> inputs) const;

  void record(std::vector<Tensor> inputs, Tensor output,
              std::function<void()> backward_rule);

  // Seeds d(loss)=1 and runs every backward rule once, newest first.
  // Intermediate gradients are reset on entry; leaf gradients accumulate.
  void backward(const Tensor& loss);

  void clear() { ops_.clear(); }

 private:
  struct Op {
    std::vector<Tensor> inputs;
    Tensor output;
    std::function<void()> backward_rule;
  };
  bool recording_;
  std::vector<Op> ops_;
};

// Directed edge list (source -> target) stored in canonical order: sorted by
// target, then source. Edges [row_begin(i), row_end(i)) are those entering i.
class SparseAdjacency {
 public:
  using Edge = std::pair<std::uint32_t, std::uint32_t>;  // (source, target)

  SparseAdjacency() = default;
  SparseAdjacency(std::size_t n_nodes, std::vector<Edge> directed_edges);

  // Adds both directions of every {u, v}. Rejects self-loops and duplicates.
  static SparseAdjacency undirected(
      std::size_t n_nodes,
      const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges);

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t n_edges() const noexcept { return sources_.size(); }
  std::uint32_t source(std::size_t e) const { return sources_[e]; }
  std::uint32_t target(std::size_t e) const { return targets_[e]; }
  std::size_t row_begin(std::size_t i) const { return offsets_[i]; }
  std::size_t row_end(std::size_t i) const { return offsets_[i + 1]; }
  std::size_t degree(std::size_t i) const {
    return offsets_[i + 1] - offsets_[i];
  }
  std::span<const std::uint32_t> sources() const noexcept { return sources_; }
  std::span<const std::uint32_t> targets() const noexcept { return targets_; }

  bool is_symmetric() const;
  bool has_self_loops() const;
  // Index of edge source->target, or n_edges() if absent.
  std::size_t find(std::uint32_t source, std::uint32_t target) const;

 private:
  std::size_t n_nodes_ = 0;
  std::vector<std::uint32_t> sources_;
  std::vector<std::uint32_t> targets_;
  std::vector<std::size_t> offsets_{0};
};

// Per-feature running estimates kept by graph_batch_norm in training mode.
struct RunningStats {
  std::vector<double> mean;
  std::vector<double> var;
  double momentum = 0.1;

  RunningStats() = default;
  explicit RunningStats(std::size_t features)
      : mean(features, 0.0), var(features, 1.0) {}
};

inline constexpr double kBatchNormEpsilon = 1e-5;

// ---- Operations -----------------------------------------------------------

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);

Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b);
Tensor hadamard(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& a, double factor);
Tensor sigmoid(Tape& tape, const Tensor& a);
Tensor tanh(Tape& tape, const Tensor& a);
Tensor relu(Tape& tape, const Tensor& a);
// a[n x d] + bias[1 x d] broadcast over rows; the only broadcasting op.
Tensor add_bias(Tape& tape, const Tensor& a, const Tensor& bias);
// Sum of all entries as a 1x1 tensor.
Tensor sum(Tape& tape, const Tensor& a);

// Row i = sum of rows h[j] over edges j -> i.
Tensor neighbor_sum(Tape& tape, const Tensor& h, const SparseAdjacency& adj);
// Row i = sum over edges e = (j -> i) of gates[e] (.) h[j]; gates is E x d.
Tensor gated_neighbor_sum(Tape& tape, const Tensor& h, const Tensor& gates,
                          const SparseAdjacency& adj);
// Per-edge rows: out[e] = at_target[target(e)] + at_source[source(e)].
Tensor edge_combine(Tape& tape, const Tensor& at_target,
                    const Tensor& at_source, const SparseAdjacency& adj);
// sigmoid(edge_combine(...)) without materialising the pre-activation.
Tensor edge_gate(Tape& tape, const Tensor& at_target, const Tensor& at_source,
                 const SparseAdjacency& adj);
// Row i = sum of per-edge rows messages[e] over edges entering i.
Tensor edge_scatter_sum(Tape& tape, const Tensor& messages,
                        const SparseAdjacency& adj);

// Normalizes each column over the node axis, then applies gamma/beta
// (both 1 x d). Training mode updates `stats`; inference mode reads them.
Tensor graph_batch_norm(Tape& tape, const Tensor& h, const Tensor& gamma,
                        const Tensor& beta, RunningStats& stats,
                        bool training);

// Weighted mean over unmasked rows of -log softmax(logits[i])[targets[i]],
// each row weighted by class_weights[targets[i]]. Empty mask = all rows.
Tensor softmax_cross_entropy(Tape& tape, const Tensor& logits,
                             std::span<const int> targets,
                             std::span<const double> class_weights,
                             std::span<const std::uint8_t> mask = {});

}  // namespace graphbench::ad

#endif  // GRAPHBENCH_TENSOR_HPP
