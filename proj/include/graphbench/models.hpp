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

#ifndef GRAPHBENCH_MODELS_HPP
#define GRAPHBENCH_MODELS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "graphbench/random.hpp"
#include "graphbench/tensor.hpp"

namespace graphbench::nn {

enum class Arch { kGVRNN, kGGRU, kGLSTM, kCommNet, kSGCN, kGatedGCN };

inline constexpr std::array<Arch, 6> kAllArchs = {
    Arch::kGVRNN, Arch::kGGRU,  Arch::kGLSTM,
    Arch::kCommNet, Arch::kSGCN, Arch::kGatedGCN};

std::string_view arch_name(Arch arch);
Arch parse_arch(std::string_view name);
// Recurrent architectures run `inner_steps` iterations inside each layer.
bool is_recurrent(Arch arch);

struct ModelConfig {
  Arch arch = Arch::kGatedGCN;
  int layers = 6;
  int hidden = 50;
  int inner_steps = 3;
  bool residual = true;
  bool batch_norm = true;
  int input_dim = 3;
  int n_classes = 2;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// x -> x W + b, W stored in x out.
struct Linear {
  ad::Tensor weight;
  ad::Tensor bias;

  Linear() = default;
  // Weights and bias uniform in +-1/sqrt(in).
  Linear(std::size_t in, std::size_t out, Rng& rng);
  ad::Tensor operator()(ad::Tape& tape, const ad::Tensor& x) const;

  static constexpr std::size_t count(std::size_t in, std::size_t out) {
    return in * out + out;
  }
};

struct BatchNorm {
  ad::Tensor gamma;
  ad::Tensor beta;
  ad::RunningStats stats;

  BatchNorm() = default;
  explicit BatchNorm(std::size_t features);
  ad::Tensor operator()(ad::Tape& tape, const ad::Tensor& h, bool training);

  static constexpr std::size_t count(std::size_t features) {
    return 2 * features;
  }
};

// Per-layer weights. Field names follow the cell equations: U acts on the
// center/input vector, V on neighbors, A/B produce edge gates.
struct GvrnnParams {
  Linear U, V, B, A;
  std::optional<BatchNorm> norm;
};
struct GgruParams {
  Linear Uz, Vz, Ur, Vr, Uh, Vh;
  std::optional<BatchNorm> norm;
};
struct GlstmParams {
  Linear Ui, Vi, Uo, Vo, Uc, Vc, Uf, Vf;
  std::optional<BatchNorm> norm;
};
struct CommNetParams {
  Linear U, V;
  std::optional<BatchNorm> norm;
};
struct SgcnParams {
  Linear V, A, B;
  std::optional<BatchNorm> norm;
};
struct GatedGcnParams {
  Linear U, V, A, B;
  std::optional<BatchNorm> norm;
};

using LayerParams = std::variant<GvrnnParams, GgruParams, GlstmParams,
                                 CommNetParams, SgcnParams, GatedGcnParams>;

LayerParams make_layer_params(Arch arch, std::size_t hidden, bool batch_norm,
                              Rng& rng);

// Gate override used to check the reductions between gated and plain layers.
enum class GateMode { kLearned, kOpen, kClosed };

// ---- layer functions ------------------------------------------------------
// Every layer maps n x H node features to n x H node features.

// h^{t+1}_i = sum_{j->i} A sig(B sig(U x_i + V h^t_j)), h^0 = 0, T steps.
ad::Tensor gvrnn_layer(ad::Tape& tape, const ad::Tensor& x,
                       const ad::SparseAdjacency& adj, GvrnnParams& params,
                       int steps, bool training);

// GRU cell on (h, sum of neighbor h), h^0 = x, T steps.
ad::Tensor ggru_layer(ad::Tape& tape, const ad::Tensor& x,
                      const ad::SparseAdjacency& adj, GgruParams& params,
                      int steps, bool training);

// Graph LSTM with per-edge forget gates, h^0 = c^0 = 0, T steps. The cell
// update reads the neighbors' cells from the previous step.
ad::Tensor glstm_layer(ad::Tape& tape, const ad::Tensor& x,
                       const ad::SparseAdjacency& adj, GlstmParams& params,
                       int steps, bool training);

// ReLU(U h_i + sum_{j->i} V h_j).
ad::Tensor commnet_layer(ad::Tape& tape, const ad::Tensor& h,
                         const ad::SparseAdjacency& adj,
                         CommNetParams& params, bool training);

// One gate row per directed edge j -> i: sig(A h_i + B h_j).
ad::Tensor edge_gates(ad::Tape& tape, const ad::Tensor& h,
                      const ad::SparseAdjacency& adj, const Linear& A,
                      const Linear& B);

// ReLU(sum_{j->i} eta_ij (.) V h_j).
ad::Tensor sgcn_layer(ad::Tape& tape, const ad::Tensor& h,
                      const ad::SparseAdjacency& adj, SgcnParams& params,
                      bool training, GateMode gates = GateMode::kLearned);

// ReLU(U h_i + sum_{j->i} eta_ij (.) V h_j).
ad::Tensor gated_gcn_layer(ad::Tape& tape, const ad::Tensor& h,
                           const ad::SparseAdjacency& adj,
                           GatedGcnParams& params, bool training,
                           GateMode gates = GateMode::kLearned);

// layer_output + layer_input; widths must agree.
ad::Tensor residual_wrap(ad::Tape& tape, const ad::Tensor& layer_output,
                         const ad::Tensor& layer_input);

struct NamedParameter {
  std::string name;
  ad::Tensor tensor;
};

// Embedding -> L layers (optionally residual) -> per-node readout.
class Model {
 public:
  Model(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const noexcept { return config_; }

  ad::Tensor embed_input(ad::Tape& tape, const ad::Tensor& x) const;
  ad::Tensor apply_layer(ad::Tape& tape, std::size_t index,
                         const ad::Tensor& h, const ad::SparseAdjacency& adj,
                         bool training, GateMode gates = GateMode::kLearned);
  ad::Tensor readout(ad::Tape& tape, const ad::Tensor& h) const;

  // Full network: node features (n x input_dim) to logits (n x n_classes).
  ad::Tensor forward(ad::Tape& tape, const ad::Tensor& x,
                     const ad::SparseAdjacency& adj, bool training);

  Linear& embedding() noexcept { return embed_; }
  Linear& readout_map() noexcept { return readout_; }
  std::vector<LayerParams>& layers() noexcept { return layers_; }

  // Deterministic order: embedding, layers, readout.
  std::vector<NamedParameter> parameters();
  std::size_t parameter_count();
  void zero_grad();

  // Text checkpoint; values use shortest round-trip decimal form.
  std::string to_checkpoint();
  static Model from_checkpoint(std::string_view text);
  void save(const std::filesystem::path& path);
  static Model load(const std::filesystem::path& path);

 private:
  Model() = default;

  ModelConfig config_;
  Linear embed_;
  std::vector<LayerParams> layers_;
  Linear readout_;
};

// Closed-form learnable scalar count: embedding, per-layer linear maps with
// biases, batch-norm gamma/beta when enabled, and the readout.
std::size_t count_params(const ModelConfig& config);

// Largest H with count_params(H) <= budget; throws InfeasibleError when even
// H = 1 exceeds it.
int solve_hidden_for_budget(Arch arch, int layers, int inner_steps,
                            std::size_t budget, int input_dim, int n_classes,
                            bool residual = true, bool batch_norm = true);

}  // namespace graphbench::nn

#endif  // GRAPHBENCH_MODELS_HPP
