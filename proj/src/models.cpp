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

#include "graphbench/models.hpp"

#include <cmath>

#include "graphbench/error.hpp"
#include "layer_maps.hpp"

namespace graphbench::nn {

using ad::Tape;
using ad::Tensor;

std::string_view arch_name(Arch arch) {
  switch (arch) {
    case Arch::kGVRNN: return "GVRNN";
    case Arch::kGGRU: return "GGRU";
    case Arch::kGLSTM: return "GLSTM";
    case Arch::kCommNet: return "CommNet";
    case Arch::kSGCN: return "SGCN";
    case Arch::kGatedGCN: return "GatedGCN";
  }
  return "?";
}

Arch parse_arch(std::string_view name) {
  for (Arch a : kAllArchs) {
    if (arch_name(a) == name) return a;
  }
  throw ParseError("unknown architecture '" + std::string(name) + "'");
}

bool is_recurrent(Arch arch) {
  return arch == Arch::kGVRNN || arch == Arch::kGGRU || arch == Arch::kGLSTM;
}

void ModelConfig::validate() const {
  if (layers < 1) throw ContractError("model needs L >= 1");
  if (hidden < 1) throw ContractError("model needs H >= 1");
  if (is_recurrent(arch) && inner_steps < 1) {
    throw ContractError("recurrent model needs T >= 1");
  }
  if (input_dim < 1 || n_classes < 1) {
    throw ContractError("model needs positive input and class counts");
  }
}

Linear::Linear(std::size_t in, std::size_t out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::vector<double> w(in * out), b(out);
  for (auto& v : w) v = uniform(rng, -bound, bound);
  for (auto& v : b) v = uniform(rng, -bound, bound);
  weight = Tensor::from(in, out, std::move(w), true);
  bias = Tensor::from(1, out, std::move(b), true);
}

Tensor Linear::operator()(Tape& tape, const Tensor& x) const {
  return ad::add_bias(tape, ad::matmul(tape, x, weight), bias);
}

BatchNorm::BatchNorm(std::size_t features)
    : gamma(Tensor::filled(1, features, 1.0, true)),
      beta(Tensor::zeros(1, features, true)),
      stats(features) {}

Tensor BatchNorm::operator()(Tape& tape, const Tensor& h, bool training) {
  return ad::graph_batch_norm(tape, h, gamma, beta, stats, training);
}

LayerParams make_layer_params(Arch arch, std::size_t hidden, bool batch_norm,
                              Rng& rng) {
  LayerParams params;
  switch (arch) {
    case Arch::kGVRNN: params = GvrnnParams{}; break;
    case Arch::kGGRU: params = GgruParams{}; break;
    case Arch::kGLSTM: params = GlstmParams{}; break;
    case Arch::kCommNet: params = CommNetParams{}; break;
    case Arch::kSGCN: params = SgcnParams{}; break;
    case Arch::kGatedGCN: params = GatedGcnParams{}; break;
  }
  for_each_map(params, [&](std::string_view, Linear& map) {
    map = Linear(hidden, hidden, rng);
  });
  std::visit(
      [&](auto& p) {
        if (batch_norm) p.norm.emplace(hidden);
      },
      params);
  return params;
}

namespace {

Tensor maybe_norm(Tape& tape, std::optional<BatchNorm>& norm, const Tensor& h,
                  bool training) {
  return norm ? (*norm)(tape, h, training) : h;
}

void check_steps(int steps) {
  if (steps < 1) throw ContractError("recurrent layer needs T >= 1");
}

}  // namespace

Tensor gvrnn_layer(Tape& tape, const Tensor& x, const ad::SparseAdjacency& adj,
                   GvrnnParams& params, int steps, bool training) {
  check_steps(steps);
  const Tensor ux = params.U(tape, x);
  Tensor h = Tensor::zeros(x.rows(), params.A.weight.cols());
  for (int t = 0; t < steps; ++t) {
    Tensor m = ad::edge_gate(tape, ux, params.V(tape, h), adj);
    m = params.A(tape, ad::sigmoid(tape, params.B(tape, m)));
    h = maybe_norm(tape, params.norm, ad::edge_scatter_sum(tape, m, adj),
                   training);
  }
  return h;
}

Tensor ggru_layer(Tape& tape, const Tensor& x, const ad::SparseAdjacency& adj,
                  GgruParams& params, int steps, bool training) {
  check_steps(steps);
  Tensor h = x;
  for (int t = 0; t < steps; ++t) {
    const Tensor hbar = maybe_norm(tape, params.norm,
                                   ad::neighbor_sum(tape, h, adj), training);
    const Tensor z = ad::sigmoid(
        tape, ad::add(tape, params.Uz(tape, h), params.Vz(tape, hbar)));
    const Tensor r = ad::sigmoid(
        tape, ad::add(tape, params.Ur(tape, h), params.Vr(tape, hbar)));
    const Tensor candidate = ad::tanh(
        tape, ad::add(tape, params.Uh(tape, ad::hadamard(tape, h, r)),
                      params.Vh(tape, hbar)));
    // (1 - z) h + z h~ written as h + z (h~ - h).
    h = ad::add(tape, h,
                ad::hadamard(tape, z, ad::sub(tape, candidate, h)));
  }
  return h;
}

Tensor glstm_layer(Tape& tape, const Tensor& x, const ad::SparseAdjacency& adj,
                   GlstmParams& params, int steps, bool training) {
  check_steps(steps);
  const std::size_t n = x.rows(), width = params.Ui.weight.cols();
  // Input projections do not change across inner steps.
  const Tensor ui = params.Ui(tape, x);
  const Tensor uo = params.Uo(tape, x);
  const Tensor uc = params.Uc(tape, x);
  const Tensor uf = params.Uf(tape, x);
  Tensor h = Tensor::zeros(n, width);
  Tensor c = Tensor::zeros(n, width);
  for (int t = 0; t < steps; ++t) {
    const Tensor hbar = maybe_norm(tape, params.norm,
                                   ad::neighbor_sum(tape, h, adj), training);
    const Tensor in_gate =
        ad::sigmoid(tape, ad::add(tape, ui, params.Vi(tape, hbar)));
    const Tensor out_gate =
        ad::sigmoid(tape, ad::add(tape, uo, params.Vo(tape, hbar)));
    const Tensor candidate =
        ad::tanh(tape, ad::add(tape, uc, params.Vc(tape, hbar)));
    const Tensor forget =
        ad::edge_gate(tape, uf, params.Vf(tape, h), adj);
    c = ad::add(tape, ad::hadamard(tape, in_gate, candidate),
                ad::gated_neighbor_sum(tape, c, forget, adj));
    h = ad::hadamard(tape, out_gate, ad::tanh(tape, c));
  }
  return h;
}

Tensor commnet_layer(Tape& tape, const Tensor& h,
                     const ad::SparseAdjacency& adj, CommNetParams& params,
                     bool training) {
  const Tensor pre = ad::add(tape, params.U(tape, h),
                             ad::neighbor_sum(tape, params.V(tape, h), adj));
  return ad::relu(tape, maybe_norm(tape, params.norm, pre, training));
}

Tensor edge_gates(Tape& tape, const Tensor& h, const ad::SparseAdjacency& adj,
                  const Linear& A, const Linear& B) {
  return ad::edge_gate(tape, A(tape, h), B(tape, h), adj);
}

namespace {

Tensor gates_for(Tape& tape, const Tensor& h, const ad::SparseAdjacency& adj,
                 const Linear& A, const Linear& B, GateMode mode) {
  switch (mode) {
    case GateMode::kOpen:
      return Tensor::filled(adj.n_edges(), A.weight.cols(), 1.0);
    case GateMode::kClosed:
      return Tensor::zeros(adj.n_edges(), A.weight.cols());
    case GateMode::kLearned:
      break;
  }
  return edge_gates(tape, h, adj, A, B);
}

}  // namespace

Tensor sgcn_layer(Tape& tape, const Tensor& h, const ad::SparseAdjacency& adj,
                  SgcnParams& params, bool training, GateMode gates) {
  const Tensor eta = gates_for(tape, h, adj, params.A, params.B, gates);
  const Tensor pre =
      ad::gated_neighbor_sum(tape, params.V(tape, h), eta, adj);
  return ad::relu(tape, maybe_norm(tape, params.norm, pre, training));
}

Tensor gated_gcn_layer(Tape& tape, const Tensor& h,
                       const ad::SparseAdjacency& adj, GatedGcnParams& params,
                       bool training, GateMode gates) {
  const Tensor eta = gates_for(tape, h, adj, params.A, params.B, gates);
  const Tensor pre = ad::add(
      tape, params.U(tape, h),
      ad::gated_neighbor_sum(tape, params.V(tape, h), eta, adj));
  return ad::relu(tape, maybe_norm(tape, params.norm, pre, training));
}

Tensor residual_wrap(Tape& tape, const Tensor& layer_output,
                     const Tensor& layer_input) {
  if (layer_output.rows() != layer_input.rows() ||
      layer_output.cols() != layer_input.cols()) {
    throw ContractError("residual_wrap: width mismatch " +
                        std::to_string(layer_output.cols()) + " vs " +
                        std::to_string(layer_input.cols()));
  }
  return ad::add(tape, layer_output, layer_input);
}

// ---- Model ----------------------------------------------------------------

Model::Model(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Rng rng(seed);
  const auto H = static_cast<std::size_t>(config_.hidden);
  embed_ = Linear(static_cast<std::size_t>(config_.input_dim), H, rng);
  layers_.reserve(static_cast<std::size_t>(config_.layers));
  for (int l = 0; l < config_.layers; ++l) {
    layers_.push_back(make_layer_params(config_.arch, H, config_.batch_norm, rng));
  }
  readout_ = Linear(H, static_cast<std::size_t>(config_.n_classes), rng);
}

Tensor Model::embed_input(Tape& tape, const Tensor& x) const {
  return embed_(tape, x);
}

Tensor Model::apply_layer(Tape& tape, std::size_t index, const Tensor& h,
                          const ad::SparseAdjacency& adj, bool training,
                          GateMode gates) {
  const int steps = config_.inner_steps;
  Tensor out = std::visit(
      [&](auto& p) -> Tensor {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GvrnnParams>) {
          return gvrnn_layer(tape, h, adj, p, steps, training);
        } else if constexpr (std::is_same_v<P, GgruParams>) {
          return ggru_layer(tape, h, adj, p, steps, training);
        } else if constexpr (std::is_same_v<P, GlstmParams>) {
          return glstm_layer(tape, h, adj, p, steps, training);
        } else if constexpr (std::is_same_v<P, CommNetParams>) {
          return commnet_layer(tape, h, adj, p, training);
        } else if constexpr (std::is_same_v<P, SgcnParams>) {
          return sgcn_layer(tape, h, adj, p, training, gates);
        } else {
          return gated_gcn_layer(tape, h, adj, p, training, gates);
        }
      },
      layers_.at(index));
  return config_.residual ? residual_wrap(tape, out, h) : out;
}

Tensor Model::readout(Tape& tape, const Tensor& h) const {
  return readout_(tape, h);
}

Tensor Model::forward(Tape& tape, const Tensor& x,
                      const ad::SparseAdjacency& adj, bool training) {
  Tensor h = embed_input(tape, x);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    h = apply_layer(tape, l, h, adj, training);
  }
  return readout(tape, h);
}

std::vector<NamedParameter> Model::parameters() {
  std::vector<NamedParameter> out;
  out.push_back({"embed.weight", embed_.weight});
  out.push_back({"embed.bias", embed_.bias});
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const std::string prefix = "layer" + std::to_string(l) + ".";
    for_each_map(layers_[l], [&](std::string_view name, Linear& map) {
      out.push_back({prefix + std::string(name) + ".weight", map.weight});
      out.push_back({prefix + std::string(name) + ".bias", map.bias});
    });
    if (BatchNorm* bn = layer_norm(layers_[l])) {
      out.push_back({prefix + "bn.gamma", bn->gamma});
      out.push_back({prefix + "bn.beta", bn->beta});
    }
  }
  out.push_back({"readout.weight", readout_.weight});
  out.push_back({"readout.bias", readout_.bias});
  return out;
}

std::size_t Model::parameter_count() {
  std::size_t total = 0;
  for (const auto& p : parameters()) total += p.tensor.size();
  return total;
}

void Model::zero_grad() {
  for (auto& p : parameters()) p.tensor.zero_grad();
}

// ---- parameter budget -----------------------------------------------------

std::size_t count_params(const ModelConfig& config) {
  config.validate();
  const auto H = static_cast<std::size_t>(config.hidden);
  const std::size_t per_layer =
      maps_per_layer(config.arch) * Linear::count(H, H) +
      (config.batch_norm ? BatchNorm::count(H) : 0);
  return Linear::count(static_cast<std::size_t>(config.input_dim), H) +
         static_cast<std::size_t>(config.layers) * per_layer +
         Linear::count(H, static_cast<std::size_t>(config.n_classes));
}

int solve_hidden_for_budget(Arch arch, int layers, int inner_steps,
                            std::size_t budget, int input_dim, int n_classes,
                            bool residual, bool batch_norm) {
  ModelConfig cfg;
  cfg.arch = arch;
  cfg.layers = layers;
  cfg.inner_steps = inner_steps;
  cfg.residual = residual;
  cfg.batch_norm = batch_norm;
  cfg.input_dim = input_dim;
  cfg.n_classes = n_classes;
  auto count_at = [&](int h) {
    cfg.hidden = h;
    return count_params(cfg);
  };
  if (count_at(1) > budget) {
    throw InfeasibleError("budget " + std::to_string(budget) +
                          " is below the H = 1 count of " +
                          std::to_string(count_at(1)) + " for " +
                          std::string(arch_name(arch)));
  }
  // count is strictly increasing in H: grow an upper bracket, then bisect.
  int lo = 1, hi = 2;
  while (count_at(hi) <= budget) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (count_at(mid) <= budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace graphbench::nn
