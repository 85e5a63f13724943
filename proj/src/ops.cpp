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

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "graphbench/error.hpp"
#include "graphbench/tensor.hpp"

namespace graphbench::ad {
namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap view(std::span<const double> s, std::size_t r, std::size_t c) {
  return ConstMap(s.data(), static_cast<Eigen::Index>(r),
                  static_cast<Eigen::Index>(c));
}
MutMap view(std::span<double> s, std::size_t r, std::size_t c) {
  return MutMap(s.data(), static_cast<Eigen::Index>(r),
                static_cast<Eigen::Index>(c));
}

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a) +
                         " vs " + shape_str(b));
  }
}

void require_nodes(const char* op, const Tensor& h,
                   const SparseAdjacency& adj) {
  if (h.rows() != adj.n_nodes()) {
    throw StructuralError(std::string(op) + ": " + std::to_string(h.rows()) +
                          " feature rows for " +
                          std::to_string(adj.n_nodes()) + " nodes");
  }
}

Tensor result(const Tape& tape, std::size_t rows, std::size_t cols,
              bool track) {
  return Tensor::zeros(rows, cols, track && tape.recording());
}

// For ops that assign every output element.
Tensor overwritten(const Tape& tape, std::size_t rows, std::size_t cols,
                   bool track) {
  return Tensor::uninitialized(rows, cols, track && tape.recording());
}

template <class F>
Tensor unary(Tape& tape, const Tensor& a, F&& fwd) {
  const bool track = tape.wants({&a});
  Tensor out = overwritten(tape, a.rows(), a.cols(), track);
  auto x = a.data();
  auto y = out.mutable_data();
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = fwd(x[k]);
  return out;
}

// exp(-v) may overflow to inf for very negative v, which still yields 0.
void logistic(std::span<const double> in, std::span<double> out) {
  Eigen::Map<const Eigen::ArrayXd> x(in.data(),
                                     static_cast<Eigen::Index>(in.size()));
  Eigen::Map<Eigen::ArrayXd> y(out.data(),
                               static_cast<Eigen::Index>(out.size()));
  y = (1.0 + (-x).exp()).inverse();
}

// dst[index[e]] += rows[e] for each edge row.
void scatter_rows(const double* rows, std::span<const std::uint32_t> index,
                  std::size_t d, double* dst) {
  for (std::size_t e = 0; e < index.size(); ++e) {
    const double* __restrict src = rows + e * d;
    double* __restrict out = dst + index[e] * d;
    for (std::size_t k = 0; k < d; ++k) out[k] += src[k];
  }
}

}  // namespace

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions disagree " + shape_str(a) +
                         " * " + shape_str(b));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  const bool track = tape.wants({&a, &b});
  Tensor out = overwritten(tape, m, n, track);
  view(out.mutable_data(), m, n).noalias() =
      view(a.data(), m, k) * view(b.data(), k, n);
  if (track) {
    tape.record({a, b}, out, [a, b, out, m, k, n]() mutable {
      auto g = view(out.grad(), m, n);
      if (a.requires_grad()) {
        view(a.grad_buffer(), m, k).noalias() +=
            g * view(b.data(), k, n).transpose();
      }
      if (b.requires_grad()) {
        view(b.grad_buffer(), k, n).noalias() +=
            view(a.data(), m, k).transpose() * g;
      }
    });
  }
  return out;
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  const bool track = tape.wants({&a, &b});
  Tensor out = overwritten(tape, a.rows(), a.cols(), track);
  auto y = out.mutable_data();
  auto x = a.data();
  auto z = b.data();
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = x[k] + z[k];
  if (track) {
    tape.record({a, b}, out, [a, b, out]() mutable {
      auto g = out.grad();
      for (const Tensor* t : {&a, &b}) {
        if (!t->requires_grad()) continue;
        auto d = t->grad_buffer();
        for (std::size_t k = 0; k < g.size(); ++k) d[k] += g[k];
      }
    });
  }
  return out;
}

Tensor sub(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  const bool track = tape.wants({&a, &b});
  Tensor out = overwritten(tape, a.rows(), a.cols(), track);
  auto y = out.mutable_data();
  auto x = a.data();
  auto z = b.data();
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = x[k] - z[k];
  if (track) {
    tape.record({a, b}, out, [a, b, out]() mutable {
      auto g = out.grad();
      if (a.requires_grad()) {
        auto d = a.grad_buffer();
        for (std::size_t k = 0; k < g.size(); ++k) d[k] += g[k];
      }
      if (b.requires_grad()) {
        auto d = b.grad_buffer();
        for (std::size_t k = 0; k < g.size(); ++k) d[k] -= g[k];
      }
    });
  }
  return out;
}

Tensor hadamard(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape("hadamard", a, b);
  const bool track = tape.wants({&a, &b});
  Tensor out = overwritten(tape, a.rows(), a.cols(), track);
  auto y = out.mutable_data();
  auto x = a.data();
  auto z = b.data();
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = x[k] * z[k];
  if (track) {
    tape.record({a, b}, out, [a, b, out]() mutable {
      auto g = out.grad();
      if (a.requires_grad()) {
        auto d = a.grad_buffer();
        auto other = b.data();
        for (std::size_t k = 0; k < g.size(); ++k) d[k] += g[k] * other[k];
      }
      if (b.requires_grad()) {
        auto d = b.grad_buffer();
        auto other = a.data();
        for (std::size_t k = 0; k < g.size(); ++k) d[k] += g[k] * other[k];
      }
    });
  }
  return out;
}

Tensor scale(Tape& tape, const Tensor& a, double factor) {
  Tensor out = unary(tape, a, [factor](double v) { return factor * v; });
  if (out.requires_grad()) {
    tape.record({a}, out, [a, out, factor]() mutable {
      auto g = out.grad();
      auto d = a.grad_buffer();
      for (std::size_t k = 0; k < g.size(); ++k) d[k] += factor * g[k];
    });
  }
  return out;
}

Tensor sigmoid(Tape& tape, const Tensor& a) {
  const bool track = tape.wants({&a});
  Tensor out = overwritten(tape, a.rows(), a.cols(), track);
  logistic(a.data(), out.mutable_data());
  if (out.requires_grad()) {
    tape.record({a}, out, [a, out]() mutable {
      auto g = out.grad();
      auto s = out.data();
      auto d = a.grad_buffer();
      for (std::size_t k = 0; k < g.size(); ++k) {
        d[k] += g[k] * s[k] * (1.0 - s[k]);
      }
    });
  }
  return out;
}

Tensor tanh(Tape& tape, const Tensor& a) {
  const bool track = tape.wants({&a});
  Tensor out = overwritten(tape, a.rows(), a.cols(), track);
  auto y = out.mutable_data();
  // tanh(v) = 2 sigma(2v) - 1 shares the vectorised exp.
  Eigen::Map<const Eigen::ArrayXd> x(a.data().data(),
                                     static_cast<Eigen::Index>(a.size()));
  Eigen::Map<Eigen::ArrayXd> t(y.data(), static_cast<Eigen::Index>(y.size()));
  t = 2.0 * x;
  logistic(y, y);
  t = 2.0 * t - 1.0;
  if (out.requires_grad()) {
    tape.record({a}, out, [a, out]() mutable {
      auto g = out.grad();
      auto t = out.data();
      auto d = a.grad_buffer();
      for (std::size_t k = 0; k < g.size(); ++k) {
        d[k] += g[k] * (1.0 - t[k] * t[k]);
      }
    });
  }
  return out;
}

Tensor relu(Tape& tape, const Tensor& a) {
  Tensor out = unary(tape, a, [](double v) { return v > 0.0 ? v : 0.0; });
  if (out.requires_grad()) {
    tape.record({a}, out, [a, out]() mutable {
      auto g = out.grad();
      auto x = a.data();
      auto d = a.grad_buffer();
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (x[k] > 0.0) d[k] += g[k];
      }
    });
  }
  return out;
}

Tensor add_bias(Tape& tape, const Tensor& a, const Tensor& bias) {
  if (bias.rows() != 1 || bias.cols() != a.cols()) {
    throw DimensionError("add_bias: bias " + shape_str(bias) +
                         " does not match " + shape_str(a));
  }
  const std::size_t n = a.rows(), d = a.cols();
  const bool track = tape.wants({&a, &bias});
  Tensor out = overwritten(tape, n, d, track);
  auto y = out.mutable_data();
  auto x = a.data();
  auto b = bias.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) y[i * d + k] = x[i * d + k] + b[k];
  }
  if (track) {
    tape.record({a, bias}, out, [a, bias, out, n, d]() mutable {
      auto g = out.grad();
      if (a.requires_grad()) {
        auto da = a.grad_buffer();
        for (std::size_t k = 0; k < g.size(); ++k) da[k] += g[k];
      }
      if (bias.requires_grad()) {
        auto db = bias.grad_buffer();
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t k = 0; k < d; ++k) db[k] += g[i * d + k];
        }
      }
    });
  }
  return out;
}

Tensor sum(Tape& tape, const Tensor& a) {
  const bool track = tape.wants({&a});
  Tensor out = result(tape, 1, 1, track);
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  out.mutable_data()[0] = acc;
  if (track) {
    tape.record({a}, out, [a, out]() mutable {
      const double g = out.grad()[0];
      for (double& d : a.grad_buffer()) d += g;
    });
  }
  return out;
}

Tensor neighbor_sum(Tape& tape, const Tensor& h, const SparseAdjacency& adj) {
  require_nodes("neighbor_sum", h, adj);
  const std::size_t n = h.rows(), d = h.cols();
  const bool track = tape.wants({&h});
  Tensor out = result(tape, n, d, track);
  auto y = out.mutable_data();
  auto x = h.data();
  for (std::size_t i = 0; i < n; ++i) {
    double* row = &y[i * d];
    for (std::size_t e = adj.row_begin(i); e < adj.row_end(i); ++e) {
      const double* src = &x[adj.source(e) * d];
      for (std::size_t k = 0; k < d; ++k) row[k] += src[k];
    }
  }
  if (track) {
    const SparseAdjacency* graph = &adj;
    tape.record({h}, out, [h, out, graph, d]() mutable {
      auto g = out.grad();
      auto dh = h.grad_buffer();
      for (std::size_t e = 0; e < graph->n_edges(); ++e) {
        const double* src = &g[graph->target(e) * d];
        double* dst = &dh[graph->source(e) * d];
        for (std::size_t k = 0; k < d; ++k) dst[k] += src[k];
      }
    });
  }
  return out;
}

Tensor gated_neighbor_sum(Tape& tape, const Tensor& h, const Tensor& gates,
                          const SparseAdjacency& adj) {
  require_nodes("gated_neighbor_sum", h, adj);
  if (gates.rows() != adj.n_edges() || gates.cols() != h.cols()) {
    throw StructuralError("gated_neighbor_sum: gates " + shape_str(gates) +
                          " for " + std::to_string(adj.n_edges()) +
                          " edges of width " + std::to_string(h.cols()));
  }
  const std::size_t n = h.rows(), d = h.cols();
  const bool track = tape.wants({&h, &gates});
  Tensor out = result(tape, n, d, track);
  double* y = out.mutable_data().data();
  const double* x = h.data().data();
  const double* gt = gates.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    double* __restrict row = y + i * d;
    for (std::size_t e = adj.row_begin(i); e < adj.row_end(i); ++e) {
      const double* __restrict src = x + adj.source(e) * d;
      const double* __restrict gate = gt + e * d;
      for (std::size_t k = 0; k < d; ++k) row[k] += gate[k] * src[k];
    }
  }
  if (track) {
    const SparseAdjacency* graph = &adj;
    tape.record({h, gates}, out, [h, gates, out, graph, d]() mutable {
      const double* g = out.grad().data();
      const double* x = h.data().data();
      const double* gt = gates.data().data();
      double* dh = h.requires_grad() ? h.grad_buffer().data() : nullptr;
      double* dg = gates.requires_grad() ? gates.grad_buffer().data() : nullptr;
      for (std::size_t e = 0; e < graph->n_edges(); ++e) {
        const std::size_t s = graph->source(e);
        const double* __restrict go = g + graph->target(e) * d;
        if (dh) {
          double* __restrict dst = dh + s * d;
          const double* __restrict gate = gt + e * d;
          for (std::size_t k = 0; k < d; ++k) dst[k] += gate[k] * go[k];
        }
        if (dg) {
          double* __restrict dst = dg + e * d;
          const double* __restrict src = x + s * d;
          for (std::size_t k = 0; k < d; ++k) dst[k] += src[k] * go[k];
        }
      }
    });
  }
  return out;
}

Tensor edge_combine(Tape& tape, const Tensor& at_target,
                    const Tensor& at_source, const SparseAdjacency& adj) {
  require_nodes("edge_combine", at_target, adj);
  require_same_shape("edge_combine", at_target, at_source);
  const std::size_t m = adj.n_edges(), d = at_target.cols();
  const bool track = tape.wants({&at_target, &at_source});
  Tensor out = overwritten(tape, m, d, track);
  double* y = out.mutable_data().data();
  const double* p = at_target.data().data();
  const double* q = at_source.data().data();
  for (std::size_t e = 0; e < m; ++e) {
    const double* __restrict pt = p + adj.target(e) * d;
    const double* __restrict qs = q + adj.source(e) * d;
    double* __restrict dst = y + e * d;
    for (std::size_t k = 0; k < d; ++k) dst[k] = pt[k] + qs[k];
  }
  if (track) {
    const SparseAdjacency* graph = &adj;
    tape.record({at_target, at_source}, out,
                [at_target, at_source, out, graph, d]() mutable {
                  const double* g = out.grad().data();
                  if (at_target.requires_grad()) {
                    scatter_rows(g, graph->targets(), d,
                                 at_target.grad_buffer().data());
                  }
                  if (at_source.requires_grad()) {
                    scatter_rows(g, graph->sources(), d,
                                 at_source.grad_buffer().data());
                  }
                });
  }
  return out;
}

Tensor edge_gate(Tape& tape, const Tensor& at_target, const Tensor& at_source,
                 const SparseAdjacency& adj) {
  require_nodes("edge_gate", at_target, adj);
  require_same_shape("edge_gate", at_target, at_source);
  const std::size_t m = adj.n_edges(), d = at_target.cols();
  const bool track = tape.wants({&at_target, &at_source});
  Tensor out = overwritten(tape, m, d, track);
  double* y = out.mutable_data().data();
  const double* p = at_target.data().data();
  const double* q = at_source.data().data();
  for (std::size_t e = 0; e < m; ++e) {
    const double* __restrict pt = p + adj.target(e) * d;
    const double* __restrict qs = q + adj.source(e) * d;
    double* __restrict dst = y + e * d;
    for (std::size_t k = 0; k < d; ++k) dst[k] = pt[k] + qs[k];
  }
  logistic(out.data(), out.mutable_data());
  if (track) {
    const SparseAdjacency* graph = &adj;
    tape.record({at_target, at_source}, out,
                [at_target, at_source, out, graph, d]() mutable {
                  const double* g = out.grad().data();
                  const double* s = out.data().data();
                  const bool want_p = at_target.requires_grad();
                  const bool want_q = at_source.requires_grad();
                  double* dp = want_p ? at_target.grad_buffer().data() : nullptr;
                  double* dq = want_q ? at_source.grad_buffer().data() : nullptr;
                  double pre[256];
                  for (std::size_t e = 0; e < graph->n_edges(); ++e) {
                    for (std::size_t k0 = 0; k0 < d; k0 += 256) {
                      const std::size_t len = std::min<std::size_t>(256, d - k0);
                      const double* __restrict ge = g + e * d + k0;
                      const double* __restrict se = s + e * d + k0;
                      for (std::size_t k = 0; k < len; ++k) {
                        pre[k] = ge[k] * se[k] * (1.0 - se[k]);
                      }
                      if (dp) {
                        double* __restrict dst = dp + graph->target(e) * d + k0;
                        for (std::size_t k = 0; k < len; ++k) dst[k] += pre[k];
                      }
                      if (dq) {
                        double* __restrict dst = dq + graph->source(e) * d + k0;
                        for (std::size_t k = 0; k < len; ++k) dst[k] += pre[k];
                      }
                    }
                  }
                });
  }
  return out;
}

Tensor edge_scatter_sum(Tape& tape, const Tensor& messages,
                        const SparseAdjacency& adj) {
  if (messages.rows() != adj.n_edges()) {
    throw StructuralError("edge_scatter_sum: " +
                          std::to_string(messages.rows()) + " messages for " +
                          std::to_string(adj.n_edges()) + " edges");
  }
  const std::size_t n = adj.n_nodes(), d = messages.cols();
  const bool track = tape.wants({&messages});
  Tensor out = result(tape, n, d, track);
  auto y = out.mutable_data();
  auto msg = messages.data();
  for (std::size_t i = 0; i < n; ++i) {
    double* row = &y[i * d];
    for (std::size_t e = adj.row_begin(i); e < adj.row_end(i); ++e) {
      for (std::size_t k = 0; k < d; ++k) row[k] += msg[e * d + k];
    }
  }
  if (track) {
    const SparseAdjacency* graph = &adj;
    tape.record({messages}, out, [messages, out, graph, d]() mutable {
      auto g = out.grad();
      auto dm = messages.grad_buffer();
      for (std::size_t e = 0; e < graph->n_edges(); ++e) {
        const double* src = &g[graph->target(e) * d];
        for (std::size_t k = 0; k < d; ++k) dm[e * d + k] += src[k];
      }
    });
  }
  return out;
}

Tensor graph_batch_norm(Tape& tape, const Tensor& h, const Tensor& gamma,
                        const Tensor& beta, RunningStats& stats,
                        bool training) {
  const std::size_t n = h.rows(), d = h.cols();
  if (gamma.rows() != 1 || gamma.cols() != d || beta.rows() != 1 ||
      beta.cols() != d) {
    throw DimensionError("graph_batch_norm: affine parameters do not match " +
                         shape_str(h));
  }
  if (stats.mean.size() != d || stats.var.size() != d) {
    throw DimensionError("graph_batch_norm: running statistics width " +
                         std::to_string(stats.mean.size()) + " for " +
                         std::to_string(d) + " features");
  }
  if (training && n < 2) {
    throw DegenerateBatchError(
        "graph_batch_norm: training mode needs at least 2 nodes, got " +
        std::to_string(n));
  }

  std::vector<double> mean(d, 0.0), inv_std(d, 0.0);
  auto x = h.data();
  if (training) {
    std::vector<double> var(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k) mean[k] += x[i * d + k];
    }
    for (std::size_t k = 0; k < d; ++k) mean[k] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        const double c = x[i * d + k] - mean[k];
        var[k] += c * c;
      }
    }
    const double unbias =
        static_cast<double>(n) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < d; ++k) {
      var[k] /= static_cast<double>(n);
      inv_std[k] = 1.0 / std::sqrt(var[k] + kBatchNormEpsilon);
      stats.mean[k] =
          (1.0 - stats.momentum) * stats.mean[k] + stats.momentum * mean[k];
      stats.var[k] = (1.0 - stats.momentum) * stats.var[k] +
                     stats.momentum * var[k] * unbias;
    }
  } else {
    for (std::size_t k = 0; k < d; ++k) {
      mean[k] = stats.mean[k];
      inv_std[k] = 1.0 / std::sqrt(stats.var[k] + kBatchNormEpsilon);
    }
  }

  const bool track = tape.wants({&h, &gamma, &beta});
  Tensor out = overwritten(tape, n, d, track);
  std::vector<double> normalized(n * d);
  auto y = out.mutable_data();
  auto gm = gamma.data();
  auto bt = beta.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const double z = (x[i * d + k] - mean[k]) * inv_std[k];
      normalized[i * d + k] = z;
      y[i * d + k] = gm[k] * z + bt[k];
    }
  }
  if (track) {
    tape.record(
        {h, gamma, beta}, out,
        [h, gamma, beta, out, n, d, training,
         normalized = std::move(normalized),
         inv_std = std::move(inv_std)]() mutable {
          auto g = out.grad();
          auto gm = gamma.data();
          if (gamma.requires_grad() || beta.requires_grad()) {
            std::span<double> dgamma =
                gamma.requires_grad() ? gamma.grad_buffer()
                                      : std::span<double>{};
            std::span<double> dbeta =
                beta.requires_grad() ? beta.grad_buffer() : std::span<double>{};
            for (std::size_t i = 0; i < n; ++i) {
              for (std::size_t k = 0; k < d; ++k) {
                if (!dgamma.empty()) dgamma[k] += g[i * d + k] * normalized[i * d + k];
                if (!dbeta.empty()) dbeta[k] += g[i * d + k];
              }
            }
          }
          if (!h.requires_grad()) return;
          auto dh = h.grad_buffer();
          if (!training) {
            for (std::size_t i = 0; i < n; ++i) {
              for (std::size_t k = 0; k < d; ++k) {
                dh[i * d + k] += g[i * d + k] * gm[k] * inv_std[k];
              }
            }
            return;
          }
          // dx = gamma * inv_std * (dy - mean(dy) - z * mean(dy * z))
          std::vector<double> mean_g(d, 0.0), mean_gz(d, 0.0);
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
              mean_g[k] += g[i * d + k];
              mean_gz[k] += g[i * d + k] * normalized[i * d + k];
            }
          }
          for (std::size_t k = 0; k < d; ++k) {
            mean_g[k] /= static_cast<double>(n);
            mean_gz[k] /= static_cast<double>(n);
          }
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
              const std::size_t at = i * d + k;
              dh[at] += gm[k] * inv_std[k] *
                        (g[at] - mean_g[k] - normalized[at] * mean_gz[k]);
            }
          }
        });
  }
  return out;
}

Tensor softmax_cross_entropy(Tape& tape, const Tensor& logits,
                             std::span<const int> targets,
                             std::span<const double> class_weights,
                             std::span<const std::uint8_t> mask) {
  const std::size_t n = logits.rows(), c = logits.cols();
  if (targets.size() != n) {
    throw DimensionError("softmax_cross_entropy: " +
                         std::to_string(targets.size()) + " targets for " +
                         std::to_string(n) + " rows");
  }
  if (class_weights.size() != c) {
    throw DimensionError("softmax_cross_entropy: " +
                         std::to_string(class_weights.size()) +
                         " class weights for " + std::to_string(c) +
                         " classes");
  }
  if (!mask.empty() && mask.size() != n) {
    throw DimensionError("softmax_cross_entropy: mask length mismatch");
  }
  for (double w : class_weights) {
    if (!(w >= 0.0)) {
      throw ContractError("softmax_cross_entropy: negative class weight");
    }
  }

  auto z = logits.data();
  std::vector<double> prob(n * c, 0.0);
  std::vector<double> row_weight(n, 0.0);
  double total_weight = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = targets[i];
    if (y < 0 || static_cast<std::size_t>(y) >= c) {
      throw ContractError("softmax_cross_entropy: target " +
                          std::to_string(y) + " outside [0, " +
                          std::to_string(c) + ")");
    }
    if (!mask.empty() && !mask[i]) continue;
    const double* row = &z[i * c];
    const double top = *std::max_element(row, row + c);
    double denom = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      prob[i * c + k] = std::exp(row[k] - top);
      denom += prob[i * c + k];
    }
    for (std::size_t k = 0; k < c; ++k) prob[i * c + k] /= denom;
    const double log_p = row[y] - top - std::log(denom);
    row_weight[i] = class_weights[static_cast<std::size_t>(y)];
    total_weight += row_weight[i];
    acc -= row_weight[i] * log_p;
  }
  if (!(total_weight > 0.0)) {
    throw EmptyLossError(
        "softmax_cross_entropy: no unmasked rows carry positive weight");
  }

  const bool track = tape.wants({&logits});
  Tensor out = result(tape, 1, 1, track);
  out.mutable_data()[0] = acc / total_weight;
  if (track) {
    std::vector<int> labels(targets.begin(), targets.end());
    tape.record({logits}, out,
                [logits, out, n, c, total_weight, labels = std::move(labels),
                 prob = std::move(prob),
                 row_weight = std::move(row_weight)]() mutable {
                  const double g = out.grad()[0] / total_weight;
                  auto dz = logits.grad_buffer();
                  for (std::size_t i = 0; i < n; ++i) {
                    if (row_weight[i] == 0.0) continue;
                    const double s = g * row_weight[i];
                    for (std::size_t k = 0; k < c; ++k) {
                      dz[i * c + k] += s * prob[i * c + k];
                    }
                    dz[i * c + static_cast<std::size_t>(labels[i])] -= s;
                  }
                });
  }
  return out;
}

}  // namespace graphbench::ad
