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

#ifndef GRAPHBENCH_SRC_LAYER_MAPS_HPP
#define GRAPHBENCH_SRC_LAYER_MAPS_HPP

#include <string_view>
#include <type_traits>
#include <variant>

#include "graphbench/models.hpp"

namespace graphbench::nn {

// Calls f(name, Linear&) for every linear map of the layer, in a fixed order
// that checkpoints and parameter listings rely on.
template <class F>
void for_each_map(LayerParams& params, F&& f) {
  std::visit(
      [&](auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, GvrnnParams>) {
          f("U", p.U); f("V", p.V); f("B", p.B); f("A", p.A);
        } else if constexpr (std::is_same_v<P, GgruParams>) {
          f("Uz", p.Uz); f("Vz", p.Vz); f("Ur", p.Ur);
          f("Vr", p.Vr); f("Uh", p.Uh); f("Vh", p.Vh);
        } else if constexpr (std::is_same_v<P, GlstmParams>) {
          f("Ui", p.Ui); f("Vi", p.Vi); f("Uo", p.Uo); f("Vo", p.Vo);
          f("Uc", p.Uc); f("Vc", p.Vc); f("Uf", p.Uf); f("Vf", p.Vf);
        } else if constexpr (std::is_same_v<P, CommNetParams>) {
          f("U", p.U); f("V", p.V);
        } else if constexpr (std::is_same_v<P, SgcnParams>) {
          f("V", p.V); f("A", p.A); f("B", p.B);
        } else {
          f("U", p.U); f("V", p.V); f("A", p.A); f("B", p.B);
        }
      },
      params);
}

inline BatchNorm* layer_norm(LayerParams& params) {
  return std::visit(
      [](auto& p) -> BatchNorm* { return p.norm ? &*p.norm : nullptr; },
      params);
}

constexpr std::size_t maps_per_layer(Arch arch) {
  switch (arch) {
    case Arch::kGVRNN: return 4;
    case Arch::kGGRU: return 6;
    case Arch::kGLSTM: return 8;
    case Arch::kCommNet: return 2;
    case Arch::kSGCN: return 3;
    case Arch::kGatedGCN: return 4;
  }
  return 0;
}

}  // namespace graphbench::nn

#endif  // GRAPHBENCH_SRC_LAYER_MAPS_HPP
