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

#ifndef GRAPHBENCH_GRADCHECK_HPP
#define GRAPHBENCH_GRADCHECK_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "graphbench/tensor.hpp"

namespace graphbench::check {

// Builds a scalar from scratch on the given tape. Must be a pure function
// of the current values of the tensors being checked.
using Objective = std::function<ad::Tensor(ad::Tape&)>;

struct GradientComparison {
  double max_relative_error = 0.0;
  std::size_t entries = 0;
};

// |analytic - numeric| / max(|analytic|, |numeric|, floor) maximized over
// every entry of every tensor in `wrt`; numeric uses central differences.
GradientComparison compare_gradients(const Objective& objective,
                                     std::vector<ad::Tensor> wrt,
                                     double step = 1e-5, double floor = 1e-6);

struct CaseResult {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t entries = 0;
  bool passed = false;
};

struct SuiteReport {
  std::vector<CaseResult> cases;
  double seconds = 0.0;
  bool all_passed() const;
};

// Every differentiable op, every layer type (batch norm on, training mode),
// the residual wrapper, both losses, and a full model per architecture, on
// random graphs of 5-15 nodes.
SuiteReport run_gradcheck_suite(std::uint64_t seed, double tolerance = 1e-4,
                                double step = 1e-5);

}  // namespace graphbench::check

#endif  // GRAPHBENCH_GRADCHECK_HPP
