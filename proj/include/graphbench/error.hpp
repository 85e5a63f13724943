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

#ifndef GRAPHBENCH_ERROR_HPP
#define GRAPHBENCH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace graphbench {

// Values mirror gb_status in the C API header.
enum class ErrorCode : int {
  kDimension = 2,
  kStructural = 3,
  kContract = 4,
  kDegenerateBatch = 5,
  kEmptyLoss = 6,
  kInfeasible = 7,
  kInsufficientData = 8,
  kSolver = 9,
  kDiverged = 10,
  kParse = 11,
  kIo = 12,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define GRAPHBENCH_DEFINE_ERROR(Name, Code)                                \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
  };

GRAPHBENCH_DEFINE_ERROR(DimensionError, kDimension)
GRAPHBENCH_DEFINE_ERROR(StructuralError, kStructural)
GRAPHBENCH_DEFINE_ERROR(ContractError, kContract)
GRAPHBENCH_DEFINE_ERROR(DegenerateBatchError, kDegenerateBatch)
GRAPHBENCH_DEFINE_ERROR(EmptyLossError, kEmptyLoss)
GRAPHBENCH_DEFINE_ERROR(InfeasibleError, kInfeasible)
GRAPHBENCH_DEFINE_ERROR(InsufficientDataError, kInsufficientData)
GRAPHBENCH_DEFINE_ERROR(SolverError, kSolver)
GRAPHBENCH_DEFINE_ERROR(DivergenceError, kDiverged)
GRAPHBENCH_DEFINE_ERROR(ParseError, kParse)
GRAPHBENCH_DEFINE_ERROR(IoError, kIo)

#undef GRAPHBENCH_DEFINE_ERROR

}  // namespace graphbench

#endif  // GRAPHBENCH_ERROR_HPP
