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


#include <gtest/gtest.h>

#include "graphbench/error.hpp"
#include "graphbench/tensor.hpp"

namespace graphbench::ad {
namespace {

TEST(TensorTest, FactoriesShapeAndValues) {
  const Tensor z = Tensor::zeros(2, 3);
  EXPECT_EQ(z.rows(), 2u);
  EXPECT_EQ(z.cols(), 3u);
  for (double v : z.data()) EXPECT_EQ(v, 0.0);
  const Tensor f = Tensor::from(2, 2, {1, 2, 3, 4});
  EXPECT_EQ(f.at(1, 0), 3.0);
  EXPECT_EQ(Tensor::scalar(2.5).item(), 2.5);
  EXPECT_THROW(Tensor::from(2, 2, {1, 2, 3}), DimensionError);
  EXPECT_THROW(f.item(), DimensionError);
}

TEST(TensorTest, CopiesShareStorage) {
  Tensor a = Tensor::zeros(1, 2, true);
  Tensor b = a;
  b.mutable_data()[0] = 7.0;
  EXPECT_EQ(a.at(0, 0), 7.0);
  EXPECT_TRUE(a.same_node(b));
  EXPECT_FALSE(a.has_grad());
  a.grad_buffer()[1] = 3.0;
  EXPECT_EQ(b.grad()[1], 3.0);
  b.zero_grad();
  EXPECT_EQ(a.grad()[1], 0.0);
}

TEST(TapeTest, BackwardRequiresScalar) {
  Tape tape;
  const Tensor a = Tensor::filled(2, 2, 1.0, true);
  const Tensor b = add(tape, a, a);
  EXPECT_THROW(tape.backward(b), ContractError);
}

TEST(TapeTest, LeafGradientsAccumulateAcrossBackwardCalls) {
  const Tensor w = Tensor::from(1, 2, {2.0, -1.0}, true);
  for (int k = 0; k < 2; ++k) {
    Tape tape;
    tape.backward(sum(tape, scale(tape, w, 3.0)));
  }
  EXPECT_EQ(w.grad()[0], 6.0);
  EXPECT_EQ(w.grad()[1], 6.0);
}

TEST(TapeTest, IntermediateReusedTwice) {
  // y = x*x + x*x with a shared intermediate; dy/dx = 4x.
  const Tensor x = Tensor::from(1, 3, {1.0, -2.0, 0.5}, true);
  Tape tape;
  const Tensor sq = hadamard(tape, x, x);
  tape.backward(sum(tape, add(tape, sq, sq)));
  EXPECT_DOUBLE_EQ(x.grad()[0], 4.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], -8.0);
  EXPECT_DOUBLE_EQ(x.grad()[2], 2.0);
}

TEST(TapeTest, NonRecordingTapeKeepsNoOps) {
  Tape tape(false);
  const Tensor x = Tensor::filled(1, 2, 1.0, true);
  const Tensor y = sigmoid(tape, x);
  EXPECT_EQ(tape.size(), 0u);
  EXPECT_FALSE(y.requires_grad());
}

TEST(TapeTest, ConstantsAreNotRecorded) {
  Tape tape;
  const Tensor c = Tensor::filled(2, 2, 1.0);
  add(tape, c, c);
  EXPECT_EQ(tape.size(), 0u);
}

TEST(SparseAdjacencyTest, CanonicalOrderByTargetThenSource) {
  const SparseAdjacency adj(4, {{3, 0}, {1, 2}, {0, 2}, {2, 0}});
  ASSERT_EQ(adj.n_edges(), 4u);
  EXPECT_EQ(adj.target(0), 0u);
  EXPECT_EQ(adj.source(0), 2u);
  EXPECT_EQ(adj.source(1), 3u);
  EXPECT_EQ(adj.source(2), 0u);
  EXPECT_EQ(adj.source(3), 1u);
  EXPECT_EQ(adj.degree(0), 2u);
  EXPECT_EQ(adj.degree(1), 0u);
  EXPECT_EQ(adj.degree(2), 2u);
  EXPECT_EQ(adj.find(1, 2), 3u);
  EXPECT_EQ(adj.find(2, 1), adj.n_edges());
  EXPECT_FALSE(adj.is_symmetric());
}

TEST(SparseAdjacencyTest, UndirectedIsSymmetric) {
  const auto adj = SparseAdjacency::undirected(3, {{0, 1}, {1, 2}});
  EXPECT_EQ(adj.n_edges(), 4u);
  EXPECT_TRUE(adj.is_symmetric());
  EXPECT_FALSE(adj.has_self_loops());
}

TEST(SparseAdjacencyTest, RejectsMalformedEdges) {
  EXPECT_THROW(SparseAdjacency(2, {{0, 2}}), StructuralError);
  EXPECT_THROW(SparseAdjacency(2, {{0, 1}, {0, 1}}), StructuralError);
  EXPECT_THROW(SparseAdjacency::undirected(2, {{1, 1}}), StructuralError);
  EXPECT_THROW(SparseAdjacency::undirected(2, {{0, 1}, {1, 0}}),
               StructuralError);
}

TEST(SparseAdjacencyTest, EmptyGraph) {
  const SparseAdjacency adj(3, {});
  EXPECT_EQ(adj.n_edges(), 0u);
  EXPECT_EQ(adj.degree(2), 0u);
  EXPECT_TRUE(adj.is_symmetric());
}

}  // namespace
}  // namespace graphbench::ad
