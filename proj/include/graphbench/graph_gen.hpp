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

#ifndef GRAPHBENCH_GRAPH_GEN_HPP
#define GRAPHBENCH_GRAPH_GEN_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graphbench/tensor.hpp"

namespace graphbench::gen {

enum class Task { kMatching, kClustering };

std::string_view task_name(Task task);
Task parse_task(std::string_view name);

// Matching: host graph of 10 blocks plus the embedded pattern block.
inline constexpr int kHostCommunities = 10;
inline constexpr int kPatternNodes = 20;
inline constexpr double kIntraProbability = 0.5;
inline constexpr int kSignalVocabulary = 3;

struct SbmParams {
  double p = 0.5;
  double q = 0.1;
  std::vector<std::size_t> community_sizes;

  void validate() const;
};

// Simple undirected graph with per-node signal and community labels.
struct Graph {
  std::size_t n_nodes = 0;
  int n_communities = 0;
  // Undirected edges as (u, v) with u < v, sorted lexicographically.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  ad::SparseAdjacency adjacency;
  std::vector<int> signal;
  std::vector<int> community;

  // Rebuilds `adjacency` from `edges`.
  void finalize();
  bool operator==(const Graph& other) const;
};

struct TaskInstance {
  Graph graph;
  Task task = Task::kMatching;
  std::vector<int> targets;
  std::vector<std::uint8_t> seed_mask;  // clustering only; all zero otherwise

  int n_classes() const;
  bool operator==(const TaskInstance& other) const;
};

Graph sbm_generate(const SbmParams& params, std::uint64_t rng_seed);

// The 20-node pattern P: one block with internal probability 0.5 and a
// signal drawn uniformly from {0,1,2}. Fixed for a whole experiment series.
Graph make_pattern(std::uint64_t rng_seed);

// Host of 10 blocks (sizes in [15,25], p = 0.5, q = q_noise) with the pattern
// appended as an 11th block whose nodes link to every host node with
// probability q_noise. Targets are 1 on pattern nodes.
TaskInstance make_matching_instance(const Graph& pattern, double q_noise,
                                    std::uint64_t rng_seed);

// 10 blocks (sizes in [5,25], p = 0.5, q = q_noise), one uniformly chosen
// seed node per community, targets = community ids.
TaskInstance make_clustering_instance(double q_noise, std::uint64_t rng_seed);

// Network input: matching uses a one-hot of the 3-symbol signal; clustering
// uses 11 dims, dims 0-9 one-hot of the community on seeded nodes and dim 10
// set on every unlabeled node.
ad::Tensor node_features(const TaskInstance& instance);
int input_dim(Task task);
int n_classes(Task task);

struct SbmReport {
  std::size_t samples = 0;
  double intra_density = 0.0;
  double inter_density = 0.0;
  double intra_z = 0.0;
  double inter_z = 0.0;
  bool flagged = false;  // |z| > 4 on either density
};

// Needs at least 100 graphs generated from `params`.
SbmReport validate_sbm_stats(std::span<const Graph> graphs,
                             const SbmParams& params);

// Line-oriented text format:
//   graphbench-instance 1
//   task <matching|clustering>
//   nodes <n> communities <k> edges <m>
//   n lines "<signal> <community> <target> <seed>"
//   m lines "<u> <v>" with u < v
std::string serialize(const TaskInstance& instance);
TaskInstance deserialize(std::string_view text);
void save_instance(const TaskInstance& instance,
                   const std::filesystem::path& path);
TaskInstance load_instance(const std::filesystem::path& path);

}  // namespace graphbench::gen

#endif  // GRAPHBENCH_GRAPH_GEN_HPP
