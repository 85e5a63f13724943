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

#include "graphbench/graph_gen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "graphbench/error.hpp"
#include "graphbench/random.hpp"

namespace graphbench::gen {
namespace {

using EdgeList = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

std::vector<int> block_labels(std::span<const std::size_t> sizes) {
  std::vector<int> labels;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    labels.insert(labels.end(), sizes[c], static_cast<int>(c));
  }
  return labels;
}

std::vector<std::size_t> draw_sizes(Rng& rng, int blocks, int lo, int hi) {
  std::uniform_int_distribution<int> size_dist(lo, hi);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(blocks));
  for (auto& s : sizes) s = static_cast<std::size_t>(size_dist(rng));
  return sizes;
}

// Draws every unordered pair once, in (u, v) lexicographic order.
EdgeList draw_block_edges(Rng& rng, std::span<const int> community, double p,
                          double q) {
  EdgeList edges;
  const auto n = static_cast<std::uint32_t>(community.size());
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint32_t v = u + 1; v < n; ++v) {
      const double prob = community[u] == community[v] ? p : q;
      if (bernoulli(rng, prob)) edges.emplace_back(u, v);
    }
  }
  return edges;
}

void check_probability(const char* what, double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ContractError(std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

std::string_view task_name(Task task) {
  return task == Task::kMatching ? "matching" : "clustering";
}

Task parse_task(std::string_view name) {
  if (name == "matching") return Task::kMatching;
  if (name == "clustering") return Task::kClustering;
  throw ParseError("unknown task '" + std::string(name) + "'");
}

void SbmParams::validate() const {
  check_probability("p", p);
  check_probability("q", q);
  if (q > p) throw ContractError("SBM requires q <= p");
  if (community_sizes.empty()) throw ContractError("SBM needs a community");
  for (auto s : community_sizes) {
    if (s < 1) throw ContractError("SBM community sizes must be >= 1");
  }
}

void Graph::finalize() {
  adjacency = ad::SparseAdjacency::undirected(n_nodes, edges);
}

bool Graph::operator==(const Graph& other) const {
  return n_nodes == other.n_nodes && n_communities == other.n_communities &&
         edges == other.edges && signal == other.signal &&
         community == other.community;
}

int TaskInstance::n_classes() const { return gen::n_classes(task); }

bool TaskInstance::operator==(const TaskInstance& other) const {
  return task == other.task && graph == other.graph &&
         targets == other.targets && seed_mask == other.seed_mask;
}

Graph sbm_generate(const SbmParams& params, std::uint64_t rng_seed) {
  params.validate();
  Rng rng(rng_seed);
  Graph g;
  g.community = block_labels(params.community_sizes);
  g.n_nodes = g.community.size();
  g.n_communities = static_cast<int>(params.community_sizes.size());
  g.signal.assign(g.n_nodes, 0);
  g.edges = draw_block_edges(rng, g.community, params.p, params.q);
  g.finalize();
  return g;
}

Graph make_pattern(std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  Graph g;
  g.n_nodes = kPatternNodes;
  g.n_communities = 1;
  g.community.assign(g.n_nodes, 0);
  std::uniform_int_distribution<int> symbol(0, kSignalVocabulary - 1);
  g.signal.resize(g.n_nodes);
  for (auto& s : g.signal) s = symbol(rng);
  g.edges = draw_block_edges(rng, g.community, kIntraProbability, 0.0);
  g.finalize();
  return g;
}

TaskInstance make_matching_instance(const Graph& pattern, double q_noise,
                                    std::uint64_t rng_seed) {
  check_probability("q_noise", q_noise);
  Rng rng(rng_seed);
  auto sizes = draw_sizes(rng, kHostCommunities, 15, 25);
  const std::size_t host_nodes =
      std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  sizes.push_back(pattern.n_nodes);

  TaskInstance inst;
  inst.task = Task::kMatching;
  Graph& g = inst.graph;
  g.community = block_labels(sizes);
  g.n_nodes = g.community.size();
  g.n_communities = kHostCommunities + 1;

  std::uniform_int_distribution<int> symbol(0, kSignalVocabulary - 1);
  g.signal.resize(g.n_nodes);
  for (std::size_t i = 0; i < host_nodes; ++i) g.signal[i] = symbol(rng);
  std::copy(pattern.signal.begin(), pattern.signal.end(),
            g.signal.begin() + static_cast<std::ptrdiff_t>(host_nodes));

  const auto offset = static_cast<std::uint32_t>(host_nodes);
  const auto n = static_cast<std::uint32_t>(g.n_nodes);
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint32_t v = u + 1; v < n; ++v) {
      if (u >= offset) break;  // pattern-internal pairs are copied below
      const double prob = g.community[u] == g.community[v] ? kIntraProbability
                                                            : q_noise;
      if (bernoulli(rng, prob)) g.edges.emplace_back(u, v);
    }
  }
  for (const auto& [u, v] : pattern.edges) {
    g.edges.emplace_back(u + offset, v + offset);
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.finalize();

  inst.targets.assign(g.n_nodes, 0);
  std::fill(inst.targets.begin() + static_cast<std::ptrdiff_t>(host_nodes),
            inst.targets.end(), 1);
  inst.seed_mask.assign(g.n_nodes, 0);
  return inst;
}

TaskInstance make_clustering_instance(double q_noise, std::uint64_t rng_seed) {
  check_probability("q_noise", q_noise);
  Rng rng(rng_seed);
  const auto sizes = draw_sizes(rng, kHostCommunities, 5, 25);

  TaskInstance inst;
  inst.task = Task::kClustering;
  Graph& g = inst.graph;
  g.community = block_labels(sizes);
  g.n_nodes = g.community.size();
  g.n_communities = kHostCommunities;
  g.signal.assign(g.n_nodes, 0);

  inst.seed_mask.assign(g.n_nodes, 0);
  std::size_t start = 0;
  for (auto s : sizes) {
    std::uniform_int_distribution<std::size_t> pick(0, s - 1);
    inst.seed_mask[start + pick(rng)] = 1;
    start += s;
  }
  g.edges = draw_block_edges(rng, g.community, kIntraProbability, q_noise);
  g.finalize();
  inst.targets = g.community;
  return inst;
}

int input_dim(Task task) {
  return task == Task::kMatching ? kSignalVocabulary : kHostCommunities + 1;
}

int n_classes(Task task) {
  return task == Task::kMatching ? 2 : kHostCommunities;
}

ad::Tensor node_features(const TaskInstance& instance) {
  const std::size_t n = instance.graph.n_nodes;
  const auto dim = static_cast<std::size_t>(input_dim(instance.task));
  std::vector<double> x(n * dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t hot;
    if (instance.task == Task::kMatching) {
      hot = static_cast<std::size_t>(instance.graph.signal[i]);
    } else {
      hot = instance.seed_mask[i]
                ? static_cast<std::size_t>(instance.graph.community[i])
                : dim - 1;
    }
    x[i * dim + hot] = 1.0;
  }
  return ad::Tensor::from(n, dim, std::move(x));
}

SbmReport validate_sbm_stats(std::span<const Graph> graphs,
                             const SbmParams& params) {
  params.validate();
  if (graphs.size() < 100) {
    throw InsufficientDataError("validate_sbm_stats needs >= 100 graphs, got " +
                                std::to_string(graphs.size()));
  }
  double intra_pairs = 0.0, inter_pairs = 0.0;
  double intra_edges = 0.0, inter_edges = 0.0;
  for (const auto& g : graphs) {
    std::vector<double> counts(static_cast<std::size_t>(g.n_communities), 0.0);
    for (int c : g.community) counts[static_cast<std::size_t>(c)] += 1.0;
    double within = 0.0;
    for (double c : counts) within += c * (c - 1.0) / 2.0;
    const auto n = static_cast<double>(g.n_nodes);
    intra_pairs += within;
    inter_pairs += n * (n - 1.0) / 2.0 - within;
    for (const auto& [u, v] : g.edges) {
      if (g.community[u] == g.community[v]) {
        intra_edges += 1.0;
      } else {
        inter_edges += 1.0;
      }
    }
  }
  auto z_score = [](double hits, double pairs, double prob) {
    if (pairs == 0.0) return 0.0;
    const double density = hits / pairs;
    const double sd = std::sqrt(prob * (1.0 - prob) / pairs);
    if (sd == 0.0) {
      return density == prob ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return (density - prob) / sd;
  };
  SbmReport report;
  report.samples = graphs.size();
  report.intra_density = intra_pairs > 0.0 ? intra_edges / intra_pairs : 0.0;
  report.inter_density = inter_pairs > 0.0 ? inter_edges / inter_pairs : 0.0;
  report.intra_z = z_score(intra_edges, intra_pairs, params.p);
  report.inter_z = z_score(inter_edges, inter_pairs, params.q);
  report.flagged = std::abs(report.intra_z) > 4.0 ||
                   std::abs(report.inter_z) > 4.0;
  return report;
}

// ---- serialization --------------------------------------------------------

std::string serialize(const TaskInstance& instance) {
  const Graph& g = instance.graph;
  std::ostringstream out;
  out << "graphbench-instance 1\n";
  out << "task " << task_name(instance.task) << "\n";
  out << "nodes " << g.n_nodes << " communities " << g.n_communities
      << " edges " << g.edges.size() << "\n";
  for (std::size_t i = 0; i < g.n_nodes; ++i) {
    out << g.signal[i] << ' ' << g.community[i] << ' ' << instance.targets[i]
        << ' ' << static_cast<int>(instance.seed_mask[i]) << '\n';
  }
  for (const auto& [u, v] : g.edges) out << u << ' ' << v << '\n';
  return out.str();
}

TaskInstance deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto fail = [](const std::string& why) -> ParseError {
    return ParseError("instance: " + why);
  };
  std::string word;
  int version = 0;
  if (!(in >> word >> version) || word != "graphbench-instance" ||
      version != 1) {
    throw fail("bad header");
  }
  TaskInstance inst;
  if (!(in >> word) || word != "task" || !(in >> word)) {
    throw fail("missing task line");
  }
  inst.task = parse_task(word);
  Graph& g = inst.graph;
  std::size_t n_edges = 0;
  std::string w1, w2, w3;
  if (!(in >> w1 >> g.n_nodes >> w2 >> g.n_communities >> w3 >> n_edges) ||
      w1 != "nodes" || w2 != "communities" || w3 != "edges") {
    throw fail("bad size line");
  }
  g.signal.resize(g.n_nodes);
  g.community.resize(g.n_nodes);
  inst.targets.resize(g.n_nodes);
  inst.seed_mask.resize(g.n_nodes);
  for (std::size_t i = 0; i < g.n_nodes; ++i) {
    int seed = 0;
    if (!(in >> g.signal[i] >> g.community[i] >> inst.targets[i] >> seed)) {
      throw fail("truncated node line " + std::to_string(i));
    }
    if (g.signal[i] < 0 || g.signal[i] >= kSignalVocabulary ||
        g.community[i] < 0 || g.community[i] >= g.n_communities ||
        inst.targets[i] < 0 || inst.targets[i] >= inst.n_classes() ||
        (seed != 0 && seed != 1)) {
      throw fail("node line " + std::to_string(i) + " out of range");
    }
    inst.seed_mask[i] = static_cast<std::uint8_t>(seed);
  }
  g.edges.resize(n_edges);
  for (std::size_t e = 0; e < n_edges; ++e) {
    auto& [u, v] = g.edges[e];
    if (!(in >> u >> v)) throw fail("truncated edge line " + std::to_string(e));
    if (u >= v || v >= g.n_nodes) {
      throw fail("edge line " + std::to_string(e) + " is not u < v < n");
    }
  }
  if (!std::is_sorted(g.edges.begin(), g.edges.end())) {
    throw fail("edges not in sorted order");
  }
  if (in >> word) throw fail("trailing content");
  g.finalize();
  return inst;
}

void save_instance(const TaskInstance& instance,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize(instance);
  if (!out) throw IoError("write failed for " + path.string());
}

TaskInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace graphbench::gen
