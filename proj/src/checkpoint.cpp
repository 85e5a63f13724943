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

#include <charconv>
#include <fstream>
#include <sstream>

#include "graphbench/error.hpp"
#include "graphbench/models.hpp"
#include "layer_maps.hpp"

namespace graphbench::nn {
namespace {

void write_values(std::ostream& out, std::span<const double> values) {
  char buf[64];
  for (std::size_t k = 0; k < values.size(); ++k) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, values[k]);
    if (k) out << ' ';
    out.write(buf, end - buf);
  }
  out << '\n';
}

void read_values(std::istream& in, std::span<double> values,
                 const std::string& what) {
  std::string token;
  for (auto& v : values) {
    if (!(in >> token)) throw ParseError("checkpoint: truncated " + what);
    auto [end, ec] =
        std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size()) {
      throw ParseError("checkpoint: bad number '" + token + "' in " + what);
    }
  }
}

template <class T>
T read_field(std::istream& in, const char* key) {
  std::string word;
  T value{};
  if (!(in >> word) || word != key || !(in >> value)) {
    throw ParseError(std::string("checkpoint: expected field '") + key + "'");
  }
  return value;
}

}  // namespace

std::string Model::to_checkpoint() {
  std::ostringstream out;
  out << "graphbench-model 1\n"
      << "arch " << arch_name(config_.arch) << '\n'
      << "layers " << config_.layers << '\n'
      << "hidden " << config_.hidden << '\n'
      << "inner_steps " << config_.inner_steps << '\n'
      << "residual " << (config_.residual ? 1 : 0) << '\n'
      << "batch_norm " << (config_.batch_norm ? 1 : 0) << '\n'
      << "input_dim " << config_.input_dim << '\n'
      << "n_classes " << config_.n_classes << '\n';
  for (auto& p : parameters()) {
    out << "param " << p.name << ' ' << p.tensor.rows() << ' '
        << p.tensor.cols() << '\n';
    write_values(out, p.tensor.data());
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (BatchNorm* bn = layer_norm(layers_[l])) {
      out << "stats layer" << l << ".bn " << bn->stats.mean.size() << '\n';
      write_values(out, bn->stats.mean);
      write_values(out, bn->stats.var);
    }
  }
  out << "end\n";
  return out.str();
}

Model Model::from_checkpoint(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  int version = 0;
  if (!(in >> word >> version) || word != "graphbench-model" || version != 1) {
    throw ParseError("checkpoint: bad header");
  }
  ModelConfig cfg;
  cfg.arch = parse_arch(read_field<std::string>(in, "arch"));
  cfg.layers = read_field<int>(in, "layers");
  cfg.hidden = read_field<int>(in, "hidden");
  cfg.inner_steps = read_field<int>(in, "inner_steps");
  cfg.residual = read_field<int>(in, "residual") != 0;
  cfg.batch_norm = read_field<int>(in, "batch_norm") != 0;
  cfg.input_dim = read_field<int>(in, "input_dim");
  cfg.n_classes = read_field<int>(in, "n_classes");

  Model model(cfg, 0);
  for (auto& p : model.parameters()) {
    std::string name;
    std::size_t rows = 0, cols = 0;
    if (!(in >> word >> name >> rows >> cols) || word != "param" ||
        name != p.name || rows != p.tensor.rows() || cols != p.tensor.cols()) {
      throw ParseError("checkpoint: expected parameter " + p.name);
    }
    read_values(in, p.tensor.mutable_data(), p.name);
  }
  for (std::size_t l = 0; l < model.layers_.size(); ++l) {
    BatchNorm* bn = layer_norm(model.layers_[l]);
    if (!bn) continue;
    const std::string expect = "layer" + std::to_string(l) + ".bn";
    std::string name;
    std::size_t width = 0;
    if (!(in >> word >> name >> width) || word != "stats" || name != expect ||
        width != bn->stats.mean.size()) {
      throw ParseError("checkpoint: expected statistics " + expect);
    }
    read_values(in, bn->stats.mean, expect + " mean");
    read_values(in, bn->stats.var, expect + " var");
  }
  if (!(in >> word) || word != "end") {
    throw ParseError("checkpoint: missing end marker");
  }
  return model;
}

void Model::save(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_checkpoint();
}

Model Model::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_checkpoint(buf.str());
}

}  // namespace graphbench::nn
