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


#include "graphbench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "format.hpp"
#include "graphbench/error.hpp"
#include "graphbench/random.hpp"
#include "graphbench/variational.hpp"

namespace graphbench::exp {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr std::string_view kSweepNames[] = {"noise", "layers", "budget",
                                            "inner_steps", "learning_speed"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("config key '" + std::string(key) + "': bad number '" +
                     std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ParseError("config key '" + std::string(key) + "': bad boolean '" +
                   std::string(text) + "'");
}

std::string join_values(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += detail::fmt(values[i]);
  }
  return out;
}

// FNV-1a; only needs to be stable, not strong.
std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Everything that determines a trial's outcome.
std::string config_key(const train::TrainConfig& c) {
  std::ostringstream out;
  out << "task=" << gen::task_name(c.task)
      << " arch=" << nn::arch_name(c.model.arch) << " L=" << c.model.layers
      << " H=" << c.model.hidden << " T=" << c.model.inner_steps
      << " res=" << c.model.residual << " bn=" << c.model.batch_norm
      << " in=" << c.model.input_dim << " C=" << c.model.n_classes
      << " q=" << detail::fmt(c.q_noise)
      << " opt=" << train::optimizer_name(c.optimizer.kind)
      << " lr=" << detail::fmt(c.optimizer.learning_rate)
      << " iters=" << c.iterations << " eval=" << c.eval_instances
      << " every=" << c.eval_every << " probe=" << c.probe_instances
      << " graph_stats=" << c.eval_graph_stats
      << " seed=" << c.seed;
  return out.str();
}

std::string cell_stem(nn::Arch arch, std::size_t value_index) {
  return std::string(nn::arch_name(arch)) + "-v" + std::to_string(value_index);
}

std::optional<json> read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return std::nullopt;  // torn write from an interrupted run
  }
}

// Write-then-rename so a crash never leaves a half-written state file.
void write_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

json trial_to_json(const TrialResult& t, const std::string& key) {
  json j;
  j["key"] = key;
  j["trial"] = t.trial;
  j["seed"] = t.seed;
  j["accuracy"] = t.accuracy;
  j["accuracy_std"] = t.accuracy_std;
  j["final_loss"] = t.final_loss;
  j["train_time_ms"] = t.train_time_ms;
  json curve = json::array();
  for (const auto& s : t.curve) {
    curve.push_back({s.iteration, s.elapsed_ms, s.accuracy});
  }
  j["curve"] = std::move(curve);
  j["error"] = t.error;
  return j;
}

TrialResult trial_from_json(const json& j) {
  TrialResult t;
  t.trial = j.at("trial").get<int>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.accuracy = j.at("accuracy").get<double>();
  t.accuracy_std = j.at("accuracy_std").get<double>();
  t.final_loss = j.at("final_loss").get<double>();
  t.train_time_ms = j.at("train_time_ms").get<double>();
  for (const auto& s : j.at("curve")) {
    t.curve.push_back({s.at(0).get<int>(), s.at(1).get<double>(),
                       s.at(2).get<double>()});
  }
  t.error = j.at("error").get<std::string>();
  return t;
}

TrialResult run_trial(const train::TrainConfig& config, int trial) {
  TrialResult t;
  t.trial = trial;
  t.seed = config.seed;
  try {
    const auto report = train::train(config);
    t.accuracy = report.final_accuracy;
    t.accuracy_std = report.final_accuracy_std;
    t.final_loss = report.loss.empty() ? 0.0 : report.rolling_loss.back();
    t.train_time_ms = report.elapsed_ms.empty() ? 0.0 : report.elapsed_ms.back();
    t.curve = report.accuracy_samples;
  } catch (const Error& e) {
    t.error = e.what();
  }
  return t;
}

void summarize(CellResult& cell) {
  std::vector<double> scores;
  for (const auto& t : cell.trials) {
    if (t.error.empty()) scores.push_back(t.accuracy);
  }
  cell.accuracy_mean = detail::mean(scores);
  cell.accuracy_std = detail::stddev(scores);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

}  // namespace

std::string_view sweep_name(SweepVariable sweep) {
  return kSweepNames[static_cast<int>(sweep)];
}

SweepVariable parse_sweep(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (kSweepNames[i] == name) return static_cast<SweepVariable>(i);
  }
  throw ParseError("unknown sweep variable '" + std::string(name) + "'");
}

void ExperimentSpec::validate() const {
  if (name.empty() ||
      name.find_first_of("/\\ \t") != std::string::npos) {
    throw ContractError("experiment name must be a non-empty file stem");
  }
  if (sweep != SweepVariable::kLearningSpeed && values.empty()) {
    throw ContractError("sweep values must be non-empty");
  }
  if (archs.empty()) throw ContractError("no architectures listed");
  if (trials < 1) throw ContractError("trials must be >= 1");
  if (iterations < 0 || eval_instances < 1 || eval_every < 0 ||
      probe_instances < 1) {
    throw ContractError("iteration and evaluation counts out of range");
  }
  if (hidden < 0 || budget < 1 || layers < 1 || inner_steps < 1) {
    throw ContractError("layers, inner_steps and budget must be positive");
  }
  if (sweep == SweepVariable::kLearningSpeed && eval_every == 0) {
    throw ContractError("learning_speed sweep needs eval_every > 0");
  }
  for (double v : values) {
    const bool integral = v == std::floor(v) && v >= 1.0;
    switch (sweep) {
      case SweepVariable::kNoise:
        if (!(v >= 0.0 && v <= gen::kIntraProbability)) {
          throw ContractError("noise values must lie in [0, p]");
        }
        break;
      case SweepVariable::kLayers:
      case SweepVariable::kBudget:
      case SweepVariable::kInnerSteps:
        if (!integral) {
          throw ContractError("sweep values must be positive integers");
        }
        break;
      case SweepVariable::kLearningSpeed:
        break;
    }
  }
}

std::vector<double> ExperimentSpec::columns() const {
  if (sweep == SweepVariable::kLearningSpeed) return {0.0};
  return values;
}

ExperimentSpec parse_spec(std::string_view text) {
  ExperimentSpec spec;
  std::map<std::string, bool, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (seen.count(key)) {
      throw ParseError("config key '" + std::string(key) + "' repeated");
    }
    seen.emplace(std::string(key), true);

    if (key == "name") {
      spec.name = std::string(value);
    } else if (key == "task") {
      spec.task = gen::parse_task(value);
    } else if (key == "sweep") {
      spec.sweep = parse_sweep(value);
    } else if (key == "values") {
      spec.values.clear();
      for (auto item : split_list(value)) {
        spec.values.push_back(parse_number<double>(key, item));
      }
    } else if (key == "archs") {
      spec.archs.clear();
      for (auto item : split_list(value)) {
        spec.archs.push_back(nn::parse_arch(item));
      }
    } else if (key == "layers") {
      spec.layers = parse_number<int>(key, value);
    } else if (key == "hidden") {
      spec.hidden = parse_number<int>(key, value);
    } else if (key == "budget") {
      spec.budget = parse_number<std::int64_t>(key, value);
    } else if (key == "inner_steps") {
      spec.inner_steps = parse_number<int>(key, value);
    } else if (key == "q") {
      spec.q = parse_number<double>(key, value);
    } else if (key == "residual") {
      spec.residual = parse_bool(key, value);
    } else if (key == "batch_norm") {
      spec.batch_norm = parse_bool(key, value);
    } else if (key == "iterations") {
      spec.iterations = parse_number<int>(key, value);
    } else if (key == "eval_instances") {
      spec.eval_instances = parse_number<int>(key, value);
    } else if (key == "eval_every") {
      spec.eval_every = parse_number<int>(key, value);
    } else if (key == "probe_instances") {
      spec.probe_instances = parse_number<int>(key, value);
    } else if (key == "trials") {
      spec.trials = parse_number<int>(key, value);
    } else if (key == "seed") {
      spec.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "timing") {
      spec.timing = parse_bool(key, value);
    } else {
      throw ParseError("unknown config key '" + std::string(key) + "'");
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_spec(text.str());
}

std::string to_text(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "name = " << spec.name << '\n'
      << "task = " << gen::task_name(spec.task) << '\n'
      << "sweep = " << sweep_name(spec.sweep) << '\n';
  if (!spec.values.empty()) out << "values = " << join_values(spec.values) << '\n';
  out << "archs = ";
  for (std::size_t i = 0; i < spec.archs.size(); ++i) {
    out << (i ? ", " : "") << nn::arch_name(spec.archs[i]);
  }
  out << '\n'
      << "layers = " << spec.layers << '\n'
      << "hidden = " << spec.hidden << '\n'
      << "budget = " << spec.budget << '\n'
      << "inner_steps = " << spec.inner_steps << '\n'
      << "q = " << detail::fmt(spec.q) << '\n'
      << "residual = " << (spec.residual ? "true" : "false") << '\n'
      << "batch_norm = " << (spec.batch_norm ? "true" : "false") << '\n'
      << "iterations = " << spec.iterations << '\n'
      << "eval_instances = " << spec.eval_instances << '\n'
      << "eval_every = " << spec.eval_every << '\n'
      << "probe_instances = " << spec.probe_instances << '\n'
      << "trials = " << spec.trials << '\n'
      << "seed = " << spec.seed << '\n'
      << "timing = " << (spec.timing ? "true" : "false") << '\n';
  return out.str();
}

std::string fingerprint(const ExperimentSpec& spec) {
  return hex(fnv1a(to_text(spec)));
}

std::uint64_t trial_seed(const ExperimentSpec& spec, int trial) {
  // Shared across architectures and sweep values: every cell of a trial
  // sees the same graph stream.
  return derive_seed(spec.seed, {static_cast<std::uint64_t>(trial)});
}

train::TrainConfig cell_config(const ExperimentSpec& spec, nn::Arch arch,
                               double value, int trial) {
  int layers = spec.layers;
  int inner_steps = spec.inner_steps;
  auto budget = static_cast<std::size_t>(spec.budget);
  double q = spec.q;
  switch (spec.sweep) {
    case SweepVariable::kNoise: q = value; break;
    case SweepVariable::kLayers: layers = static_cast<int>(value); break;
    case SweepVariable::kBudget: budget = static_cast<std::size_t>(value); break;
    case SweepVariable::kInnerSteps: inner_steps = static_cast<int>(value); break;
    case SweepVariable::kLearningSpeed: break;
  }
  // A budget sweep always solves the width; elsewhere `hidden` pins it.
  int hidden = spec.sweep == SweepVariable::kBudget ? 0 : spec.hidden;
  if (hidden == 0) {
    hidden = nn::solve_hidden_for_budget(
        arch, layers, inner_steps, budget, gen::input_dim(spec.task),
        gen::n_classes(spec.task), spec.residual, spec.batch_norm);
  }
  auto config = train::default_train_config(arch, spec.task, layers, hidden);
  config.model.inner_steps = inner_steps;
  config.model.residual = spec.residual;
  config.model.batch_norm = spec.batch_norm;
  config.q_noise = q;
  config.iterations = spec.iterations;
  config.eval_instances = spec.eval_instances;
  config.eval_every = spec.eval_every;
  config.probe_instances = spec.probe_instances;
  config.seed = trial_seed(spec, trial);
  return config;
}

int CellResult::completed() const {
  return static_cast<int>(std::count_if(
      trials.begin(), trials.end(),
      [](const TrialResult& t) { return t.error.empty(); }));
}

int default_workers() {
  if (const char* env = std::getenv("GRAPHBENCH_WORKERS")) {
    int n = 0;
    const std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec == std::errc() && ptr == text.data() + text.size() && n >= 1) {
      return n;
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentResults run_experiment(const ExperimentSpec& spec,
                                 const std::filesystem::path& out_dir,
                                 int workers) {
  spec.validate();
  if (workers <= 0) workers = default_workers();
  const fs::path cell_dir = out_dir / "cells" / spec.name;
  fs::create_directories(cell_dir);

  ExperimentResults results;
  results.spec = spec;
  const auto columns = spec.columns();

  struct Job {
    std::size_t cell;
    int trial;
    train::TrainConfig config;
    fs::path path;
    std::string key;
  };
  std::vector<Job> jobs;
  for (nn::Arch arch : spec.archs) {
    for (std::size_t v = 0; v < columns.size(); ++v) {
      CellResult cell;
      cell.arch = arch;
      cell.value = columns[v];
      cell.trials.resize(static_cast<std::size_t>(spec.trials));
      const std::size_t index = results.cells.size();
      for (int t = 0; t < spec.trials; ++t) {
        train::TrainConfig config;
        try {
          config = cell_config(spec, arch, columns[v], t);
        } catch (const InfeasibleError& e) {
          cell.error = e.what();
          cell.trials.clear();
          break;
        }
        cell.hidden = config.model.hidden;
        cell.parameters = nn::count_params(config.model);
        Job job{index, t, config,
                cell_dir / (cell_stem(arch, v) + "-t" + std::to_string(t) +
                            ".json"),
                config_key(config)};
        // Resume: a persisted trial with the same key is reused as is.
        if (auto saved = read_json(job.path);
            saved && saved->value("key", "") == job.key) {
          cell.trials[static_cast<std::size_t>(t)] = trial_from_json(*saved);
        } else {
          jobs.push_back(std::move(job));
        }
      }
      results.cells.push_back(std::move(cell));
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&]() {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      const Job& job = jobs[k];
      try {
        TrialResult trial = run_trial(job.config, job.trial);
        write_file(job.path, trial_to_json(trial, job.key).dump(1) + "\n");
        // Distinct slots per job, so no lock is needed for the store.
        results.cells[job.cell].trials[static_cast<std::size_t>(job.trial)] =
            std::move(trial);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n = std::min<int>(workers, static_cast<int>(jobs.size()));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t c = 0; c < results.cells.size(); ++c) {
    CellResult& cell = results.cells[c];
    summarize(cell);
    if (!spec.timing || !cell.error.empty()) continue;
    const auto v = static_cast<std::size_t>(c % columns.size());
    const auto config = cell_config(spec, cell.arch, cell.value, 0);
    const fs::path path = cell_dir / (cell_stem(cell.arch, v) + ".batch.json");
    const std::string key = config_key(config);
    if (auto saved = read_json(path); saved && saved->value("key", "") == key) {
      cell.batch_time_ms = saved->at("batch_time_ms").get<double>();
      continue;
    }
    cell.batch_time_ms = train::measure_batch_time(config, 100, 3);
    json j;
    j["key"] = key;
    j["batch_time_ms"] = *cell.batch_time_ms;
    write_file(path, j.dump(1) + "\n");
  }
  return results;
}

void emit_plot_data(const ExperimentResults& results,
                    const std::filesystem::path& out_dir) {
  if (results.cells.empty()) throw ContractError("no results to emit");
  fs::create_directories(out_dir);
  const auto& spec = results.spec;
  const std::string header = "# name=" + spec.name + " task=" +
                             std::string(gen::task_name(spec.task)) +
                             " sweep=" + std::string(sweep_name(spec.sweep)) +
                             " fingerprint=" + fingerprint(spec) + "\n";

  std::ostringstream table;
  table << "# graphbench sweep v1\n" << header
        << "architecture,sweep_value,hidden,parameters,trials,accuracy_mean,"
           "accuracy_std,error\n";
  std::ostringstream timing;
  timing << "# graphbench sweep timing v1\n" << header
         << "architecture,sweep_value,batch_time_ms,train_time_ms_mean\n";
  for (const auto& cell : results.cells) {
    const std::string arch(nn::arch_name(cell.arch));
    const std::string value = detail::fmt(cell.value);
    std::string error = cell.error;
    for (const auto& t : cell.trials) {
      if (error.empty() && !t.error.empty()) {
        error = "trial " + std::to_string(t.trial) + ": " + t.error;
      }
    }
    table << arch << ',' << value << ',' << cell.hidden << ','
          << cell.parameters << ',' << cell.completed() << ','
          << detail::fmt(cell.accuracy_mean) << ','
          << detail::fmt(cell.accuracy_std) << ',' << csv_escape(error)
          << '\n';
    std::vector<double> train_ms;
    for (const auto& t : cell.trials) {
      if (t.error.empty()) train_ms.push_back(t.train_time_ms);
    }
    timing << arch << ',' << value << ','
           << (cell.batch_time_ms ? detail::fmt(*cell.batch_time_ms) : "")
           << ',' << detail::fmt(detail::mean(train_ms)) << '\n';
  }
  write_file(out_dir / (spec.name + ".csv"), table.str());
  write_file(out_dir / (spec.name + ".timing.csv"), timing.str());

  if (spec.sweep == SweepVariable::kLearningSpeed) {
    std::ostringstream curve;
    curve << "# graphbench learning curve v1\n" << header
          << "architecture,trial,iteration,accuracy\n";
    std::ostringstream curve_timing;
    curve_timing << "# graphbench learning curve timing v1\n" << header
                 << "architecture,trial,iteration,elapsed_seconds,accuracy\n";
    for (const auto& cell : results.cells) {
      const std::string arch(nn::arch_name(cell.arch));
      for (const auto& t : cell.trials) {
        for (const auto& s : t.curve) {
          curve << arch << ',' << t.trial << ',' << s.iteration << ','
                << detail::fmt(s.accuracy) << '\n';
          curve_timing << arch << ',' << t.trial << ',' << s.iteration << ','
                       << detail::fmt(s.elapsed_ms / 1000.0) << ','
                       << detail::fmt(s.accuracy) << '\n';
        }
      }
    }
    write_file(out_dir / (spec.name + ".curve.csv"), curve.str());
    write_file(out_dir / (spec.name + ".curve.timing.csv"), curve_timing.str());
  }

  json summary;
  summary["format"] = "graphbench sweep summary v1";
  summary["fingerprint"] = fingerprint(spec);
  summary["spec"] = to_text(spec);
  json cells = json::array();
  for (const auto& cell : results.cells) {
    json c;
    c["architecture"] = nn::arch_name(cell.arch);
    c["sweep_value"] = cell.value;
    c["hidden"] = cell.hidden;
    c["parameters"] = cell.parameters;
    c["accuracy_mean"] = cell.accuracy_mean;
    c["accuracy_std"] = cell.accuracy_std;
    c["error"] = cell.error;
    json trials = json::array();
    for (const auto& t : cell.trials) {
      trials.push_back({{"trial", t.trial},
                        {"seed", t.seed},
                        {"accuracy", t.accuracy},
                        {"accuracy_std", t.accuracy_std},
                        {"final_loss", t.final_loss},
                        {"error", t.error}});
    }
    c["trials"] = std::move(trials);
    cells.push_back(std::move(c));
  }
  summary["cells"] = std::move(cells);
  write_file(out_dir / (spec.name + ".summary.json"), summary.dump(2) + "\n");
}

DirichletSummary run_dirichlet_baseline(int instances, double q_noise,
                                        std::uint64_t seed) {
  if (instances < 1) throw ContractError("need at least one instance");
  DirichletSummary summary;
  summary.instances = instances;
  std::vector<double> node_accuracies;
  for (int k = 0; k < instances; ++k) {
    const auto inst = gen::make_clustering_instance(
        q_noise, derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    try {
      const auto result = variational::dirichlet_solve(inst);
      summary.accuracies.push_back(
          train::accuracy(result.assignment, inst.targets));
      std::size_t correct = 0;
      for (std::size_t i = 0; i < inst.targets.size(); ++i) {
        correct += result.assignment[i] == inst.targets[i];
      }
      node_accuracies.push_back(static_cast<double>(correct) /
                                static_cast<double>(inst.targets.size()));
      summary.flagged_nodes += static_cast<std::size_t>(
          std::count(result.flagged.begin(), result.flagged.end(), 1));
    } catch (const SolverError& e) {
      ++summary.failures;
      summary.warnings.push_back("instance " + std::to_string(k) +
                                 " excluded: " + e.what());
    }
  }
  summary.accuracy_mean = detail::mean(summary.accuracies);
  summary.accuracy_std = detail::stddev(summary.accuracies);
  summary.node_accuracy_mean = detail::mean(node_accuracies);
  return summary;
}

}  // namespace graphbench::exp
