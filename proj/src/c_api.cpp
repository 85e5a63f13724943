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


#include "graphbench/graphbench.h"

#include <algorithm>
#include <fstream>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

#include "graphbench/error.hpp"
#include "graphbench/experiment.hpp"
#include "graphbench/gradcheck.hpp"
#include "graphbench/graph_gen.hpp"
#include "graphbench/models.hpp"
#include "graphbench/random.hpp"
#include "graphbench/training.hpp"
#include "graphbench/variational.hpp"

using namespace graphbench;

struct gb_instance {
  gen::TaskInstance value;
};

struct gb_report {
  train::TrainReport value;
};

struct gb_gradcheck_report {
  check::SuiteReport value;
};

namespace {

thread_local std::string last_error;

gb_status fail(gb_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `body`, mapping exceptions onto status codes.
template <class F>
gb_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return GB_OK;
  } catch (const Error& e) {
    return fail(static_cast<gb_status>(e.code()), e.what());
  } catch (const std::invalid_argument& e) {
    return fail(GB_ERR_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(GB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GB_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

gb_status argument_error(const char* what) {
  return fail(GB_ERR_ARGUMENT, what);
}

void write_text(const char* path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(std::string("cannot write ") + path);
  out << text;
  if (!out) throw IoError(std::string("write failed: ") + path);
}

train::TrainConfig to_config(const gb_train_options& o) {
  require(o.arch && o.task, "arch and task are required");
  const nn::Arch arch = nn::parse_arch(o.arch);
  const gen::Task task = gen::parse_task(o.task);
  int hidden = o.hidden;
  if (hidden == 0) {
    require(o.budget > 0, "budget must be positive when hidden is 0");
    hidden = nn::solve_hidden_for_budget(
        arch, o.layers, o.inner_steps, static_cast<std::size_t>(o.budget),
        gen::input_dim(task), gen::n_classes(task), o.residual != 0,
        o.batch_norm != 0);
  }
  auto config = train::default_train_config(arch, task, o.layers, hidden);
  config.model.inner_steps = o.inner_steps;
  config.model.residual = o.residual != 0;
  config.model.batch_norm = o.batch_norm != 0;
  config.q_noise = o.q_noise;
  if (o.optimizer) config.optimizer.kind = train::parse_optimizer(o.optimizer);
  if (o.learning_rate > 0.0) config.optimizer.learning_rate = o.learning_rate;
  config.iterations = o.iterations;
  config.eval_instances = o.eval_instances;
  config.eval_every = o.eval_every;
  config.probe_instances = o.probe_instances;
  config.eval_graph_stats = o.eval_graph_stats != 0;
  config.seed = o.seed;
  config.model.validate();
  return config;
}

}  // namespace

extern "C" {

const char* gb_last_error(void) { return last_error.c_str(); }

const char* gb_status_name(gb_status status) {
  switch (status) {
    case GB_OK: return "ok";
    case GB_ERR_ARGUMENT: return "invalid argument";
    case GB_ERR_DIMENSION: return "dimension mismatch";
    case GB_ERR_STRUCTURAL: return "structural error";
    case GB_ERR_CONTRACT: return "contract violation";
    case GB_ERR_DEGENERATE_BATCH: return "degenerate batch";
    case GB_ERR_EMPTY_LOSS: return "empty loss";
    case GB_ERR_INFEASIBLE: return "infeasible budget";
    case GB_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case GB_ERR_SOLVER: return "solver failure";
    case GB_ERR_DIVERGED: return "training diverged";
    case GB_ERR_PARSE: return "parse error";
    case GB_ERR_IO: return "i/o error";
    case GB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* gb_version(void) { return "0.1.0"; }

gb_status gb_instance_generate(const char* task, double q_noise,
                               uint64_t seed, uint64_t index,
                               gb_instance** out) {
  if (!task || !out) return argument_error("task and out are required");
  *out = nullptr;
  return guarded([&] {
    const gen::Task kind = gen::parse_task(task);
    const std::uint64_t instance_seed = derive_seed(seed, {1, index});
    auto handle = std::make_unique<gb_instance>();
    if (kind == gen::Task::kMatching) {
      const auto pattern = gen::make_pattern(derive_seed(seed, {0}));
      handle->value = gen::make_matching_instance(pattern, q_noise, instance_seed);
    } else {
      handle->value = gen::make_clustering_instance(q_noise, instance_seed);
    }
    *out = handle.release();
  });
}

gb_status gb_instance_load(const char* path, gb_instance** out) {
  if (!path || !out) return argument_error("path and out are required");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<gb_instance>();
    handle->value = gen::load_instance(path);
    *out = handle.release();
  });
}

gb_status gb_instance_save(const gb_instance* instance, const char* path) {
  if (!instance || !path) return argument_error("instance and path are required");
  return guarded([&] { gen::save_instance(instance->value, path); });
}

void gb_instance_free(gb_instance* instance) { delete instance; }

size_t gb_instance_num_nodes(const gb_instance* instance) {
  return instance ? instance->value.graph.n_nodes : 0;
}

size_t gb_instance_num_edges(const gb_instance* instance) {
  return instance ? instance->value.graph.edges.size() : 0;
}

int gb_instance_num_classes(const gb_instance* instance) {
  return instance ? instance->value.n_classes() : 0;
}

gb_status gb_dirichlet_solve(const gb_instance* instance, const char* csv_path,
                             double* accuracy, size_t* flagged_nodes) {
  if (!instance) return argument_error("instance is required");
  return guarded([&] {
    const auto& inst = instance->value;
    if (inst.task != gen::Task::kClustering) {
      throw ContractError("the variational baseline needs a clustering instance");
    }
    const auto result = variational::dirichlet_solve(inst);
    if (accuracy) *accuracy = train::accuracy(result.assignment, inst.targets);
    if (flagged_nodes) {
      *flagged_nodes = static_cast<size_t>(
          std::count(result.flagged.begin(), result.flagged.end(), 1));
    }
    if (csv_path) write_text(csv_path, variational::assignments_csv(inst, result));
  });
}

gb_status gb_dirichlet_baseline(int instances, double q_noise, uint64_t seed,
                                gb_dirichlet_summary* out) {
  if (!out) return argument_error("out is required");
  return guarded([&] {
    const auto s = exp::run_dirichlet_baseline(instances, q_noise, seed);
    out->instances = s.instances;
    out->failures = s.failures;
    out->flagged_nodes = s.flagged_nodes;
    out->accuracy_mean = s.accuracy_mean;
    out->accuracy_std = s.accuracy_std;
    out->node_accuracy_mean = s.node_accuracy_mean;
  });
}

void gb_train_options_default(gb_train_options* options) {
  if (!options) return;
  const train::TrainConfig d;
  *options = gb_train_options{};
  options->arch = "GatedGCN";
  options->task = "matching";
  options->layers = 6;
  options->hidden = 0;
  options->budget = 100000;
  options->inner_steps = 3;
  options->residual = 1;
  options->batch_norm = 1;
  options->q_noise = d.q_noise;
  options->optimizer = nullptr;
  options->learning_rate = 0.0;
  options->iterations = d.iterations;
  options->eval_instances = d.eval_instances;
  options->eval_every = d.eval_every;
  options->probe_instances = d.probe_instances;
  options->eval_graph_stats = d.eval_graph_stats ? 1 : 0;
  options->seed = d.seed;
  options->checkpoint_path = nullptr;
}

gb_status gb_train(const gb_train_options* options, gb_report** out) {
  if (!options || !out) return argument_error("options and out are required");
  *out = nullptr;
  return guarded([&] {
    const auto config = to_config(*options);
    auto handle = std::make_unique<gb_report>();
    if (options->checkpoint_path) {
      nn::Model model(config.model, 0);
      handle->value = train::train(config, &model);
      model.save(options->checkpoint_path);
    } else {
      handle->value = train::train(config);
    }
    *out = handle.release();
  });
}

void gb_report_free(gb_report* report) { delete report; }

double gb_report_final_accuracy(const gb_report* report) {
  return report ? report->value.final_accuracy : 0.0;
}

int gb_report_hidden(const gb_report* report) {
  return report ? report->value.hidden : 0;
}

size_t gb_report_parameters(const gb_report* report) {
  return report ? report->value.parameter_count : 0;
}

gb_status gb_report_write_csv(const gb_report* report, const char* path) {
  if (!report || !path) return argument_error("report and path are required");
  return guarded([&] { write_text(path, report->value.csv()); });
}

gb_status gb_report_write_timing_csv(const gb_report* report,
                                     const char* path) {
  if (!report || !path) return argument_error("report and path are required");
  return guarded([&] { write_text(path, report->value.timing_csv()); });
}

gb_status gb_report_write_summary(const gb_report* report, const char* path) {
  if (!report || !path) return argument_error("report and path are required");
  return guarded([&] { write_text(path, report->value.summary_json() + "\n"); });
}

gb_status gb_batch_time(const gb_train_options* options, int graphs,
                        int repeats, double* milliseconds) {
  if (!options || !milliseconds) {
    return argument_error("options and milliseconds are required");
  }
  if (graphs < 1 || repeats < 1) {
    return argument_error("graphs and repeats must be positive");
  }
  return guarded([&] {
    *milliseconds = train::measure_batch_time(to_config(*options), graphs, repeats);
  });
}

gb_status gb_count_params(const char* arch, const char* task, int layers,
                          int hidden, int inner_steps, int residual,
                          int batch_norm, size_t* out) {
  if (!arch || !task || !out) return argument_error("arch, task and out are required");
  return guarded([&] {
    nn::ModelConfig config;
    config.arch = nn::parse_arch(arch);
    const gen::Task kind = gen::parse_task(task);
    config.layers = layers;
    config.hidden = hidden;
    config.inner_steps = inner_steps;
    config.residual = residual != 0;
    config.batch_norm = batch_norm != 0;
    config.input_dim = gen::input_dim(kind);
    config.n_classes = gen::n_classes(kind);
    config.validate();
    *out = nn::count_params(config);
  });
}

gb_status gb_solve_hidden(const char* arch, const char* task, int layers,
                          int inner_steps, int64_t budget, int residual,
                          int batch_norm, int* out) {
  if (!arch || !task || !out) return argument_error("arch, task and out are required");
  if (budget < 1) return argument_error("budget must be positive");
  return guarded([&] {
    const gen::Task kind = gen::parse_task(task);
    *out = nn::solve_hidden_for_budget(
        nn::parse_arch(arch), layers, inner_steps,
        static_cast<std::size_t>(budget), gen::input_dim(kind),
        gen::n_classes(kind), residual != 0, batch_norm != 0);
  });
}

gb_status gb_sweep_run(const char* config_path, const char* out_dir,
                       int workers) {
  if (!config_path || !out_dir) {
    return argument_error("config_path and out_dir are required");
  }
  return guarded([&] {
    const auto spec = exp::load_spec(config_path);
    const auto results = exp::run_experiment(spec, out_dir, workers);
    exp::emit_plot_data(results, out_dir);
  });
}

gb_status gb_gradcheck(uint64_t seed, double tolerance,
                       gb_gradcheck_report** out) {
  if (!out) return argument_error("out is required");
  if (!(tolerance > 0.0)) return argument_error("tolerance must be positive");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<gb_gradcheck_report>();
    handle->value = check::run_gradcheck_suite(seed, tolerance);
    *out = handle.release();
  });
}

void gb_gradcheck_report_free(gb_gradcheck_report* report) { delete report; }

size_t gb_gradcheck_num_cases(const gb_gradcheck_report* report) {
  return report ? report->value.cases.size() : 0;
}

const char* gb_gradcheck_case_name(const gb_gradcheck_report* report,
                                   size_t index) {
  if (!report || index >= report->value.cases.size()) return "";
  return report->value.cases[index].name.c_str();
}

double gb_gradcheck_case_error(const gb_gradcheck_report* report,
                               size_t index) {
  if (!report || index >= report->value.cases.size()) return 0.0;
  return report->value.cases[index].max_relative_error;
}

int gb_gradcheck_case_passed(const gb_gradcheck_report* report, size_t index) {
  if (!report || index >= report->value.cases.size()) return 0;
  return report->value.cases[index].passed ? 1 : 0;
}

int gb_gradcheck_all_passed(const gb_gradcheck_report* report) {
  return report && report->value.all_passed() ? 1 : 0;
}

double gb_gradcheck_seconds(const gb_gradcheck_report* report) {
  return report ? report->value.seconds : 0.0;
}

}  // extern "C"
