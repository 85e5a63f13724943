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


// gbench: command-line front end over the graphbench C API.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>

#include "graphbench/graphbench.h"

namespace {

int report(gb_status status) {
  if (status == GB_OK) return 0;
  std::fprintf(stderr, "gbench: %s: %s\n", gb_status_name(status),
               gb_last_error());
  return 2;
}

struct TrainArgs {
  std::string arch = "GatedGCN";
  std::string task = "matching";
  std::string optimizer;
  std::string out = "train";
  std::string checkpoint;
  bool no_residual = false;
  bool no_batch_norm = false;
  bool running_stats = false;
  bool batch_time = false;
  gb_train_options options{};
};

int run_gen(const std::string& task, double q, std::uint64_t seed, int count,
            const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    gb_instance* inst = nullptr;
    if (int rc = report(gb_instance_generate(task.c_str(), q, seed,
                                             static_cast<std::uint64_t>(i),
                                             &inst))) {
      return rc;
    }
    const auto path = (std::filesystem::path(dir) /
                       (task + "-" + std::to_string(i) + ".txt"))
                          .string();
    const gb_status status = gb_instance_save(inst, path.c_str());
    std::printf("%s nodes=%zu edges=%zu\n", path.c_str(),
                gb_instance_num_nodes(inst), gb_instance_num_edges(inst));
    gb_instance_free(inst);
    if (int rc = report(status)) return rc;
  }
  return 0;
}

int run_train(TrainArgs& args) {
  gb_train_options& o = args.options;
  o.arch = args.arch.c_str();
  o.task = args.task.c_str();
  o.optimizer = args.optimizer.empty() ? nullptr : args.optimizer.c_str();
  o.checkpoint_path = args.checkpoint.empty() ? nullptr : args.checkpoint.c_str();
  o.residual = args.no_residual ? 0 : 1;
  o.batch_norm = args.no_batch_norm ? 0 : 1;
  o.eval_graph_stats = args.running_stats ? 0 : 1;

  gb_report* rep = nullptr;
  if (int rc = report(gb_train(&o, &rep))) return rc;
  const std::string csv = args.out + ".csv";
  const std::string timing = args.out + ".timing.csv";
  const std::string summary = args.out + ".summary.json";
  gb_status status = gb_report_write_csv(rep, csv.c_str());
  if (status == GB_OK) status = gb_report_write_timing_csv(rep, timing.c_str());
  if (status == GB_OK) status = gb_report_write_summary(rep, summary.c_str());
  std::printf("arch=%s task=%s hidden=%d params=%zu accuracy=%.4f\n", o.arch,
              o.task, gb_report_hidden(rep), gb_report_parameters(rep),
              gb_report_final_accuracy(rep));
  gb_report_free(rep);
  if (int rc = report(status)) return rc;

  if (args.batch_time) {
    double ms = 0.0;
    if (int rc = report(gb_batch_time(&o, 100, 3, &ms))) return rc;
    std::printf("batch_time_ms=%.3f\n", ms);
  }
  return 0;
}

int run_dirichlet(const std::string& instance, const std::string& csv,
                  int instances, double q, std::uint64_t seed) {
  if (!instance.empty()) {
    gb_instance* inst = nullptr;
    if (int rc = report(gb_instance_load(instance.c_str(), &inst))) return rc;
    double accuracy = 0.0;
    std::size_t flagged = 0;
    const gb_status status = gb_dirichlet_solve(
        inst, csv.empty() ? nullptr : csv.c_str(), &accuracy, &flagged);
    gb_instance_free(inst);
    if (int rc = report(status)) return rc;
    std::printf("accuracy=%.4f flagged=%zu\n", accuracy, flagged);
    return 0;
  }
  gb_dirichlet_summary summary{};
  if (int rc = report(gb_dirichlet_baseline(instances, q, seed, &summary))) {
    return rc;
  }
  std::printf(
      "instances=%d failures=%d flagged_nodes=%zu accuracy_mean=%.4f "
      "accuracy_std=%.4f node_accuracy_mean=%.4f\n",
      summary.instances, summary.failures, summary.flagged_nodes,
      summary.accuracy_mean, summary.accuracy_std, summary.node_accuracy_mean);
  return 0;
}

int run_gradcheck(std::uint64_t seed, double tolerance) {
  gb_gradcheck_report* rep = nullptr;
  if (int rc = report(gb_gradcheck(seed, tolerance, &rep))) return rc;
  for (std::size_t i = 0; i < gb_gradcheck_num_cases(rep); ++i) {
    std::printf("%-4s %-28s max_rel_err=%.3e\n",
                gb_gradcheck_case_passed(rep, i) ? "ok" : "FAIL",
                gb_gradcheck_case_name(rep, i), gb_gradcheck_case_error(rep, i));
  }
  const bool ok = gb_gradcheck_all_passed(rep) != 0;
  std::printf("%s in %.2fs\n", ok ? "all passed" : "FAILED",
              gb_gradcheck_seconds(rep));
  gb_gradcheck_report_free(rep);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphbench: graph neural network benchmark"};
  app.require_subcommand(1);
  int rc = 0;

  auto* gen = app.add_subcommand("gen", "Write task instances to files");
  std::string gen_task = "matching", gen_dir = "instances";
  double gen_q = 0.1;
  std::uint64_t gen_seed = 1;
  int gen_count = 1;
  gen->add_option("--task", gen_task, "matching or clustering")
      ->check(CLI::IsMember({"matching", "clustering"}));
  gen->add_option("--q", gen_q, "inter-community edge probability");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--count", gen_count)->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_dir, "output directory");
  gen->callback([&] { rc = run_gen(gen_task, gen_q, gen_seed, gen_count, gen_dir); });

  auto* tr = app.add_subcommand("train", "Train and evaluate one model");
  TrainArgs targs;
  gb_train_options_default(&targs.options);
  auto& o = targs.options;
  tr->add_option("--arch", targs.arch)
      ->check(CLI::IsMember({"GVRNN", "GGRU", "GLSTM", "CommNet", "SGCN", "GatedGCN"}));
  tr->add_option("--task", targs.task)
      ->check(CLI::IsMember({"matching", "clustering"}));
  tr->add_option("--layers", o.layers)->capture_default_str();
  tr->add_option("--hidden", o.hidden, "0 solves the width from --budget")
      ->capture_default_str();
  tr->add_option("--budget", o.budget)->capture_default_str();
  tr->add_option("--inner-steps", o.inner_steps)->capture_default_str();
  tr->add_flag("--no-residual", targs.no_residual);
  tr->add_flag("--no-batch-norm", targs.no_batch_norm);
  tr->add_option("--q", o.q_noise)->capture_default_str();
  tr->add_option("--optimizer", targs.optimizer, "adam or sgd");
  tr->add_option("--lr", o.learning_rate, "learning rate; <= 0 uses the default");
  tr->add_option("--iterations", o.iterations)->capture_default_str();
  tr->add_option("--eval-instances", o.eval_instances)->capture_default_str();
  tr->add_option("--eval-every", o.eval_every)->capture_default_str();
  tr->add_option("--probe-instances", o.probe_instances)->capture_default_str();
  tr->add_flag("--running-stats", targs.running_stats,
               "evaluate batch norm with running statistics");
  tr->add_option("--seed", o.seed)->capture_default_str();
  tr->add_option("--out", targs.out, "output prefix for .csv/.timing.csv/.summary.json")
      ->capture_default_str();
  tr->add_option("--checkpoint", targs.checkpoint, "save the trained model here");
  tr->add_flag("--batch-time", targs.batch_time,
               "also time forward+backward over 100 graphs");
  tr->callback([&] { rc = run_train(targs); });

  auto* sw = app.add_subcommand("sweep", "Run an experiment config");
  std::string sweep_config, sweep_out = "results";
  int workers = 0;
  sw->add_option("config", sweep_config)->required()->check(CLI::ExistingFile);
  sw->add_option("--out", sweep_out, "results directory")->capture_default_str();
  sw->add_option("--workers", workers, "0 reads GRAPHBENCH_WORKERS");
  sw->callback([&] {
    rc = report(gb_sweep_run(sweep_config.c_str(), sweep_out.c_str(), workers));
  });

  auto* dr = app.add_subcommand("dirichlet", "Random-walker baseline");
  std::string dr_instance, dr_csv;
  int dr_count = 100;
  double dr_q = 0.1;
  std::uint64_t dr_seed = 1;
  dr->add_option("--instance", dr_instance, "solve one instance file")
      ->check(CLI::ExistingFile);
  dr->add_option("--csv", dr_csv, "per-node assignments (with --instance)");
  dr->add_option("--instances", dr_count)->check(CLI::PositiveNumber);
  dr->add_option("--q", dr_q);
  dr->add_option("--seed", dr_seed);
  dr->callback([&] { rc = run_dirichlet(dr_instance, dr_csv, dr_count, dr_q, dr_seed); });

  auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  std::uint64_t gc_seed = 1;
  double gc_tol = 1e-4;
  gc->add_option("--seed", gc_seed);
  gc->add_option("--tolerance", gc_tol);
  gc->callback([&] { rc = run_gradcheck(gc_seed, gc_tol); });

  CLI11_PARSE(app, argc, argv);
  return rc;
}
