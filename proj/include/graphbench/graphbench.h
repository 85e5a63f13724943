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


/* C interface to graphbench. All objects are opaque handles released with
 * their matching *_free function. Every call returns a gb_status; on failure
 * gb_last_error() describes the most recent error on the calling thread. */

#ifndef GRAPHBENCH_GRAPHBENCH_H
#define GRAPHBENCH_GRAPHBENCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GB_API __declspec(dllexport)
#else
#define GB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gb_status {
  GB_OK = 0,
  GB_ERR_ARGUMENT = 1,
  GB_ERR_DIMENSION = 2,
  GB_ERR_STRUCTURAL = 3,
  GB_ERR_CONTRACT = 4,
  GB_ERR_DEGENERATE_BATCH = 5,
  GB_ERR_EMPTY_LOSS = 6,
  GB_ERR_INFEASIBLE = 7,
  GB_ERR_INSUFFICIENT_DATA = 8,
  GB_ERR_SOLVER = 9,
  GB_ERR_DIVERGED = 10,
  GB_ERR_PARSE = 11,
  GB_ERR_IO = 12,
  GB_ERR_INTERNAL = 13
} gb_status;

typedef struct gb_instance gb_instance;
typedef struct gb_report gb_report;
typedef struct gb_gradcheck_report gb_gradcheck_report;

/* Message for the last failed call on this thread; "" if none. */
GB_API const char* gb_last_error(void);
GB_API const char* gb_status_name(gb_status status);
GB_API const char* gb_version(void);

/* ---- Task instances ---------------------------------------------------- */

/* Instance `index` of the stream for (task, q, seed). Matching instances of
 * one seed share a pattern graph. task: "matching" or "clustering". */
GB_API gb_status gb_instance_generate(const char* task, double q_noise,
                                      uint64_t seed, uint64_t index,
                                      gb_instance** out);
GB_API gb_status gb_instance_load(const char* path, gb_instance** out);
GB_API gb_status gb_instance_save(const gb_instance* instance,
                                  const char* path);
GB_API void gb_instance_free(gb_instance* instance);
GB_API size_t gb_instance_num_nodes(const gb_instance* instance);
GB_API size_t gb_instance_num_edges(const gb_instance* instance);
GB_API int gb_instance_num_classes(const gb_instance* instance);

/* ---- Variational baseline ---------------------------------------------- */

/* Solves a clustering instance; optionally writes per-node assignments as
 * CSV to `csv_path` (may be NULL). */
GB_API gb_status gb_dirichlet_solve(const gb_instance* instance,
                                    const char* csv_path, double* accuracy,
                                    size_t* flagged_nodes);

typedef struct gb_dirichlet_summary {
  int instances;
  int failures;
  size_t flagged_nodes;
  double accuracy_mean;      /* mean per-class recall */
  double accuracy_std;
  double node_accuracy_mean; /* fraction of nodes correct */
} gb_dirichlet_summary;

GB_API gb_status gb_dirichlet_baseline(int instances, double q_noise,
                                       uint64_t seed,
                                       gb_dirichlet_summary* out);

/* ---- Models and training ----------------------------------------------- */

typedef struct gb_train_options {
  const char* arch;      /* GVRNN GGRU GLSTM CommNet SGCN GatedGCN */
  const char* task;      /* matching | clustering */
  int layers;
  int hidden;            /* 0: solve from budget */
  int64_t budget;
  int inner_steps;
  int residual;
  int batch_norm;
  double q_noise;
  const char* optimizer; /* NULL: per-architecture default */
  double learning_rate;  /* <= 0: per-architecture default */
  int iterations;
  int eval_instances;
  int eval_every;
  int probe_instances;
  int eval_graph_stats;
  uint64_t seed;
  const char* checkpoint_path; /* trained model written here when set */
} gb_train_options;

GB_API void gb_train_options_default(gb_train_options* options);

GB_API gb_status gb_train(const gb_train_options* options, gb_report** out);
GB_API void gb_report_free(gb_report* report);
GB_API double gb_report_final_accuracy(const gb_report* report);
GB_API int gb_report_hidden(const gb_report* report);
GB_API size_t gb_report_parameters(const gb_report* report);
/* Deterministic per-iteration log. */
GB_API gb_status gb_report_write_csv(const gb_report* report,
                                     const char* path);
/* Wall-clock sidecar. */
GB_API gb_status gb_report_write_timing_csv(const gb_report* report,
                                            const char* path);
GB_API gb_status gb_report_write_summary(const gb_report* report,
                                         const char* path);

/* Median over `repeats` of forward+backward time for `graphs` instances. */
GB_API gb_status gb_batch_time(const gb_train_options* options, int graphs,
                               int repeats, double* milliseconds);

GB_API gb_status gb_count_params(const char* arch, const char* task,
                                 int layers, int hidden, int inner_steps,
                                 int residual, int batch_norm, size_t* out);
GB_API gb_status gb_solve_hidden(const char* arch, const char* task,
                                 int layers, int inner_steps, int64_t budget,
                                 int residual, int batch_norm, int* out);

/* ---- Experiments ------------------------------------------------------- */

/* Runs the sweep in `config_path` with results under `out_dir`; workers <= 0
 * reads GRAPHBENCH_WORKERS. Completed trials found in `out_dir` are reused. */
GB_API gb_status gb_sweep_run(const char* config_path, const char* out_dir,
                              int workers);

/* ---- Gradient checks --------------------------------------------------- */

GB_API gb_status gb_gradcheck(uint64_t seed, double tolerance,
                              gb_gradcheck_report** out);
GB_API void gb_gradcheck_report_free(gb_gradcheck_report* report);
GB_API size_t gb_gradcheck_num_cases(const gb_gradcheck_report* report);
GB_API const char* gb_gradcheck_case_name(const gb_gradcheck_report* report,
                                          size_t index);
GB_API double gb_gradcheck_case_error(const gb_gradcheck_report* report,
                                      size_t index);
GB_API int gb_gradcheck_case_passed(const gb_gradcheck_report* report,
                                    size_t index);
GB_API int gb_gradcheck_all_passed(const gb_gradcheck_report* report);
GB_API double gb_gradcheck_seconds(const gb_gradcheck_report* report);

#ifdef __cplusplus
}
#endif

#endif /* GRAPHBENCH_GRAPHBENCH_H */
