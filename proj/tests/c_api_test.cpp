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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "graphbench/graphbench.h"

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path temp(const std::string& name) {
  return fs::temp_directory_path() / ("graphbench_capi_" + name);
}

TEST(CApiTest, Metadata) {
  EXPECT_STREQ(gb_version(), "0.1.0");
  EXPECT_STREQ(gb_status_name(GB_OK), "ok");
  EXPECT_STRNE(gb_status_name(GB_ERR_PARSE), gb_status_name(GB_ERR_IO));
}

TEST(CApiTest, ArgumentErrorsSetLastError) {
  gb_instance* inst = nullptr;
  EXPECT_EQ(gb_instance_generate("matching", 0.1, 1, 0, nullptr),
            GB_ERR_ARGUMENT);
  EXPECT_STRNE(gb_last_error(), "");
  EXPECT_EQ(gb_instance_generate("colouring", 0.1, 1, 0, &inst), GB_ERR_PARSE);
  EXPECT_EQ(inst, nullptr);
  EXPECT_EQ(gb_instance_generate("matching", 1.5, 1, 0, &inst),
            GB_ERR_CONTRACT);
  EXPECT_EQ(gb_instance_load(temp("missing.txt").c_str(), &inst), GB_ERR_IO);
  // A successful call clears the message.
  ASSERT_EQ(gb_instance_generate("matching", 0.1, 1, 0, &inst), GB_OK);
  EXPECT_STREQ(gb_last_error(), "");
  gb_instance_free(inst);
  gb_instance_free(nullptr);
}

TEST(CApiTest, InstanceRoundTrip) {
  gb_instance* inst = nullptr;
  ASSERT_EQ(gb_instance_generate("clustering", 0.2, 4, 3, &inst), GB_OK);
  EXPECT_EQ(gb_instance_num_classes(inst), 10);
  const fs::path path = temp("instance.txt");
  ASSERT_EQ(gb_instance_save(inst, path.c_str()), GB_OK);
  gb_instance* loaded = nullptr;
  ASSERT_EQ(gb_instance_load(path.c_str(), &loaded), GB_OK);
  EXPECT_EQ(gb_instance_num_nodes(loaded), gb_instance_num_nodes(inst));
  EXPECT_EQ(gb_instance_num_edges(loaded), gb_instance_num_edges(inst));

  double acc = 0.0;
  size_t flagged = 99;
  const fs::path csv = temp("assign.csv");
  ASSERT_EQ(gb_dirichlet_solve(loaded, csv.c_str(), &acc, &flagged), GB_OK);
  EXPECT_GT(acc, 0.0);
  EXPECT_LE(acc, 1.0);
  EXPECT_NE(read_file(csv).find("node,seed,target,assigned,flagged"),
            std::string::npos);
  gb_instance_free(inst);
  gb_instance_free(loaded);

  gb_instance* matching = nullptr;
  ASSERT_EQ(gb_instance_generate("matching", 0.1, 4, 0, &matching), GB_OK);
  EXPECT_EQ(gb_instance_num_classes(matching), 2);
  EXPECT_EQ(gb_dirichlet_solve(matching, nullptr, &acc, &flagged),
            GB_ERR_CONTRACT);
  gb_instance_free(matching);
}

TEST(CApiTest, DirichletBaseline) {
  gb_dirichlet_summary s{};
  ASSERT_EQ(gb_dirichlet_baseline(4, 0.1, 2, &s), GB_OK);
  EXPECT_EQ(s.instances, 4);
  EXPECT_EQ(s.failures, 0);
  EXPECT_GT(s.accuracy_mean, 0.0);
  EXPECT_EQ(gb_dirichlet_baseline(4, 0.1, 2, nullptr), GB_ERR_ARGUMENT);
}

TEST(CApiTest, CountAndSolve) {
  size_t count = 0;
  ASSERT_EQ(gb_count_params("GatedGCN", "clustering", 6, 20, 3, 1, 1, &count),
            GB_OK);
  EXPECT_GT(count, 0u);
  int hidden = 0;
  ASSERT_EQ(gb_solve_hidden("GatedGCN", "clustering", 6, 3, 100000, 1, 1,
                            &hidden),
            GB_OK);
  size_t at = 0, above = 0;
  gb_count_params("GatedGCN", "clustering", 6, hidden, 3, 1, 1, &at);
  gb_count_params("GatedGCN", "clustering", 6, hidden + 1, 3, 1, 1, &above);
  EXPECT_LE(at, 100000u);
  EXPECT_GT(above, 100000u);
  EXPECT_EQ(gb_solve_hidden("GLSTM", "matching", 6, 3, 5, 1, 1, &hidden),
            GB_ERR_INFEASIBLE);
  EXPECT_EQ(gb_count_params("LSTM", "matching", 6, 3, 3, 1, 1, &count),
            GB_ERR_PARSE);
}

TEST(CApiTest, TrainIsDeterministic) {
  gb_train_options opt;
  gb_train_options_default(&opt);
  opt.arch = "SGCN";
  opt.task = "matching";
  opt.layers = 2;
  opt.hidden = 6;
  opt.iterations = 15;
  opt.eval_instances = 2;
  opt.probe_instances = 2;
  opt.eval_every = 5;
  opt.seed = 3;
  const fs::path ckpt = temp("model.ckpt");
  opt.checkpoint_path = ckpt.c_str();

  gb_report* a = nullptr;
  gb_report* b = nullptr;
  ASSERT_EQ(gb_train(&opt, &a), GB_OK) << gb_last_error();
  ASSERT_EQ(gb_train(&opt, &b), GB_OK);
  EXPECT_EQ(gb_report_hidden(a), 6);
  EXPECT_GT(gb_report_parameters(a), 0u);
  EXPECT_EQ(gb_report_final_accuracy(a), gb_report_final_accuracy(b));
  const fs::path ca = temp("a.csv"), cb = temp("b.csv");
  ASSERT_EQ(gb_report_write_csv(a, ca.c_str()), GB_OK);
  ASSERT_EQ(gb_report_write_csv(b, cb.c_str()), GB_OK);
  EXPECT_EQ(read_file(ca), read_file(cb));
  EXPECT_EQ(gb_report_write_timing_csv(a, temp("a.timing.csv").c_str()), GB_OK);
  EXPECT_EQ(gb_report_write_summary(a, temp("a.json").c_str()), GB_OK);
  EXPECT_TRUE(fs::exists(ckpt));
  gb_report_free(a);
  gb_report_free(b);

  double ms = 0.0;
  ASSERT_EQ(gb_batch_time(&opt, 2, 1, &ms), GB_OK);
  EXPECT_GT(ms, 0.0);

  opt.arch = "Transformer";
  gb_report* bad = nullptr;
  EXPECT_EQ(gb_train(&opt, &bad), GB_ERR_PARSE);
  EXPECT_EQ(bad, nullptr);
  EXPECT_EQ(gb_train(nullptr, &bad), GB_ERR_ARGUMENT);
}

TEST(CApiTest, SweepRejectsBadConfig) {
  const fs::path cfg = temp("bad.cfg");
  std::ofstream(cfg) << "name = x\nsweep = nothing\n";
  EXPECT_EQ(gb_sweep_run(cfg.c_str(), temp("out").c_str(), 1), GB_ERR_PARSE);
  EXPECT_EQ(gb_sweep_run(temp("absent.cfg").c_str(), temp("out").c_str(), 1),
            GB_ERR_IO);
}

TEST(CApiTest, Gradcheck) {
  gb_gradcheck_report* r = nullptr;
  ASSERT_EQ(gb_gradcheck(1, 1e-4, &r), GB_OK);
  ASSERT_GT(gb_gradcheck_num_cases(r), 0u);
  EXPECT_TRUE(gb_gradcheck_all_passed(r));
  for (size_t i = 0; i < gb_gradcheck_num_cases(r); ++i) {
    EXPECT_TRUE(gb_gradcheck_case_passed(r, i)) << gb_gradcheck_case_name(r, i)
                                                << " " << gb_gradcheck_case_error(r, i);
  }
  EXPECT_STREQ(gb_gradcheck_case_name(r, 100000), "");
  EXPECT_GE(gb_gradcheck_seconds(r), 0.0);
  gb_gradcheck_report_free(r);
}

}  // namespace
