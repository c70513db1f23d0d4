// tools/gwhi.cpp

// Copyright 2026 gwhi authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.
//
// Command-line pipeline driver. Stages run individually (subcommand or
// --stage) or end to end with `run`. Exit codes: 0 success, 1 configuration
// error, 2 runtime failure.

#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "gwhi/pipeline.hpp"

namespace {

struct CliOverrides {
  std::string model, sp, out, time_axis;
  std::vector<double> freqs;
  std::vector<int> folds;
  std::vector<uint64_t> seeds;
  int jobs = 0;
};

void apply_overrides(gwhi::RunConfig& cfg, const CliOverrides& ov) {
  if (!ov.model.empty()) cfg.model = ov.model;
  if (!ov.sp.empty()) cfg.sp_method = ov.sp;
  if (!ov.out.empty()) cfg.out_dir = ov.out;
  if (!ov.time_axis.empty()) cfg.time_axis = ov.time_axis;
  if (!ov.freqs.empty()) cfg.frequencies = ov.freqs;
  if (!ov.folds.empty()) cfg.folds = ov.folds;
  if (!ov.seeds.empty()) cfg.seeds = ov.seeds;
  if (ov.jobs > 0) cfg.jobs = ov.jobs;
  cfg.validate();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gwhi - health-indicator extraction pipeline for guided-wave run-to-failure data"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string stage;
  CliOverrides ov;
  app.add_option("--config", config_path, "run configuration (JSON)")->required();
  app.add_option("--stage", stage, "stage to run: generate|extract|rank|train|fuse|evaluate|report|all");
  app.add_option("--model", ov.model, "override model: deepsad|dtcvae");
  app.add_option("--sp", ov.sp, "override SP method: raw|fft|ht|emd|stft");
  app.add_option("--freqs", ov.freqs, "override frequency subset (kHz)")->delimiter(',');
  app.add_option("--fold", ov.folds, "override fold subset (test-specimen ids)")->delimiter(',');
  app.add_option("--seed-list", ov.seeds, "override seed list")->delimiter(',');
  app.add_option("--jobs", ov.jobs, "worker threads for the train stage");
  app.add_option("--out", ov.out, "override output directory");
  app.add_option("--time-axis", ov.time_axis, "override time axis: cycles|index");

  for (const char* name : {"generate", "extract", "rank", "train", "fuse", "evaluate",
                           "report"}) {
    app.add_subcommand(name, std::string("run the ") + name + " stage")->silent(false);
  }
  app.add_subcommand("run", "run all stages in order")->silent(false);

  // Debug dump of one measurement's spectrum / envelope / IMFs.
  int ins_specimen = 1, ins_timestep = 1, ins_path = 0;
  double ins_freq = 50.0;
  CLI::App* inspect = app.add_subcommand("inspect", "dump spectrum, envelope and IMFs of one path");
  inspect->add_option("--specimen", ins_specimen, "specimen id");
  inspect->add_option("--freq", ins_freq, "excitation frequency (kHz)");
  inspect->add_option("--timestep", ins_timestep, "timestep index (1-based)");
  inspect->add_option("--path", ins_path, "path row (0-based)");

  CLI11_PARSE(app, argc, argv);

  std::string selected = stage;
  for (const auto* sub : app.get_subcommands())
    selected = sub->get_name() == "run" ? "all" : sub->get_name();
  if (selected.empty()) selected = "all";

  try {
    gwhi::RunConfig cfg = gwhi::load_config(config_path);
    apply_overrides(cfg, ov);
    if (selected == "inspect") {
      gwhi::cmd_inspect(cfg, ins_specimen, ins_freq, ins_timestep, ins_path);
      return 0;
    }
    gwhi::run_stage(cfg, selected);
  } catch (const gwhi::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
