#include <iostream>

#include <CLI11.hpp>

#include "gammabench/cli/commands.hpp"

using namespace gammabench::cli;

int main(int argc, char** argv) {
  CLI::App app{"Spectral-element benchmark harness and Gamma performance model"};
  app.require_subcommand(1);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run a campaign from the config file");
  b->add_option("--config", bench.config_path, "Config file (default: $GAMMABENCH_CONFIG)");
  b->add_option("--campaign", bench.campaign, "Campaign name")->required();
  b->add_option("--mode", bench.mode, "sim or exec")->check(CLI::IsMember({"sim", "exec", "simulated", "executed"}));
  b->add_option("--seed", bench.seed, "Seed for usage jitter and schedule pauses");
  b->add_option("--out", bench.out_dir, "Output directory");

  PredictArgs predict;
  auto* p = app.add_subcommand("predict", "Predict T_P, T_C, T_L, Gamma, S and E for one case");
  p->add_option("--config", predict.config_path, "Config file (default: $GAMMABENCH_CONFIG)");
  p->add_option("machine", predict.machine, "Machine profile name")->required();
  p->add_option("--ex", predict.elements[0], "Elements along x");
  p->add_option("--ey", predict.elements[1], "Elements along y");
  p->add_option("--ez", predict.elements[2], "Elements along z");
  p->add_option("-N,--degree", predict.degree, "Polynomial degree");
  p->add_option("--nv", predict.fields, "Fields per grid point");
  p->add_option("-P,--ranks", predict.ranks, "Rank count");
  p->add_option("--iterations", predict.iterations, "CG iterations per step");
  bool table = false;
  p->add_flag("--table", table, "Aligned table instead of JSON");

  CalibrateArgs calibrate;
  auto* c = app.add_subcommand("calibrate", "Fit W, alpha and T_L to measured Gamma values");
  c->add_option("table", calibrate.input_path, "CSV or JSON table")->required()->check(CLI::ExistingFile);
  c->add_option("--b1", calibrate.base_bandwidth_mbs, "Base bandwidth [MB/s]");
  c->add_option("--out", calibrate.out_path, "JSON artifact path");

  AnalyzeArgs analyze;
  auto* a = app.add_subcommand("analyze", "Histogram of per-window CPU usage");
  a->add_option("samples", analyze.samples_path, "CSV: timestamp, usage")->required()->check(CLI::ExistingFile);
  a->add_option("--bin-width", analyze.bin_width, "Histogram bin width");
  a->add_option("--cores-per-node", analyze.cores_per_node, "Cores per node of the readings");
  a->add_option("--active-ranks", analyze.active_ranks, "Active ranks per node");
  a->add_option("--out", analyze.out_path, "Histogram data file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  if (*b) return cmd_bench(bench, std::cout, std::cerr);
  if (*p) {
    predict.json = !table;
    return cmd_predict(predict, std::cout, std::cerr);
  }
  if (*c) return cmd_calibrate(calibrate, std::cout, std::cerr);
  return cmd_analyze(analyze, std::cout, std::cerr);
}
