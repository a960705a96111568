#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gammabench/model/gamma.hpp"

namespace gammabench::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitRunFailure = 3,
  kExitDegenerate = 4,
};

struct BenchArgs {
  std::optional<std::string> config_path;
  std::string campaign;
  std::optional<std::string> mode;  // "sim" or "exec"
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

struct PredictArgs {
  std::optional<std::string> config_path;
  std::string machine;
  std::array<int, 3> elements{8, 8, 8};
  int degree = 8;
  int fields = 1;
  int ranks = 1;
  std::optional<int> iterations;  // CG iterations per step; config default otherwise
  bool json = true;
};

struct CalibrateArgs {
  std::string input_path;
  double base_bandwidth_mbs = 12.0;
  std::optional<std::string> out_path;
};

struct AnalyzeArgs {
  std::string samples_path;
  double bin_width = model::kDefaultBinWidth;
  std::optional<int> cores_per_node;
  std::optional<int> active_ranks;
  std::optional<std::string> out_path;
};

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);
int cmd_predict(const PredictArgs& args, std::ostream& out, std::ostream& err);
int cmd_calibrate(const CalibrateArgs& args, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err);

/// Reads a calibration table: CSV with columns name, T_P, gamma,
/// bandwidth_model, sharing; or JSON, either an array of such objects or
/// {"base_bandwidth_mbs": b, "inputs": [...]}.
std::vector<model::CalibrationInput> read_calibration_table(const std::string& path,
                                                            std::optional<double>* base_bandwidth = nullptr);

/// Reads usage samples from CSV rows "timestamp, usage" (header optional).
std::vector<double> read_usage_samples(const std::string& path);

/// One parsed row of a summary CSV written by cmd_bench.
struct SummaryRow {
  int ranks = 0;
  double degree = 0.0;
  double mflops = 0.0;
  double walltime = 0.0;
  double efficiency = 0.0;
  double speedup = 0.0;
};
std::vector<SummaryRow> parse_summary_csv(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gammabench::cli
