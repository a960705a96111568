#include "gammabench/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "gammabench/cli/config.hpp"
#include "gammabench/errors.hpp"
#include "gammabench/harness/campaign.hpp"
#include "gammabench/io/csv.hpp"

namespace gammabench::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool is_input_error(const std::exception& e) {
  return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgumentError*>(&e) ||
         dynamic_cast<const NoDataError*>(&e) || dynamic_cast<const OutOfRangeError*>(&e) ||
         dynamic_cast<const SpecInvalidError*>(&e) || dynamic_cast<const json::exception*>(&e);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool looks_like_json(const std::string& path, const std::string& text) {
  if (fs::path(path).extension() == ".json") return true;
  const auto first = text.find_first_not_of(" \t\r\n");
  return first != std::string::npos && (text[first] == '{' || text[first] == '[');
}

model::CalibrationInput input_from_json(const json& j) {
  model::CalibrationInput in;
  in.name = j.value("name", std::string());
  in.compute_time = j.at("T_P").get<double>();
  in.gamma = j.at("gamma").get<double>();
  in.model = model::parse_bandwidth_model(j.value("bandwidth_model", std::string("base")));
  in.sharing = j.value("sharing", 1);
  return in;
}

std::string usage_csv(const harness::RunRecord& r, double window) {
  std::string out = io::csv_line({"timestamp", "usage"});
  for (std::size_t i = 0; i < r.usage_samples.size(); ++i) {
    out += io::csv_line({io::format_double(static_cast<double>(i + 1) * window),
                         io::format_double(r.usage_samples[i])});
  }
  return out;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgumentError(fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgumentError(fmt::format("cannot write '{}'", path));
  out << text;
  if (!out) throw InvalidArgumentError(fmt::format("write to '{}' failed", path));
}

std::vector<model::CalibrationInput> read_calibration_table(const std::string& path,
                                                            std::optional<double>* base_bandwidth) {
  const std::string text = read_text_file(path);
  std::vector<model::CalibrationInput> inputs;
  if (looks_like_json(path, text)) {
    const json doc = json::parse(text);
    const json* rows = &doc;
    if (doc.is_object()) {
      if (base_bandwidth && doc.contains("base_bandwidth_mbs")) {
        *base_bandwidth = doc.at("base_bandwidth_mbs").get<double>();
      }
      rows = &doc.at("inputs");
    }
    for (const auto& row : *rows) inputs.push_back(input_from_json(row));
    return inputs;
  }

  const auto rows = io::parse_csv(text);
  if (rows.empty()) throw NoDataError(fmt::format("'{}' holds no rows", path));
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[lower(rows[0][i])] = i;
  for (const char* key : {"name", "t_p", "gamma"}) {
    if (!col.count(key)) throw InvalidArgumentError(fmt::format("'{}' lacks a '{}' column", path, key));
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto cell = [&](const char* key) -> std::string {
      const auto it = col.find(key);
      if (it == col.end() || it->second >= row.size()) return {};
      return row[it->second];
    };
    model::CalibrationInput in;
    in.name = cell("name");
    in.compute_time = io::parse_double(cell("t_p"));
    in.gamma = io::parse_double(cell("gamma"));
    const std::string bm = cell("bandwidth_model");
    in.model = model::parse_bandwidth_model(bm.empty() ? "base" : bm);
    const std::string sh = cell("sharing");
    in.sharing = sh.empty() ? 1 : static_cast<int>(io::parse_double(sh));
    inputs.push_back(in);
  }
  return inputs;
}

std::vector<double> read_usage_samples(const std::string& path) {
  const auto rows = io::parse_csv(read_text_file(path));
  std::vector<double> samples;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string& cell = row.size() >= 2 ? row[1] : row[0];
    if (r == 0) {
      try {
        io::parse_double(cell);
      } catch (const InvalidArgumentError&) {
        continue;  // header
      }
    }
    samples.push_back(io::parse_double(cell));
  }
  return samples;
}

std::vector<SummaryRow> parse_summary_csv(const std::string& text) {
  const auto rows = io::parse_csv(text);
  if (rows.empty() || rows[0] != io::CsvRow{"P", "N", "MFlops", "walltime", "E", "S"}) {
    throw InvalidArgumentError("not a summary table");
  }
  std::vector<SummaryRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 6) throw InvalidArgumentError(fmt::format("summary row {} has {} fields", r, row.size()));
    out.push_back({static_cast<int>(io::parse_double(row[0])), io::parse_double(row[1]),
                   io::parse_double(row[2]), io::parse_double(row[3]), io::parse_double(row[4]),
                   io::parse_double(row[5])});
  }
  return out;
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  harness::CampaignSpec spec;
  std::string out_dir;
  ToolConfig config;
  try {
    config = resolve_tool_config(args.config_path);
    spec = config.campaign(args.campaign);
    if (args.mode) spec.mode = harness::parse_run_mode(*args.mode);
    if (args.seed) spec.seed = *args.seed;
    out_dir = args.out_dir.value_or(config.output_dir);
    fs::create_directories(out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  std::vector<harness::RunRecord> records;
  try {
    records = harness::run_campaign(spec);
  } catch (const std::exception& e) {
    err << fmt::format("error: campaign '{}' failed: {}\n", spec.name, e.what());
    return kExitRunFailure;
  }

  try {
    const fs::path dir(out_dir);
    if (config.wants("json")) {
      write_text_file((dir / (spec.name + "_records.json")).string(),
                      harness::to_json(records).dump(2) + "\n");
    }
    if (config.wants("csv")) {
      write_text_file((dir / (spec.name + "_steps.csv")).string(), harness::records_to_csv(records));
      write_text_file((dir / (spec.name + "_summary.csv")).string(), harness::summary_csv(records));
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].usage_samples.empty()) continue;
      const std::string stem = records.size() == 1 ? spec.name : fmt::format("{}_{}", spec.name, i);
      write_text_file((dir / (stem + "_usage.csv")).string(), usage_csv(records[i], spec.window_seconds));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  out << fmt::format("campaign {} ({}, {}, machine {})\n", spec.name, harness::to_string(spec.kind),
                     harness::to_string(spec.mode), spec.machine.name);
  out << harness::summary_table(records);
  for (const auto& r : records) {
    if (r.warning) err << "warning: " << r.warning_message << '\n';
  }
  return kExitOk;
}

int cmd_predict(const PredictArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const ToolConfig config = resolve_tool_config(args.config_path);
    const model::MachineProfile& machine = config.machine(args.machine);
    sem::CaseConfig c = config.default_case;
    c.elements = args.elements;
    c.degree = {args.degree, args.degree, args.degree};
    c.fields = args.fields;
    if (args.iterations) c.cg_iters_per_step = *args.iterations;
    c.validate();
    const auto plan = partition::partition_elements(c, args.ranks);
    const auto step = harness::simulate_step(c, plan, machine);
    const auto gamma = model::gamma_from_times(step.time);
    const double e = model::efficiency(gamma);
    const double s = model::predict_speedup(args.ranks, gamma);
    if (args.json) {
      json j = model::to_json(step.time);
      j["machine"] = machine.name;
      j["P"] = args.ranks;
      j["gamma"] = model::gamma_json(gamma.value());
      j["gamma_a"] = model::gamma_json(step.app.gamma_a);
      j["S"] = s;
      j["E"] = e;
      out << j.dump(2) << '\n';
    } else {
      out << fmt::format("{:<10} {:>14}\n", "machine", machine.name);
      for (const auto& [k, v] : {std::pair{"T", step.time.total}, {"T_P", step.time.compute},
                                 {"T_C", step.time.communication}, {"T_L", step.time.latency},
                                 {"gamma", gamma.value()}, {"S", s}, {"E", e}}) {
        out << fmt::format("{:<10} {:>14.6g}\n", k, v);
      }
    }
    return kExitOk;
  } catch (const OverDecompositionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return is_input_error(e) ? kExitInputError : kExitRunFailure;
  }
}

int cmd_calibrate(const CalibrateArgs& args, std::ostream& out, std::ostream& err) {
  std::vector<model::CalibrationInput> inputs;
  double b1 = args.base_bandwidth_mbs;
  try {
    std::optional<double> from_file;
    inputs = read_calibration_table(args.input_path, &from_file);
    if (from_file) b1 = *from_file;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  try {
    const model::GammaFit fit = model::calibrate(inputs, b1);
    const json j = model::to_json(fit);
    const std::string path =
        args.out_path.value_or((fs::path(args.input_path).parent_path() /
                                (fs::path(args.input_path).stem().string() + "_fit.json"))
                                   .string());
    write_text_file(path, j.dump(2) + "\n");
    out << j.dump(2) << '\n';
    return kExitOk;
  } catch (const CalibrationDegenerateError& e) {
    err << "calibration degenerate: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
  try {
    std::vector<double> samples = read_usage_samples(args.samples_path);
    bool capped = false;
    if (args.cores_per_node || args.active_ranks) {
      const int cores = args.cores_per_node.value_or(1);
      const int active = args.active_ranks.value_or(cores);
      for (auto& s : samples) {
        const auto n = model::normalize_node_usage(s, active, cores);
        s = n.usage;
        capped = capped || n.saturated;
      }
    }
    const model::UsageHistogram h = model::analyze_usage_histogram(samples, args.bin_width);
    std::string dat = "# usage count\n";
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      dat += fmt::format("{} {}\n", io::format_double(h.lower_edge(k)), h.counts[k]);
    }
    const fs::path in(args.samples_path);
    const std::string path =
        args.out_path.value_or((in.parent_path() / (in.stem().string() + "_hist.dat")).string());
    write_text_file(path, dat);
    json j{{"samples", samples.size()},
           {"mean_efficiency", h.mean},
           {"gamma", model::gamma_json(h.gamma)},
           {"bins", h.counts.size()},
           {"histogram", path}};
    if (capped) j["capped_samples"] = true;
    out << j.dump(2) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace gammabench::cli
