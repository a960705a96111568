#include "gammabench/harness/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "gammabench/errors.hpp"
#include "gammabench/io/csv.hpp"
#include "gammabench/sem/work_unit.hpp"

namespace gammabench::harness {

namespace {

std::uint64_t step_flops(const CaseConfig& config, const partition::PartitionPlan& plan) {
  std::uint64_t total = 0;
  for (const auto& elems : plan.rank_elements) {
    total += sem::fixed_step_flops(config, static_cast<std::int64_t>(elems.size())).total();
  }
  return total;
}

RunRecord blank_record(const CampaignSpec& spec, const CaseConfig& config,
                       const partition::PartitionPlan& plan) {
  RunRecord r;
  r.campaign = spec.name;
  r.kind = spec.kind;
  r.mode = spec.mode;
  r.config = config;
  r.ranks = plan.ranks;
  r.grid = plan.grid;
  r.cut_faces = static_cast<std::int64_t>(plan.cut_faces.size());
  r.machine = spec.machine;
  return r;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

int windows_in(double seconds, double window) {
  if (!(window > 0.0)) throw InvalidArgumentError("usage window must be positive");
  return static_cast<int>(std::floor(seconds / window + 1e-9));
}

void summarise(RunRecord& r, const CampaignSpec& spec) {
  r.steps_completed = static_cast<int>(r.steps.size());
  if (r.steps.empty()) return;
  const StepRecord& s = r.canonical(spec.canonical_step);
  r.walltime = s.walltime;
  r.efficiency = r.reference_time / (r.ranks * s.walltime);
  r.speedup = r.efficiency * r.ranks;
  const double overhead = s.communication + s.latency;
  r.gamma = overhead > 0.0 ? s.compute / overhead : partition::kSaturated;
  r.gflops = static_cast<double>(s.flops) / s.walltime / 1e9;
  r.mflops_per_rank = s.compute > 0.0 ? static_cast<double>(s.flops) / r.ranks / s.compute / 1e6 : 0.0;
}

RunRecord simulate_run(const CampaignSpec& spec, const CaseConfig& config, int ranks,
                       std::uint64_t salt) {
  const auto plan = partition::partition_elements(config, ranks);
  const auto one = partition::partition_elements(config, 1);
  const SimulatedStep step = simulate_step(config, plan, spec.machine);
  RunRecord r = blank_record(spec, config, plan);
  r.reference_time = simulate_step(config, one, spec.machine).time.total;
  for (int k = 1; k <= config.steps; ++k) {
    r.steps.push_back({k, step.time.total, step.time.compute, step.time.communication,
                       step.time.latency, step.flops, step.words,
                       static_cast<std::uint64_t>(step.messages_per_step)});
  }
  summarise(r, spec);
  const double busy = step.time.compute / step.time.total;
  r.usage_samples = sample_usage(busy, std::max(1, windows_in(config.steps * step.time.total,
                                                              spec.window_seconds)),
                                 spec.usage_jitter, mix_seed(spec.seed, salt));
  return r;
}

RunRecord execute_run(const CampaignSpec& spec, const CaseConfig& config, int ranks,
                      double time_budget = 0.0) {
  const auto plan = partition::partition_elements(config, ranks);
  sem::WorkUnitOptions options;
  options.time_budget_seconds = time_budget;
  LoopbackNetwork network(ranks, spec.seed);
  const sem::StepReport report = sem::cg_work_unit(config, plan, network, options);

  RunRecord r = blank_record(spec, config, plan);
  const int steps = report.steps_completed();
  for (int k = 0; k < steps; ++k) {
    StepRecord s;
    s.step = k + 1;
    double busy = 0.0;
    for (const auto& rank : report.ranks) {
      const auto& rs = rank.steps[static_cast<std::size_t>(k)];
      s.walltime = std::max(s.walltime, rs.wall_seconds);
      s.compute = std::max(s.compute, rs.compute_seconds);
      s.communication = std::max(s.communication, rs.comm_seconds);
      busy += rs.wall_seconds > 0.0 ? rs.compute_seconds / rs.wall_seconds : 1.0;
    }
    s.flops = report.flops(k).total();
    s.words = report.words_sent(k);
    s.messages = report.messages_sent(k);
    r.noise_bound = std::max(r.noise_bound, std::abs(s.walltime - (s.compute + s.communication)));
    r.steps.push_back(s);
    r.usage_samples.push_back(std::clamp(busy / ranks, 0.0, 1.0));
  }
  return r;
}

double executed_reference(const CampaignSpec& spec, const CaseConfig& config) {
  RunRecord one = execute_run(spec, config, 1);
  if (one.steps.empty()) throw InvalidArgumentError("reference run completed no steps");
  return one.canonical(spec.canonical_step).walltime;
}

RunRecord run_one(const CampaignSpec& spec, const CaseConfig& config, int ranks,
                  std::uint64_t salt) {
  if (spec.mode == RunMode::simulated) return simulate_run(spec, config, ranks, salt);
  RunRecord r = execute_run(spec, config, ranks);
  r.reference_time = ranks == 1 && !r.steps.empty() ? r.canonical(spec.canonical_step).walltime
                                                    : executed_reference(spec, config);
  summarise(r, spec);
  return r;
}

void check_common(const CampaignSpec& spec) {
  spec.base.validate();
  spec.machine.validate();
  if (spec.canonical_step < 1) throw SpecInvalidError("canonical step must be >= 1");
  if (spec.usage_jitter < 0.0 || spec.usage_jitter > 1.0) {
    throw SpecInvalidError("usage jitter must lie in [0, 1]");
  }
}

}  // namespace

RunMode parse_run_mode(const std::string& text) {
  if (text == "simulated" || text == "sim") return RunMode::simulated;
  if (text == "executed" || text == "exec") return RunMode::executed;
  throw InvalidArgumentError(fmt::format("unknown run mode '{}'", text));
}

std::string to_string(RunMode mode) {
  return mode == RunMode::simulated ? "simulated" : "executed";
}

CampaignKind parse_campaign_kind(const std::string& text) {
  if (text == "strong") return CampaignKind::strong;
  if (text == "weak") return CampaignKind::weak;
  if (text == "degree_sweep") return CampaignKind::degree_sweep;
  if (text == "time_budget") return CampaignKind::time_budget;
  throw InvalidArgumentError(fmt::format("unknown campaign kind '{}'", text));
}

std::string to_string(CampaignKind kind) {
  switch (kind) {
    case CampaignKind::strong: return "strong";
    case CampaignKind::weak: return "weak";
    case CampaignKind::degree_sweep: return "degree_sweep";
    case CampaignKind::time_budget: return "time_budget";
  }
  return "strong";
}

const StepRecord& RunRecord::canonical(int canonical_step) const {
  if (steps.empty()) throw NoDataError(fmt::format("run of campaign '{}' has no steps", campaign));
  const auto k = std::clamp(canonical_step, 1, static_cast<int>(steps.size()));
  return steps[static_cast<std::size_t>(k - 1)];
}

SimulatedStep simulate_step(const CaseConfig& config, const partition::PartitionPlan& plan,
                            const MachineProfile& machine) {
  SimulatedStep s;
  s.flops = step_flops(config, plan);
  s.words = static_cast<std::uint64_t>(partition::words_per_step(plan, config, config.cg_iters_per_step));
  s.messages_per_step =
      static_cast<std::int64_t>(config.cg_iters_per_step) * plan.max_neighbor_count();
  s.app = partition::AppProfile::from_counts(s.flops, s.words);
  s.time = model::predict_time(machine, s.app, plan.ranks, s.messages_per_step, config.mean_degree());
  return s;
}

std::vector<RunRecord> run_strong_scaling(const CampaignSpec& spec) {
  check_common(spec);
  if (spec.ranks.empty()) throw SpecInvalidError(fmt::format("campaign '{}' lists no rank counts", spec.name));
  std::vector<RunRecord> out;
  for (std::size_t i = 0; i < spec.ranks.size(); ++i) {
    out.push_back(run_one(spec, spec.base, spec.ranks[i], i));
  }
  return out;
}

std::vector<RunRecord> run_weak_scaling(const CampaignSpec& spec) {
  check_common(spec);
  if (spec.scales.empty()) throw SpecInvalidError(fmt::format("campaign '{}' lists no scale points", spec.name));
  std::int64_t per_rank = -1;
  for (const auto& p : spec.scales) {
    CaseConfig c = spec.base;
    c.elements = p.elements;
    if (p.ranks < 1 || c.element_count() % p.ranks != 0 ||
        (per_rank >= 0 && c.element_count() / p.ranks != per_rank)) {
      throw SpecInvalidError(fmt::format(
          "weak scaling needs a constant element count per rank; {}x{}x{} on {} ranks breaks it",
          p.elements[0], p.elements[1], p.elements[2], p.ranks));
    }
    per_rank = c.element_count() / p.ranks;
  }
  std::vector<RunRecord> out;
  for (std::size_t i = 0; i < spec.scales.size(); ++i) {
    CaseConfig c = spec.base;
    c.elements = spec.scales[i].elements;
    out.push_back(run_one(spec, c, spec.scales[i].ranks, i));
  }
  return out;
}

std::vector<RunRecord> run_degree_sweep(const CampaignSpec& spec) {
  check_common(spec);
  if (spec.degrees.empty()) throw SpecInvalidError(fmt::format("campaign '{}' lists no degrees", spec.name));
  const int ranks = spec.ranks.empty() ? 1 : spec.ranks.front();
  std::vector<RunRecord> out;
  for (std::size_t i = 0; i < spec.degrees.size(); ++i) {
    CaseConfig c = spec.base;
    c.degree = {spec.degrees[i], spec.degrees[i], spec.degrees[i]};
    c.validate();
    out.push_back(run_one(spec, c, ranks, i));
  }
  return out;
}

RunRecord run_time_budget(const CampaignSpec& spec) {
  check_common(spec);
  if (!(spec.budget_seconds > 0.0)) {
    throw SpecInvalidError(fmt::format("campaign '{}' needs a positive time budget", spec.name));
  }
  const int ranks = spec.ranks.empty() ? 1 : spec.ranks.front();
  RunRecord r;
  if (spec.mode == RunMode::simulated) {
    const auto plan = partition::partition_elements(spec.base, ranks);
    const SimulatedStep step = simulate_step(spec.base, plan, spec.machine);
    r = blank_record(spec, spec.base, plan);
    r.reference_time =
        simulate_step(spec.base, partition::partition_elements(spec.base, 1), spec.machine).time.total;
    const int steps = static_cast<int>(std::floor(spec.budget_seconds / step.time.total + 1e-9));
    for (int k = 1; k <= steps; ++k) {
      r.steps.push_back({k, step.time.total, step.time.compute, step.time.communication,
                         step.time.latency, step.flops, step.words,
                         static_cast<std::uint64_t>(step.messages_per_step)});
    }
    summarise(r, spec);
    if (steps > 0) {
      r.usage_samples = sample_usage(step.time.compute / step.time.total,
                                     windows_in(spec.budget_seconds, spec.window_seconds),
                                     spec.usage_jitter, mix_seed(spec.seed, 0));
    }
  } else {
    r = execute_run(spec, spec.base, ranks, spec.budget_seconds);
    if (!r.steps.empty()) {
      r.reference_time = executed_reference(spec, spec.base);
      summarise(r, spec);
    }
  }
  if (r.steps.empty()) {
    r.warning = true;
    r.warning_message = fmt::format("time budget {} s is shorter than one step", spec.budget_seconds);
  }
  return r;
}

std::vector<RunRecord> run_campaign(const CampaignSpec& spec) {
  switch (spec.kind) {
    case CampaignKind::strong: return run_strong_scaling(spec);
    case CampaignKind::weak: return run_weak_scaling(spec);
    case CampaignKind::degree_sweep: return run_degree_sweep(spec);
    case CampaignKind::time_budget: return {run_time_budget(spec)};
  }
  return {};
}

std::vector<double> sample_usage(double base, int windows, double jitter, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(windows, 0)));
  for (int i = 0; i < windows; ++i) {
    // Top 53 bits map to [0,1) the same way on every platform.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    out.push_back(std::clamp(base + jitter * (2.0 * u - 1.0), 0.0, 1.0));
  }
  return out;
}

MachineProfile tune_core_rate(MachineProfile machine, const CaseConfig& config,
                              double step_seconds) {
  if (!(step_seconds > 0.0)) throw InvalidArgumentError("target step time must be positive");
  const double flops = static_cast<double>(sem::fixed_step_flops(config, config.element_count()).total());
  const double needed = flops / step_seconds / 1e6;
  const double n = config.mean_degree();
  machine.core_rate_mflops =
      machine.rate_shape == 0.0 ? needed : needed / (1.0 - machine.rate_shape / (n + 1.0));
  machine.validate();
  return machine;
}

int fit_iteration_budget(const MachineProfile& machine, CaseConfig config, double step_seconds,
                         const std::vector<std::pair<int, double>>& targets) {
  if (targets.empty()) throw NoDataError("no (P, E) targets to fit");
  // With the rate re-tuned to the one-rank step time, 1/Gamma(P) grows
  // linearly in the iteration budget; evaluate the slope at a unit budget.
  config.cg_iters_per_step = 1;
  const MachineProfile tuned = tune_core_rate(machine, config, step_seconds);
  double num = 0.0;
  double den = 0.0;
  for (const auto& [ranks, e] : targets) {
    if (!(e > 0.0) || !(e < 1.0)) throw OutOfRangeError(fmt::format("target efficiency {} outside (0,1)", e));
    const auto plan = partition::partition_elements(config, ranks);
    const SimulatedStep s = simulate_step(config, plan, tuned);
    const double slope = (s.time.communication + s.time.latency) * ranks / step_seconds;
    const double y = 1.0 / e - 1.0;
    num += slope * y;
    den += slope * slope;
  }
  if (!(den > 0.0)) throw CalibrationDegenerateError("targets carry no communication to fit against");
  return static_cast<int>(std::lround(num / den));
}

std::pair<double, double> fit_rate_shape(const std::vector<std::pair<int, double>>& points) {
  if (points.size() < 2) throw NoDataError("need at least two (N, rate) points");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(points.size()), 2);
  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    a(k, 0) = 1.0;
    a(k, 1) = 1.0 / (points[i].first + 1.0);
    y(k) = points[i].second;
  }
  const Eigen::Vector2d x = a.colPivHouseholderQr().solve(y);
  if (!(x(0) > 0.0)) throw CalibrationDegenerateError("fitted peak rate is not positive");
  return {x(0), -x(1) / x(0)};
}

nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : r.steps) {
    steps.push_back({{"step", s.step}, {"T", s.walltime}, {"T_P", s.compute},
                     {"T_C", s.communication}, {"T_L", s.latency}, {"flops", s.flops},
                     {"words", s.words}, {"messages", s.messages}});
  }
  nlohmann::json machine = model::to_json(r.machine);
  machine["name"] = r.machine.name;
  return {{"campaign", r.campaign},
          {"kind", to_string(r.kind)},
          {"mode", to_string(r.mode)},
          {"elements", r.config.elements},
          {"degree", r.config.degree},
          {"fields", r.config.fields},
          {"cg_iters_per_step", r.config.cg_iters_per_step},
          {"ranks", r.ranks},
          {"grid", r.grid},
          {"cut_faces", r.cut_faces},
          {"machine", machine},
          {"steps_completed", r.steps_completed},
          {"walltime", r.walltime},
          {"reference_time", r.reference_time},
          {"efficiency", r.efficiency},
          {"speedup", r.speedup},
          {"gamma", model::gamma_json(r.gamma)},
          {"gflops", r.gflops},
          {"mflops_per_rank", r.mflops_per_rank},
          {"noise_bound", r.noise_bound},
          {"warning", r.warning ? nlohmann::json(r.warning_message) : nlohmann::json(nullptr)},
          {"usage_samples", r.usage_samples},
          {"steps", steps}};
}

nlohmann::json to_json(const std::vector<RunRecord>& records) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : records) out.push_back(to_json(r));
  return out;
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
  using io::format_double;
  std::string out = io::csv_line({"campaign", "kind", "mode", "machine", "P", "Ex", "Ey", "Ez", "Nx",
                                  "Ny", "Nz", "fields", "row", "T", "T_P", "T_C", "T_L", "flops",
                                  "words", "messages", "E", "S", "gamma"});
  for (const auto& r : records) {
    const io::CsvRow head{r.campaign,
                          to_string(r.kind),
                          to_string(r.mode),
                          r.machine.name,
                          std::to_string(r.ranks),
                          std::to_string(r.config.elements[0]),
                          std::to_string(r.config.elements[1]),
                          std::to_string(r.config.elements[2]),
                          std::to_string(r.config.degree[0]),
                          std::to_string(r.config.degree[1]),
                          std::to_string(r.config.degree[2]),
                          std::to_string(r.config.fields)};
    for (const auto& s : r.steps) {
      io::CsvRow row = head;
      const double overhead = s.communication + s.latency;
      row.insert(row.end(), {std::to_string(s.step), format_double(s.walltime),
                             format_double(s.compute), format_double(s.communication),
                             format_double(s.latency), std::to_string(s.flops),
                             std::to_string(s.words), std::to_string(s.messages), "", "",
                             format_double(overhead > 0.0 ? s.compute / overhead : partition::kSaturated)});
      out += io::csv_line(row);
    }
    if (r.steps.empty()) continue;
    io::CsvRow row = head;
    row.insert(row.end(), {"summary", format_double(r.walltime), "", "", "", "", "", "",
                           format_double(r.efficiency), format_double(r.speedup),
                           format_double(r.gamma)});
    out += io::csv_line(row);
  }
  return out;
}

std::string summary_csv(const std::vector<RunRecord>& records) {
  using io::format_double;
  std::string out = io::csv_line({"P", "N", "MFlops", "walltime", "E", "S"});
  for (const auto& r : records) {
    if (r.steps.empty()) continue;
    out += io::csv_line({std::to_string(r.ranks), format_double(r.config.mean_degree()),
                         format_double(r.gflops * 1e3), format_double(r.walltime),
                         format_double(r.efficiency), format_double(r.speedup)});
  }
  return out;
}

std::string summary_table(const std::vector<RunRecord>& records) {
  std::string out = fmt::format("{:>6} {:>4} {:>12} {:>12} {:>7} {:>8} {:>9}\n", "P", "N", "MFlops",
                                "walltime[s]", "E", "S", "Gamma");
  for (const auto& r : records) {
    if (r.steps.empty()) {
      out += fmt::format("{:>6} {:>4} {}\n", r.ranks, r.config.mean_degree(), r.warning_message);
      continue;
    }
    const std::string gamma = partition::is_saturated(r.gamma) ? "inf" : fmt::format("{:.3f}", r.gamma);
    out += fmt::format("{:>6} {:>4} {:>12.1f} {:>12.4f} {:>7.3f} {:>8.3f} {:>9}\n", r.ranks,
                       r.config.mean_degree(), r.gflops * 1e3, r.walltime, r.efficiency, r.speedup,
                       gamma);
  }
  return out;
}

}  // namespace gammabench::harness
