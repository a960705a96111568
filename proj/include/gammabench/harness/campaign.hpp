#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gammabench/model/gamma.hpp"
#include "gammabench/partition/partition.hpp"
#include "gammabench/sem/case_config.hpp"

namespace gammabench::harness {

using model::MachineProfile;
using sem::CaseConfig;

enum class RunMode { simulated, executed };
enum class CampaignKind { strong, weak, degree_sweep, time_budget };

RunMode parse_run_mode(const std::string& text);
std::string to_string(RunMode mode);
CampaignKind parse_campaign_kind(const std::string& text);
std::string to_string(CampaignKind kind);

/// One point of a weak-scaling sweep.
struct ScalePoint {
  std::array<int, 3> elements{1, 1, 1};
  int ranks = 1;
};

struct CampaignSpec {
  std::string name;
  CampaignKind kind = CampaignKind::strong;
  CaseConfig base;
  std::vector<int> ranks;          // strong; first entry for degree_sweep and time_budget
  std::vector<ScalePoint> scales;  // weak
  std::vector<int> degrees;        // degree_sweep
  MachineProfile machine;
  double budget_seconds = 0.0;     // time_budget
  double window_seconds = model::kDefaultWindowSeconds;
  double usage_jitter = 0.02;
  std::uint64_t seed = 0;
  RunMode mode = RunMode::simulated;
  /// 1-based step reported as the canonical one; later steps skip warm-up.
  int canonical_step = 4;
};

struct StepRecord {
  int step = 0;  // 1-based
  double walltime = 0.0;
  double compute = 0.0;        // T_P
  double communication = 0.0;  // T_C
  double latency = 0.0;        // T_L
  std::uint64_t flops = 0;
  std::uint64_t words = 0;
  std::uint64_t messages = 0;
};

struct RunRecord {
  std::string campaign;
  CampaignKind kind = CampaignKind::strong;
  RunMode mode = RunMode::simulated;
  CaseConfig config;
  int ranks = 1;
  std::array<int, 3> grid{1, 1, 1};
  std::int64_t cut_faces = 0;
  MachineProfile machine;

  std::vector<StepRecord> steps;
  std::vector<double> usage_samples;  // per-window efficiency
  int steps_completed = 0;

  // Canonical-step summary.
  double walltime = 0.0;
  double reference_time = 0.0;  // T_1 of the same case on one rank
  double efficiency = 0.0;      // T_1 / (P T)
  double speedup = 0.0;         // E P
  double gamma = 0.0;           // T_P / (T_C + T_L), kSaturated without communication
  double gflops = 0.0;          // aggregate flops / walltime
  double mflops_per_rank = 0.0; // per-rank flops / T_P
  /// Executed mode: max |T - (T_P + T_C + T_L)| over steps. Zero when simulated.
  double noise_bound = 0.0;

  bool warning = false;
  std::string warning_message;

  const StepRecord& canonical(int canonical_step) const;
};

/// Simulated per-step timing of a case on a partition.
struct SimulatedStep {
  model::TimeDecomposition time;
  partition::AppProfile app;
  std::int64_t messages_per_step = 0;
  std::uint64_t flops = 0;
  std::uint64_t words = 0;
};

/// Per-step counts from the instrumented flop model and the partition;
/// time from predict_time. Messages per step are the busiest rank's face
/// messages: cg_iters_per_step * max neighbour count.
SimulatedStep simulate_step(const CaseConfig& config, const partition::PartitionPlan& plan,
                            const MachineProfile& machine);

std::vector<RunRecord> run_strong_scaling(const CampaignSpec& spec);
std::vector<RunRecord> run_weak_scaling(const CampaignSpec& spec);
std::vector<RunRecord> run_degree_sweep(const CampaignSpec& spec);
RunRecord run_time_budget(const CampaignSpec& spec);
std::vector<RunRecord> run_campaign(const CampaignSpec& spec);

/// Deterministic usage sampler: `windows` samples of base +- jitter,
/// clamped to [0,1].
std::vector<double> sample_usage(double base, int windows, double jitter, std::uint64_t seed);

/// Returns `machine` with its peak rate set so one rank needs exactly
/// `step_seconds` per step of `config`.
MachineProfile tune_core_rate(MachineProfile machine, const CaseConfig& config,
                              double step_seconds);

/// Least-squares CG iteration budget reproducing target (P, E) pairs when
/// the core rate is re-tuned to `step_seconds` on one rank.
int fit_iteration_budget(const MachineProfile& machine, CaseConfig config, double step_seconds,
                         const std::vector<std::pair<int, double>>& targets);

/// Fits rate(N) = peak (1 - c / (N + 1)) to (N, MFlop/s) pairs by linear
/// least squares in (peak, peak c). Returns {peak, c}.
std::pair<double, double> fit_rate_shape(const std::vector<std::pair<int, double>>& points);

nlohmann::json to_json(const RunRecord& record);
nlohmann::json to_json(const std::vector<RunRecord>& records);

/// Flat CSV: header, one row per step and one summary row per record.
std::string records_to_csv(const std::vector<RunRecord>& records);
/// Summary table mirroring a strong-scaling report: P, N, MFlops, walltime, E, S.
std::string summary_csv(const std::vector<RunRecord>& records);
std::string summary_table(const std::vector<RunRecord>& records);

}  // namespace gammabench::harness
