#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gammabench/partition/partition.hpp"

namespace gammabench::model {

using partition::AppProfile;
using partition::is_saturated;
using partition::kSaturated;

inline constexpr double kBytesPerWord = 8.0;
inline constexpr double kBytesPerMB = 1e6;

/// Compute and network characteristics of one machine.
///
/// The per-rank compute rate depends on the polynomial degree through
/// rate(N) = core_rate_mflops * (1 - rate_shape / (N + 1)); rate_shape = 0
/// gives a degree-independent rate.
struct MachineProfile {
  std::string name;
  double core_rate_mflops = 1000.0;
  double rate_shape = 0.0;
  double bandwidth_mbs = 100.0;  // b, per link [MB/s]
  double latency_s = 0.0;        // L, per message [s]
  int cores_per_node = 1;
  int link_sharing = 1;          // s, ranks per node sharing one link

  /// Throws InvalidArgumentError when an invariant is violated.
  void validate() const;
  double effective_bandwidth_mbs() const { return bandwidth_mbs / link_sharing; }
  /// Per-rank compute rate at polynomial degree N [MFlop/s].
  double core_rate_at(double degree) const;
};

/// Per-step time split [s].
struct TimeDecomposition {
  double total = 0.0;
  double compute = 0.0;        // T_P
  double communication = 0.0;  // T_C
  double latency = 0.0;        // T_L

  static TimeDecomposition from_parts(double compute, double communication, double latency);
};

/// Gamma = gamma_a / gamma_m = T_P / (T_C + T_L). Infinity marks a
/// communication-free (saturated) value.
class GammaValue {
 public:
  /// Throws OutOfRangeError unless value > 0.
  explicit GammaValue(double value);
  static GammaValue saturated() { return GammaValue(kSaturated); }

  double value() const { return value_; }
  bool is_saturated() const { return value_ == kSaturated; }

 private:
  double value_;
};

/// S = P / (1 + 1/Gamma).
double predict_speedup(int ranks, GammaValue gamma);
/// E = 1 / (1 + 1/Gamma).
double efficiency(GammaValue gamma);
/// Gamma = E / (1 - E). Throws OutOfRangeError unless 0 < E < 1.
GammaValue gamma_from_efficiency(double efficiency);
/// Gamma = T_P / (T_C + T_L); saturated when T_C + T_L = 0.
GammaValue gamma_from_times(const TimeDecomposition& t);

/// T_P = flops / (P rate), T_C = 8 words / (P b/s), T_L = messages L.
/// `degree` selects the compute rate for degree-dependent profiles.
TimeDecomposition predict_time(const MachineProfile& machine, const AppProfile& app, int ranks,
                               std::int64_t messages_per_step, double degree = 0.0);

// ---------------------------------------------------------------------------
// Calibration of (W, alpha, T_L) from several machines.

enum class BandwidthModel {
  base,    // b_1
  scaled,  // alpha b_1
  shared,  // alpha b_1 / s
};

BandwidthModel parse_bandwidth_model(const std::string& text);
std::string to_string(BandwidthModel model);

struct CalibrationInput {
  std::string name;
  double compute_time = 0.0;  // T_P [s]
  double gamma = 0.0;         // measured Gamma
  BandwidthModel model = BandwidthModel::base;
  int sharing = 1;
};

struct GammaFit {
  double volume_mb = 0.0;     // W [MB per step]
  double alpha = 0.0;         // b_2 / b_1
  double latency_time = 0.0;  // T_L [s]
  double base_bandwidth_mbs = 0.0;
  std::vector<std::string> names;
  std::vector<double> residuals;  // W / b_i + T_L - T_P_i / Gamma_i  [s]
  bool exactly_determined = false;

  double scaled_bandwidth_mbs() const { return alpha * base_bandwidth_mbs; }
  /// W in 8-byte words.
  double volume_words() const { return volume_mb * kBytesPerMB / kBytesPerWord; }
  double residual_norm() const;
};

/// Solves Gamma_i = T_P_i / (W / b_i + T_L) for (W, alpha, T_L). The
/// residual form is linear in (W / b_1, W / (alpha b_1), T_L), so three
/// inputs are solved exactly and more inputs by linear least squares.
/// Throws CalibrationDegenerateError naming the inputs that fail to
/// separate the unknowns.
GammaFit calibrate(const std::vector<CalibrationInput>& inputs, double base_bandwidth_mbs);

// ---------------------------------------------------------------------------
// CPU usage analysis

inline constexpr double kDefaultBinWidth = 0.01;
inline constexpr double kDefaultWindowSeconds = 20.0;

struct UsageHistogram {
  double bin_width = kDefaultBinWidth;
  std::vector<std::uint64_t> counts;  // bin k covers [k w, (k + 1) w)
  double mean = 0.0;
  double gamma = 0.0;  // mean / (1 - mean); kSaturated when the mean is 1

  double lower_edge(std::size_t bin) const { return static_cast<double>(bin) * bin_width; }
};

/// Bin index of a sample; the small offset keeps values such as 0.29 out of
/// the bin below when w does not represent them exactly.
std::size_t usage_bin(double sample, double bin_width);

/// Histogram of per-window efficiencies in [0,1] plus the mean and its
/// Gamma. Throws NoDataError on an empty list and OutOfRangeError on a bad
/// bin width or sample. A mean of exactly 1 reports a saturated Gamma.
UsageHistogram analyze_usage_histogram(const std::vector<double>& samples,
                                       double bin_width = kDefaultBinWidth);

struct NormalizedUsage {
  double usage = 0.0;
  bool saturated = false;
};

/// Per-active-rank usage from a node-level reading: raw * cores / active,
/// capped at 1.
NormalizedUsage normalize_node_usage(double raw_node_usage, int active_ranks, int cores_per_node);

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const TimeDecomposition& t);
nlohmann::json to_json(const GammaFit& fit);
nlohmann::json to_json(const MachineProfile& m);
MachineProfile machine_from_json(const std::string& name, const nlohmann::json& j);
/// JSON number or null for the saturated sentinel.
nlohmann::json gamma_json(double gamma);

}  // namespace gammabench::model
