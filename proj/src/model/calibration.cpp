#include <cmath>
#include <map>
#include <tuple>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "gammabench/errors.hpp"
#include "gammabench/model/gamma.hpp"

namespace gammabench::model {

namespace {

// Reciprocal condition estimate below which the calibration is reported as
// degenerate instead of returning an arbitrary member of a solution family.
constexpr double kMinReciprocalCondition = 1e-10;

std::string describe_degeneracy(const std::vector<CalibrationInput>& inputs) {
  std::vector<std::string> reasons;
  std::map<std::tuple<bool, int>, std::vector<std::string>> groups;
  bool any_base = false;
  bool any_scaled = false;
  for (const auto& in : inputs) {
    const bool base = in.model == BandwidthModel::base;
    (base ? any_base : any_scaled) = true;
    groups[{base, in.sharing}].push_back(in.name);
  }
  if (!any_base) {
    reasons.push_back("no input uses the base bandwidth b_1, so W and alpha cannot be separated");
  }
  if (!any_scaled) {
    reasons.push_back("no input uses the scaled bandwidth alpha b_1, so alpha is undetermined");
  }
  for (const auto& [key, names] : groups) {
    if (names.size() > 1) {
      reasons.push_back(fmt::format("inputs {} share the same effective bandwidth and are redundant",
                                    fmt::join(names, ", ")));
    }
  }
  if (groups.size() < 3) {
    reasons.push_back(fmt::format(
        "only {} distinct bandwidth configurations for three unknowns (W, alpha, T_L)",
        groups.size()));
  }
  return fmt::format("calibration is degenerate: {}", fmt::join(reasons, "; "));
}

}  // namespace

BandwidthModel parse_bandwidth_model(const std::string& text) {
  if (text == "base") return BandwidthModel::base;
  if (text == "scaled") return BandwidthModel::scaled;
  if (text == "shared" || text == "scaled-and-shared" || text == "scaled_shared") {
    return BandwidthModel::shared;
  }
  throw InvalidArgumentError(
      fmt::format("unknown bandwidth model '{}' (expected base, scaled or shared)", text));
}

std::string to_string(BandwidthModel model) {
  switch (model) {
    case BandwidthModel::base:
      return "base";
    case BandwidthModel::scaled:
      return "scaled";
    case BandwidthModel::shared:
      return "shared";
  }
  return "base";
}

double GammaFit::residual_norm() const {
  double s = 0.0;
  for (double r : residuals) s += r * r;
  return std::sqrt(s);
}

GammaFit calibrate(const std::vector<CalibrationInput>& inputs, double base_bandwidth_mbs) {
  if (!(base_bandwidth_mbs > 0.0)) {
    throw InvalidArgumentError("base bandwidth b_1 must be positive");
  }
  for (const auto& in : inputs) {
    if (!(in.compute_time > 0.0) || !(in.gamma > 0.0) || in.sharing < 1) {
      throw InvalidArgumentError(fmt::format(
          "calibration input '{}' needs T_P > 0, Gamma > 0 and sharing >= 1", in.name));
    }
  }
  if (inputs.size() < 3) {
    throw CalibrationDegenerateError(fmt::format(
        "calibration is degenerate: {} inputs for three unknowns (W, alpha, T_L)", inputs.size()));
  }

  // Unknowns: v = W / b_1, z = W / (alpha b_1), T_L. Row i reads
  // s_i v + T_L = T_P/Gamma (base) or s_i z + T_L = T_P/Gamma (scaled).
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& in = inputs[static_cast<std::size_t>(i)];
    const int column = in.model == BandwidthModel::base ? 0 : 1;
    a(i, column) = in.sharing;
    a(i, 2) = 1.0;
    y(i) = in.compute_time / in.gamma;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < kMinReciprocalCondition * sv(0)) {
    throw CalibrationDegenerateError(describe_degeneracy(inputs));
  }

  Eigen::Vector3d theta;
  const bool exact = n == 3;
  if (exact) {
    theta = a.fullPivLu().solve(y);
  } else {
    theta = a.colPivHouseholderQr().solve(y);
  }

  const double v = theta(0);
  const double z = theta(1);
  const double latency = theta(2);
  if (!(v > 0.0) || !(z > 0.0) || latency < 0.0) {
    throw CalibrationDegenerateError(fmt::format(
        "calibration has no physical solution: W/b_1 = {:.6g}, W/(alpha b_1) = {:.6g}, T_L = {:.6g}",
        v, z, latency));
  }

  GammaFit fit;
  fit.base_bandwidth_mbs = base_bandwidth_mbs;
  fit.volume_mb = v * base_bandwidth_mbs;
  fit.alpha = v / z;
  fit.latency_time = latency;
  fit.exactly_determined = exact;
  const Eigen::VectorXd r = a * theta - y;
  for (Eigen::Index i = 0; i < n; ++i) {
    fit.names.push_back(inputs[static_cast<std::size_t>(i)].name);
    fit.residuals.push_back(r(i));
  }
  return fit;
}

nlohmann::json to_json(const GammaFit& fit) {
  nlohmann::json residuals = nlohmann::json::array();
  for (std::size_t i = 0; i < fit.residuals.size(); ++i) {
    residuals.push_back({{"name", fit.names[i]}, {"residual_s", fit.residuals[i]}});
  }
  return {{"W_MB", fit.volume_mb},
          {"W_words", fit.volume_words()},
          {"alpha", fit.alpha},
          {"T_L_s", fit.latency_time},
          {"b1_MBps", fit.base_bandwidth_mbs},
          {"b2_MBps", fit.scaled_bandwidth_mbs()},
          {"exactly_determined", fit.exactly_determined},
          {"residual_norm_s", fit.residual_norm()},
          {"residuals", std::move(residuals)}};
}

}  // namespace gammabench::model
