#include "gammabench/model/gamma.hpp"

#include <cmath>

#include <fmt/format.h>

#include "gammabench/errors.hpp"

namespace gammabench::model {

void MachineProfile::validate() const {
  if (!(core_rate_mflops > 0.0) || !(bandwidth_mbs > 0.0)) {
    throw InvalidArgumentError(
        fmt::format("machine '{}': compute rate and bandwidth must be positive", name));
  }
  if (!(latency_s >= 0.0)) {
    throw InvalidArgumentError(fmt::format("machine '{}': latency must be >= 0", name));
  }
  if (link_sharing < 1 || cores_per_node < 1) {
    throw InvalidArgumentError(
        fmt::format("machine '{}': link sharing and cores per node must be >= 1", name));
  }
  if (!(rate_shape >= 0.0)) {
    throw InvalidArgumentError(
        fmt::format("machine '{}': rate shape must be >= 0, got {}", name, rate_shape));
  }
}

double MachineProfile::core_rate_at(double degree) const {
  if (degree <= 0.0 || rate_shape == 0.0) return core_rate_mflops;
  const double rate = core_rate_mflops * (1.0 - rate_shape / (degree + 1.0));
  if (!(rate > 0.0)) {
    throw InvalidArgumentError(fmt::format(
        "machine '{}': rate shape {} leaves no compute rate at degree {}", name, rate_shape, degree));
  }
  return rate;
}

TimeDecomposition TimeDecomposition::from_parts(double compute, double communication,
                                                double latency) {
  return {compute + communication + latency, compute, communication, latency};
}

GammaValue::GammaValue(double value) : value_(value) {
  if (!(value > 0.0)) throw OutOfRangeError(fmt::format("Gamma must be positive, got {}", value));
}

double predict_speedup(int ranks, GammaValue gamma) {
  if (ranks < 1) throw InvalidArgumentError(fmt::format("rank count must be >= 1, got {}", ranks));
  return ranks * efficiency(gamma);
}

double efficiency(GammaValue gamma) {
  if (gamma.is_saturated()) return 1.0;
  return 1.0 / (1.0 + 1.0 / gamma.value());
}

GammaValue gamma_from_efficiency(double e) {
  if (!(e > 0.0) || !(e < 1.0)) {
    throw OutOfRangeError(
        fmt::format("efficiency {} outside (0, 1); E = 1 would mean an unbounded Gamma", e));
  }
  return GammaValue(e / (1.0 - e));
}

GammaValue gamma_from_times(const TimeDecomposition& t) {
  const double overhead = t.communication + t.latency;
  if (overhead == 0.0) return GammaValue::saturated();
  return GammaValue(t.compute / overhead);
}

TimeDecomposition predict_time(const MachineProfile& machine, const AppProfile& app, int ranks,
                               std::int64_t messages_per_step, double degree) {
  machine.validate();
  if (ranks < 1) throw InvalidArgumentError(fmt::format("rank count must be >= 1, got {}", ranks));
  const double rate = machine.core_rate_at(degree) * 1e6;
  const double bandwidth = machine.effective_bandwidth_mbs() * kBytesPerMB;
  const double compute = app.flops_per_step / (ranks * rate);
  const double communication = app.words_per_step * kBytesPerWord / (ranks * bandwidth);
  const double latency = static_cast<double>(messages_per_step) * machine.latency_s;
  return TimeDecomposition::from_parts(compute, communication, latency);
}

NormalizedUsage normalize_node_usage(double raw, int active_ranks, int cores_per_node) {
  if (active_ranks < 1 || cores_per_node < 1 || active_ranks > cores_per_node) {
    throw InvalidArgumentError(fmt::format(
        "need 1 <= active ranks ({}) <= cores per node ({})", active_ranks, cores_per_node));
  }
  if (!(raw >= 0.0) || raw > 1.0) {
    throw OutOfRangeError(fmt::format("node usage {} outside [0, 1]", raw));
  }
  const double usage = raw * cores_per_node / active_ranks;
  if (usage >= 1.0) return {1.0, true};
  return {usage, false};
}

nlohmann::json gamma_json(double gamma) {
  if (is_saturated(gamma)) return nullptr;
  return gamma;
}

nlohmann::json to_json(const TimeDecomposition& t) {
  return {{"T", t.total}, {"T_P", t.compute}, {"T_C", t.communication}, {"T_L", t.latency}};
}

nlohmann::json to_json(const MachineProfile& m) {
  return {{"core_rate_mflops", m.core_rate_mflops}, {"rate_shape", m.rate_shape},
          {"bandwidth_mbs", m.bandwidth_mbs},       {"latency_s", m.latency_s},
          {"cores_per_node", m.cores_per_node},     {"link_sharing", m.link_sharing}};
}

MachineProfile machine_from_json(const std::string& name, const nlohmann::json& j) {
  MachineProfile m;
  m.name = name;
  m.core_rate_mflops = j.at("core_rate_mflops").get<double>();
  m.rate_shape = j.value("rate_shape", 0.0);
  m.bandwidth_mbs = j.at("bandwidth_mbs").get<double>();
  m.latency_s = j.value("latency_s", 0.0);
  m.cores_per_node = j.value("cores_per_node", 1);
  m.link_sharing = j.value("link_sharing", 1);
  m.validate();
  return m;
}

}  // namespace gammabench::model
