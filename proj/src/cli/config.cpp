#include "gammabench/cli/config.hpp"

#include <algorithm>
#include <cstdlib>

#include <fmt/format.h>

#include "gammabench/cli/commands.hpp"
#include "gammabench/errors.hpp"

namespace gammabench::cli {

using nlohmann::json;

namespace {

// Peak per-rank rate of the GbE Xeon cluster; one step of the 8^3, N=8
// strong-scaling case at the fitted iteration budget then takes about 243.6 s.
constexpr double kPleiades2Rate = 1336.0;

model::MachineProfile profile(const std::string& name, double rate, double shape, double bw,
                              double latency, int cores, int sharing) {
  model::MachineProfile m;
  m.name = name;
  m.core_rate_mflops = rate;
  m.rate_shape = shape;
  m.bandwidth_mbs = bw;
  m.latency_s = latency;
  m.cores_per_node = cores;
  m.link_sharing = sharing;
  return m;
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: bad or missing '{}' ({})", where, key, e.what()));
  }
}

std::array<int, 3> triple(const json& j, const std::string& where) {
  if (j.is_number_integer()) {
    const int v = j.get<int>();
    return {v, v, v};
  }
  if (j.is_array() && j.size() == 3) {
    try {
      return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
    } catch (const json::exception&) {
    }
  }
  throw ConfigError(fmt::format("{}: expected an integer or a list of three integers", where));
}

harness::CampaignSpec campaign_from_json(const std::string& name, const json& j,
                                         const ToolConfig& config) {
  const std::string where = fmt::format("campaign '{}'", name);
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  harness::CampaignSpec s;
  s.name = name;
  try {
    s.kind = harness::parse_campaign_kind(j.value("kind", std::string("strong")));
    s.mode = harness::parse_run_mode(j.value("mode", std::string("simulated")));
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  }
  s.base = case_from_json(j.value("case", json::object()), config.default_case);
  const auto machine_name = get<std::string>(j, "machine", where);
  s.machine = config.machine(machine_name);
  if (j.contains("ranks")) s.ranks = get<std::vector<int>>(j, "ranks", where);
  if (j.contains("degrees")) s.degrees = get<std::vector<int>>(j, "degrees", where);
  if (j.contains("scales")) {
    for (const auto& p : j.at("scales")) {
      harness::ScalePoint sp;
      sp.elements = triple(p.at("elements"), where + " scale elements");
      sp.ranks = get<int>(p, "ranks", where + " scale");
      s.scales.push_back(sp);
    }
  }
  s.budget_seconds = j.value("budget_seconds", 0.0);
  s.window_seconds = j.value("window_seconds", model::kDefaultWindowSeconds);
  s.usage_jitter = j.value("usage_jitter", 0.02);
  s.seed = j.value("seed", std::uint64_t{0});
  s.canonical_step = j.value("canonical_step", 4);
  if (j.contains("tune_step_seconds")) {
    sem::CaseConfig reference = s.base;
    if (s.kind == harness::CampaignKind::weak && !s.scales.empty()) {
      reference.elements = s.scales.front().elements;
    }
    s.machine = harness::tune_core_rate(s.machine, reference,
                                        get<double>(j, "tune_step_seconds", where));
  }
  return s;
}

}  // namespace

bool ToolConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

const model::MachineProfile& ToolConfig::machine(const std::string& name) const {
  const auto it = machines.find(name);
  if (it == machines.end()) {
    std::string known;
    for (const auto& [k, v] : machines) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError(fmt::format("unknown machine '{}' (known: {})", name, known));
  }
  return it->second;
}

const harness::CampaignSpec& ToolConfig::campaign(const std::string& name) const {
  const auto it = campaigns.find(name);
  if (it == campaigns.end()) throw ConfigError(fmt::format("unknown campaign '{}'", name));
  return it->second;
}

std::map<std::string, model::MachineProfile> builtin_machines() {
  std::map<std::string, model::MachineProfile> m;
  m["gele"] = profile("gele", 2087.0, 5.6, 1600.0, 6e-6, 2, 2);
  m["pleiades"] = profile("pleiades", kPleiades2Rate * 7.56 / 13.58, 0.0, 12.0, 60e-6, 1, 1);
  m["pleiades2"] = profile("pleiades2", kPleiades2Rate, 0.0, 101.0, 60e-6, 1, 1);
  m["pleiades2+"] = profile("pleiades2+", kPleiades2Rate * 7.56 / 7.93, 0.0, 101.0, 60e-6, 4, 4);
  return m;
}

sem::CaseConfig case_from_json(const json& j, sem::CaseConfig base) {
  if (!j.is_object()) throw ConfigError("case: expected an object");
  if (j.contains("elements")) base.elements = triple(j.at("elements"), "case elements");
  if (j.contains("degree")) base.degree = triple(j.at("degree"), "case degree");
  base.fields = j.value("fields", base.fields);
  base.steps = j.value("steps", base.steps);
  base.cg_iters_per_step = j.value("cg_iters_per_step", base.cg_iters_per_step);
  try {
    base.validate();
  } catch (const Error& e) {
    throw ConfigError(fmt::format("case: {}", e.what()));
  }
  return base;
}

ToolConfig parse_tool_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  ToolConfig c;
  c.version = doc.contains("version") ? get<int>(doc, "version", "config") : -1;
  if (c.version != kConfigVersion) {
    throw ConfigError(fmt::format("config: unsupported version {} (expected {})", c.version,
                                  kConfigVersion));
  }
  c.machines = builtin_machines();
  if (doc.contains("machines")) {
    for (const auto& [name, m] : doc.at("machines").items()) {
      try {
        c.machines[name] = model::machine_from_json(name, m);
      } catch (const std::exception& e) {
        throw ConfigError(fmt::format("machine '{}': {}", name, e.what()));
      }
    }
  }
  c.output_dir = doc.value("output_dir", std::string("."));
  if (doc.contains("formats")) {
    c.formats = get<std::vector<std::string>>(doc, "formats", "config");
    for (const auto& f : c.formats) {
      if (f != "csv" && f != "json") throw ConfigError(fmt::format("config: unknown format '{}'", f));
    }
  }
  if (doc.contains("default_case")) c.default_case = case_from_json(doc.at("default_case"), c.default_case);
  if (doc.contains("campaigns")) {
    for (const auto& [name, spec] : doc.at("campaigns").items()) {
      try {
        c.campaigns[name] = campaign_from_json(name, spec, c);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        throw ConfigError(fmt::format("campaign '{}': {}", name, e.what()));
      }
    }
  }
  return c;
}

ToolConfig load_tool_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  return parse_tool_config(doc);
}

ToolConfig resolve_tool_config(const std::optional<std::string>& path) {
  if (path) return load_tool_config(*path);
  if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') {
    return load_tool_config(env);
  }
  ToolConfig c;
  c.machines = builtin_machines();
  return c;
}

}  // namespace gammabench::cli
