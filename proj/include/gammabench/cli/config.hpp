#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gammabench/harness/campaign.hpp"

namespace gammabench::cli {

inline constexpr int kConfigVersion = 1;
inline constexpr const char* kConfigEnvVar = "GAMMABENCH_CONFIG";

/// Parsed tool configuration. Loaded from a JSON document:
///
///   {
///     "version": 1,
///     "output_dir": "out",
///     "formats": ["csv", "json"],
///     "machines": { "<name>": { "core_rate_mflops": ..., "bandwidth_mbs": ..., ... } },
///     "default_case": { "elements": [8,8,8], "degree": [8,8,8], "fields": 1,
///                       "steps": 4, "cg_iters_per_step": 50 },
///     "campaigns": { "<name>": { "kind": "strong", "machine": "<name>", "ranks": [...],
///                                "case": {...}, "tune_step_seconds": 243.59, ... } }
///   }
///
/// Machines listed in the file are added to (or replace) the builtin ones.
struct ToolConfig {
  int version = kConfigVersion;
  std::map<std::string, model::MachineProfile> machines;
  sem::CaseConfig default_case;
  std::map<std::string, harness::CampaignSpec> campaigns;
  std::string output_dir = ".";
  std::vector<std::string> formats{"csv", "json"};

  bool wants(const std::string& format) const;
  const model::MachineProfile& machine(const std::string& name) const;
  const harness::CampaignSpec& campaign(const std::string& name) const;
};

/// Profiles for the four reference clusters.
std::map<std::string, model::MachineProfile> builtin_machines();

/// Throws ConfigError naming the offending key.
ToolConfig parse_tool_config(const nlohmann::json& doc);
ToolConfig load_tool_config(const std::string& path);
/// Explicit path, else $GAMMABENCH_CONFIG, else builtin machines only.
ToolConfig resolve_tool_config(const std::optional<std::string>& path);

sem::CaseConfig case_from_json(const nlohmann::json& j, sem::CaseConfig base);

}  // namespace gammabench::cli
