#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "gammabench/cli/commands.hpp"
#include "gammabench/cli/config.hpp"
#include "gammabench/errors.hpp"
#include "gammabench/io/csv.hpp"

using namespace gammabench;
using namespace gammabench::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / fs::path("gammabench_cli_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& text) const {
    const auto p = (path / name).string();
    write_text_file(p, text);
    return p;
  }
};

const char* kSmallConfig = R"({
  "version": 1,
  "formats": ["csv", "json"],
  "machines": {"lab": {"core_rate_mflops": 800, "bandwidth_mbs": 50, "latency_s": 1e-5}},
  "default_case": {"elements": 4, "degree": 4, "steps": 2, "cg_iters_per_step": 10},
  "campaigns": {
    "small": {"kind": "strong", "machine": "lab", "ranks": [1, 2, 4], "seed": 3},
    "huge": {"kind": "strong", "machine": "lab", "case": {"elements": 8, "degree": 8}, "ranks": [1000]},
    "budget": {"kind": "time_budget", "machine": "pleiades2", "ranks": [8], "budget_seconds": 100,
               "window_seconds": 1, "usage_jitter": 0}
  }
})";

}  // namespace

TEST_CASE("csv quoting and parsing") {
  CHECK(io::csv_escape("plain") == "plain");
  CHECK(io::csv_escape("a,b") == "\"a,b\"");
  CHECK(io::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  const io::CsvRow row{"x", "a,b", "two\nlines", "q\"q", ""};
  const auto rows = io::parse_csv(io::csv_line(row) + io::csv_line({"1", "2"}));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == row);
  CHECK(rows[1] == io::CsvRow{"1", "2"});

  const auto crlf = io::parse_csv("a,b\r\n\r\n1,2\r\n");
  CHECK(crlf == std::vector<io::CsvRow>{{"a", "b"}, {"1", "2"}});
  CHECK_THROWS_AS(io::parse_csv("a,\"open\n"), InvalidArgumentError);
}

TEST_CASE("doubles survive text form") {
  for (double v : {0.1, 1.0 / 3.0, 243.59, 1e-300, -7.25e12}) CHECK(io::parse_double(io::format_double(v)) == v);
  CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isinf(io::parse_double("inf")));
  CHECK_THROWS_AS(io::parse_double("1.5x"), InvalidArgumentError);
  CHECK_THROWS_AS(io::parse_double(""), InvalidArgumentError);
}

TEST_CASE("config: version and references are checked") {
  CHECK_THROWS_AS(parse_tool_config(json{{"version", 2}}), ConfigError);
  CHECK_THROWS_AS(parse_tool_config(json::object()), ConfigError);
  const json bad_machine = json::parse(R"({"version": 1, "campaigns": {"c": {"machine": "nowhere"}}})");
  try {
    parse_tool_config(bad_machine);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("nowhere") != std::string::npos);
  }
  const json bad_kind = json::parse(R"({"version": 1, "campaigns": {"c": {"machine": "gele", "kind": "sideways"}}})");
  CHECK_THROWS_AS(parse_tool_config(bad_kind), ConfigError);
  const json bad_format = json::parse(R"({"version": 1, "formats": ["xml"]})");
  CHECK_THROWS_AS(parse_tool_config(bad_format), ConfigError);

  const auto cfg = parse_tool_config(json::parse(kSmallConfig));
  CHECK(cfg.machines.count("pleiades2+") == 1);
  CHECK(cfg.machine("lab").bandwidth_mbs == 50.0);
  CHECK(cfg.campaign("small").base.elements == std::array<int, 3>{4, 4, 4});
  CHECK(cfg.campaign("huge").base.degree == std::array<int, 3>{8, 8, 8});
  CHECK(cfg.campaign("huge").base.steps == 2);
  CHECK_THROWS_AS(cfg.campaign("absent"), ConfigError);
}

TEST_CASE("config: tuned campaigns hit the requested step time") {
  const json doc = json::parse(R"({"version": 1, "campaigns": {"t": {"machine": "pleiades2", "ranks": [1],
      "case": {"elements": 4, "degree": 6, "cg_iters_per_step": 20}, "tune_step_seconds": 12.5}}})");
  const auto cfg = parse_tool_config(doc);
  const auto& s = cfg.campaign("t");
  const auto plan = partition::partition_elements(s.base, 1);
  CHECK(harness::simulate_step(s.base, plan, s.machine).time.total == doctest::Approx(12.5).epsilon(1e-12));
}

TEST_CASE("config path resolution uses the environment variable") {
  TempDir dir;
  const auto path = dir.file("cfg.json", kSmallConfig);
  ::setenv(kConfigEnvVar, path.c_str(), 1);
  CHECK(resolve_tool_config(std::nullopt).campaigns.count("small") == 1);
  ::unsetenv(kConfigEnvVar);
  CHECK(resolve_tool_config(std::nullopt).campaigns.empty());
  CHECK_THROWS_AS(resolve_tool_config(dir.file("broken.json", "{")), ConfigError);
}

TEST_CASE("bench writes artifacts and maps failures to exit codes") {
  TempDir dir;
  const auto cfg = dir.file("cfg.json", kSmallConfig);
  const auto out_dir = (dir.path / "out").string();
  std::ostringstream out, err;

  BenchArgs a;
  a.config_path = cfg;
  a.campaign = "small";
  a.out_dir = out_dir;
  REQUIRE(cmd_bench(a, out, err) == kExitOk);
  CHECK(fs::exists(fs::path(out_dir) / "small_records.json"));
  CHECK(fs::exists(fs::path(out_dir) / "small_steps.csv"));
  const auto rows = parse_summary_csv(read_text_file((fs::path(out_dir) / "small_summary.csv").string()));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].efficiency == 1.0);
  for (const auto& r : rows) CHECK(r.speedup == doctest::Approx(r.efficiency * r.ranks).epsilon(1e-15));
  CHECK(out.str().find("campaign small") != std::string::npos);

  a.campaign = "huge";
  err.str("");
  CHECK(cmd_bench(a, out, err) == kExitRunFailure);
  CHECK(err.str().find("huge") != std::string::npos);

  a.campaign = "missing";
  CHECK(cmd_bench(a, out, err) == kExitInputError);
  a.campaign = "small";
  a.mode = "warp";
  CHECK(cmd_bench(a, out, err) == kExitInputError);
}

TEST_CASE("bench then analyze recovers the simulated gamma") {
  TempDir dir;
  std::ostringstream out, err;
  BenchArgs a;
  a.config_path = dir.file("cfg.json", kSmallConfig);
  a.campaign = "budget";
  a.out_dir = dir.path.string();
  REQUIRE(cmd_bench(a, out, err) == kExitOk);
  const auto records = json::parse(read_text_file((dir.path / "budget_records.json").string()));
  const double gamma = records[0].at("gamma").get<double>();

  AnalyzeArgs z;
  z.samples_path = (dir.path / "budget_usage.csv").string();
  out.str("");
  REQUIRE(cmd_analyze(z, out, err) == kExitOk);
  const auto j = json::parse(out.str());
  CHECK(j.at("samples").get<int>() == 100);
  CHECK(j.at("gamma").get<double>() == doctest::Approx(gamma).epsilon(1e-9));
  CHECK(fs::exists(dir.path / "budget_usage_hist.dat"));
}

TEST_CASE("predict reports a consistent decomposition") {
  std::ostringstream out, err;
  PredictArgs p;
  p.machine = "pleiades2";
  p.ranks = 1;
  p.iterations = 50;
  REQUIRE(cmd_predict(p, out, err) == kExitOk);
  auto j = json::parse(out.str());
  CHECK(j.at("S").get<double>() == 1.0);
  CHECK(j.at("E").get<double>() == 1.0);

  p.ranks = 8;
  out.str("");
  REQUIRE(cmd_predict(p, out, err) == kExitOk);
  j = json::parse(out.str());
  const double g = j.at("gamma").get<double>();
  CHECK(g == doctest::Approx(j.at("T_P").get<double>() / (j.at("T_C").get<double>() + j.at("T_L").get<double>())));
  CHECK(j.at("E").get<double>() == doctest::Approx(g / (1 + g)));
  CHECK(j.at("S").get<double>() == doctest::Approx(8 * g / (1 + g)));

  p.machine = "unknown";
  CHECK(cmd_predict(p, out, err) == kExitInputError);
  p.machine = "gele";
  p.ranks = 1000;
  CHECK(cmd_predict(p, out, err) == kExitInputError);
}

TEST_CASE("calibrate exit codes") {
  TempDir dir;
  std::ostringstream out, err;
  CalibrateArgs c;
  c.input_path = dir.file("two.csv",
                          "name,T_P,gamma,bandwidth_model,sharing\n"
                          "a,13.58,1.44,base,1\n"
                          "b,7.56,3.81,scaled,1\n");
  CHECK(cmd_calibrate(c, out, err) == kExitDegenerate);
  CHECK(err.str().find("degenerate") != std::string::npos);

  c.input_path = (dir.path / "absent.csv").string();
  CHECK(cmd_calibrate(c, out, err) == kExitInputError);
  c.input_path = dir.file("bad.csv", "name,T_P\nx,1\n");
  CHECK(cmd_calibrate(c, out, err) == kExitInputError);

  c.input_path = dir.file("three.json", R"({"base_bandwidth_mbs": 12, "inputs": [
      {"name": "pleiades", "T_P": 13.58, "gamma": 1.44, "bandwidth_model": "base"},
      {"name": "pleiades2", "T_P": 7.56, "gamma": 3.81, "bandwidth_model": "scaled"},
      {"name": "pleiades2+", "T_P": 7.93, "gamma": 1.60, "bandwidth_model": "shared", "sharing": 4}]})");
  out.str("");
  REQUIRE(cmd_calibrate(c, out, err) == kExitOk);
  CHECK(fs::exists(dir.path / "three_fit.json"));
  CHECK(json::parse(out.str()).at("alpha").get<double>() == doctest::Approx(8.5165).epsilon(1e-4));
}

TEST_CASE("analyze input checks") {
  TempDir dir;
  std::ostringstream out, err;
  AnalyzeArgs a;
  a.samples_path = dir.file("empty.csv", "");
  CHECK(cmd_analyze(a, out, err) == kExitInputError);
  a.samples_path = dir.file("header.csv", "timestamp,usage\n");
  CHECK(cmd_analyze(a, out, err) == kExitInputError);

  std::string text = "timestamp,usage\n";
  for (int i = 0; i < 30; ++i) text += std::to_string(20 * (i + 1)) + ",0.79\n";
  a.samples_path = dir.file("flat.csv", text);
  out.str("");
  REQUIRE(cmd_analyze(a, out, err) == kExitOk);
  const auto j = json::parse(out.str());
  CHECK(j.at("gamma").get<double>() == doctest::Approx(3.7619).epsilon(1e-4));
  CHECK(j.at("bins").get<int>() <= 101);

  a.bin_width = 0.0;
  CHECK(cmd_analyze(a, out, err) == kExitInputError);
}
