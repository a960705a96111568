// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "gammabench/cli/commands.hpp"
#include "gammabench/cli/config.hpp"
#include "gammabench/errors.hpp"
#include "gammabench/harness/campaign.hpp"
#include "gammabench/io/csv.hpp"
#include "gammabench/model/gamma.hpp"
#include "gammabench/partition/partition.hpp"
#include "gammabench/sem/basis.hpp"
#include "gammabench/sem/element.hpp"
#include "gammabench/sem/work_unit.hpp"
#include "reference_laplacian.hpp"

using namespace gammabench;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = GAMMABENCH_FIXTURES;
const fs::path kCampaigns = GAMMABENCH_CAMPAIGNS;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!ok) notes.push_back(what);
  }
};

bool within(double got, double want, double tol) { return std::abs(got - want) <= tol; }
bool within_rel(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

struct Table {
  std::vector<std::string> header;
  std::vector<io::CsvRow> rows;

  std::size_t col(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidArgumentError("fixture lacks column " + name);
    return static_cast<std::size_t>(it - header.begin());
  }
  double num(std::size_t row, const std::string& name) const { return io::parse_double(rows[row][col(name)]); }
  const std::string& text(std::size_t row, const std::string& name) const { return rows[row][col(name)]; }
};

Table load_fixture(const std::string& name) {
  auto rows = io::parse_csv(cli::read_text_file((kFixtures / name).string()));
  Table t;
  t.header = rows.front();
  t.rows.assign(rows.begin() + 1, rows.end());
  return t;
}

cli::ToolConfig campaigns() { return cli::load_tool_config(kCampaigns.string()); }

Outcome usage_to_gamma() {
  Outcome o;
  const auto t = load_fixture("usage_pairs.csv");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double g = model::gamma_from_efficiency(t.num(i, "mean_usage")).value();
    o.expect(within(g, t.num(i, "gamma"), 0.01),
             fmt::format("{}: usage {} gives {:.4f}, want {}", t.text(i, "machine"), t.num(i, "mean_usage"), g,
                         t.num(i, "gamma")));
  }
  return o;
}

Outcome times_to_gamma() {
  Outcome o;
  const auto t = load_fixture("three_machines.csv");
  const std::map<std::string, double> want{{"pleiades", 1.44}, {"pleiades2", 3.82}, {"pleiades2+", 1.60}};
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto parts = model::TimeDecomposition::from_parts(t.num(i, "T_P"), t.num(i, "T_C"), t.num(i, "T_L"));
    const double g = model::gamma_from_times(parts).value();
    const double w = want.at(t.text(i, "name"));
    o.expect(within(g, w, 0.01), fmt::format("{}: {:.4f}, want {}", t.text(i, "name"), g, w));
  }
  return o;
}

Outcome calibration() {
  Outcome o;
  const auto out_path = (fs::temp_directory_path() / "gammabench_acceptance_fit.json").string();
  cli::CalibrateArgs a;
  a.input_path = (kFixtures / "three_machines.csv").string();
  a.base_bandwidth_mbs = 12.0;
  a.out_path = out_path;
  std::ostringstream out, err;
  const int code = cli::cmd_calibrate(a, out, err);
  fs::remove(out_path);
  o.expect(code == cli::kExitOk, fmt::format("exit {}: {}", code, err.str()));
  if (code != cli::kExitOk) return o;
  const auto j = json::parse(out.str());
  const double tl = j.at("T_L_s").get<double>();
  const double alpha = j.at("alpha").get<double>();
  const double b2 = j.at("b2_MBps").get<double>();
  const double w = j.at("W_MB").get<double>();
  o.expect(within(tl, 1.0, 0.05), fmt::format("T_L {:.4f}", tl));
  o.expect(within(alpha, 8.4, 0.2), fmt::format("alpha {:.4f}", alpha));
  o.expect(within_rel(b2, 101.0, 0.02), fmt::format("b2 {:.3f}", b2));
  o.expect(within_rel(w, 101.0, 0.02), fmt::format("W {:.3f} MB", w));
  o.notes.push_back(fmt::format("T_L={:.4f} alpha={:.4f} b2={:.2f} W={:.2f}MB", tl, alpha, b2, w));
  return o;
}

Outcome strong_scaling() {
  Outcome o;
  const auto cfg = campaigns();
  const auto& spec = cfg.campaign("strong");
  const auto table = load_fixture("strong_scaling.csv");

  // The pinned iteration budget is the least-squares fit to the checked rows.
  const std::vector<int> checked{2, 8, 16, 32};
  std::vector<std::pair<int, double>> targets;
  std::map<int, double> measured_e;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const int p = static_cast<int>(table.num(i, "P"));
    measured_e[p] = table.num(i, "E");
    if (std::count(checked.begin(), checked.end(), p)) targets.emplace_back(p, table.num(i, "E"));
  }
  const int fitted = harness::fit_iteration_budget(cfg.machine(spec.machine.name), spec.base, 243.59, targets);
  o.expect(fitted == spec.base.cg_iters_per_step,
           fmt::format("pinned budget {} but table fit gives {}", spec.base.cg_iters_per_step, fitted));

  const auto records = harness::run_campaign(spec);
  o.expect(within(records.front().walltime, 243.59, 1e-9), fmt::format("T1 {}", records.front().walltime));
  std::string line;
  for (const auto& r : records) {
    if (!std::count(checked.begin(), checked.end(), r.ranks)) continue;
    o.expect(within(r.efficiency, measured_e.at(r.ranks), 0.03),
             fmt::format("P={} E={:.4f} want {}", r.ranks, r.efficiency, measured_e.at(r.ranks)));
    line += fmt::format("{}P{}:E={:.3f}", line.empty() ? "" : " ", r.ranks, r.efficiency);
  }
  o.notes.push_back(line);
  return o;
}

Outcome constant_work() {
  Outcome o;
  const auto t = load_fixture("strong_scaling.csv");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double work = t.num(i, "GFlops") * t.num(i, "runtime");
    o.expect(within_rel(work, 155.4, 0.01),
             fmt::format("P={}: {} x {} = {:.2f} GFlop ({:+.1f}%)", t.text(i, "P"), t.text(i, "GFlops"),
                         t.text(i, "runtime"), work, 100.0 * (work / 155.4 - 1.0)));
  }
  return o;
}

Outcome weak_scaling() {
  Outcome o;
  const auto cfg = campaigns();
  const auto records = harness::run_campaign(cfg.campaign("weak"));
  std::vector<int> ranks;
  for (const auto& r : records) ranks.push_back(r.ranks);
  o.expect(ranks == std::vector<int>{1, 8, 64}, "weak campaign must run 1, 8 and 64 ranks");
  for (const auto& r : records) {
    o.expect(r.config.element_count() / r.ranks == 64, fmt::format("P={}: not 64 elements per rank", r.ranks));
    for (const auto& s : r.steps) {
      o.expect(s.compute == records.front().steps.front().compute,
               fmt::format("P={}: T_P {} differs from {}", r.ranks, s.compute, records.front().steps.front().compute));
    }
    o.expect(within_rel(r.mflops_per_rank, records.front().mflops_per_rank, 0.05),
             fmt::format("P={}: per-rank rate {:.2f}", r.ranks, r.mflops_per_rank));
  }
  return o;
}

double monomial_integral(int k) { return k % 2 == 1 ? 0.0 : 2.0 / (k + 1); }

Outcome sem_properties() {
  Outcome o;
  for (int n = 2; n <= 16; ++n) {
    const auto b = sem::build_gll_basis(n);
    double sum = 0.0;
    for (double w : b.weights) sum += w;
    o.expect(within(sum, 2.0, 1e-12), fmt::format("N={}: weight sum {:.17g}", n, sum));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double q = 0.0;
      for (std::size_t i = 0; i < b.size(); ++i) q += b.weights[i] * std::pow(b.nodes[i], k);
      const double exact = monomial_integral(k);
      o.expect(std::abs(q - exact) <= 1e-11 * std::max(1.0, std::abs(exact)),
               fmt::format("N={}: x^{} integrates to {:.17g}", n, k, q));
    }
    for (int k = 0; k <= n; ++k) {
      for (std::size_t i = 0; i < b.size(); ++i) {
        double du = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) du += b.d(i, j) * std::pow(b.nodes[j], k);
        const double exact = k == 0 ? 0.0 : k * std::pow(b.nodes[i], k - 1);
        o.expect(within(du, exact, 1e-9), fmt::format("N={}: d/dx x^{} at node {} is {:.3e} off", n, k, i, du - exact));
      }
    }
  }

  for (int n : {2, 4, 8}) {
    const auto basis = sem::TensorBasis::isotropic(n);
    const sem::ElementLaplacian a(basis, {0.5, 1.0, 2.0});
    const std::size_t size = a.shape().size();
    std::vector<std::vector<double>> cols(size);
    std::vector<double> scratch(2 * size);
    double largest = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
      std::vector<double> e(size, 0.0);
      e[j] = 1.0;
      cols[j].resize(size);
      sem::FlopCounter f;
      a.apply(e, cols[j], scratch, f);
      for (double v : cols[j]) largest = std::max(largest, std::abs(v));
    }
    double asym = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = i + 1; j < size; ++j) asym = std::max(asym, std::abs(cols[i][j] - cols[j][i]));
    }
    o.expect(asym <= 1e-10 * largest, fmt::format("N={}: Laplacian asymmetry {:.3e}", n, asym / largest));
  }

  sem::WorkUnitOptions opts;
  opts.mode = sem::SolveMode::to_tolerance;
  opts.tolerance = 1e-10;
  std::map<int, double> errors;
  for (int n : {4, 10}) {
    const auto c = sem::cubic_case(2, n);
    harness::LoopbackNetwork net(1);
    errors[n] = sem::cg_work_unit(c, partition::partition_elements(c, 1), net, opts).max_error();
  }
  const double drop = std::log10(errors[4] / errors[10]);
  o.expect(drop >= 2.0, fmt::format("error drop N=4 to N=10 is {:.2f} orders", drop));
  o.notes.push_back(fmt::format("error N=4 {:.2e}, N=10 {:.2e}", errors[4], errors[10]));
  return o;
}

Outcome counters() {
  Outcome o;
  for (int nx = 2; nx <= 4; ++nx) {
    for (int ny = 2; ny <= 4; ++ny) {
      for (int nz = 2; nz <= 4; ++nz) {
        const auto basis = sem::TensorBasis::from_degrees({nx, ny, nz});
        const sem::BoxGeometry g{0.5, 0.25, 1.0};
        const sem::ElementLaplacian a(basis, g);
        std::vector<double> u(a.shape().size());
        std::mt19937 rng(static_cast<unsigned>(nx * 100 + ny * 10 + nz));
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (auto& x : u) x = dist(rng);
        testing::Tally tally;
        testing::reference_laplacian(basis, g, u, tally);
        std::vector<double> out(u.size()), scratch(2 * u.size());
        sem::FlopCounter f;
        a.apply(u, out, scratch, f);
        o.expect(f.additions() == tally.adds && f.multiplications() == tally.mults,
                 fmt::format("N=({},{},{}): counter {}+{} vs reference {}+{}", nx, ny, nz, f.additions(),
                             f.multiplications(), tally.adds, tally.mults));
      }
    }
  }

  for (int n = 2; n <= 4; ++n) {
    auto c = sem::cubic_case(2, n);
    c.steps = 1;
    c.cg_iters_per_step = 3;
    const auto plan = partition::partition_elements(c, 2);
    harness::LoopbackNetwork net(2);
    const auto report = sem::cg_work_unit(c, plan, net);
    for (const auto& r : report.ranks) {
      o.expect(r.steps.front().flops == sem::fixed_step_flops(c, r.elements),
               fmt::format("N={}: rank {} step flops differ from the analytic count", n, r.rank));
    }
  }

  for (auto e : {std::array<int, 3>{2, 1, 1}, std::array<int, 3>{2, 2, 2}, std::array<int, 3>{4, 4, 4}}) {
    for (int p : {1, 2, 4, 8}) {
      sem::CaseConfig c = sem::cubic_case(1, 4);
      c.elements = e;
      c.steps = 1;
      c.cg_iters_per_step = 2;
      const std::string where = fmt::format("E={}x{}x{} P={}", e[0], e[1], e[2], p);
      if (c.element_count() < p) {
        bool raised = false;
        try {
          partition::partition_elements(c, p);
        } catch (const OverDecompositionError&) {
          raised = true;
        }
        o.expect(raised, where + ": expected over-decomposition");
        continue;
      }
      const auto plan = partition::partition_elements(c, p);
      harness::LoopbackNetwork net(p);
      const auto report = sem::cg_work_unit(c, plan, net);
      const auto predicted = static_cast<std::uint64_t>(partition::words_per_step(plan, c, 2));
      o.expect(report.words_sent(0) == predicted,
               fmt::format("{}: executed {} words, predicted {}", where, report.words_sent(0), predicted));
    }
  }
  return o;
}

Outcome iteration_agreement() {
  Outcome o;
  auto c = sem::cubic_case(8, 8);
  c.steps = 1;
  sem::WorkUnitOptions opts;
  opts.mode = sem::SolveMode::to_tolerance;
  opts.tolerance = 1e-8;
  std::vector<int> iters;
  std::string line;
  for (int p : {1, 2, 4, 8}) {
    harness::LoopbackNetwork net(p);
    const auto report = sem::cg_work_unit(c, partition::partition_elements(c, p), net, opts);
    iters.push_back(report.iterations(0));
    line += fmt::format("{}P{}:{}", line.empty() ? "" : " ", p, iters.back());
  }
  const auto [lo, hi] = std::minmax_element(iters.begin(), iters.end());
  o.expect(*hi - *lo <= 1, "iteration counts differ by more than one");
  o.notes.push_back(line);
  return o;
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    files[entry.path().filename().string()] = cli::read_text_file(entry.path().string());
  }
  return files;
}

Outcome reproducibility() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "gammabench_acceptance_repro";
  fs::remove_all(root);
  for (const char* campaign : {"strong", "budget_pleiades2"}) {
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* run : {"a", "b"}) {
      cli::BenchArgs args;
      args.config_path = kCampaigns.string();
      args.campaign = campaign;
      args.seed = 2024;
      args.out_dir = (root / campaign / run).string();
      std::ostringstream out, err;
      const int code = cli::cmd_bench(args, out, err);
      o.expect(code == cli::kExitOk, fmt::format("{}: bench exit {}", campaign, code));
      runs.push_back(directory_bytes(root / campaign / run));
    }
    o.expect(!runs[0].empty(), fmt::format("{}: no files written", campaign));
    o.expect(runs[0] == runs[1], fmt::format("{}: outputs differ between runs", campaign));
  }
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"usage to gamma", usage_to_gamma},
      {"time split to gamma", times_to_gamma},
      {"three-machine calibration", calibration},
      {"simulated strong scaling", strong_scaling},
      {"constant work in the strong-scaling table", constant_work},
      {"weak scaling", weak_scaling},
      {"spectral element properties", sem_properties},
      {"flop and word counters", counters},
      {"CG iterations across rank counts", iteration_agreement},
      {"seeded reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::cout << fmt::format("[{:>2}] {} {}", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first);
    for (const auto& n : o.notes) std::cout << " | " << n;
    std::cout << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
