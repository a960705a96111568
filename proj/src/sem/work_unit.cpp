#include "gammabench/sem/work_unit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include <fmt/format.h>

#include "gammabench/errors.hpp"

namespace gammabench::sem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Accumulates elapsed time into a slot when it goes out of scope.
class ScopedTimer {
 public:
  explicit ScopedTimer(double& slot) : slot_(slot), t0_(Clock::now()) {}
  ~ScopedTimer() { slot_ += seconds_since(t0_); }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  double& slot_;
  Clock::time_point t0_;
};

double forcing(Boundary bc, const std::array<double, 3>& x) {
  constexpr double pi = std::numbers::pi;
  if (bc == Boundary::dirichlet) {
    return 3.0 * pi * pi * std::sin(pi * x[0]) * std::sin(pi * x[1]) * std::sin(pi * x[2]);
  }
  return 3.0 * pi * pi * std::cos(pi * x[0]) * std::cos(pi * x[1]) * std::cos(pi * x[2]);
}

double exact_solution(Boundary bc, const std::array<double, 3>& x) {
  return forcing(bc, x) / (3.0 * std::numbers::pi * std::numbers::pi);
}

}  // namespace

// ---------------------------------------------------------------------------
// RankDomain

RankDomain::RankDomain(const CaseConfig& config, const PartitionPlan& plan, int rank,
                       Boundary boundary)
    : rank_(rank), config_(config) {
  config.validate();
  if (rank < 0 || rank >= plan.ranks) {
    throw InvalidArgumentError(fmt::format("rank {} outside a {}-rank plan", rank, plan.ranks));
  }
  if (plan.elements != config.elements) {
    throw DimensionError("partition plan was built for a different element grid");
  }
  for (int d = 0; d < 3; ++d) {
    shape_.n[d] = static_cast<std::size_t>(config.degree[d] + 1);
    lattice_[d] = static_cast<std::int64_t>(config.elements[d]) * config.degree[d] + 1;
    node_positions_[d] = build_gll_basis(config.degree[d]).nodes;
  }
  elements_ = plan.rank_elements[static_cast<std::size_t>(rank)];

  const std::size_t npts = shape_.size();
  std::vector<std::int64_t> gids(local_points());
  for (std::size_t p = 0; p < gids.size(); ++p) {
    const auto g = node_of(p);
    gids[p] = g[0] + lattice_[0] * (g[1] + lattice_[1] * g[2]);
  }
  unique_gid_ = gids;
  std::sort(unique_gid_.begin(), unique_gid_.end());
  unique_gid_.erase(std::unique(unique_gid_.begin(), unique_gid_.end()), unique_gid_.end());
  auto uid_of = [&](std::int64_t gid) {
    return static_cast<std::uint32_t>(
        std::lower_bound(unique_gid_.begin(), unique_gid_.end(), gid) - unique_gid_.begin());
  };
  unique_of_.resize(gids.size());
  for (std::size_t p = 0; p < gids.size(); ++p) unique_of_[p] = uid_of(gids[p]);

  unique_masked_.assign(unique_gid_.size(), 0);
  if (boundary == Boundary::dirichlet) {
    for (std::size_t u = 0; u < unique_gid_.size(); ++u) {
      std::int64_t g = unique_gid_[u];
      for (int d = 0; d < 3; ++d) {
        const std::int64_t c = g % lattice_[d];
        g /= lattice_[d];
        if (c == 0 || c == lattice_[d] - 1) unique_masked_[u] = 1;
      }
    }
  }

  // Interface planes: faces ordered by element (k, j, i), nodes within a
  // face lexicographic over the two tangential axes. Both sides of a plane
  // enumerate identical global nodes in identical order.
  const auto& block = plan.blocks[static_cast<std::size_t>(rank)];
  for (int axis = 0; axis < 3; ++axis) {
    const int t1 = axis == 0 ? 1 : 0;
    const int t2 = axis == 2 ? 1 : 2;
    for (int side = 0; side < 2; ++side) {
      Plane& plane = planes_[axis][side];
      plane.peer = plan.neighbor(rank, axis, side == 0 ? -1 : 1);
      if (plane.peer < 0) continue;
      const int layer = side == 0 ? block.begin[axis] : block.end[axis] - 1;
      const std::size_t fixed = side == 0 ? 0 : shape_.n[axis] - 1;
      std::vector<std::uint8_t> seen(unique_gid_.size(), 0);
      for (std::size_t e = 0; e < elements_.size(); ++e) {
        const auto& el = elements_[e];
        const int coord = axis == 0 ? el.i : axis == 1 ? el.j : el.k;
        if (coord != layer) continue;
        for (std::size_t c2 = 0; c2 < shape_.n[t2]; ++c2) {
          for (std::size_t c1 = 0; c1 < shape_.n[t1]; ++c1) {
            std::array<std::size_t, 3> idx{};
            idx[axis] = fixed;
            idx[t1] = c1;
            idx[t2] = c2;
            const std::uint32_t u = unique_of_[e * npts + shape_.offset(idx[0], idx[1], idx[2])];
            const auto pos = static_cast<std::uint32_t>(plane.pack.size());
            plane.pack.push_back(u);
            if (!seen[u]) {
              seen[u] = 1;
              plane.apply.emplace_back(pos, u);
            }
          }
        }
      }
    }
  }
}

std::array<std::int64_t, 3> RankDomain::node_of(std::size_t p) const {
  const std::size_t npts = shape_.size();
  const auto& el = elements_[p / npts];
  std::size_t q = p % npts;
  const std::size_t a = q % shape_.n[0];
  q /= shape_.n[0];
  const std::size_t b = q % shape_.n[1];
  const std::size_t c = q / shape_.n[1];
  return {static_cast<std::int64_t>(el.i) * config_.degree[0] + static_cast<std::int64_t>(a),
          static_cast<std::int64_t>(el.j) * config_.degree[1] + static_cast<std::int64_t>(b),
          static_cast<std::int64_t>(el.k) * config_.degree[2] + static_cast<std::int64_t>(c)};
}

std::array<double, 3> RankDomain::position_of(std::size_t p) const {
  const auto g = node_of(p);
  std::array<double, 3> x{};
  for (int d = 0; d < 3; ++d) {
    const std::int64_t e = std::min<std::int64_t>(g[d] / config_.degree[d], config_.elements[d] - 1);
    const auto local = static_cast<std::size_t>(g[d] - e * config_.degree[d]);
    x[d] = (static_cast<double>(e) + 0.5 * (node_positions_[d][local] + 1.0)) / config_.elements[d];
  }
  return x;
}

void RankDomain::direct_stiffness_sum(std::span<double> data, int fields, Transport& transport,
                                      bool apply_mask) const {
  const std::size_t n = local_points();
  const std::size_t nu = unique_gid_.size();
  if (data.size() != n * static_cast<std::size_t>(fields)) {
    throw DimensionError(fmt::format("direct stiffness sum over {} values, expected {}",
                                     data.size(), n * static_cast<std::size_t>(fields)));
  }
  std::vector<double> unique(nu * static_cast<std::size_t>(fields), 0.0);
  for (int f = 0; f < fields; ++f) {
    double* u = unique.data() + f * nu;
    const double* v = data.data() + f * n;
    for (std::size_t p = 0; p < n; ++p) u[unique_of_[p]] += v[p];
  }

  for (int axis = 0; axis < 3; ++axis) {
    for (const Plane& plane : planes_[axis]) {
      if (plane.peer < 0) continue;
      std::vector<double> buf;
      buf.reserve(plane.pack.size() * static_cast<std::size_t>(fields));
      for (int f = 0; f < fields; ++f) {
        for (std::uint32_t u : plane.pack) buf.push_back(unique[f * nu + u]);
      }
      transport.send(plane.peer, buf);
    }
    for (const Plane& plane : planes_[axis]) {
      if (plane.peer < 0) continue;
      const std::vector<double> buf = transport.receive(plane.peer);
      const std::size_t stride = plane.pack.size();
      if (buf.size() != stride * static_cast<std::size_t>(fields)) {
        throw DimensionError(fmt::format("rank {} received {} interface words from {}, expected {}",
                                         rank_, buf.size(), plane.peer,
                                         stride * static_cast<std::size_t>(fields)));
      }
      for (int f = 0; f < fields; ++f) {
        for (const auto& [pos, u] : plane.apply) unique[f * nu + u] += buf[f * stride + pos];
      }
    }
  }

  if (apply_mask) {
    for (int f = 0; f < fields; ++f) {
      for (std::size_t u = 0; u < nu; ++u) {
        if (unique_masked_[u]) unique[f * nu + u] = 0.0;
      }
    }
  }
  for (int f = 0; f < fields; ++f) {
    const double* u = unique.data() + f * nu;
    double* v = data.data() + f * n;
    for (std::size_t p = 0; p < n; ++p) v[p] = u[unique_of_[p]];
  }
}

std::uint64_t RankDomain::words_per_exchange() const {
  std::uint64_t words = 0;
  for (const auto& planes : planes_) {
    for (const auto& plane : planes) {
      if (plane.peer >= 0) words += plane.pack.size();
    }
  }
  return words;
}

// ---------------------------------------------------------------------------
// Conjugate gradient work unit

namespace {

class RankSolver {
 public:
  RankSolver(const CaseConfig& config, const PartitionPlan& plan, Transport& transport,
             const WorkUnitOptions& options)
      : config_(config),
        options_(options),
        transport_(transport),
        domain_(config, plan, transport.rank(), options.boundary),
        basis_(TensorBasis::from_degrees(config.degree)),
        op_(basis_, BoxGeometry{1.0 / config.elements[0], 1.0 / config.elements[1],
                                1.0 / config.elements[2]}),
        fields_(config.fields),
        n_(domain_.local_points()),
        npts_(domain_.points_per_element()) {
    setup();
  }

  RankReport run() {
    RankReport report;
    report.rank = transport_.rank();
    report.elements = static_cast<std::int64_t>(domain_.element_count());

    const auto start = Clock::now();
    const int max_steps = options_.time_budget_seconds > 0.0 ? 1'000'000 : config_.steps;
    for (int step = 0; step < max_steps; ++step) {
      if (options_.time_budget_seconds > 0.0) {
        double go = 0.0;
        if (transport_.rank() == 0) go = seconds_since(start) < options_.time_budget_seconds;
        std::array<double, 1> flag{go};
        transport_.allreduce_sum(flag);
        if (flag[0] == 0.0) break;
      }
      report.steps.push_back(run_step());
    }
    report.max_error = max_error();
    if (options_.keep_solution) {
      for (std::size_t e = 0; e < domain_.element_count(); ++e) {
        ElementField f{domain_.elements()[e], domain_.shape(),
                       std::vector<double>(x_.begin() + static_cast<std::ptrdiff_t>(e * npts_),
                                           x_.begin() + static_cast<std::ptrdiff_t>((e + 1) * npts_))};
        report.solution.push_back(std::move(f));
      }
    }
    return report;
  }

 private:
  double* field(std::vector<double>& v, int f) { return v.data() + static_cast<std::size_t>(f) * n_; }

  void dssum(std::vector<double>& v, int fields, bool mask) {
    ScopedTimer t(comm_seconds_);
    domain_.direct_stiffness_sum(v, fields, transport_, mask);
  }

  void allreduce(std::span<double> values) {
    ScopedTimer t(comm_seconds_);
    transport_.allreduce_sum(values);
  }

  void setup() {
    const bool dirichlet = options_.boundary == Boundary::dirichlet;
    std::vector<double> ones(n_, 1.0);
    dssum(ones, 1, false);
    inv_mult_.resize(n_);
    for (std::size_t p = 0; p < n_; ++p) inv_mult_[p] = 1.0 / ones[p];

    // A masked copy of ones marks Dirichlet nodes with zero.
    std::vector<double> mask(n_, 1.0);
    dssum(mask, 1, dirichlet);

    const auto elem_diag = op_.diagonal();
    const auto elem_mass = op_.mass();
    std::vector<double> diag(n_);
    std::vector<double> rhs(n_ * static_cast<std::size_t>(fields_));
    exact_.resize(n_);
    for (std::size_t p = 0; p < n_; ++p) {
      const auto x = domain_.position_of(p);
      diag[p] = elem_diag[p % npts_];
      exact_[p] = exact_solution(options_.boundary, x);
      const double b = elem_mass[p % npts_] * forcing(options_.boundary, x);
      for (int f = 0; f < fields_; ++f) rhs[static_cast<std::size_t>(f) * n_ + p] = b;
    }
    dssum(diag, 1, false);
    inv_diag_.resize(n_);
    for (std::size_t p = 0; p < n_; ++p) inv_diag_[p] = mask[p] == 0.0 ? 0.0 : 1.0 / diag[p];

    dssum(rhs, fields_, dirichlet);
    if (options_.project_mean) {
      std::vector<double> sums(2 * static_cast<std::size_t>(fields_), 0.0);
      for (int f = 0; f < fields_; ++f) {
        const double* b = field(rhs, f);
        for (std::size_t p = 0; p < n_; ++p) {
          sums[2 * f] += b[p] * inv_mult_[p];
          sums[2 * f + 1] += inv_mult_[p];
        }
      }
      allreduce(sums);
      for (int f = 0; f < fields_; ++f) {
        const double mean = sums[2 * f] / sums[2 * f + 1];
        double* b = field(rhs, f);
        for (std::size_t p = 0; p < n_; ++p) b[p] -= mean;
      }
    }
    rhs_ = std::move(rhs);

    const std::size_t total = n_ * static_cast<std::size_t>(fields_);
    x_.assign(total, 0.0);
    r_.assign(total, 0.0);
    z_.assign(total, 0.0);
    p_.assign(total, 0.0);
    w_.assign(total, 0.0);
    scratch_.assign(2 * npts_, 0.0);
  }

  // sum_p a[p] b[p] / multiplicity[p]; 2 multiplies and 1 add per point.
  double weighted_dot(const double* a, const double* b, FlopCounter& flops) const {
    double s = 0.0;
    for (std::size_t p = 0; p < n_; ++p) s += a[p] * b[p] * inv_mult_[p];
    flops.add(n_, 2 * n_);
    return s;
  }

  void apply_operator(std::vector<double>& in, std::vector<double>& out, FlopCounter& flops) {
    {
      ScopedTimer t(compute_seconds_);
      for (int f = 0; f < fields_; ++f) {
        const double* src = field(in, f);
        double* dst = field(out, f);
        for (std::size_t e = 0; e < domain_.element_count(); ++e) {
          op_.apply(std::span<const double>(src + e * npts_, npts_),
                    std::span<double>(dst + e * npts_, npts_), scratch_, flops);
        }
      }
    }
    dssum(out, fields_, options_.boundary == Boundary::dirichlet);
  }

  RankStepReport run_step() {
    RankStepReport rep;
    const auto before = transport_.counters();
    const auto t0 = Clock::now();
    compute_seconds_ = 0.0;
    comm_seconds_ = 0.0;
    FlopCounter& flops = rep.flops;
    const auto F = static_cast<std::size_t>(fields_);

    std::vector<double> rz(F), rr0(F), rr(F);
    {
      ScopedTimer t(compute_seconds_);
      std::fill(x_.begin(), x_.end(), 0.0);
      r_ = rhs_;
      std::vector<double> sums(2 * F);
      for (int f = 0; f < fields_; ++f) {
        const double* r = field(r_, f);
        double* z = field(z_, f);
        double* p = field(p_, f);
        for (std::size_t i = 0; i < n_; ++i) {
          z[i] = inv_diag_[i] * r[i];
          p[i] = z[i];
        }
        flops.add(0, n_);
        sums[f] = weighted_dot(r, z, flops);
        sums[F + f] = weighted_dot(r, r, flops);
      }
      rz.assign(sums.begin(), sums.begin() + static_cast<std::ptrdiff_t>(F));
      rr0.assign(sums.begin() + static_cast<std::ptrdiff_t>(F), sums.end());
    }
    {
      std::vector<double> sums(rz);
      sums.insert(sums.end(), rr0.begin(), rr0.end());
      allreduce(sums);
      std::copy(sums.begin(), sums.begin() + static_cast<std::ptrdiff_t>(F), rz.begin());
      std::copy(sums.begin() + static_cast<std::ptrdiff_t>(F), sums.end(), rr0.begin());
    }
    rr = rr0;

    const double tol2 = options_.tolerance * options_.tolerance;
    auto converged = [&] {
      for (std::size_t f = 0; f < F; ++f) {
        if (rr[f] > tol2 * rr0[f]) return false;
      }
      return true;
    };

    int it = 0;
    while (true) {
      if (options_.mode == SolveMode::fixed_budget) {
        if (it >= config_.cg_iters_per_step) break;
      } else if (converged() || it >= options_.max_iterations) {
        break;
      }

      apply_operator(p_, w_, flops);

      std::vector<double> pap(F);
      {
        ScopedTimer t(compute_seconds_);
        for (int f = 0; f < fields_; ++f) pap[f] = weighted_dot(field(p_, f), field(w_, f), flops);
      }
      allreduce(pap);

      std::vector<double> sums(2 * F);
      std::vector<double> alpha(F);
      {
        ScopedTimer t(compute_seconds_);
        for (int f = 0; f < fields_; ++f) {
          alpha[f] = pap[f] > 0.0 ? rz[f] / pap[f] : 0.0;
          flops.add(0, 0, 1);
          double* x = field(x_, f);
          double* r = field(r_, f);
          double* z = field(z_, f);
          const double* p = field(p_, f);
          const double* w = field(w_, f);
          const double a = alpha[f];
          for (std::size_t i = 0; i < n_; ++i) {
            x[i] += a * p[i];
            r[i] -= a * w[i];
            z[i] = inv_diag_[i] * r[i];
          }
          flops.add(2 * n_, 3 * n_);
          sums[f] = weighted_dot(r, z, flops);
          sums[F + f] = weighted_dot(r, r, flops);
        }
      }
      allreduce(sums);

      {
        ScopedTimer t(compute_seconds_);
        for (int f = 0; f < fields_; ++f) {
          const double rz_new = sums[f];
          rr[f] = sums[F + f];
          if (!std::isfinite(rz_new) || !std::isfinite(rr[f])) {
            throw DivergenceError(fmt::format("conjugate gradient diverged at iteration {}", it + 1));
          }
          const double beta = rz[f] > 0.0 ? rz_new / rz[f] : 0.0;
          flops.add(0, 0, 1);
          rz[f] = rz_new;
          double* p = field(p_, f);
          const double* z = field(z_, f);
          for (std::size_t i = 0; i < n_; ++i) p[i] = z[i] + beta * p[i];
          flops.add(n_, n_);
        }
      }
      ++it;
    }

    rep.iterations = it;
    double worst = 0.0;
    for (std::size_t f = 0; f < F; ++f) {
      if (rr0[f] > 0.0) worst = std::max(worst, std::sqrt(std::max(rr[f], 0.0) / rr0[f]));
    }
    rep.relative_residual = worst;
    rep.wall_seconds = seconds_since(t0);
    rep.compute_seconds = compute_seconds_;
    rep.comm_seconds = comm_seconds_;
    rep.traffic = transport_.counters().since(before);
    return rep;
  }

  double max_error() {
    const double* x = x_.data();
    double shift_x = 0.0;
    double shift_exact = 0.0;
    if (options_.boundary == Boundary::neumann) {
      std::array<double, 3> sums{0.0, 0.0, 0.0};
      for (std::size_t p = 0; p < n_; ++p) {
        sums[0] += x[p] * inv_mult_[p];
        sums[1] += exact_[p] * inv_mult_[p];
        sums[2] += inv_mult_[p];
      }
      transport_.allreduce_sum(sums);
      shift_x = sums[0] / sums[2];
      shift_exact = sums[1] / sums[2];
    }
    double err = 0.0;
    for (std::size_t p = 0; p < n_; ++p) {
      err = std::max(err, std::abs((x[p] - shift_x) - (exact_[p] - shift_exact)));
    }
    return err;
  }

  const CaseConfig& config_;
  const WorkUnitOptions& options_;
  Transport& transport_;
  RankDomain domain_;
  TensorBasis basis_;
  ElementLaplacian op_;
  int fields_;
  std::size_t n_;
  std::size_t npts_;

  std::vector<double> inv_mult_, inv_diag_, exact_, rhs_;
  std::vector<double> x_, r_, z_, p_, w_, scratch_;
  double compute_seconds_ = 0.0;
  double comm_seconds_ = 0.0;
};

}  // namespace

RankReport rank_work_unit(const CaseConfig& config, const PartitionPlan& plan,
                          Transport& transport, const WorkUnitOptions& options) {
  config.validate();
  if (options.boundary == Boundary::neumann && !options.project_mean) {
    throw DivergenceError(
        "pure-Neumann Poisson problem is singular: CG needs mean-zero projection to converge");
  }
  if (transport.size() != plan.ranks) {
    throw InvalidArgumentError(fmt::format("transport has {} ranks but the plan has {}",
                                           transport.size(), plan.ranks));
  }
  RankSolver solver(config, plan, transport, options);
  return solver.run();
}

StepReport cg_work_unit(const CaseConfig& config, const PartitionPlan& plan,
                        harness::LoopbackNetwork& network, const WorkUnitOptions& options) {
  config.validate();
  if (options.boundary == Boundary::neumann && !options.project_mean) {
    throw DivergenceError(
        "pure-Neumann Poisson problem is singular: CG needs mean-zero projection to converge");
  }
  if (network.size() != plan.ranks) {
    throw InvalidArgumentError(fmt::format("network has {} ranks but the plan has {}",
                                           network.size(), plan.ranks));
  }
  StepReport report;
  report.ranks.resize(static_cast<std::size_t>(plan.ranks));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(plan.ranks));
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(plan.ranks));
  for (int r = 0; r < plan.ranks; ++r) {
    workers.emplace_back([&, r] {
      try {
        report.ranks[static_cast<std::size_t>(r)] =
            rank_work_unit(config, plan, network.endpoint(r), options);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return report;
}

FlopCounter fixed_step_flops(const CaseConfig& config, std::int64_t elements) {
  const auto npts = static_cast<std::uint64_t>(config.points_per_element());
  const auto m = static_cast<std::uint64_t>(elements) * npts;
  const std::uint64_t lines = static_cast<std::uint64_t>(config.degree[0] + config.degree[1] +
                                                         config.degree[2] + 3);
  const auto k = static_cast<std::uint64_t>(config.cg_iters_per_step);
  const auto fields = static_cast<std::uint64_t>(config.fields);

  // Initial z = M^-1 r and the two weighted dots.
  std::uint64_t adds = 2 * m;
  std::uint64_t mults = 5 * m;
  // Per iteration: operator, three weighted dots, three vector updates, the
  // preconditioner, and two scalar divisions.
  const std::uint64_t op_adds = static_cast<std::uint64_t>(elements) * 2 * lines * npts;
  const std::uint64_t op_mults = static_cast<std::uint64_t>(elements) * (2 * lines * npts + 3 * npts);
  adds += k * (op_adds + 6 * m);
  mults += k * (op_mults + 10 * m);
  FlopCounter c;
  c.add(fields * adds, fields * mults, fields * k * 2);
  return c;
}

// ---------------------------------------------------------------------------
// StepReport

int StepReport::steps_completed() const {
  return ranks.empty() ? 0 : static_cast<int>(ranks.front().steps.size());
}

int StepReport::iterations(int step) const {
  return ranks.front().steps.at(static_cast<std::size_t>(step)).iterations;
}

double StepReport::relative_residual(int step) const {
  return ranks.front().steps.at(static_cast<std::size_t>(step)).relative_residual;
}

double StepReport::max_error() const {
  double e = 0.0;
  for (const auto& r : ranks) e = std::max(e, r.max_error);
  return e;
}

FlopCounter StepReport::flops(int step) const {
  FlopCounter c;
  for (const auto& r : ranks) c.add(r.steps.at(static_cast<std::size_t>(step)).flops);
  return c;
}

std::uint64_t StepReport::words_sent(int step) const {
  std::uint64_t w = 0;
  for (const auto& r : ranks) w += r.steps.at(static_cast<std::size_t>(step)).traffic.total_words_out();
  return w;
}

std::uint64_t StepReport::messages_sent(int step) const {
  std::uint64_t m = 0;
  for (const auto& r : ranks) m += r.steps.at(static_cast<std::size_t>(step)).traffic.messages_out;
  return m;
}

}  // namespace gammabench::sem
