#include "gammabench/sem/basis.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gammabench/errors.hpp"

namespace gammabench::sem {

namespace {

constexpr double kNewtonTolerance = 1e-14;
constexpr int kNewtonMaxIterations = 100;

// Returns {L_n(x), L_{n-1}(x)}.
std::pair<double, double> legendre_pair(int n, double x) {
  double prev = 1.0;
  double cur = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double next = ((2.0 * k - 1.0) * x * cur - (k - 1.0) * prev) / k;
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

double legendre_derivative(int n, double x) {
  // (1 - x^2) L'_n = n (L_{n-1} - x L_n), valid for |x| < 1.
  const auto [ln, lnm1] = legendre_pair(n, x);
  return n * (lnm1 - x * ln) / (1.0 - x * x);
}

void check_degree(int degree) {
  if (degree < 2) {
    throw DegreeTooSmallError(fmt::format(
        "polynomial degree {} is too small: the staggered pressure grid needs N - 1 >= 1 points",
        degree));
  }
}

}  // namespace

double legendre(int n, double x) { return legendre_pair(n, x).first; }

SpectralBasis build_gll_basis(int degree) {
  check_degree(degree);
  const int n = degree;
  const std::size_t np = static_cast<std::size_t>(n) + 1;

  SpectralBasis basis;
  basis.degree = n;
  basis.nodes.assign(np, 0.0);
  basis.nodes.front() = -1.0;
  basis.nodes.back() = 1.0;

  // Newton on f(x) = (1 - x^2) L'_N(x) = N (L_{N-1} - x L_N), whose
  // derivative is -N (N + 1) L_N. Solve the lower half and mirror.
  for (std::size_t i = 1; i < np / 2; ++i) {
    double x = -std::cos(std::numbers::pi * static_cast<double>(i) / n);
    for (int it = 0; it < kNewtonMaxIterations; ++it) {
      const auto [ln, lnm1] = legendre_pair(n, x);
      const double dx = (x * ln - lnm1) / ((n + 1) * ln);
      x -= dx;
      if (std::abs(dx) < kNewtonTolerance) break;
    }
    basis.nodes[i] = x;
    basis.nodes[np - 1 - i] = -x;
  }
  if (n % 2 == 0) basis.nodes[np / 2] = 0.0;

  std::vector<double> ln_at(np);
  basis.weights.resize(np);
  for (std::size_t i = 0; i < np; ++i) {
    ln_at[i] = legendre(n, basis.nodes[i]);
    basis.weights[i] = 2.0 / (n * (n + 1.0) * ln_at[i] * ln_at[i]);
  }
  for (std::size_t i = 0; i < np / 2; ++i) {
    const double w = 0.5 * (basis.weights[i] + basis.weights[np - 1 - i]);
    basis.weights[i] = w;
    basis.weights[np - 1 - i] = w;
  }

  // Off-diagonal entries from the closed form; the diagonal is the negative
  // row sum so constants differentiate to zero at round-off level.
  basis.diff.assign(np * np, 0.0);
  for (std::size_t i = 0; i < np; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
      if (i == j) continue;
      const double v = ln_at[i] / (ln_at[j] * (basis.nodes[i] - basis.nodes[j]));
      basis.diff[i * np + j] = v;
      row_sum += v;
    }
    basis.diff[i * np + i] = -row_sum;
  }
  return basis;
}

PressureBasis build_pressure_basis(int velocity_degree) {
  check_degree(velocity_degree);
  const int m = velocity_degree - 1;  // number of Gauss points, roots of L_m
  PressureBasis basis;
  basis.degree = velocity_degree - 2;
  basis.nodes.resize(static_cast<std::size_t>(m));
  basis.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    for (int it = 0; it < kNewtonMaxIterations; ++it) {
      const double dx = legendre(m, x) / legendre_derivative(m, x);
      x -= dx;
      if (std::abs(dx) < kNewtonTolerance) break;
    }
    const double dl = legendre_derivative(m, x);
    basis.nodes[static_cast<std::size_t>(i)] = x;
    basis.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dl * dl);
  }
  if (m % 2 == 1) basis.nodes[static_cast<std::size_t>(m / 2)] = 0.0;
  return basis;
}

}  // namespace gammabench::sem
