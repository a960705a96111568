#pragma once

#include <cstddef>
#include <vector>

namespace gammabench::sem {

/// Gauss-Lobatto-Legendre nodal basis of degree N on [-1, 1].
///
/// Nodes are the roots of (1 - x^2) L'_N(x), sorted ascending. The
/// differentiation matrix is stored row-major: diff[i * size() + j] is the
/// derivative of the j-th Lagrange interpolant evaluated at node i.
struct SpectralBasis {
  int degree = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> diff;

  std::size_t size() const { return nodes.size(); }
  double d(std::size_t i, std::size_t j) const { return diff[i * size() + j]; }
};

/// Interior Gauss-Legendre grid used for the staggered pressure space:
/// N - 1 points for a velocity degree N.
struct PressureBasis {
  int degree = 0;  // pressure polynomial degree, N - 2
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Legendre polynomial L_n(x) by three-term recurrence.
double legendre(int n, double x);

/// Builds the GLL basis of degree N. Throws DegreeTooSmallError for N < 2.
SpectralBasis build_gll_basis(int degree);

/// Builds the Gauss-Legendre pressure grid paired with velocity degree N.
/// Throws DegreeTooSmallError for N < 2.
PressureBasis build_pressure_basis(int velocity_degree);

}  // namespace gammabench::sem
