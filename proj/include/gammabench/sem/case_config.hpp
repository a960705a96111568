#pragma once

#include <array>
#include <cstdint>

namespace gammabench::sem {

/// Mesh and work-unit parameters of one benchmark case.
struct CaseConfig {
  std::array<int, 3> elements{1, 1, 1};  // E_x, E_y, E_z
  std::array<int, 3> degree{2, 2, 2};    // N_x, N_y, N_z
  int fields = 1;                        // n_v
  int steps = 1;
  int cg_iters_per_step = 1;

  std::int64_t element_count() const {
    return static_cast<std::int64_t>(elements[0]) * elements[1] * elements[2];
  }
  std::int64_t points_per_element() const {
    return static_cast<std::int64_t>(degree[0] + 1) * (degree[1] + 1) * (degree[2] + 1);
  }
  /// Mean polynomial degree; the isotropic N for all acceptance cases.
  double mean_degree() const { return (degree[0] + degree[1] + degree[2]) / 3.0; }

  /// Throws InvalidArgumentError (or DegreeTooSmallError) when out of range.
  void validate() const;

  friend bool operator==(const CaseConfig&, const CaseConfig&) = default;
};

/// Builds an isotropic case with E^3 elements of degree N.
CaseConfig cubic_case(int elements_per_direction, int degree, int fields = 1);

/// Independent variables of the whole mesh: E_x E_y E_z n_v (N_x+1)(N_y+1)(N_z+1).
std::int64_t dof_count(const CaseConfig& config);

/// Bytes per grid point per word such that a 4x4x4, N=8 block takes 200 MB.
inline constexpr double kDefaultBytesPerDofCoefficient = 200e6 / (64.0 * 729.0 * 8.0);

/// Memory footprint in bytes: coefficient * grid points * 8-byte word.
double memory_estimate(const CaseConfig& config,
                       double bytes_per_dof_coefficient = kDefaultBytesPerDofCoefficient);

}  // namespace gammabench::sem
