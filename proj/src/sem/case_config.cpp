#include "gammabench/sem/case_config.hpp"

#include <fmt/format.h>

#include "gammabench/errors.hpp"

namespace gammabench::sem {

void CaseConfig::validate() const {
  for (int d = 0; d < 3; ++d) {
    if (elements[d] < 1) {
      throw InvalidArgumentError(fmt::format("element count along axis {} must be >= 1, got {}",
                                             d, elements[d]));
    }
    if (degree[d] < 2) {
      throw DegreeTooSmallError(
          fmt::format("polynomial degree along axis {} must be >= 2, got {}", d, degree[d]));
    }
  }
  if (fields < 1) throw InvalidArgumentError(fmt::format("fields must be >= 1, got {}", fields));
  if (steps < 1) throw InvalidArgumentError(fmt::format("steps must be >= 1, got {}", steps));
  if (cg_iters_per_step < 1) {
    throw InvalidArgumentError(
        fmt::format("cg_iters_per_step must be >= 1, got {}", cg_iters_per_step));
  }
}

CaseConfig cubic_case(int elements_per_direction, int degree, int fields) {
  CaseConfig c;
  c.elements = {elements_per_direction, elements_per_direction, elements_per_direction};
  c.degree = {degree, degree, degree};
  c.fields = fields;
  return c;
}

std::int64_t dof_count(const CaseConfig& config) {
  return config.element_count() * config.fields * config.points_per_element();
}

double memory_estimate(const CaseConfig& config, double bytes_per_dof_coefficient) {
  if (!(bytes_per_dof_coefficient > 0.0)) {
    throw InvalidArgumentError("bytes-per-dof coefficient must be positive");
  }
  const double grid_points =
      static_cast<double>(config.element_count()) * static_cast<double>(config.points_per_element());
  return bytes_per_dof_coefficient * grid_points * 8.0;
}

}  // namespace gammabench::sem
