#include "gammabench/sem/element.hpp"

#include <fmt/format.h>

#include "gammabench/errors.hpp"

namespace gammabench::sem {

namespace {

std::size_t stride_of(const ElementShape& shape, Axis axis) {
  switch (axis) {
    case Axis::x:
      return 1;
    case Axis::y:
      return shape.n[0];
    case Axis::z:
      return shape.n[0] * shape.n[1];
  }
  return 1;
}

void check_spans(std::size_t in, std::size_t out, const ElementShape& shape) {
  if (in != shape.size() || out != shape.size()) {
    throw DimensionError(fmt::format("element buffers of length {}/{} do not match {} nodes", in,
                                     out, shape.size()));
  }
}

void check_axis(const ElementShape& shape, const SpectralBasis& basis, Axis axis) {
  if (shape.along(axis) != basis.size()) {
    throw DimensionError(fmt::format("element has {} nodes along axis {} but basis has {}",
                                     shape.along(axis), static_cast<int>(axis), basis.size()));
  }
}

}  // namespace

ElementField ElementField::zeros(ElementShape shape, ElementIndex index) {
  return ElementField{index, shape, std::vector<double>(shape.size(), 0.0)};
}

TensorBasis TensorBasis::isotropic(int degree) {
  auto b = build_gll_basis(degree);
  return TensorBasis{{b, b, b}};
}

TensorBasis TensorBasis::from_degrees(const std::array<int, 3>& degree) {
  if (degree[0] == degree[1] && degree[1] == degree[2]) return isotropic(degree[0]);
  return TensorBasis{{build_gll_basis(degree[0]), build_gll_basis(degree[1]),
                      build_gll_basis(degree[2])}};
}

void derivative(std::span<const double> in, std::span<double> out, const ElementShape& shape,
                const SpectralBasis& basis, Axis axis, FlopCounter& flops) {
  check_spans(in.size(), out.size(), shape);
  check_axis(shape, basis, axis);
  const std::size_t n = basis.size();
  const std::size_t stride = stride_of(shape, axis);
  const std::size_t total = shape.size();
  const double* d = basis.diff.data();
  for (std::size_t p = 0; p < total; ++p) {
    const std::size_t t = (p / stride) % n;
    const std::size_t base = p - t * stride;
    const double* row = d + t * n;
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) acc += row[m] * in[base + m * stride];
    out[p] = acc;
  }
  flops.add(n * total, n * total);
}

void derivative_transpose(std::span<const double> in, std::span<double> out,
                          const ElementShape& shape, const SpectralBasis& basis, Axis axis,
                          bool accumulate, FlopCounter& flops) {
  check_spans(in.size(), out.size(), shape);
  check_axis(shape, basis, axis);
  const std::size_t n = basis.size();
  const std::size_t stride = stride_of(shape, axis);
  const std::size_t total = shape.size();
  const double* d = basis.diff.data();
  for (std::size_t p = 0; p < total; ++p) {
    const std::size_t t = (p / stride) % n;
    const std::size_t base = p - t * stride;
    double acc = accumulate ? out[p] : 0.0;
    for (std::size_t m = 0; m < n; ++m) acc += d[m * n + t] * in[base + m * stride];
    out[p] = acc;
  }
  flops.add(n * total, n * total);
}

ElementField tensor_derivative(const ElementField& field, const SpectralBasis& basis, Axis axis,
                               FlopCounter& flops) {
  if (field.values.size() != field.shape.size()) {
    throw DimensionError(fmt::format("field holds {} values for a {}-node element",
                                     field.values.size(), field.shape.size()));
  }
  ElementField out = ElementField::zeros(field.shape, field.index);
  derivative(field.values, out.values, field.shape, basis, axis, flops);
  return out;
}

ElementLaplacian::ElementLaplacian(const TensorBasis& basis, BoxGeometry geometry)
    : basis_(basis), shape_(basis.shape()) {
  if (!(geometry.hx > 0.0) || !(geometry.hy > 0.0) || !(geometry.hz > 0.0)) {
    throw GeometryError(fmt::format("element box {} x {} x {} has a non-positive edge",
                                    geometry.hx, geometry.hy, geometry.hz));
  }
  const std::array<double, 3> h{geometry.hx, geometry.hy, geometry.hz};
  const double jacobian = h[0] * h[1] * h[2] / 8.0;
  const std::size_t total = shape_.size();
  mass_.resize(total);
  for (auto& g : geometric_) g.resize(total);
  for (std::size_t k = 0; k < shape_.n[2]; ++k) {
    for (std::size_t j = 0; j < shape_.n[1]; ++j) {
      for (std::size_t i = 0; i < shape_.n[0]; ++i) {
        const std::size_t p = shape_.offset(i, j, k);
        const double w = basis_.axis[0].weights[i] * basis_.axis[1].weights[j] *
                         basis_.axis[2].weights[k] * jacobian;
        mass_[p] = w;
        for (int d = 0; d < 3; ++d) geometric_[d][p] = w * (2.0 / h[d]) * (2.0 / h[d]);
      }
    }
  }
}

void ElementLaplacian::apply(std::span<const double> in, std::span<double> out,
                             std::span<double> scratch, FlopCounter& flops) const {
  const std::size_t total = shape_.size();
  check_spans(in.size(), out.size(), shape_);
  if (scratch.size() < 2 * total) {
    throw DimensionError(fmt::format("scratch of {} values, need {}", scratch.size(), 2 * total));
  }
  auto grad = scratch.subspan(0, total);
  for (int d = 0; d < 3; ++d) {
    const Axis axis = static_cast<Axis>(d);
    derivative(in, grad, shape_, basis_.axis[d], axis, flops);
    const auto& g = geometric_[d];
    for (std::size_t p = 0; p < total; ++p) grad[p] *= g[p];
    flops.add(0, total);
    derivative_transpose(grad, out, shape_, basis_.axis[d], axis, d > 0, flops);
  }
}

std::vector<double> ElementLaplacian::diagonal() const {
  std::vector<double> diag(shape_.size(), 0.0);
  for (std::size_t k = 0; k < shape_.n[2]; ++k) {
    for (std::size_t j = 0; j < shape_.n[1]; ++j) {
      for (std::size_t i = 0; i < shape_.n[0]; ++i) {
        const std::size_t p = shape_.offset(i, j, k);
        const std::array<std::size_t, 3> idx{i, j, k};
        double sum = 0.0;
        for (int d = 0; d < 3; ++d) {
          const auto& b = basis_.axis[d];
          for (std::size_t m = 0; m < b.size(); ++m) {
            auto q = idx;
            q[static_cast<std::size_t>(d)] = m;
            const double dmp = b.d(m, idx[static_cast<std::size_t>(d)]);
            sum += geometric_[d][shape_.offset(q[0], q[1], q[2])] * dmp * dmp;
          }
        }
        diag[p] = sum;
      }
    }
  }
  return diag;
}

std::vector<double> ElementLaplacian::mass() const { return mass_; }

FlopCounter ElementLaplacian::apply_cost() const {
  const std::uint64_t total = shape_.size();
  const std::uint64_t lines = shape_.n[0] + shape_.n[1] + shape_.n[2];
  FlopCounter c;
  c.add(2 * lines * total, 2 * lines * total + 3 * total);
  return c;
}

ElementField apply_element_laplacian(const ElementField& field, const TensorBasis& basis,
                                     BoxGeometry geometry, FlopCounter& flops) {
  if (!(field.shape == basis.shape()) || field.values.size() != field.shape.size()) {
    throw DimensionError(fmt::format("field of {} values does not match the {}-node basis grid",
                                     field.values.size(), basis.shape().size()));
  }
  const ElementLaplacian op(basis, geometry);
  ElementField out = ElementField::zeros(field.shape, field.index);
  std::vector<double> scratch(2 * field.shape.size());
  op.apply(field.values, out.values, scratch, flops);
  return out;
}

}  // namespace gammabench::sem
