#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "gammabench/sem/basis.hpp"
#include "gammabench/sem/flop_counter.hpp"

namespace gammabench::sem {

enum class Axis { x = 0, y = 1, z = 2 };

/// Nodal extents of an element, (N_x+1, N_y+1, N_z+1).
struct ElementShape {
  std::array<std::size_t, 3> n{0, 0, 0};

  std::size_t size() const { return n[0] * n[1] * n[2]; }
  std::size_t along(Axis a) const { return n[static_cast<int>(a)]; }
  /// Lexicographic offset, x fastest.
  std::size_t offset(std::size_t i, std::size_t j, std::size_t k) const {
    return i + n[0] * (j + n[1] * k);
  }
  friend bool operator==(const ElementShape&, const ElementShape&) = default;
};

struct ElementIndex {
  int i = 0;
  int j = 0;
  int k = 0;
  friend auto operator<=>(const ElementIndex&, const ElementIndex&) = default;
};

/// Nodal values of one element, x fastest. Interface values are stored
/// redundantly in every element that shares them.
struct ElementField {
  ElementIndex index;
  ElementShape shape;
  std::vector<double> values;

  static ElementField zeros(ElementShape shape, ElementIndex index = {});
};

/// One GLL basis per axis; isotropic meshes hold three copies of one basis.
struct TensorBasis {
  std::array<SpectralBasis, 3> axis;

  static TensorBasis isotropic(int degree);
  static TensorBasis from_degrees(const std::array<int, 3>& degree);
  ElementShape shape() const { return {{axis[0].size(), axis[1].size(), axis[2].size()}}; }
  const SpectralBasis& operator[](Axis a) const { return axis[static_cast<int>(a)]; }
};

/// Axis-aligned box element: edge lengths of the affine map.
struct BoxGeometry {
  double hx = 1.0;
  double hy = 1.0;
  double hz = 1.0;
};

/// out = D_axis in. Adds 2 * n_axis * shape.size() flops (one multiply and one
/// add per inner-product term). Span lengths must equal shape.size().
void derivative(std::span<const double> in, std::span<double> out, const ElementShape& shape,
                const SpectralBasis& basis, Axis axis, FlopCounter& flops);

/// out += D_axis^T in (accumulate = true) or out = D_axis^T in. Same flop
/// count as derivative().
void derivative_transpose(std::span<const double> in, std::span<double> out,
                          const ElementShape& shape, const SpectralBasis& basis, Axis axis,
                          bool accumulate, FlopCounter& flops);

/// Derivative of an element field along one axis. Throws DimensionError when
/// the field does not match the basis along that axis.
ElementField tensor_derivative(const ElementField& field, const SpectralBasis& basis, Axis axis,
                               FlopCounter& flops);

/// Weak-form stiffness operator sum_d D_d^T G_d D_d on one box element, where
/// G_d folds the quadrature weights, the Jacobian and (2/h_d)^2.
class ElementLaplacian {
 public:
  /// Throws GeometryError for non-positive edge lengths.
  ElementLaplacian(const TensorBasis& basis, BoxGeometry geometry);

  const ElementShape& shape() const { return shape_; }

  /// out = A in. scratch must hold 2 * shape().size() values.
  void apply(std::span<const double> in, std::span<double> out, std::span<double> scratch,
             FlopCounter& flops) const;

  /// Diagonal of the element matrix (no flops counted: setup only).
  std::vector<double> diagonal() const;

  /// Diagonal mass matrix J w_i w_j w_k.
  std::vector<double> mass() const;

  /// Counted flops of one apply().
  FlopCounter apply_cost() const;

 private:
  TensorBasis basis_;
  ElementShape shape_;
  std::array<std::vector<double>, 3> geometric_;  // G_d per node
  std::vector<double> mass_;
};

/// Weak Laplacian of one element field. Throws DimensionError on a shape
/// mismatch and GeometryError on a degenerate box.
ElementField apply_element_laplacian(const ElementField& field, const TensorBasis& basis,
                                     BoxGeometry geometry, FlopCounter& flops);

}  // namespace gammabench::sem
