#pragma once

#include "dwlab/spectral.hpp"

namespace dwlab {

/// Physical-space quadrature for projecting a(x) h(x) onto the sine modes.
///
/// Nodes are composite 16-point Gauss-Legendre panels laid on each piece of
/// the damping support, so the indicator jumps of a(x) fall on panel edges.
/// The panel width resolves products of two modes to rounding level; the node
/// count never drops below points_per_mode * n_modes.
class ModalCollocation {
 public:
  ModalCollocation(const SpectralOperator& op, const DampingProfile& profile, int points_per_mode = 4);

  /// Nodal values u(x_q) = sum_k c_k e_k(x_q).
  Vector synthesize(const Vector& coefficients) const { return basis_ * coefficients; }
  /// Projection c_k = sum_q w_q a(x_q) h_q e_k(x_q).
  Vector project(const Vector& nodal) const { return basis_.transpose() * weighted_.cwiseProduct(nodal); }
  /// sum_q w_q a(x_q) h_q.
  double integrate(const Vector& nodal) const { return weighted_.dot(nodal); }
  /// sum_q w_q a(x_q) d_q e_j(x_q) e_k(x_q).
  Matrix weighted_gram(const Vector& nodal) const;

  Eigen::Index n_nodes() const { return nodes_.size(); }
  const Vector& nodes() const { return nodes_; }
  const Vector& weights_times_damping() const { return weighted_; }
  const Matrix& basis() const { return basis_; }

 private:
  Vector nodes_;
  Vector weighted_;
  Matrix basis_;
};

}  // namespace dwlab
