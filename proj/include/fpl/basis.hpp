#pragma once

#include <memory>
#include <vector>

#include "fpl/mesh.hpp"
#include "fpl/quadrature.hpp"
#include "fpl/types.hpp"

namespace fpl {

/// Tensor-product orthonormal Legendre basis of Q^k on the reference cube.
/// Basis index m = (a (k+1) + b)(k+1) + c for P_a(xi) P_b(eta) P_c(zeta).
class TensorBasis {
 public:
  explicit TensorBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return (degree_ + 1) * (degree_ + 1) * (degree_ + 1); }
  Index3 multi_index(int m) const;

  /// All basis values at a reference point.
  Eigen::VectorXd values(const Vec3& xi) const;
  /// Reference gradients, one row per basis function.
  Eigen::Matrix<double, Eigen::Dynamic, 3> gradients(const Vec3& xi) const;

 private:
  int degree_;
};

/// Mesh, basis and quadrature tables in physical scaling.
///
/// The physical basis on element R is phi_m(p) = (2/h)^{3/2} phihat_m(xi), so
/// the element mass matrix is the identity. Volume nodes use a tensor
/// Gauss-Legendre rule of 1D order `quad_order` (default k + 2), numbered
/// lexicographically with x slowest; face nodes use the 2D tensor rule over the
/// two tangential axes in increasing axis order.
class DgSpace {
 public:
  DgSpace(CartesianMesh mesh, int degree, int quad_order = -1);

  const CartesianMesh& mesh() const { return mesh_; }
  const TensorBasis& basis() const { return basis_; }
  int degree() const { return basis_.degree(); }
  int quad_order() const { return rule_.order(); }
  const QuadratureRule1D<double>& rule() const { return rule_; }

  int num_basis() const { return basis_.size(); }
  int num_elements() const { return mesh_.num_elements(); }
  int num_dofs() const { return num_basis() * num_elements(); }
  int num_volume_nodes() const { return static_cast<int>(volume_weights_.size()); }
  int num_face_nodes() const { return static_cast<int>(face_weights_.size()); }

  /// (nodes x basis) physical basis values at the volume nodes.
  const Eigen::MatrixXd& volume_values() const { return volume_values_; }
  /// (nodes x basis) physical derivative along `axis` at the volume nodes.
  const Eigen::MatrixXd& volume_derivative(int axis) const { return volume_deriv_[axis]; }
  /// Physical quadrature weights (sum to the element volume).
  const Eigen::VectorXd& volume_weights() const { return volume_weights_; }
  /// (face nodes x basis) physical basis values on local face `side` of `axis`.
  const Eigen::MatrixXd& face_values(int axis, int side) const { return face_values_[axis][side]; }
  /// Physical face weights (sum to h^2).
  const Eigen::VectorXd& face_weights() const { return face_weights_; }

  const Vec3& volume_reference_node(int a) const { return volume_ref_[static_cast<std::size_t>(a)]; }
  /// Reference coordinates of face node `j` on local face (`axis`, `side`).
  Vec3 face_reference_node(int axis, int side, int j) const;

  Vec3 volume_node(int element, int a) const;
  /// Physical position of face node `j` on mesh face `face`.
  Vec3 face_node(int face, int j) const;
  Vec3 to_physical(int element, const Vec3& xi) const;

  /// Physical scale factor (2/h)^{3/2} of the basis.
  double basis_scale() const { return scale_; }

 private:
  CartesianMesh mesh_;
  TensorBasis basis_;
  QuadratureRule1D<double> rule_;
  double scale_;
  std::vector<Vec3> volume_ref_;
  Eigen::MatrixXd volume_values_;
  std::array<Eigen::MatrixXd, 3> volume_deriv_;
  Eigen::VectorXd volume_weights_;
  std::array<std::array<Eigen::MatrixXd, 2>, 3> face_values_;
  Eigen::VectorXd face_weights_;
};

using SpacePtr = std::shared_ptr<const DgSpace>;

inline SpacePtr make_space(double half_width, int n, int degree, int quad_order = -1) {
  return std::make_shared<const DgSpace>(build_mesh(half_width, n), degree, quad_order);
}

}  // namespace fpl
