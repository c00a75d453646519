#include "fpl/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace fpl {

TensorBasis::TensorBasis(int degree) : degree_(degree) {
  if (degree < 0) throw std::invalid_argument("basis degree must be non-negative");
}

Index3 TensorBasis::multi_index(int m) const {
  const int p = degree_ + 1;
  return {m / (p * p), (m / p) % p, m % p};
}

Eigen::VectorXd TensorBasis::values(const Vec3& xi) const {
  const int p = degree_ + 1;
  std::array<std::vector<double>, 3> v;
  for (int d = 0; d < 3; ++d) {
    v[d].resize(static_cast<std::size_t>(p));
    orthonormal_legendre<double>(degree_, xi[d], v[d].data(), nullptr);
  }
  Eigen::VectorXd out(size());
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int c = 0; c < p; ++c) out[(a * p + b) * p + c] = v[0][a] * v[1][b] * v[2][c];
  return out;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> TensorBasis::gradients(const Vec3& xi) const {
  const int p = degree_ + 1;
  std::array<std::vector<double>, 3> v, dv;
  for (int d = 0; d < 3; ++d) {
    v[d].resize(static_cast<std::size_t>(p));
    dv[d].resize(static_cast<std::size_t>(p));
    orthonormal_legendre<double>(degree_, xi[d], v[d].data(), dv[d].data());
  }
  Eigen::Matrix<double, Eigen::Dynamic, 3> out(size(), 3);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      for (int c = 0; c < p; ++c) {
        const int m = (a * p + b) * p + c;
        out(m, 0) = dv[0][a] * v[1][b] * v[2][c];
        out(m, 1) = v[0][a] * dv[1][b] * v[2][c];
        out(m, 2) = v[0][a] * v[1][b] * dv[2][c];
      }
  return out;
}

DgSpace::DgSpace(CartesianMesh mesh, int degree, int quad_order)
    : mesh_(std::move(mesh)),
      basis_(degree),
      rule_(gauss_legendre<double>(quad_order < 0 ? degree + 2 : quad_order)),
      scale_(std::pow(2.0 / mesh_.width(), 1.5)) {
  if (quad_order >= 0 && quad_order < degree + 1)
    throw std::invalid_argument("volume quadrature order must be at least degree + 1");
  const int m = rule_.order();
  const int nb = basis_.size();
  const double h = mesh_.width();
  const double jac = h / 2.0;

  const int nv = m * m * m;
  volume_ref_.reserve(static_cast<std::size_t>(nv));
  volume_values_.resize(nv, nb);
  for (auto& d : volume_deriv_) d.resize(nv, nb);
  volume_weights_.resize(nv);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const int a = (i * m + j) * m + k;
        const Vec3 xi(rule_.nodes[i], rule_.nodes[j], rule_.nodes[k]);
        volume_ref_.push_back(xi);
        volume_weights_[a] = rule_.weights[i] * rule_.weights[j] * rule_.weights[k] * jac * jac * jac;
        volume_values_.row(a) = scale_ * basis_.values(xi).transpose();
        const auto g = basis_.gradients(xi);
        for (int d = 0; d < 3; ++d) volume_deriv_[d].row(a) = (scale_ / jac) * g.col(d).transpose();
      }

  face_weights_.resize(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) face_weights_[i * m + j] = rule_.weights[i] * rule_.weights[j] * jac * jac;
  for (int axis = 0; axis < 3; ++axis)
    for (int side = 0; side < 2; ++side) {
      Eigen::MatrixXd& fv = face_values_[axis][side];
      fv.resize(m * m, nb);
      for (int j = 0; j < m * m; ++j)
        fv.row(j) = scale_ * basis_.values(face_reference_node(axis, side, j)).transpose();
    }
}

Vec3 DgSpace::face_reference_node(int axis, int side, int j) const {
  const int m = rule_.order();
  const int t1 = axis == 0 ? 1 : 0;
  const int t2 = axis == 2 ? 1 : 2;
  Vec3 xi;
  xi[axis] = side == 0 ? -1.0 : 1.0;
  xi[t1] = rule_.nodes[j / m];
  xi[t2] = rule_.nodes[j % m];
  return xi;
}

Vec3 DgSpace::to_physical(int element, const Vec3& xi) const {
  return mesh_.element_center(element) + 0.5 * mesh_.width() * xi;
}

Vec3 DgSpace::volume_node(int element, int a) const {
  return to_physical(element, volume_reference_node(a));
}

Vec3 DgSpace::face_node(int face, int j) const {
  const Face& f = mesh_.face(face);
  return to_physical(f.minus, face_reference_node(f.axis, f.minus_side, j));
}

}  // namespace fpl
