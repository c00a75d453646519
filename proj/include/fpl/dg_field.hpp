#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "fpl/basis.hpp"

namespace fpl {

/// Piecewise Q^k field: one row of modal coefficients per element.
class DgField {
 public:
  DgField() = default;
  explicit DgField(SpacePtr space)
      : space_(std::move(space)),
        coeffs_(RowMatrix::Zero(space_->num_elements(), space_->num_basis())) {}
  DgField(SpacePtr space, RowMatrix coeffs);

  const DgSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }

  RowMatrix& coeffs() { return coeffs_; }
  const RowMatrix& coeffs() const { return coeffs_; }
  auto element(int e) { return coeffs_.row(e); }
  auto element(int e) const { return coeffs_.row(e); }

  /// Flat view in element-major, basis-minor order.
  Eigen::Map<Eigen::VectorXd> flat() { return {coeffs_.data(), coeffs_.size()}; }
  Eigen::Map<const Eigen::VectorXd> flat() const { return {coeffs_.data(), coeffs_.size()}; }

  DgField& operator+=(const DgField& o) { coeffs_ += o.coeffs_; return *this; }
  DgField& operator-=(const DgField& o) { coeffs_ -= o.coeffs_; return *this; }
  DgField& operator*=(double s) { coeffs_ *= s; return *this; }

  friend DgField operator+(DgField a, const DgField& b) { return a += b; }
  friend DgField operator-(DgField a, const DgField& b) { return a -= b; }
  friend DgField operator*(double s, DgField a) { return a *= s; }
  friend DgField operator*(DgField a, double s) { return a *= s; }

 private:
  SpacePtr space_;
  RowMatrix coeffs_;
};

/// Three DgField components on one space.
struct VecDgField {
  std::array<DgField, 3> components;

  VecDgField() = default;
  explicit VecDgField(const SpacePtr& space)
      : components{DgField(space), DgField(space), DgField(space)} {}

  DgField& operator[](int d) { return components[static_cast<std::size_t>(d)]; }
  const DgField& operator[](int d) const { return components[static_cast<std::size_t>(d)]; }
  const DgSpace& space() const { return components[0].space(); }

  VecDgField& operator+=(const VecDgField& o) {
    for (int d = 0; d < 3; ++d) (*this)[d] += o[d];
    return *this;
  }
  friend VecDgField operator+(VecDgField a, const VecDgField& b) { return a += b; }
};

/// Traces of a field on both sides of a face at the face quadrature nodes.
struct FaceTracePair {
  int face = -1;
  Eigen::VectorXd minus;
  Eigen::VectorXd plus;  ///< empty on boundary faces
};

struct JumpAverage {
  Eigen::Matrix<double, Eigen::Dynamic, 3> jump;  ///< [g] = g+ n+ + g- n-
  Eigen::VectorXd average;                        ///< {g} = (g+ + g-)/2
};

/// sum_m a_m phi_m(xi) on `element`, xi in the closed reference cube.
double evaluate(const DgField& f, int element, const Vec3& xi);

/// (elements x volume nodes) values.
RowMatrix volume_values(const DgField& f);
/// Values of the minus/plus element traces on a face.
FaceTracePair face_traces(const DgField& f, int face);
/// Trace of element `e` on its local face (axis, side).
Eigen::VectorXd element_trace(const DgField& f, int e, int axis, int side);

JumpAverage jump_and_average(const DgField& f, int face);

/// L2 projection of nodal data (elements x volume nodes) using the volume rule.
DgField project_nodal(const SpacePtr& space, const RowMatrix& nodal);

/// L2 projection of a function of the physical point.
template <typename Fn>
DgField l2_project(Fn&& g, const SpacePtr& space) {
  const int ne = space->num_elements();
  const int nv = space->num_volume_nodes();
  RowMatrix nodal(ne, nv);
  for (int e = 0; e < ne; ++e)
    for (int a = 0; a < nv; ++a) {
      const double v = g(space->volume_node(e, a));
      if (!std::isfinite(v))
        throw std::domain_error("l2_project: non-finite value in element " + std::to_string(e) +
                                " at node " + std::to_string(a));
      nodal(e, a) = v;
    }
  return project_nodal(space, nodal);
}

/// Element-wise gradient of f, projected back onto (W_h)^3.
VecDgField broken_gradient(const DgField& f);

/// Discrete gradient w.r.t. the alternating flux: for all V in (W_h)^3,
/// (grad_h f, V) = -(f, div V) + sum_R <f_check, V^- . n^->_{dR},
/// with f_check the trace from the side where n^- . u < 0 (own trace on the
/// domain boundary).
VecDgField discrete_gradient(const DgField& f);

/// Lift of interface jumps: (r, V) = -sum_faces <[[f]], V_hat>, where V_hat is
/// taken from the side where n^- . u > 0.
VecDgField lift_of_jumps(const DgField& f);

}  // namespace fpl
