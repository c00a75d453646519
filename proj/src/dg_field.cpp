#include "fpl/dg_field.hpp"

namespace fpl {

DgField::DgField(SpacePtr space, RowMatrix coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() != space_->num_elements() || coeffs_.cols() != space_->num_basis())
    throw std::invalid_argument("coefficient array does not match the space");
}

double evaluate(const DgField& f, int element, const Vec3& xi) {
  const DgSpace& s = f.space();
  if (element < 0 || element >= s.num_elements())
    throw std::out_of_range("element " + std::to_string(element) + " out of range");
  return s.basis_scale() * f.element(element).dot(s.basis().values(xi));
}

RowMatrix volume_values(const DgField& f) {
  return f.coeffs() * f.space().volume_values().transpose();
}

Eigen::VectorXd element_trace(const DgField& f, int e, int axis, int side) {
  return f.space().face_values(axis, side) * f.element(e).transpose();
}

FaceTracePair face_traces(const DgField& f, int face) {
  const Face& fc = f.space().mesh().face(face);
  FaceTracePair t;
  t.face = face;
  t.minus = element_trace(f, fc.minus, fc.axis, fc.minus_side);
  if (!fc.boundary()) t.plus = element_trace(f, fc.plus, fc.axis, fc.plus_side());
  return t;
}

JumpAverage jump_and_average(const DgField& f, int face) {
  const Face& fc = f.space().mesh().face(face);
  if (fc.boundary()) throw std::invalid_argument("jump is undefined on boundary faces");
  const FaceTracePair t = face_traces(f, face);
  JumpAverage out;
  out.jump = t.plus * fc.normal_plus.transpose() + t.minus * fc.normal_minus.transpose();
  out.average = 0.5 * (t.plus + t.minus);
  return out;
}

DgField project_nodal(const SpacePtr& space, const RowMatrix& nodal) {
  const Eigen::VectorXd& w = space->volume_weights();
  RowMatrix c = (nodal * w.asDiagonal()) * space->volume_values();
  return DgField(space, std::move(c));
}

VecDgField broken_gradient(const DgField& f) {
  const SpacePtr& sp = f.space_ptr();
  const auto& w = sp->volume_weights();
  VecDgField g(sp);
  for (int d = 0; d < 3; ++d) {
    const RowMatrix nodal = f.coeffs() * sp->volume_derivative(d).transpose();
    g[d].coeffs() = (nodal * w.asDiagonal()) * sp->volume_values();
  }
  return g;
}

VecDgField discrete_gradient(const DgField& f) {
  const SpacePtr& sp = f.space_ptr();
  const DgSpace& s = *sp;
  const CartesianMesh& mesh = s.mesh();
  const Eigen::VectorXd& w = s.volume_weights();
  const Eigen::VectorXd& fw = s.face_weights();
  const Vec3 u = reference_direction();
  VecDgField g(sp);

  // -(f, d_d phi_m)_R
  const RowMatrix fv = volume_values(f);
  for (int d = 0; d < 3; ++d) g[d].coeffs() = -(fv * w.asDiagonal()) * s.volume_derivative(d);

  // + sum over the faces of R of <f_check, phi_m n_d>
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int axis = 0; axis < 3; ++axis)
      for (int side = 0; side < 2; ++side) {
        const Face& fc = mesh.face(mesh.element_face(e, axis, side));
        const Face own = fc.minus == e ? fc : fc.swapped();
        Eigen::VectorXd fcheck;
        if (own.boundary() || face_orientation(own, u) == FaceOrientation::plus_side_upwind)
          fcheck = element_trace(f, e, axis, side);
        else
          fcheck = element_trace(f, own.plus, axis, 1 - side);
        const double nd = own.normal_minus[axis];
        g[axis].element(e) += nd * (fcheck.cwiseProduct(fw)).transpose() * s.face_values(axis, side);
      }
  }
  return g;
}

VecDgField lift_of_jumps(const DgField& f) {
  const SpacePtr& sp = f.space_ptr();
  const DgSpace& s = *sp;
  const CartesianMesh& mesh = s.mesh();
  const Eigen::VectorXd& fw = s.face_weights();
  const Vec3 u = reference_direction();
  VecDgField r(sp);
  for (const int id : mesh.interior_faces()) {
    const Face& fc = mesh.face(id);
    const JumpAverage ja = jump_and_average(f, id);
    const bool from_minus = face_orientation(fc, u) == FaceOrientation::minus_side_upwind;
    const int e = from_minus ? fc.minus : fc.plus;
    const int side = from_minus ? fc.minus_side : fc.plus_side();
    const Eigen::MatrixXd& phi = s.face_values(fc.axis, side);
    for (int d = 0; d < 3; ++d)
      r[d].element(e) -= (ja.jump.col(d).cwiseProduct(fw)).transpose() * phi;
  }
  return r;
}

}  // namespace fpl
