#include "fpl/ldg_operator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fpl {

namespace {

constexpr double kVelocityContinuityTol = 1e-10;

// Nodal vector field: one (elements x volume nodes) matrix per component.
using NodalVector = std::array<RowMatrix, 3>;

NodalVector nodal(const VecDgField& v) {
  return {volume_values(v[0]), volume_values(v[1]), volume_values(v[2])};
}

// Adds -(q, d_d phi_m) for every element and basis function.
void add_volume_divergence_term(const DgSpace& s, const NodalVector& q, double sign, RowMatrix& out) {
  const auto& w = s.volume_weights();
  for (int d = 0; d < 3; ++d) out.noalias() += sign * (q[d] * w.asDiagonal()) * s.volume_derivative(d);
}

// Adds to the two elements of an interior face the test-function traces
// weighted by `minus_val` (minus side) and `plus_val` (plus side).
void add_face_term(const DgSpace& s, const Face& fc, const Eigen::VectorXd& minus_val,
                   const Eigen::VectorXd& plus_val, RowMatrix& out) {
  const auto& fw = s.face_weights();
  out.row(fc.minus) += minus_val.cwiseProduct(fw).transpose() * s.face_values(fc.axis, fc.minus_side);
  out.row(fc.plus) += plus_val.cwiseProduct(fw).transpose() * s.face_values(fc.axis, fc.plus_side());
}

// Trace of a projected vector field, dotted with n, from the side selected by
// the alternating flux (n^- . u > 0 picks the minus side).
Eigen::VectorXd hat_normal_trace(const std::array<DgField, 3>& q, const Face& fc) {
  const bool from_minus = face_orientation(fc, reference_direction()) == FaceOrientation::minus_side_upwind;
  const int e = from_minus ? fc.minus : fc.plus;
  const int side = from_minus ? fc.minus_side : fc.plus_side();
  // Axis-aligned faces: only the axis component contributes to the normal flux.
  return element_trace(q[static_cast<std::size_t>(fc.axis)], e, fc.axis, side);
}

Eigen::VectorXd face_normal_velocity(const CoefficientFields& c, int face, int nf, const Vec3& normal) {
  return c.face_advection.middleRows(face * nf, nf) * normal;
}

}  // namespace

double EnergyIdentityTerms::residual() const { return std::abs(lhs() - rhs()); }

double EnergyIdentityTerms::scale() const {
  return std::max({std::abs(rate), std::abs(diffusion), std::abs(divergence), std::abs(boundary), std::abs(jump)});
}

LdgOperator::LdgOperator(std::shared_ptr<const CoefficientSource> source, SchemeKind scheme)
    : source_(std::move(source)), scheme_(scheme) {
  if (scheme_ == SchemeKind::upwind) {
    if (source_->space().degree() < 2) throw std::invalid_argument("the upwind scheme requires degree k >= 2");
    if (source_->face_velocity_jump() > kVelocityContinuityTol)
      throw std::invalid_argument("upwind flux needs a continuous advection field; discrete velocity jumps by " +
                                  std::to_string(source_->face_velocity_jump()) + " across faces");
  }
}

DgField LdgOperator::rhs(const DgField& f, const DgField& g) const {
  const VecDgField grad = discrete_gradient(g);
  return assemble(f, grad, source_->evaluate(f, grad));
}

DgField LdgOperator::assemble(const DgField& f, const VecDgField& grad_g, const CoefficientFields& c) const {
  const SpacePtr& sp = f.space_ptr();
  const DgSpace& s = *sp;
  const CartesianMesh& mesh = s.mesh();
  const int ne = s.num_elements();
  const int nv = s.num_volume_nodes();
  const int nf = s.num_face_nodes();

  const RowMatrix fv = volume_values(f);
  const NodalVector gv = nodal(grad_g);

  // Z = D grad_h g and Y = U f at the volume nodes.
  NodalVector z, y;
  for (int d = 0; d < 3; ++d) {
    z[d].resize(ne, nv);
    y[d].resize(ne, nv);
  }
  for (int e = 0; e < ne; ++e)
    for (int a = 0; a < nv; ++a) {
      const int row = e * nv + a;
      const Vec3 gr(gv[0](e, a), gv[1](e, a), gv[2](e, a));
      const Vec3 zr = c.diffusion_at(row) * gr;
      for (int d = 0; d < 3; ++d) {
        z[d](e, a) = zr[d];
        y[d](e, a) = c.advection(row, d) * fv(e, a);
      }
    }

  // Flux carried by the discrete-gradient adjoint: Z for upwind, Z - U f for symmetric.
  NodalVector q = z;
  if (scheme_ == SchemeKind::symmetric)
    for (int d = 0; d < 3; ++d) q[d] -= y[d];
  std::array<DgField, 3> q_h = {project_nodal(sp, q[0]), project_nodal(sp, q[1]), project_nodal(sp, q[2])};

  DgField out(sp);
  RowMatrix& r = out.coeffs();
  // -(Q_h, grad_h phi) = -(Q, grad phi) + sum_faces <[[phi]], Q_hat>
  add_volume_divergence_term(s, q, -1.0, r);
  for (const int id : mesh.interior_faces()) {
    const Face& fc = mesh.face(id);
    const Eigen::VectorXd qn = hat_normal_trace(q_h, fc);  // Q_hat . e_axis
    add_face_term(s, fc, fc.normal_minus[fc.axis] * qn, fc.normal_plus[fc.axis] * qn, r);
  }

  if (scheme_ == SchemeKind::upwind) {
    // (U f, grad phi) - sum_R <(U f)^ . n^-, phi^->
    add_volume_divergence_term(s, y, 1.0, r);
    for (const int id : mesh.interior_faces()) {
      const Face& fc = mesh.face(id);
      const FaceTracePair t = face_traces(f, id);
      const Eigen::VectorXd un = face_normal_velocity(c, id, nf, fc.normal_minus);
      Eigen::VectorXd flux(nf);
      for (int j = 0; j < nf; ++j) flux[j] = upwind_face_flux(un[j], t.minus[j], t.plus[j]);
      add_face_term(s, fc, -flux, flux, r);
    }
  }
  return out;
}

double LdgOperator::trilinear_form(const DgField& f, const DgField& g, const DgField& phi) const {
  const DgSpace& s = f.space();
  const CartesianMesh& mesh = s.mesh();
  const int ne = s.num_elements();
  const int nv = s.num_volume_nodes();
  const int nf = s.num_face_nodes();
  const auto& w = s.volume_weights();
  const auto& fw = s.face_weights();

  const VecDgField grad_g = discrete_gradient(g);
  const CoefficientFields c = source_->evaluate(f, grad_g);
  const NodalVector gv = nodal(grad_g);
  const NodalVector pv = nodal(discrete_gradient(phi));
  const RowMatrix fv = volume_values(f);
  NodalVector dphi;
  for (int d = 0; d < 3; ++d) dphi[d] = phi.coeffs() * s.volume_derivative(d).transpose();

  double diffusion = 0.0, advection = 0.0;
  for (int e = 0; e < ne; ++e)
    for (int a = 0; a < nv; ++a) {
      const int row = e * nv + a;
      const Vec3 gr(gv[0](e, a), gv[1](e, a), gv[2](e, a));
      const Vec3 gp(pv[0](e, a), pv[1](e, a), pv[2](e, a));
      const Vec3 u = c.advection.row(row).transpose();
      diffusion += w[a] * gr.dot(c.diffusion_at(row) * gp);
      if (scheme_ == SchemeKind::symmetric) {
        advection += w[a] * fv(e, a) * u.dot(gp);
      } else {
        const Vec3 dp(dphi[0](e, a), dphi[1](e, a), dphi[2](e, a));
        advection += w[a] * fv(e, a) * u.dot(dp);
      }
    }

  double face = 0.0;
  if (scheme_ == SchemeKind::upwind) {
    for (const int id : mesh.interior_faces()) {
      const Face& fc = mesh.face(id);
      const FaceTracePair ft = face_traces(f, id);
      const FaceTracePair pt = face_traces(phi, id);
      const Eigen::VectorXd un = face_normal_velocity(c, id, nf, fc.normal_minus);
      for (int j = 0; j < nf; ++j)
        face += fw[j] * upwind_face_flux(un[j], ft.minus[j], ft.plus[j]) * (pt.minus[j] - pt.plus[j]);
    }
  }
  return -diffusion + advection - face;
}

double LdgOperator::trilinear_form(const DgField& f, const DgField& g, int element, int basis) const {
  DgField phi(f.space_ptr());
  phi.coeffs()(element, basis) = 1.0;
  return trilinear_form(f, g, phi);
}

DgField LdgOperator::jump_correction(const DgField& f) const {
  const SpacePtr& sp = f.space_ptr();
  const DgSpace& s = *sp;
  const CartesianMesh& mesh = s.mesh();
  const int ne = s.num_elements();
  const int nv = s.num_volume_nodes();
  const int nf = s.num_face_nodes();

  const VecDgField grad = discrete_gradient(f);
  const CoefficientFields c = source_->evaluate(f, grad);
  const RowMatrix fv = volume_values(f);
  NodalVector y;
  for (int d = 0; d < 3; ++d) {
    y[d].resize(ne, nv);
    for (int e = 0; e < ne; ++e)
      for (int a = 0; a < nv; ++a) y[d](e, a) = c.advection(e * nv + a, d) * fv(e, a);
  }
  std::array<DgField, 3> y_h = {project_nodal(sp, y[0]), project_nodal(sp, y[1]), project_nodal(sp, y[2])};

  DgField out(sp);
  RowMatrix& r = out.coeffs();
  for (const int id : mesh.interior_faces()) {
    const Face& fc = mesh.face(id);
    const double nm = fc.normal_minus[fc.axis];
    const double np = fc.normal_plus[fc.axis];
    const FaceTracePair t = face_traces(f, id);
    const Eigen::VectorXd un = face_normal_velocity(c, id, nf, fc.normal_minus);
    const Eigen::VectorXd yhat = hat_normal_trace(y_h, fc);
    const Eigen::VectorXd avg = 0.5 * (t.minus + t.plus);
    const Eigen::VectorXd jump = t.minus - t.plus;  // [[f]] . n^-
    // -(Y_h, r([[phi]])) = +<[[phi]], Y_hat>
    Eigen::VectorXd mv = nm * yhat, pv = np * yhat;
    // -<U {f}, [[phi]]>, with U.n^+ = -U.n^-
    mv -= un.cwiseProduct(avg);
    pv += un.cwiseProduct(avg);
    // -<|U.n|/2 [[f]], [[phi]]>
    const Eigen::VectorXd pen = 0.5 * un.cwiseAbs().cwiseProduct(jump);
    mv -= pen;
    pv += pen;
    add_face_term(s, fc, mv, pv, r);
  }
  return out;
}

EnergyIdentityTerms LdgOperator::energy_identity(const DgField& f) const {
  if (scheme_ != SchemeKind::upwind) throw std::logic_error("energy identity applies to the upwind scheme");
  const DgSpace& s = f.space();
  const CartesianMesh& mesh = s.mesh();
  const int ne = s.num_elements();
  const int nv = s.num_volume_nodes();
  const int nf = s.num_face_nodes();
  const auto& w = s.volume_weights();
  const auto& fw = s.face_weights();

  const VecDgField grad = discrete_gradient(f);
  const CoefficientFields c = source_->evaluate(f, grad);
  const Eigen::VectorXd div = source_->advection_divergence(grad);
  const DgField r = assemble(f, grad, c);

  EnergyIdentityTerms t;
  t.rate = r.flat().dot(f.flat());
  const RowMatrix fv = volume_values(f);
  const NodalVector gv = nodal(grad);
  for (int e = 0; e < ne; ++e)
    for (int a = 0; a < nv; ++a) {
      const int row = e * nv + a;
      const Vec3 g(gv[0](e, a), gv[1](e, a), gv[2](e, a));
      t.diffusion += w[a] * g.dot(c.diffusion_at(row) * g);
      t.divergence += w[a] * 0.5 * div[row] * fv(e, a) * fv(e, a);
    }
  for (const int id : mesh.boundary_faces()) {
    const Face& fc = mesh.face(id);
    const Eigen::VectorXd fm = element_trace(f, fc.minus, fc.axis, fc.minus_side);
    const Eigen::VectorXd un = face_normal_velocity(c, id, nf, fc.normal_minus);
    for (int j = 0; j < nf; ++j) t.boundary += fw[j] * 0.5 * un[j] * fm[j] * fm[j];
  }
  for (const int id : mesh.interior_faces()) {
    const Face& fc = mesh.face(id);
    const FaceTracePair tr = face_traces(f, id);
    const Eigen::VectorXd un = face_normal_velocity(c, id, nf, fc.normal_minus);
    for (int j = 0; j < nf; ++j) {
      const double jump = tr.minus[j] - tr.plus[j];
      t.jump -= fw[j] * 0.5 * std::abs(un[j]) * jump * jump;
    }
  }
  return t;
}

double min_diffusion_eigenvalue_ratio(const CoefficientFields& c) {
  double min_eig = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  for (Eigen::Index row = 0; row < c.diffusion.rows(); ++row) {
    const Eigen::SelfAdjointEigenSolver<Mat3> es(c.diffusion_at(static_cast<int>(row)), Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues()[0]);
    max_abs = std::max(max_abs, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return max_abs > 0.0 ? min_eig / max_abs : 0.0;
}

double max_diffusion_norm(const CoefficientFields& c) {
  double m = 0.0;
  for (Eigen::Index row = 0; row < c.diffusion.rows(); ++row) {
    const Eigen::SelfAdjointEigenSolver<Mat3> es(c.diffusion_at(static_cast<int>(row)), Eigen::EigenvaluesOnly);
    m = std::max(m, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace fpl
