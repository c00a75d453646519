#pragma once

#include <memory>

#include "fpl/coefficients.hpp"

namespace fpl {

enum class SchemeKind { symmetric, upwind };

/// Upwind flux U.n^- f_hat for one face node: the minus trace when
/// U.n^- > 0, the plus trace when U.n^- < 0, zero otherwise.
inline double upwind_face_flux(double u_dot_n_minus, double f_minus, double f_plus) {
  if (u_dot_n_minus > 0.0) return u_dot_n_minus * f_minus;
  if (u_dot_n_minus < 0.0) return u_dot_n_minus * f_plus;
  return 0.0;
}

/// Terms of the L2 energy identity of the upwind scheme,
///   (rhs, f) + (grad_h f, D grad_h f) + (div U / 2, f^2) - <U.n / 2, f^2>_Gamma
///     = -sum_faces <|U.n| / 2 [[f]], [[f]]>.
struct EnergyIdentityTerms {
  double rate = 0.0;
  double diffusion = 0.0;
  double divergence = 0.0;
  double boundary = 0.0;
  double jump = 0.0;  ///< right-hand side, <= 0

  double lhs() const { return rate + diffusion + divergence - boundary; }
  double rhs() const { return jump; }
  double residual() const;
  double scale() const;
};

/// Semi-discrete right-hand side of the structure-preserving LDG scheme.
///
/// With D_h[f] and U_h[grad_h g] from the coefficient source, the rhs g_t
/// satisfies, for every phi in W_h,
///   symmetric: (g_t, phi) = -(grad_h g, D grad_h phi) + (U f, grad_h phi)
///   upwind:    (g_t, phi) = -(grad_h g, D grad_h phi) + (U f, grad phi)
///                           - sum_R <(U f)^, phi^- n^->_{dR \ Gamma}
/// No flux is assembled on the domain boundary.
class LdgOperator {
 public:
  LdgOperator(std::shared_ptr<const CoefficientSource> source, SchemeKind scheme);

  SchemeKind scheme() const { return scheme_; }
  const CoefficientSource& source() const { return *source_; }
  const DgSpace& space() const { return source_->space(); }

  DgField rhs(const DgField& f) const { return rhs(f, f); }
  /// Coefficients of B_h(f, g, .) in the orthonormal basis.
  DgField rhs(const DgField& f, const DgField& g) const;
  /// Assembly from already evaluated coefficient fields.
  DgField assemble(const DgField& f, const VecDgField& grad_g, const CoefficientFields& c) const;

  /// B_h(f, g, phi), evaluated term by term by quadrature.
  double trilinear_form(const DgField& f, const DgField& g, const DgField& phi) const;
  /// B_h(f, g, phi_m) for basis function `basis` on `element`.
  double trilinear_form(const DgField& f, const DgField& g, int element, int basis) const;

  /// Upwind minus symmetric rhs, assembled from the interface jump terms
  ///   -(U f, r([[phi]])) - <U {f}, [[phi]]> - <|U.n|/2 [[f]], [[phi]]>.
  DgField jump_correction(const DgField& f) const;

  /// Both sides of the upwind energy identity (upwind scheme only).
  EnergyIdentityTerms energy_identity(const DgField& f) const;
  double energy_identity_residual(const DgField& f) const { return energy_identity(f).residual(); }

 private:
  std::shared_ptr<const CoefficientSource> source_;
  SchemeKind scheme_;
};

/// Smallest eigenvalue of D_h over all volume nodes relative to max |D_h|.
double min_diffusion_eigenvalue_ratio(const CoefficientFields& c);
/// Largest spectral norm of D_h over the volume nodes.
double max_diffusion_norm(const CoefficientFields& c);

}  // namespace fpl
