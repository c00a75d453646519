#pragma once

#include <cmath>
#include <memory>

#include "fpl/dg_field.hpp"

namespace fpl {

enum class KineticModel { nonrelativistic, relativistic };

/// Collision model: Lambda(p, q) = |p - q|^gamma times the tensor S.
struct KernelSpec {
  KineticModel model = KineticModel::nonrelativistic;
  double gamma = 0.0;

  /// Throws unless gamma is finite and non-negative.
  void validate() const;
};

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

/// Single-particle kinetic energy: |p|^2/2 or sqrt(1 + |p|^2).
template <typename Derived>
typename Derived::Scalar kinetic_energy(KineticModel model, const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  const Scalar p2 = p.squaredNorm();
  return model == KineticModel::nonrelativistic ? p2 / Scalar(2) : std::sqrt(Scalar(1) + p2);
}

/// Particle velocity, the momentum gradient of the kinetic energy.
template <typename Derived>
Vector3<typename Derived::Scalar> velocity(KineticModel model, const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  if (model == KineticModel::nonrelativistic) return p;
  return p / std::sqrt(Scalar(1) + p.squaredNorm());
}

/// S(v, w) with u = v - w, z = (v + w)/2:
///   |u|^2 I - u (x) u                         (nonrelativistic)
///   |u|^2 I - u (x) u - (z x u) (x) (z x u)   (relativistic)
/// In both cases S u = 0.
template <typename DerivedV, typename DerivedW>
Matrix3<typename DerivedV::Scalar> s_tensor(KineticModel model, const Eigen::MatrixBase<DerivedV>& v,
                                            const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedV::Scalar;
  const Vector3<Scalar> u = v - w;
  Matrix3<Scalar> s = u.squaredNorm() * Matrix3<Scalar>::Identity() - u * u.transpose();
  if (model == KineticModel::relativistic) {
    const Vector3<Scalar> z = (v + w) / Scalar(2);
    const Vector3<Scalar> zu = z.cross(u);
    s -= zu * zu.transpose();
  }
  return s;
}

/// |p - q|^gamma, with 0^0 = 1.
inline double kernel_scalar(const KernelSpec& spec, const Vec3& p, const Vec3& q) {
  if (spec.gamma == 0.0) return 1.0;
  return std::pow((p - q).norm(), spec.gamma);
}

/// Identifies a tabulated quadrature node: a volume node of an element or a
/// face node of a mesh face.
struct NodeRef {
  enum class Kind { volume, face } kind = Kind::volume;
  int owner = 0;  ///< element id or face id
  int local = 0;
};

/// Projected kinetic energy, its discrete gradient, and the resulting discrete
/// velocities tabulated at every volume and face quadrature node.
class EnergyField {
 public:
  EnergyField(const SpacePtr& space, KineticModel model);

  KineticModel model() const { return model_; }
  const DgField& energy() const { return energy_; }
  const VecDgField& gradient() const { return gradient_; }

  /// (elements * volume nodes) x 3.
  const RowMatrix& volume_velocity() const { return volume_velocity_; }
  /// (faces * face nodes) x 3, taken from the minus element of each face.
  const RowMatrix& face_velocity() const { return face_velocity_; }
  /// Largest velocity mismatch between the two traces over interior faces.
  double max_face_jump() const { return max_face_jump_; }

  Vec3 velocity(const NodeRef& node) const;
  Vec3 position(const NodeRef& node) const;
  const DgSpace& space() const { return energy_.space(); }

 private:
  KineticModel model_;
  DgField energy_;
  VecDgField gradient_;
  RowMatrix volume_velocity_;
  RowMatrix face_velocity_;
  double max_face_jump_ = 0.0;
};

/// Structure-preserving discrete kernel
/// Phi_h(p, q) = Lambda(p, q) S(grad_h Pi_h E(p), grad_h Pi_h E(q)).
Mat3 phi_h(const KernelSpec& spec, const EnergyField& energy, const NodeRef& p, const NodeRef& q);

}  // namespace fpl
