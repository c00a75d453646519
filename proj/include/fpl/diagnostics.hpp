#pragma once

#include "fpl/collision_kernel.hpp"

namespace fpl {

struct MomentRecord {
  double t = 0.0;
  double mass = 0.0;
  Vec3 momentum = Vec3::Zero();
  double energy = 0.0;
  double entropy = 0.0;
  double l2 = 0.0;
};

struct Moments {
  double mass = 0.0;
  Vec3 momentum = Vec3::Zero();
  double energy = 0.0;
};

/// Projected collision invariants 1, Pi_h p and Pi_h E of a space.
struct Invariants {
  DgField one;
  VecDgField momentum;
  DgField energy;
};

Invariants collision_invariants(const SpacePtr& space, KineticModel model = KineticModel::nonrelativistic);

/// (f, 1), (f, Pi_h p), (f, Pi_h E); with the orthonormal basis these are
/// coefficient dot products.
Moments moments(const DgField& f, const Invariants& inv);
Moments moments(const DgField& f, KineticModel model = KineticModel::nonrelativistic);

struct MaxwellianSpec {
  double density = 1.0;
  Vec3 velocity = Vec3::Zero();
  double temperature = 1.0;

  double operator()(const Vec3& p) const;
};

/// Maxwellian on R^3 with the given mass, momentum and (nonrelativistic)
/// energy. Throws std::domain_error when the temperature is not positive.
MaxwellianSpec maxwellian_from_moments(double mass, const Vec3& momentum, double energy);

/// int_Omega f+ ln f+ - M ln M by volume quadrature, with 0 ln 0 = 0.
double relative_entropy(const DgField& f, const MaxwellianSpec& m);

double l2_norm(const DgField& f);

}  // namespace fpl
