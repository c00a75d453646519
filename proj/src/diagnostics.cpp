#include "fpl/diagnostics.hpp"

#include <numbers>
#include <stdexcept>

namespace fpl {

Invariants collision_invariants(const SpacePtr& space, KineticModel model) {
  Invariants inv;
  inv.one = l2_project([](const Vec3&) { return 1.0; }, space);
  inv.momentum = VecDgField(space);
  for (int d = 0; d < 3; ++d) inv.momentum[d] = l2_project([d](const Vec3& p) { return p[d]; }, space);
  inv.energy = l2_project([model](const Vec3& p) { return kinetic_energy(model, p); }, space);
  return inv;
}

Moments moments(const DgField& f, const Invariants& inv) {
  Moments m;
  m.mass = f.flat().dot(inv.one.flat());
  for (int d = 0; d < 3; ++d) m.momentum[d] = f.flat().dot(inv.momentum[d].flat());
  m.energy = f.flat().dot(inv.energy.flat());
  return m;
}

Moments moments(const DgField& f, KineticModel model) {
  return moments(f, collision_invariants(f.space_ptr(), model));
}

double MaxwellianSpec::operator()(const Vec3& p) const {
  const double t2 = 2.0 * temperature;
  return density * std::pow(std::numbers::pi * t2, -1.5) * std::exp(-(p - velocity).squaredNorm() / t2);
}

MaxwellianSpec maxwellian_from_moments(double mass, const Vec3& momentum, double energy) {
  if (!(mass > 0.0)) throw std::domain_error("maxwellian: mass must be positive");
  MaxwellianSpec m;
  m.density = mass;
  m.velocity = momentum / mass;
  m.temperature = (2.0 / 3.0) * (energy / mass - 0.5 * m.velocity.squaredNorm());
  if (!(m.temperature > 0.0))
    throw std::domain_error("maxwellian: temperature must be positive (energy > |momentum|^2 / (2 mass))");
  return m;
}

double relative_entropy(const DgField& f, const MaxwellianSpec& m) {
  const DgSpace& s = f.space();
  const RowMatrix fv = volume_values(f);
  const auto& w = s.volume_weights();
  double h = 0.0;
  for (int e = 0; e < s.num_elements(); ++e)
    for (int a = 0; a < s.num_volume_nodes(); ++a) {
      const double fp = std::max(fv(e, a), 0.0);
      const double mv = m(s.volume_node(e, a));
      double v = 0.0;
      if (fp > 0.0) v += fp * std::log(fp);
      if (mv > 0.0) v -= mv * std::log(mv);
      h += w[a] * v;
    }
  return h;
}

double l2_norm(const DgField& f) {
  const RowMatrix fv = volume_values(f);
  return std::sqrt((fv.cwiseAbs2() * f.space().volume_weights()).sum());
}

}  // namespace fpl
