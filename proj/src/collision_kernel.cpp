#include "fpl/collision_kernel.hpp"

#include <stdexcept>

namespace fpl {

void KernelSpec::validate() const {
  if (!std::isfinite(gamma) || gamma < 0.0)
    throw std::invalid_argument("kernel gamma must be finite and >= 0, got " + std::to_string(gamma));
}

EnergyField::EnergyField(const SpacePtr& space, KineticModel model)
    : model_(model),
      energy_(l2_project([model](const Vec3& p) { return kinetic_energy(model, p); }, space)),
      gradient_(discrete_gradient(energy_)) {
  const DgSpace& s = *space;
  const int ne = s.num_elements();
  const int nv = s.num_volume_nodes();
  const int nf = s.num_face_nodes();
  volume_velocity_.resize(ne * nv, 3);
  for (int d = 0; d < 3; ++d) {
    const RowMatrix vals = volume_values(gradient_[d]);
    volume_velocity_.col(d) = Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size());
  }

  const CartesianMesh& mesh = s.mesh();
  face_velocity_.resize(mesh.num_faces() * nf, 3);
  for (int id = 0; id < mesh.num_faces(); ++id) {
    const Face& fc = mesh.face(id);
    for (int d = 0; d < 3; ++d) {
      const FaceTracePair t = face_traces(gradient_[d], id);
      face_velocity_.block(id * nf, d, nf, 1) = t.minus;
      if (!fc.boundary())
        max_face_jump_ = std::max(max_face_jump_, (t.minus - t.plus).cwiseAbs().maxCoeff());
    }
  }
}

Vec3 EnergyField::velocity(const NodeRef& node) const {
  const int nv = space().num_volume_nodes();
  const int nf = space().num_face_nodes();
  if (node.kind == NodeRef::Kind::volume) return volume_velocity_.row(node.owner * nv + node.local).transpose();
  return face_velocity_.row(node.owner * nf + node.local).transpose();
}

Vec3 EnergyField::position(const NodeRef& node) const {
  if (node.kind == NodeRef::Kind::volume) return space().volume_node(node.owner, node.local);
  return space().face_node(node.owner, node.local);
}

Mat3 phi_h(const KernelSpec& spec, const EnergyField& energy, const NodeRef& p, const NodeRef& q) {
  const double lam = kernel_scalar(spec, energy.position(p), energy.position(q));
  return lam * s_tensor(spec.model, energy.velocity(p), energy.velocity(q));
}

}  // namespace fpl
