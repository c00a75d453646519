#include "fpl/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fpl {

Face Face::swapped() const {
  if (boundary()) throw std::logic_error("cannot swap sides of a boundary face");
  Face s = *this;
  std::swap(s.minus, s.plus);
  std::swap(s.normal_minus, s.normal_plus);
  s.minus_side = 1 - minus_side;
  return s;
}

CartesianMesh::CartesianMesh(double half_width, int n)
    : half_width_(half_width), n_(n), width_(0.0) {
  if (!std::isfinite(half_width) || half_width <= 0.0)
    throw std::invalid_argument("mesh half_width must be positive and finite, got " +
                                std::to_string(half_width));
  if (n < 1) throw std::invalid_argument("mesh needs at least one cell per dimension");
  width_ = 2.0 * half_width / n;

  faces_.reserve(static_cast<std::size_t>(3 * n * n * (n + 1)));
  for (int axis = 0; axis < 3; ++axis) {
    Index3 ext{n, n, n};
    ext[axis] = n + 1;
    for (int i = 0; i < ext[0]; ++i)
      for (int j = 0; j < ext[1]; ++j)
        for (int k = 0; k < ext[2]; ++k) {
          Face f;
          f.axis = axis;
          f.anchor = {i, j, k};
          Vec3 e = Vec3::Zero();
          e[axis] = 1.0;
          Index3 lower = f.anchor;
          lower[axis] -= 1;
          const int a = f.anchor[axis];
          if (a == 0) {
            f.minus = element_id(f.anchor);
            f.minus_side = 0;
            f.normal_minus = -e;
          } else if (a == n) {
            f.minus = element_id(lower);
            f.minus_side = 1;
            f.normal_minus = e;
          } else {
            f.minus = element_id(lower);
            f.plus = element_id(f.anchor);
            f.minus_side = 1;
            f.normal_minus = e;
            f.normal_plus = -e;
          }
          const int id = static_cast<int>(faces_.size());
          (f.boundary() ? boundary_ : interior_).push_back(id);
          faces_.push_back(f);
        }
  }
}

Index3 CartesianMesh::element_index(int id) const {
  if (id < 0 || id >= num_elements())
    throw std::out_of_range("element id " + std::to_string(id) + " out of range");
  return {id / (n_ * n_), (id / n_) % n_, id % n_};
}

Vec3 CartesianMesh::element_center(int id) const {
  const Index3 idx = element_index(id);
  Vec3 c;
  for (int d = 0; d < 3; ++d) c[d] = -half_width_ + (idx[d] + 0.5) * width_;
  return c;
}

int CartesianMesh::face_id(int axis, const Index3& anchor) const {
  Index3 ext{n_, n_, n_};
  ext[axis] = n_ + 1;
  return axis * n_ * n_ * (n_ + 1) + (anchor[0] * ext[1] + anchor[1]) * ext[2] + anchor[2];
}

int CartesianMesh::element_face(int e, int axis, int side) const {
  Index3 anchor = element_index(e);
  anchor[axis] += side;
  return face_id(axis, anchor);
}

CartesianMesh build_mesh(double half_width, int n) { return CartesianMesh(half_width, n); }

FaceOrientation face_orientation(const Face& face, const Vec3& u) {
  const double s = face.normal_minus.dot(u);
  // Axis-aligned normals against u = (1,1,1) never produce a tie.
  if (s == 0.0) throw std::invalid_argument("reference direction is tangent to the face");
  return s > 0.0 ? FaceOrientation::minus_side_upwind : FaceOrientation::plus_side_upwind;
}

}  // namespace fpl
