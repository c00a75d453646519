#pragma once

#include <span>
#include <vector>

#include "fpl/types.hpp"

namespace fpl {

/// Axis-aligned face between two elements (or one element and the domain
/// boundary). The face is identified by its axis and the index of the element
/// on its upper side; on the upper boundary that element index is `n`, one past
/// the last cell.
struct Face {
  int axis = 0;
  Index3 anchor{};
  int minus = -1;  ///< element on the minus side (always present)
  int plus = -1;   ///< element on the plus side, -1 on the boundary
  Vec3 normal_minus = Vec3::Zero();
  Vec3 normal_plus = Vec3::Zero();
  /// Which local face of the minus element this is: 0 = lower (xi = -1), 1 = upper.
  int minus_side = 1;

  bool boundary() const { return plus < 0; }
  int plus_side() const { return 1 - minus_side; }

  /// Same face with the roles of the two elements exchanged. Interior only.
  Face swapped() const;
};

enum class FaceOrientation { minus_side_upwind, plus_side_upwind };

/// Fixed reference direction for the alternating fluxes.
inline Vec3 reference_direction() { return Vec3(1.0, 1.0, 1.0); }

/// Uniform partition of (-L, L)^3 into n^3 cubes.
///
/// Elements are numbered lexicographically by (i, j, k) with i slowest. Faces
/// are numbered by axis, then by anchor index (lexicographic, i slowest), where
/// the anchor runs over 0..n along the face axis and 0..n-1 along the others.
class CartesianMesh {
 public:
  CartesianMesh(double half_width, int n);

  double half_width() const { return half_width_; }
  int cells() const { return n_; }
  double width() const { return width_; }
  double element_volume() const { return width_ * width_ * width_; }
  int num_elements() const { return n_ * n_ * n_; }

  int element_id(const Index3& idx) const {
    return (idx[0] * n_ + idx[1]) * n_ + idx[2];
  }
  Index3 element_index(int id) const;
  Vec3 element_center(int id) const;

  std::span<const Face> faces() const { return faces_; }
  const Face& face(int id) const { return faces_[static_cast<std::size_t>(id)]; }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  std::span<const int> interior_faces() const { return interior_; }
  std::span<const int> boundary_faces() const { return boundary_; }

  /// Face id from axis and anchor (anchor[axis] in 0..n).
  int face_id(int axis, const Index3& anchor) const;
  /// Face of element `e` on `axis`; side 0 is the lower face, 1 the upper.
  int element_face(int e, int axis, int side) const;

 private:
  double half_width_;
  int n_;
  double width_;
  std::vector<Face> faces_;
  std::vector<int> interior_;
  std::vector<int> boundary_;
};

CartesianMesh build_mesh(double half_width, int n);

/// Sign of n^- . u decides which side feeds the alternating fluxes.
/// Throws if the face normal is orthogonal to `u`.
FaceOrientation face_orientation(const Face& face, const Vec3& u);

}  // namespace fpl
