#include <doctest.h>

#include "fpl/mesh.hpp"

using namespace fpl;

TEST_CASE("build_mesh counts elements and faces") {
  struct Case { double L; int n; int elements; double h; int interior; int boundary; };
  for (const Case c : {Case{4.0, 8, 512, 1.0, 1344, 384}, Case{1.0, 1, 1, 2.0, 0, 6}, Case{4.0, 2, 8, 4.0, 12, 24}}) {
    const CartesianMesh m = build_mesh(c.L, c.n);
    CHECK(m.num_elements() == c.elements);
    CHECK(m.width() == doctest::Approx(c.h));
    CHECK(m.interior_faces().size() == static_cast<std::size_t>(c.interior));
    CHECK(m.boundary_faces().size() == static_cast<std::size_t>(c.boundary));
    CHECK(m.num_faces() == c.interior + c.boundary);
  }
}

TEST_CASE("build_mesh rejects bad input") {
  CHECK_THROWS_AS(build_mesh(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(std::numeric_limits<double>::infinity(), 2), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(std::nan(""), 2), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(-1.0, 2), std::invalid_argument);
}

TEST_CASE("element numbering is lexicographic with i slowest") {
  const CartesianMesh m = build_mesh(4.0, 3);
  CHECK(m.element_id({0, 0, 1}) == 1);
  CHECK(m.element_id({0, 1, 0}) == 3);
  CHECK(m.element_id({1, 0, 0}) == 9);
  for (int e = 0; e < m.num_elements(); ++e) CHECK(m.element_id(m.element_index(e)) == e);
  const Vec3 c = m.element_center(0);
  CHECK(c[0] == doctest::Approx(-4.0 + 4.0 / 3.0));
}

TEST_CASE("faces carry opposite normals and tile the element boundaries") {
  const CartesianMesh m = build_mesh(2.0, 3);
  std::vector<int> count(static_cast<std::size_t>(m.num_elements()), 0);
  for (const Face& f : m.faces()) {
    CHECK(f.normal_minus.norm() == doctest::Approx(1.0));
    CHECK(std::abs(f.normal_minus[f.axis]) == doctest::Approx(1.0));
    ++count[static_cast<std::size_t>(f.minus)];
    if (!f.boundary()) {
      CHECK((f.normal_minus + f.normal_plus).norm() == 0.0);
      ++count[static_cast<std::size_t>(f.plus)];
      const Index3 a = m.element_index(f.minus), b = m.element_index(f.plus);
      CHECK(b[f.axis] - a[f.axis] == 1);
    }
  }
  for (int c : count) CHECK(c == 6);
  // element_face agrees with the face records
  for (int e = 0; e < m.num_elements(); ++e)
    for (int axis = 0; axis < 3; ++axis)
      for (int side = 0; side < 2; ++side) {
        const Face& f = m.face(m.element_face(e, axis, side));
        CHECK(f.axis == axis);
        CHECK((f.minus == e || f.plus == e));
      }
}

TEST_CASE("element volumes tile the domain") {
  const CartesianMesh m = build_mesh(4.0, 7);
  CHECK(m.num_elements() * m.element_volume() == doctest::Approx(512.0).epsilon(1e-12));
}

TEST_CASE("face_orientation follows the sign of n- . u") {
  Face f;
  f.axis = 0;
  f.normal_minus = Vec3(1, 0, 0);
  CHECK(face_orientation(f, reference_direction()) == FaceOrientation::minus_side_upwind);
  f.axis = 1;
  f.normal_minus = Vec3(0, -1, 0);
  CHECK(face_orientation(f, reference_direction()) == FaceOrientation::plus_side_upwind);
  f.normal_minus = Vec3(0, 1, 0);
  CHECK_THROWS(face_orientation(f, Vec3(1, 0, 1)));

  const CartesianMesh m = build_mesh(4.0, 3);
  for (const int id : m.interior_faces()) {
    const Face& face = m.face(id);
    const auto o = face_orientation(face, reference_direction());
    const auto s = face_orientation(face.swapped(), reference_direction());
    CHECK(o != s);
  }
  CHECK_THROWS(m.face(m.boundary_faces()[0]).swapped());
}
