#include <doctest.h>

#include "oracles.hpp"

using namespace fpl;
using fpl::testing::random_field;

namespace {

double max_abs(const VecDgField& v) {
  double m = 0.0;
  for (int d = 0; d < 3; ++d) m = std::max(m, v[d].coeffs().cwiseAbs().maxCoeff());
  return m;
}

double max_diff(const VecDgField& a, const VecDgField& b) {
  double m = 0.0;
  for (int d = 0; d < 3; ++d) m = std::max(m, (a[d].coeffs() - b[d].coeffs()).cwiseAbs().maxCoeff());
  return m;
}

// Cells with i = 0 hold 1, cells with i = 1 hold 2.
DgField two_level(const SpacePtr& s) {
  return l2_project([](const Vec3& p) { return p[0] < 0.0 ? 1.0 : 2.0; }, s);
}

}  // namespace

TEST_CASE("evaluate reproduces projected polynomials") {
  const auto s = make_space(4.0, 2, 2);
  const DgField c = l2_project([](const Vec3&) { return -1.25; }, s);
  CHECK(std::abs(evaluate(c, 5, Vec3(0.1, 0.2, -0.9)) + 1.25) <= 1e-13);
  const DgField px = l2_project([](const Vec3& p) { return p[0]; }, s);
  CHECK(std::abs(evaluate(px, 0, Vec3::Zero()) + 2.0) <= 1e-13);
  CHECK_THROWS_AS(evaluate(px, 8, Vec3::Zero()), std::out_of_range);
}

TEST_CASE("evaluate matches closed-form Legendre products at Lobatto nodes") {
  const auto s = make_space(1.0, 1, 2);
  std::mt19937 rng(3);
  const DgField f = random_field(s, rng);
  const auto lob = gauss_lobatto<double>(4);
  auto p = [](int a, double x) {
    switch (a) {
      case 0: return std::sqrt(0.5);
      case 1: return std::sqrt(1.5) * x;
      default: return std::sqrt(2.5) * 0.5 * (3 * x * x - 1);
    }
  };
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const Vec3 xi(lob.nodes[i], lob.nodes[j], lob.nodes[(i + j) % 4]);
      double ref = 0.0;
      for (int m = 0; m < 27; ++m) {
        const Index3 a{m / 9, (m / 3) % 3, m % 3};
        ref += f.coeffs()(0, m) * p(a[0], xi[0]) * p(a[1], xi[1]) * p(a[2], xi[2]);
      }
      CHECK(std::abs(evaluate(f, 0, xi) - ref * s->basis_scale()) <= 1e-13);
    }
}

TEST_CASE("face traces agree with volume evaluation") {
  const auto s = make_space(2.0, 2, 2);
  std::mt19937 rng(5);
  const DgField f = random_field(s, rng);
  for (const Face& fc : s->mesh().faces()) {
    const int id = static_cast<int>(&fc - s->mesh().faces().data());
    const FaceTracePair t = face_traces(f, id);
    for (int j = 0; j < s->num_face_nodes(); ++j) {
      CHECK(std::abs(t.minus[j] - evaluate(f, fc.minus, s->face_reference_node(fc.axis, fc.minus_side, j))) <= 1e-13);
      if (!fc.boundary())
        CHECK(std::abs(t.plus[j] - evaluate(f, fc.plus, s->face_reference_node(fc.axis, fc.plus_side(), j))) <= 1e-13);
    }
  }
}

TEST_CASE("jump and average") {
  const auto s = make_space(4.0, 2, 2);
  const DgField f = l2_project([](const Vec3& p) { return p[0] < 0.0 ? 1.0 : 3.0; }, s);
  const CartesianMesh& m = s->mesh();
  const int id = m.face_id(0, {1, 0, 0});
  const Face& fc = m.face(id);
  REQUIRE(fc.normal_minus == Vec3(1, 0, 0));
  const JumpAverage ja = jump_and_average(f, id);
  for (int j = 0; j < s->num_face_nodes(); ++j) {
    CHECK(ja.jump(j, 0) == doctest::Approx(-2.0).epsilon(1e-13));
    CHECK(std::abs(ja.jump(j, 1)) <= 1e-13);
    CHECK(ja.average[j] == doctest::Approx(2.0).epsilon(1e-13));
  }
  CHECK_THROWS(jump_and_average(f, m.boundary_faces()[0]));

  // Relabelling the two sides leaves the jump unchanged.
  const FaceTracePair t = face_traces(f, id);
  const Eigen::MatrixXd swapped = t.plus * fc.normal_plus.transpose() + t.minus * fc.normal_minus.transpose();
  const Eigen::MatrixXd jump = ja.jump;
  CHECK((swapped - jump).cwiseAbs().maxCoeff() == 0.0);

  const DgField px = l2_project([](const Vec3& p) { return p[0]; }, s);
  for (const int fid : m.interior_faces()) CHECK(jump_and_average(px, fid).jump.cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("discrete gradient of simple fields") {
  const auto s = make_space(4.0, 2, 2);
  const DgField c = l2_project([](const Vec3&) { return 3.0; }, s);
  CHECK(max_abs(discrete_gradient(c)) <= 1e-13);

  const DgField px = l2_project([](const Vec3& p) { return p[0]; }, s);
  const VecDgField g = discrete_gradient(px);
  const DgField one = l2_project([](const Vec3&) { return 1.0; }, s);
  CHECK((g[0].coeffs() - one.coeffs()).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(g[1].coeffs().cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(g[2].coeffs().cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("discrete gradient equals the weak-form oracle") {
  const auto s = make_space(4.0, 2, 2);
  const DgField step = two_level(s);
  const VecDgField g = discrete_gradient(step);
  CHECK(max_diff(g, fpl::testing::weak_gradient_oracle(step)) <= 1e-12);
  CHECK(max_abs(broken_gradient(step)) <= 1e-13);
  CHECK(max_diff(lift_of_jumps(step), g) <= 1e-12);
  CHECK(max_abs(g) > 0.1);

  std::mt19937 rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    const DgField f = random_field(s, rng);
    CHECK(max_diff(discrete_gradient(f), fpl::testing::weak_gradient_oracle(f)) <= 1e-12);
  }
}

TEST_CASE("discrete gradient splits into broken gradient plus lift") {
  const auto s = make_space(4.0, 2, 2);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const DgField f = random_field(s, rng);
    const VecDgField g = discrete_gradient(f);
    CHECK(max_diff(g, broken_gradient(f) + lift_of_jumps(f)) <= 1e-12 * max_abs(g));
  }
  const DgField px = l2_project([](const Vec3& p) { return p[0] * p[1]; }, s);
  CHECK(max_abs(lift_of_jumps(px)) <= 1e-13);
}

TEST_CASE("lift adjointness against a full basis") {
  // sum_R <f_check - f_R, V_R . n_R>_{dR \ Gamma} = -sum_faces <[[f]], V_hat>
  const auto s = make_space(4.0, 2, 2);
  const CartesianMesh& m = s->mesh();
  std::mt19937 rng(13);
  const DgField f = random_field(s, rng);
  const VecDgField r = lift_of_jumps(f);
  const auto& fw = s->face_weights();
  for (int e = 0; e < s->num_elements(); ++e)
    for (int basis = 0; basis < s->num_basis(); ++basis)
      for (int d = 0; d < 3; ++d) {
        double lhs = 0.0, rhs = 0.0;
        for (int side = 0; side < 2; ++side) {
          const Face& fc = m.face(m.element_face(e, d, side));
          if (fc.boundary()) continue;
          const FaceTracePair t = face_traces(f, static_cast<int>(&fc - m.faces().data()));
          const bool is_minus = fc.minus == e;
          const int my_side = is_minus ? fc.minus_side : fc.plus_side();
          const Eigen::VectorXd phi = s->face_values(d, my_side).col(basis);
          const double n_out = is_minus ? fc.normal_minus[d] : fc.normal_plus[d];
          // f_check is the upper (plus) trace; V_hat the lower (minus) trace.
          const Eigen::VectorXd own = is_minus ? t.minus : t.plus;
          lhs += (fw.cwiseProduct(t.plus - own).cwiseProduct(phi)).sum() * n_out;
          if (is_minus) rhs -= (fw.cwiseProduct(t.minus - t.plus).cwiseProduct(phi)).sum() * fc.normal_minus[d];
        }
        CHECK(std::abs(lhs - rhs) <= 1e-12);
        CHECK(std::abs(r[d].coeffs()(e, basis) - rhs) <= 1e-12);
      }
}

TEST_CASE("discrete gradient is linear") {
  const auto s = make_space(3.0, 3, 2);
  std::mt19937 rng(17);
  const DgField f = random_field(s, rng), g = random_field(s, rng);
  const double a = 0.37, b = -1.9;
  const VecDgField lhs = discrete_gradient(a * f + b * g);
  const VecDgField gf = discrete_gradient(f), gg = discrete_gradient(g);
  for (int d = 0; d < 3; ++d)
    CHECK((lhs[d].coeffs() - a * gf[d].coeffs() - b * gg[d].coeffs()).cwiseAbs().maxCoeff() <= 1e-12);
}
