#include <doctest.h>

#include <cmath>

#include "fpl/diagnostics.hpp"
#include "fpl/ldg_operator.hpp"
#include "fpl/time_integrator.hpp"
#include "oracles.hpp"

using namespace fpl;

TEST_CASE("SSP-RK3 amplification on the linear surrogate") {
  const double lambda = -1.0, dt = 0.1;
  const auto rhs = [lambda](double y) { return lambda * y; };
  const double z = lambda * dt;
  const double expected = 1.0 + z + z * z / 2.0 + z * z * z / 6.0;
  CHECK(std::abs(rk3_step(1.0, dt, rhs) - expected) <= 1e-14);
  CHECK(std::abs(euler_step(1.0, dt, rhs) - (1.0 + z)) <= 1e-15);
}

TEST_CASE("RK3 converges at third order") {
  const double lambda = -1.0, t_end = 1.0;
  const auto rhs = [lambda](double y) { return lambda * y; };
  std::vector<double> err;
  for (double dt : {0.1, 0.05, 0.025}) {
    double y = 1.0;
    const int steps = static_cast<int>(std::lround(t_end / dt));
    for (int i = 0; i < steps; ++i) y = rk3_step(y, dt, rhs, i);
    err.push_back(std::abs(y - std::exp(lambda * t_end)));
  }
  for (std::size_t i = 1; i < err.size(); ++i) CHECK(std::log2(err[i - 1] / err[i]) == doctest::Approx(3.0).epsilon(0.1 / 3.0));
}

TEST_CASE("steps on the collision operator conserve moments") {
  const auto s = make_space(4.0, 2, 2);
  const auto src = std::make_shared<ConvolutionCoefficients>(std::make_shared<const ConvolutionTable>(s, KernelSpec{}));
  const LdgOperator op(src, SchemeKind::upwind);
  const auto rhs = [&op](const DgField& f) { return op.rhs(f); };
  const Invariants inv = collision_invariants(s);

  const DgField zero(s);
  CHECK(euler_step(zero, 1e-3, rhs).coeffs().cwiseAbs().maxCoeff() == 0.0);

  std::mt19937 rng(67);
  const DgField f = fpl::testing::random_nonnegative_state(s, rng);
  const double dt = 1e-5;
  const DgField e = euler_step(f, dt, rhs);
  CHECK((e.coeffs() - (f.coeffs() + dt * op.rhs(f).coeffs())).cwiseAbs().maxCoeff() == 0.0);

  const Moments m0 = moments(f, inv);
  for (const DgField& g : {e, rk3_step(f, dt, rhs)}) {
    const Moments m1 = moments(g, inv);
    CHECK(std::abs(m1.mass - m0.mass) <= 1e-10 * std::abs(m0.mass));
    CHECK((m1.momentum - m0.momentum).norm() <= 1e-10 * m0.mass);
    CHECK(std::abs(m1.energy - m0.energy) <= 1e-10 * std::abs(m0.energy));
  }
}

TEST_CASE("non-finite states abort with step and element") {
  const auto s = make_space(1.0, 2, 1);
  DgField f(s);
  const auto bad = [&s](const DgField&) {
    DgField r(s);
    r.coeffs()(3, 1) = std::numeric_limits<double>::infinity();
    return r;
  };
  try {
    rk3_step(f, 0.1, bad, 42);
    FAIL("expected a blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.step() == 42);
    CHECK(e.element() == 3);
    CHECK(std::string(e.what()).find("step 42") != std::string::npos);
  }
  CHECK_THROWS_AS(euler_step(1.0, 1.0, [](double) { return std::nan(""); }, 7), BlowUpError);
}

TEST_CASE("solver config validation") {
  SolverConfig c{0.01, 1.0, 1, 0};
  CHECK_NOTHROW(c.validate());
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {0.5, 0.1, 1, 0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {0.01, 1.0, 0, 0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
