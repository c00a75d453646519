#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "fpl/dg_field.hpp"

namespace fpl {

/// Raised when a state or coefficient turns non-finite.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(long step, int element, const std::string& what)
      : std::runtime_error("blow-up at step " + std::to_string(step) +
                           (element >= 0 ? ", element " + std::to_string(element) : std::string()) + ": " + what),
        step_(step), element_(element) {}
  long step() const { return step_; }
  int element() const { return element_; }

 private:
  long step_;
  int element_;
};

inline void ensure_finite(double v, long step) {
  if (!std::isfinite(v)) throw BlowUpError(step, -1, "non-finite value");
}

inline void ensure_finite(const DgField& f, long step) {
  const RowMatrix& c = f.coeffs();
  for (Eigen::Index e = 0; e < c.rows(); ++e)
    if (!c.row(e).allFinite()) throw BlowUpError(step, static_cast<int>(e), "non-finite coefficient");
}

/// f + dt R(f).
template <typename State, typename Rhs>
State euler_step(const State& f, double dt, Rhs&& rhs, long step = 0) {
  State out = f + dt * rhs(f);
  ensure_finite(out, step);
  return out;
}

/// Three-stage SSP Runge-Kutta (Shu-Osher form):
///   w = f + dt R(f)
///   y = 3/4 f + 1/4 (w + dt R(w))
///   f' = 1/3 f + 2/3 (y + dt R(y))
template <typename State, typename Rhs>
State rk3_step(const State& f, double dt, Rhs&& rhs, long step = 0) {
  const State w = euler_step(f, dt, rhs, step);
  const State y = 0.75 * f + 0.25 * euler_step(w, dt, rhs, step);
  State out = (1.0 / 3.0) * f + (2.0 / 3.0) * euler_step(y, dt, rhs, step);
  ensure_finite(out, step);
  return out;
}

struct SolverConfig {
  double dt = 0.0;
  double t_end = 0.0;
  int output_every = 1;
  int checkpoint_every = 0;  ///< 0 disables intermediate checkpoints

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive and finite");
    if (!(t_end >= dt)) throw std::invalid_argument("t_end must be >= dt");
    if (output_every < 1) throw std::invalid_argument("output_every must be >= 1");
    if (checkpoint_every < 0) throw std::invalid_argument("checkpoint_every must be >= 0");
  }
};

}  // namespace fpl
