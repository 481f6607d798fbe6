#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "reloop/errors.hpp"
#include "reloop/integrate.hpp"
#include "reloop/model.hpp"

namespace reloop {

/// Reactor exit state (alpha(1), theta(1)); the phase point of the
/// discrete recycle map.
struct ExitState {
  double alpha1 = 0.0;
  double theta1 = 0.0;
};

/// Relative-percent stopping rule for the iteration count, with a floor on
/// the denominators so references near zero stay usable.
struct StoppingCriterion {
  double epsilon_percent = 0.001;
  int n_max = 100000;
  double denom_floor = 1e-9;

  void validate() const {
    if (!(epsilon_percent > 0.0))
      throw InvariantViolation("epsilon must satisfy epsilon > 0");
    if (n_max < 1) throw InvariantViolation("n_max must satisfy n_max >= 1");
    if (!(denom_floor > 0.0))
      throw InvariantViolation("denom_floor must satisfy denom_floor > 0");
  }
};

/// Distance of x from a reference point, in percent:
///   (|a - a_ref| / max(|a_ref|, floor) + |t - t_ref| / max(|t_ref|, floor)) * 100
inline double convergence_distance(const ExitState& x, const ExitState& ref,
                                   double denom_floor = 1e-9) {
  const double da =
      std::abs(x.alpha1 - ref.alpha1) / std::max(std::abs(ref.alpha1), denom_floor);
  const double dt =
      std::abs(x.theta1 - ref.theta1) / std::max(std::abs(ref.theta1), denom_floor);
  return (da + dt) * 100.0;
}

struct MapResult {
  ExitState exit;
  /// Jacobian of the map at the starting point: f * M(pass), present when
  /// requested.
  std::optional<Matrix2> jacobian;
};

/// One application of the recycle map P: feed the reactor with f times the
/// previous exit state, integrate a pass, return the new exit state.
///
/// The chain rule gives DP = M * d(inlet)/d(exit_prev) = f * M, with M the
/// pass monodromy evaluated at the recycled inlet.
inline MapResult recycle_map(const ExitState& x, const ReactorParams& p,
                             const IntegratorConfig& c,
                             bool with_jacobian = false) {
  const ReactorState inlet{p.f * x.alpha1, p.f * x.theta1};
  const PassResult pass = integrate_pass(inlet, p, c, with_jacobian);
  MapResult r;
  r.exit = {pass.exit.alpha, pass.exit.theta};
  if (with_jacobian) r.jacobian = p.f * *pass.monodromy;
  return r;
}

} // namespace reloop
