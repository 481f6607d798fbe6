#pragma once

#include <cmath>
#include <optional>

#include "reloop/errors.hpp"
#include "reloop/matrix2.hpp"
#include "reloop/model.hpp"

namespace reloop {

enum class IntegrationMethod { Rk4Fixed };

struct IntegratorConfig {
  int steps = 1000;
  IntegrationMethod method = IntegrationMethod::Rk4Fixed;

  void validate() const {
    if (steps < 1) throw InvariantViolation("steps must satisfy steps >= 1");
  }
};

/// Result of one pass through the reactor, xi from 0 to 1.
struct PassResult {
  ReactorState exit;
  /// Fundamental (monodromy) matrix of the variational equations,
  /// present when the pass was integrated with it.
  std::optional<Matrix2> monodromy;
};

namespace detail {

// One RK4 stage: state derivative, and when Mono is set, the derivative
// of the monodromy columns dM/dxi = J(alpha, theta) * M.
template <bool Mono>
struct Stage {
  double da, dt;
  Matrix2 dm;
};

template <bool Mono>
inline Stage<Mono> stage(double alpha, double theta, const Matrix2& m,
                         const ReactorParams& p) {
  const auto t = rate_terms<Mono>(alpha, theta, p);
  const double g = 1.0 - p.f;
  Stage<Mono> s{};
  s.da = g * t.phi;
  s.dt = g * (t.phi + p.delta * (p.theta_H - theta));
  if constexpr (Mono) {
    const double j11 = g * t.dphi_da;
    const double j12 = g * t.dphi_dt;
    const double j21 = j11;
    const double j22 = g * (t.dphi_dt - p.delta);
    s.dm = {j11 * m.m11 + j12 * m.m21, j11 * m.m12 + j12 * m.m22,
            j21 * m.m11 + j22 * m.m21, j21 * m.m12 + j22 * m.m22};
  }
  return s;
}

template <bool Mono>
inline PassResult run_pass(const ReactorState& inlet, const ReactorParams& p,
                           const IntegratorConfig& c) {
  const double h = 1.0 / static_cast<double>(c.steps);
  double a = inlet.alpha;
  double t = inlet.theta;
  Matrix2 m = Matrix2::identity();

  for (int i = 0; i < c.steps; ++i) {
    const auto k1 = stage<Mono>(a, t, m, p);
    Matrix2 m2{}, m3{}, m4{};
    if constexpr (Mono) m2 = m + 0.5 * h * k1.dm;
    const auto k2 = stage<Mono>(a + 0.5 * h * k1.da, t + 0.5 * h * k1.dt, m2, p);
    if constexpr (Mono) m3 = m + 0.5 * h * k2.dm;
    const auto k3 = stage<Mono>(a + 0.5 * h * k2.da, t + 0.5 * h * k2.dt, m3, p);
    if constexpr (Mono) m4 = m + h * k3.dm;
    const auto k4 = stage<Mono>(a + h * k3.da, t + h * k3.dt, m4, p);

    a += h / 6.0 * (k1.da + 2.0 * k2.da + 2.0 * k3.da + k4.da);
    t += h / 6.0 * (k1.dt + 2.0 * k2.dt + 2.0 * k3.dt + k4.dt);
    if constexpr (Mono)
      m = m + (h / 6.0) * (k1.dm + 2.0 * k2.dm + 2.0 * k3.dm + k4.dm);

    if (!std::isfinite(a) || !std::isfinite(t))
      throw NonFinite("state became non-finite during a pass");
    if constexpr (Mono) {
      if (!m.finite())
        throw NonFinite("monodromy became non-finite during a pass");
    }
  }

  PassResult r;
  r.exit = {a, t};
  if constexpr (Mono) r.monodromy = m;
  return r;
}

} // namespace detail

/// Integrate one pass with classical fixed-step RK4. When with_monodromy is
/// set, the 2x2 variational system is advanced jointly with the state: the
/// Jacobian is evaluated at every RK4 stage point, so the monodromy carries
/// the same fourth-order accuracy as the trajectory.
inline PassResult integrate_pass(const ReactorState& inlet,
                                 const ReactorParams& p,
                                 const IntegratorConfig& c,
                                 bool with_monodromy = false) {
  p.validate();
  c.validate();
  if (inlet.alpha > 1.0)
    throw IntegrationDomainError("inlet alpha exceeds 1");
  return with_monodromy ? detail::run_pass<true>(inlet, p, c)
                        : detail::run_pass<false>(inlet, p, c);
}

} // namespace reloop
