#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "reloop/errors.hpp"
#include "reloop/matrix2.hpp"

namespace reloop {

/// Dimensionless parameters of the recycle reactor.
///
/// Da     Damkohler number (>= 0)
/// n      reaction order (> 0)
/// gamma  dimensionless activation energy (> 0)
/// beta   dimensionless adiabatic temperature rise (> 0)
/// delta  dimensionless heat-exchange coefficient (>= 0)
/// theta_H  coolant temperature
/// f      recycle ratio, 0 <= f < 1
struct ReactorParams {
  double Da = 0.15;
  double n = 1.5;
  double gamma = 15.0;
  double beta = 2.0;
  double delta = 3.0;
  double theta_H = -0.001;
  double f = 0.427;

  void validate() const {
    if (!(Da >= 0.0)) throw InvariantViolation("Da must satisfy Da >= 0");
    if (!(n > 0.0)) throw InvariantViolation("n must satisfy n > 0");
    if (!(gamma > 0.0)) throw InvariantViolation("gamma must satisfy gamma > 0");
    if (!(beta > 0.0)) throw InvariantViolation("beta must satisfy beta > 0");
    if (!(delta >= 0.0)) throw InvariantViolation("delta must satisfy delta >= 0");
    if (!std::isfinite(theta_H))
      throw InvariantViolation("theta_H must be finite");
    if (!(f >= 0.0 && f < 1.0))
      throw InvariantViolation("f must satisfy 0 <= f < 1");
  }
};

/// State along the reactor axis: conversion degree and temperature.
struct ReactorState {
  double alpha = 0.0;
  double theta = 0.0;
};

namespace detail {

// x^n with fast paths for the common orders; x >= 0.
inline double pow_order(double x, double n) {
  if (n == 1.5) return x * std::sqrt(x);
  if (n == 1.0) return x;
  if (n == 0.5) return std::sqrt(x);
  if (n == 2.0) return x * x;
  return std::pow(x, n);
}

// Largest Arrhenius exponent accepted before erroring out; exp(700) is
// still finite in double, anything near 710 overflows.
inline constexpr double kMaxExponent = 700.0;

struct RateTerms {
  double phi;       // reaction rate
  double dphi_da;   // d(phi)/d(alpha)
  double dphi_dt;   // d(phi)/d(theta)
};

// Single evaluation point for the rate law and (optionally) its partial
// derivatives, so the integrator, the right-hand side, and the Jacobian
// all share one definition.
template <bool WithPartials>
inline RateTerms rate_terms(double alpha, double theta, const ReactorParams& p) {
  // Fixed-step stages can poke past complete conversion during a hard
  // ignition; with no reactant left the rate is zero, so the law is clamped
  // there (with zero slope) rather than rejected.
  const double rem = std::max(0.0, 1.0 - alpha);
  const double den = 1.0 + p.beta * theta;
  if (den <= 0.0)
    throw IntegrationDomainError("1 + beta*theta is not positive");
  const double arg = p.gamma * p.beta * theta / den;
  if (arg > kMaxExponent)
    throw IntegrationDomainError("Arrhenius exponent exceeds overflow cap");
  const double e = std::exp(arg);
  RateTerms t{};
  t.phi = p.Da * pow_order(rem, p.n) * e;
  if constexpr (WithPartials) {
    // d/dalpha of Da*(1-alpha)^n*E, written without dividing by (1-alpha)
    // so the limit alpha -> 1 stays finite for n > 1. In the clamped region
    // the rate is identically zero, hence zero slope.
    t.dphi_da =
        rem == 0.0 ? 0.0 : -p.n * p.Da * pow_order(rem, p.n - 1.0) * e;
    t.dphi_dt = t.phi * p.gamma * p.beta / (den * den);
  }
  return t;
}

} // namespace detail

/// Reaction rate Phi(alpha, theta) = Da * (1-alpha)^n * exp(gamma*beta*theta / (1+beta*theta)).
inline double reaction_rate(const ReactorState& s, const ReactorParams& p) {
  return detail::rate_terms<false>(s.alpha, s.theta, p).phi;
}

/// Right-hand side of the pass equations along xi in [0, 1]:
///   d(alpha)/d(xi) = (1-f) * Phi
///   d(theta)/d(xi) = (1-f) * (Phi + delta * (theta_H - theta))
struct Derivatives {
  double dalpha;
  double dtheta;
};

inline Derivatives rhs(const ReactorState& s, const ReactorParams& p) {
  const double phi = reaction_rate(s, p);
  const double g = 1.0 - p.f;
  return {g * phi, g * (phi + p.delta * (p.theta_H - s.theta))};
}

/// Jacobian of the right-hand side with respect to (alpha, theta).
inline Matrix2 rhs_jacobian(const ReactorState& s, const ReactorParams& p) {
  const auto t = detail::rate_terms<true>(s.alpha, s.theta, p);
  const double g = 1.0 - p.f;
  return {g * t.dphi_da, g * t.dphi_dt,
          g * t.dphi_da, g * (t.dphi_dt - p.delta)};
}

} // namespace reloop
