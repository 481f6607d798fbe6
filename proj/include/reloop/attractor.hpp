#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "reloop/errors.hpp"
#include "reloop/map.hpp"
#include "reloop/matrix2.hpp"

namespace reloop {

/// A periodic attractor of the recycle map.
struct Attractor {
  int period = 0;
  /// The orbit points in map order: orbit[j+1] = P(orbit[j]), size == period.
  std::vector<ExitState> orbit;
  /// Eigenvalues of the period-fold map Jacobian at orbit[0], by
  /// descending modulus.
  EigenPair eigenvalues{};
  /// Both eigenvalue moduli strictly below 1.
  bool stable = false;
};

/// Knobs of the attractor search. The defaults are the tuned values used
/// throughout; sweeps expose them through the run configuration.
struct DetectionSettings {
  /// Iteration budget for the settling phase (recurrence detection runs
  /// inside it). Retried once with ten times the budget — first iterating
  /// blindly, then watching again — before giving up.
  int transient = 5000;
  /// Largest candidate period considered.
  int k_max = 64;
  /// Recurrence tolerance in percent; deliberately looser than a typical
  /// stopping criterion since Newton polishes the orbit afterwards.
  double recurrence_epsilon_percent = 0.01;
  /// Tolerance (percent) under which P^d(x) counts as x when reducing a
  /// detected period to its minimal divisor.
  double minimality_epsilon_percent = 1e-6;
  /// Newton termination: infinity norm of P^k(x) - x.
  double newton_tol = 1e-12;
  int newton_max_steps = 50;
  /// Leading modulus above 1 + margin means the iteration settled on an
  /// unstable orbit and the transient is retried.
  double stability_margin = 0.01;

  void validate() const {
    if (transient < 0)
      throw InvariantViolation("transient must satisfy transient >= 0");
    if (k_max < 1) throw InvariantViolation("k_max must satisfy k_max >= 1");
    if (!(recurrence_epsilon_percent > 0.0))
      throw InvariantViolation("detect_epsilon must satisfy detect_epsilon > 0");
    if (!(newton_tol > 0.0))
      throw InvariantViolation("newton_tol must satisfy newton_tol > 0");
    if (newton_max_steps < 1)
      throw InvariantViolation("newton_max_steps must satisfy newton_max_steps >= 1");
  }
};

/// Jacobian of the k-fold map along a given orbit: the product of the
/// single-step Jacobians f * M(pass) taken at each orbit point, later
/// points multiplying from the left.
inline Matrix2 map_power_jacobian(std::span<const ExitState> orbit,
                                  const ReactorParams& p,
                                  const IntegratorConfig& c) {
  Matrix2 j = Matrix2::identity();
  for (const ExitState& x : orbit) j = *recycle_map(x, p, c, true).jacobian * j;
  return j;
}

namespace detail {

// P^k(x) together with the k-fold Jacobian, in one sweep.
struct PowerResult {
  ExitState image;
  Matrix2 jacobian;
};

inline PowerResult map_power(const ExitState& x, int k, const ReactorParams& p,
                             const IntegratorConfig& c) {
  PowerResult r{x, Matrix2::identity()};
  for (int i = 0; i < k; ++i) {
    const MapResult step = recycle_map(r.image, p, c, true);
    r.jacobian = *step.jacobian * r.jacobian;
    r.image = step.exit;
  }
  return r;
}

// Newton iteration on G(x) = P^k(x) - x. Returns the refined point, or
// nothing when the iteration stalls, hits a singular system, or walks out
// of the integrable domain.
inline std::optional<ExitState> newton_refine(ExitState x, int k,
                                              const ReactorParams& p,
                                              const IntegratorConfig& c,
                                              const DetectionSettings& s) {
  for (int step = 0; step < s.newton_max_steps; ++step) {
    PowerResult pr;
    try {
      pr = map_power(x, k, p, c);
    } catch (const Error&) {
      return std::nullopt;
    }
    const double gx = pr.image.alpha1 - x.alpha1;
    const double gy = pr.image.theta1 - x.theta1;
    if (std::max(std::abs(gx), std::abs(gy)) < s.newton_tol) return x;

    const double a = pr.jacobian.m11 - 1.0, b = pr.jacobian.m12;
    const double cc = pr.jacobian.m21, d = pr.jacobian.m22 - 1.0;
    const double det = a * d - b * cc;
    if (!(std::abs(det) > 1e-14)) return std::nullopt;
    x.alpha1 += (-gx * d + gy * b) / det;
    x.theta1 += (-gy * a + gx * cc) / det;
    if (!std::isfinite(x.alpha1) || !std::isfinite(x.theta1))
      return std::nullopt;
  }
  return std::nullopt;
}

inline std::vector<int> divisors_ascending(int k) {
  std::vector<int> d;
  for (int i = 1; i <= k; ++i)
    if (k % i == 0) d.push_back(i);
  return d;
}

} // namespace detail

/// Find the periodic attractor reached from a seed.
///
/// The search iterates the map, watching a sliding window of the last
/// k_max states for a recurrence x_n ~ x_{n-k} (relative-percent distance
/// below the recurrence tolerance, confirmed on k consecutive iterations
/// so the whole cycle matches). The recurring period seeds a Newton solve
/// of P^k(x) = x, the result is reduced to its minimal period over the
/// divisors of k and polished again, and the orbit's stability follows
/// from the eigenvalues of the k-fold Jacobian.
///
/// Near period-doubling boundaries the transient settles slowly; on a
/// failed detection, Newton divergence, or an unstable landing, the
/// settling phase resumes once with ten times the budget, iterating
/// without the watch first so the trajectory can leave the neighborhood
/// that misfired.
inline Attractor detect_attractor(const ExitState& seed,
                                  const ReactorParams& p,
                                  const IntegratorConfig& c,
                                  const StoppingCriterion& criterion,
                                  const DetectionSettings& settings = {}) {
  p.validate();
  c.validate();
  criterion.validate();
  settings.validate();

  const double floor = criterion.denom_floor;
  const std::size_t ring_size = static_cast<std::size_t>(settings.k_max) + 1;
  std::vector<ExitState> ring(ring_size);

  ExitState x = seed;
  for (int attempt = 0;; ++attempt) {
    const bool last_attempt = attempt >= 1;
    const long budget = static_cast<long>(settings.transient) * (attempt == 0 ? 1 : 10);

    // The retry settles blindly before re-arming the watch. A failed first
    // attempt usually means the watch fired inside the neighborhood of a
    // nearly neutral unstable orbit, where the recurrence tube is wide and
    // the escape rate tiny; re-watching immediately would fire in the same
    // spot, while plain iteration drifts off to the attractor proper.
    if (attempt > 0)
      for (long it = 0; it < budget; ++it) x = recycle_map(x, p, c).exit;

    // Settling phase with recurrence watch.
    int k_det = 0;
    {
      ring[0] = x;
      int confirm_k = 0, confirm_count = 0;
      for (long it = 1; it <= budget; ++it) {
        x = recycle_map(x, p, c).exit;
        ring[static_cast<std::size_t>(it % static_cast<long>(ring_size))] = x;
        const int scan = static_cast<int>(
            std::min<long>(it, static_cast<long>(settings.k_max)));
        int hit = 0;
        for (int k = 1; k <= scan; ++k) {
          const ExitState& ref =
              ring[static_cast<std::size_t>((it - k) % static_cast<long>(ring_size))];
          if (convergence_distance(x, ref, floor) <
              settings.recurrence_epsilon_percent) {
            hit = k;
            break;
          }
        }
        if (hit != 0 && hit == confirm_k) {
          if (++confirm_count >= hit) {
            k_det = hit;
            break;
          }
        } else {
          confirm_k = hit;
          confirm_count = hit != 0 ? 1 : 0;
          if (hit == 1) {
            k_det = 1;
            break;
          }
        }
      }
    }
    if (k_det == 0) {
      if (last_attempt)
        throw NoPeriodicAttractor(
            "no recurrence of period <= k_max within the iteration budget");
      continue;
    }

    // Newton refinement at the detected period, from the settled state.
    const ExitState resume = x;
    std::optional<ExitState> root =
        detail::newton_refine(x, k_det, p, c, settings);
    if (!root) {
      if (last_attempt)
        throw NewtonDivergence("Newton refinement of the periodic orbit failed");
      x = resume;
      continue;
    }

    // Reduce to the minimal period among the divisors of k_det.
    int period = k_det;
    for (int d : detail::divisors_ascending(k_det)) {
      if (d == k_det) break;
      ExitState img = *root;
      for (int i = 0; i < d; ++i) img = recycle_map(img, p, c).exit;
      if (convergence_distance(img, *root, floor) <
          settings.minimality_epsilon_percent) {
        if (auto reduced = detail::newton_refine(*root, d, p, c, settings)) {
          root = reduced;
          period = d;
        }
        break;
      }
    }

    // Assemble the orbit and its stability data.
    Attractor a;
    a.period = period;
    a.orbit.resize(static_cast<std::size_t>(period));
    a.orbit[0] = *root;
    for (int j = 1; j < period; ++j)
      a.orbit[static_cast<std::size_t>(j)] =
          recycle_map(a.orbit[static_cast<std::size_t>(j - 1)], p, c).exit;
    const Matrix2 jac = map_power_jacobian(a.orbit, p, c);
    a.eigenvalues = eigenvalues_2x2(jac);
    const double lead = std::abs(a.eigenvalues[0]);
    a.stable = lead < 1.0 && std::abs(a.eigenvalues[1]) < 1.0;

    // Newton can land on the unstable orbit embedded in the attractor's
    // neighborhood (the old period-k point just inside a doubling window);
    // more settling shakes it off. Accept a marginal orbit only after the
    // retry, and give up when it is unstable beyond the margin even then.
    if (lead > 1.0 + 1e-9) {
      if (!last_attempt) {
        x = resume;
        continue;
      }
      if (lead > 1.0 + settings.stability_margin)
        throw NoPeriodicAttractor("iteration settled on an unstable orbit");
    }
    return a;
  }
}

/// Number of map applications needed to bring the trajectory from a start
/// point to within the stopping criterion of the nearest attractor orbit
/// point. A start already inside the tolerance counts as N = 0. Returns
/// n_max as a sentinel when the criterion is never met.
inline int count_iterations(const ExitState& start, const Attractor& attractor,
                            const ReactorParams& p, const IntegratorConfig& c,
                            const StoppingCriterion& criterion) {
  if (!attractor.stable || attractor.period < 1)
    throw Error("count_iterations requires a stable attractor");
  ExitState x = start;
  for (int n = 0; n < criterion.n_max; ++n) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const ExitState& pt : attractor.orbit) {
      const double d = convergence_distance(x, pt, criterion.denom_floor);
      if (d < dmin) dmin = d;
    }
    if (dmin < criterion.epsilon_percent) return n;
    x = recycle_map(x, p, c).exit;
  }
  return criterion.n_max;
}

} // namespace reloop
