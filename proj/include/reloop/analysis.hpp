#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "reloop/attractor.hpp"
#include "reloop/errors.hpp"
#include "reloop/grid.hpp"
#include "reloop/map.hpp"

namespace reloop {

/// Run fn(0) .. fn(n-1) on up to `workers` threads. Each index must write
/// only its own slot of a preallocated result, so the outcome does not
/// depend on scheduling and a run with any worker count is bit-identical
/// to the serial one.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int w = std::max(1, std::min(workers, n));
  if (w == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(w));
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

/// Outcome of attractor detection at one sweep cell. period == 0 marks a
/// cell where detection failed; such cells are kept in the artifact.
struct AttractorSummary {
  int period = 0;
  bool stable = false;
  EigenPair eigenvalues{};
  std::vector<ExitState> orbit;

  bool ok() const { return period > 0; }
};

namespace detail {

inline AttractorSummary summarize(Attractor&& a) {
  AttractorSummary s;
  s.period = a.period;
  s.stable = a.stable;
  s.eigenvalues = a.eigenvalues;
  s.orbit = std::move(a.orbit);
  return s;
}

inline AttractorSummary detect_cell(const ExitState& seed, const ReactorParams& p,
                                    const IntegratorConfig& c,
                                    const StoppingCriterion& crit,
                                    const DetectionSettings& det) {
  try {
    Attractor a = detect_attractor(seed, p, c, crit, det);
    return summarize(std::move(a));
  } catch (const Error&) {
    return {};
  }
}

// Serial sweep over f with seed continuation: each cell starts from the
// previous cell's first orbit point, falling back to the user seed after a
// failed cell.
inline std::vector<AttractorSummary> sweep_over_f(
    const ReactorParams& base, const Grid1D& f_axis, const ExitState& seed,
    const IntegratorConfig& c, const StoppingCriterion& crit,
    const DetectionSettings& det) {
  std::vector<AttractorSummary> cells;
  cells.reserve(static_cast<std::size_t>(f_axis.count));
  ExitState s = seed;
  for (int i = 0; i < f_axis.count; ++i) {
    ReactorParams p = base;
    p.f = f_axis.value(i);
    AttractorSummary cell = detect_cell(s, p, c, crit, det);
    s = cell.ok() ? cell.orbit[0] : seed;
    cells.push_back(std::move(cell));
  }
  return cells;
}

// count_iterations with integration failures turned into the sentinel.
inline int cell_count(const ExitState& start, const Attractor& a,
                      const ReactorParams& p, const IntegratorConfig& c,
                      const StoppingCriterion& crit) {
  try {
    return count_iterations(start, a, p, c, crit);
  } catch (const IntegrationDomainError&) {
    return crit.n_max;
  } catch (const NonFinite&) {
    return crit.n_max;
  }
}

} // namespace detail

/// Attractor structure along a recycle-ratio sweep.
struct BifurcationSeries {
  Grid1D f_axis;
  SweepMeta meta;
  std::vector<AttractorSummary> cells;
};

inline BifurcationSeries bifurcation_diagram(
    const ReactorParams& base, const Grid1D& f_axis, const ExitState& seed,
    const IntegratorConfig& c, const StoppingCriterion& crit,
    const DetectionSettings& det = {}) {
  f_axis.validate("f axis");
  BifurcationSeries out;
  out.f_axis = f_axis;
  out.meta = {base, c, crit};
  out.cells = detail::sweep_over_f(base, f_axis, seed, c, crit, det);
  return out;
}

/// Leading and trailing eigenvalue moduli along a recycle-ratio sweep.
/// k_expected records the period the curve is meant to track; cells whose
/// detected period differs stay in the series and are visible by their
/// period column.
struct EigenvalueSeries {
  Grid1D f_axis;
  int k_expected = 1;
  SweepMeta meta;
  std::vector<AttractorSummary> cells;
};

inline EigenvalueSeries eigenvalue_curve(
    const ReactorParams& base, const Grid1D& f_axis, int k_expected,
    const ExitState& seed, const IntegratorConfig& c,
    const StoppingCriterion& crit, const DetectionSettings& det = {}) {
  f_axis.validate("f axis");
  if (k_expected < 1)
    throw InvariantViolation("k_expected must satisfy k_expected >= 1");
  EigenvalueSeries out;
  out.f_axis = f_axis;
  out.k_expected = k_expected;
  out.meta = {base, c, crit};
  out.cells = detail::sweep_over_f(base, f_axis, seed, c, crit, det);
  return out;
}

/// A window [f_left, f_right] of recycle ratios over which the detected
/// period differs from k_from.
struct Window {
  double f_left = 0.0;
  double f_right = 0.0;
};

/// Locate a periodicity window inside [f_lo, f_hi] by bisection on the
/// detected period. Both bracket ends must detect period k_from; an
/// interior point with a different period is searched at the midpoint and
/// then on a coarse scan. A probe counts as interior when it is not a
/// stable period-k_from attractor — an unstable k_from landing or an
/// outright detection failure happens just inside the window, where the
/// old orbit persists unstably, never outside.
inline Window fb_window(const ReactorParams& base, double f_lo, double f_hi,
                        int k_from, double tol, const ExitState& seed,
                        const IntegratorConfig& c, const StoppingCriterion& crit,
                        const DetectionSettings& det = {}) {
  if (!(f_lo < f_hi)) throw InvariantViolation("f_lo must be < f_hi");
  if (!(f_lo >= 0.0 && f_hi < 1.0))
    throw InvariantViolation("window bracket must lie in [0, 1)");
  if (!(tol > 0.0)) throw InvariantViolation("fb_tol must satisfy fb_tol > 0");
  if (k_from < 1) throw InvariantViolation("k_from must satisfy k_from >= 1");

  const auto inside_at = [&](double f) {
    ReactorParams p = base;
    p.f = f;
    try {
      const Attractor a = detect_attractor(seed, p, c, crit, det);
      return a.period != k_from || !a.stable;
    } catch (const Error&) {
      return true;
    }
  };

  if (inside_at(f_lo))
    throw WindowNotBracketed("period at f_lo is not k_from");
  if (inside_at(f_hi))
    throw WindowNotBracketed("period at f_hi is not k_from");

  double f_in = 0.5 * (f_lo + f_hi);
  if (!inside_at(f_in)) {
    bool found = false;
    const int scan = 17;
    for (int i = 1; i < scan && !found; ++i) {
      const double f = f_lo + (f_hi - f_lo) * static_cast<double>(i) /
                                  static_cast<double>(scan);
      if (inside_at(f)) {
        f_in = f;
        found = true;
      }
    }
    if (!found)
      throw WindowNotBracketed("no period change found inside the bracket");
  }

  double a = f_lo, b = f_in;
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    (inside_at(m) ? b : a) = m;
  }
  Window w;
  w.f_left = 0.5 * (a + b);

  a = f_in, b = f_hi;
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    (inside_at(m) ? a : b) = m;
  }
  w.f_right = 0.5 * (a + b);
  return w;
}

/// Iteration counts over a grid of start conversions at fixed theta0.
/// The attractor is detected once from the seed; detection failure or an
/// unstable landing aborts the profile. Per-cell integration failures
/// become the n_max sentinel.
inline NGrid profile_1d(const ReactorParams& p, const Grid1D& alpha0_axis,
                        double theta0, const ExitState& seed,
                        const IntegratorConfig& c, const StoppingCriterion& crit,
                        const DetectionSettings& det = {}, int workers = 1) {
  alpha0_axis.validate("alpha0 axis");
  const Attractor att = detect_attractor(seed, p, c, crit, det);
  if (!att.stable)
    throw NoPeriodicAttractor("attractor at the profile parameters is unstable");
  NGrid g;
  g.x_axis = alpha0_axis;
  g.meta = {p, c, crit};
  g.counts.resize(static_cast<std::size_t>(alpha0_axis.count));
  parallel_for(alpha0_axis.count, workers, [&](int i) {
    const ExitState start{alpha0_axis.value(i), theta0};
    g.counts[static_cast<std::size_t>(i)] = detail::cell_count(start, att, p, c, crit);
  });
  return g;
}

/// Iteration counts over (f, alpha0): x axis is f, y axis is alpha0. Each
/// f column detects its own attractor from the user seed — exactly what
/// profile_1d does at that f, keeping tree columns cell-for-cell equal to
/// standalone profiles — so columns are independent and run in parallel.
/// Columns whose detection fails (or lands unstable) are filled with the
/// sentinel.
inline NGrid tree_profile(const ReactorParams& base, const Grid1D& f_axis,
                          const Grid1D& alpha0_axis, double theta0,
                          const ExitState& seed, const IntegratorConfig& c,
                          const StoppingCriterion& crit,
                          const DetectionSettings& det = {}, int workers = 1) {
  f_axis.validate("f axis");
  alpha0_axis.validate("alpha0 axis");

  std::vector<std::optional<Attractor>> columns(
      static_cast<std::size_t>(f_axis.count));
  parallel_for(f_axis.count, workers, [&](int ix) {
    ReactorParams p = base;
    p.f = f_axis.value(ix);
    try {
      Attractor a = detect_attractor(seed, p, c, crit, det);
      if (a.stable) columns[static_cast<std::size_t>(ix)] = std::move(a);
    } catch (const Error&) {
    }
  });

  NGrid g;
  g.x_axis = f_axis;
  g.y_axis = alpha0_axis;
  g.meta = {base, c, crit};
  g.counts.resize(static_cast<std::size_t>(f_axis.count) *
                  static_cast<std::size_t>(alpha0_axis.count));
  const int nx = f_axis.count;
  parallel_for(nx * alpha0_axis.count, workers, [&](int idx) {
    const int ix = idx % nx;
    const int iy = idx / nx;
    const auto& col = columns[static_cast<std::size_t>(ix)];
    if (!col) {
      g.at(ix, iy) = crit.n_max;
      return;
    }
    ReactorParams p = base;
    p.f = f_axis.value(ix);
    const ExitState start{alpha0_axis.value(iy), theta0};
    g.at(ix, iy) = detail::cell_count(start, *col, p, c, crit);
  });
  return g;
}

/// Iteration counts over (alpha0, theta0): x axis is alpha0, y axis is
/// theta0, one attractor for the whole grid.
inline NGrid profile_2d(const ReactorParams& p, const Grid1D& alpha0_axis,
                        const Grid1D& theta0_axis, const ExitState& seed,
                        const IntegratorConfig& c, const StoppingCriterion& crit,
                        const DetectionSettings& det = {}, int workers = 1) {
  alpha0_axis.validate("alpha0 axis");
  theta0_axis.validate("theta0 axis");
  const Attractor att = detect_attractor(seed, p, c, crit, det);
  if (!att.stable)
    throw NoPeriodicAttractor("attractor at the profile parameters is unstable");
  NGrid g;
  g.x_axis = alpha0_axis;
  g.y_axis = theta0_axis;
  g.meta = {p, c, crit};
  g.counts.resize(static_cast<std::size_t>(alpha0_axis.count) *
                  static_cast<std::size_t>(theta0_axis.count));
  const int nx = alpha0_axis.count;
  parallel_for(nx * theta0_axis.count, workers, [&](int idx) {
    const int ix = idx % nx;
    const int iy = idx / nx;
    const ExitState start{alpha0_axis.value(ix), theta0_axis.value(iy)};
    g.at(ix, iy) = detail::cell_count(start, att, p, c, crit);
  });
  return g;
}

/// Indices of strict interior local maxima of a 1D profile whose
/// topographic prominence (height above the higher of the two side minima,
/// scanning out to the nearest strictly higher cell) is at least
/// `prominence`. Profiles with fewer than 3 cells have no peaks.
inline std::vector<int> detect_peaks(const NGrid& g, int prominence = 1) {
  if (g.y_axis || g.x_axis.count < 3) return {};
  const std::vector<int>& v = g.counts;
  const int n = g.x_axis.count;
  std::vector<int> peaks;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(i - 1)] &&
          v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(i + 1)]))
      continue;
    const int h = v[static_cast<std::size_t>(i)];
    int lmin = h, rmin = h;
    for (int j = i - 1; j >= 0 && v[static_cast<std::size_t>(j)] <= h; --j)
      lmin = std::min(lmin, v[static_cast<std::size_t>(j)]);
    for (int j = i + 1; j < n && v[static_cast<std::size_t>(j)] <= h; ++j)
      rmin = std::min(rmin, v[static_cast<std::size_t>(j)]);
    if (h - std::max(lmin, rmin) >= prominence) peaks.push_back(i);
  }
  return peaks;
}

/// Pairs (N at peak j, N at peak j+1) over consecutive profile peaks.
inline std::vector<std::pair<int, int>> peak_poincare_section(
    const NGrid& g, int prominence = 1) {
  const std::vector<int> peaks = detect_peaks(g, prominence);
  if (peaks.size() < 2)
    throw TooFewPeaks("fewer than two peaks in the profile");
  std::vector<std::pair<int, int>> out;
  out.reserve(peaks.size() - 1);
  for (std::size_t j = 0; j + 1 < peaks.size(); ++j)
    out.emplace_back(g.counts[static_cast<std::size_t>(peaks[j])],
                     g.counts[static_cast<std::size_t>(peaks[j + 1])]);
  return out;
}

/// Attractor class over a (theta_H, f) grid; rows follow theta_H. Each row
/// is an independent continuation sweep over f, so rows can run in
/// parallel without changing results.
struct ClassifyGrid {
  Grid1D theta_H_axis;
  Grid1D f_axis;
  SweepMeta meta;
  /// Row-major [theta_H][f].
  std::vector<AttractorSummary> cells;

  const AttractorSummary& at(int i_f, int i_th) const {
    return cells[static_cast<std::size_t>(i_th) *
                     static_cast<std::size_t>(f_axis.count) +
                 static_cast<std::size_t>(i_f)];
  }
};

inline ClassifyGrid classify_grid(const ReactorParams& base,
                                  const Grid1D& theta_H_axis,
                                  const Grid1D& f_axis, const ExitState& seed,
                                  const IntegratorConfig& c,
                                  const StoppingCriterion& crit,
                                  const DetectionSettings& det = {},
                                  int workers = 1) {
  theta_H_axis.validate("theta_H axis");
  f_axis.validate("f axis");
  ClassifyGrid g;
  g.theta_H_axis = theta_H_axis;
  g.f_axis = f_axis;
  g.meta = {base, c, crit};
  g.cells.resize(static_cast<std::size_t>(theta_H_axis.count) *
                 static_cast<std::size_t>(f_axis.count));
  parallel_for(theta_H_axis.count, workers, [&](int it) {
    ReactorParams row = base;
    row.theta_H = theta_H_axis.value(it);
    std::vector<AttractorSummary> cells =
        detail::sweep_over_f(row, f_axis, seed, c, crit, det);
    for (int i = 0; i < f_axis.count; ++i)
      g.cells[static_cast<std::size_t>(it) * static_cast<std::size_t>(f_axis.count) +
              static_cast<std::size_t>(i)] = std::move(cells[static_cast<std::size_t>(i)]);
  });
  return g;
}

/// Spearman rank correlation of paired samples, with average ranks over
/// ties. Returns 0 for degenerate inputs (fewer than two pairs, or a
/// component with no variation).
inline double rank_correlation(std::span<const std::pair<int, int>> pairs) {
  const std::size_t n = pairs.size();
  if (n < 2) return 0.0;

  const auto ranks_of = [n](const std::vector<double>& v) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double mean_rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mean_rank;
      i = j + 1;
    }
    return r;
  };

  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<double>(pairs[i].first);
    b[i] = static_cast<double>(pairs[i].second);
  }
  const std::vector<double> ra = ranks_of(a), rb = ranks_of(b);

  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(n);
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = ra[i] - ma, db = rb[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

/// Mean absolute difference of adjacent counts along x, averaged over all
/// rows; a roughness statistic for profiles.
inline double mean_abs_adjacent_diff(const NGrid& g) {
  const int nx = g.nx(), ny = g.ny();
  if (nx < 2) return 0.0;
  double total = 0.0;
  long terms = 0;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix) {
      total += std::abs(static_cast<double>(g.at(ix + 1, iy)) -
                        static_cast<double>(g.at(ix, iy)));
      ++terms;
    }
  return terms == 0 ? 0.0 : total / static_cast<double>(terms);
}

} // namespace reloop
