#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reloop/analysis.hpp"
#include "reloop/format.hpp"
#include "reloop/grid.hpp"

namespace reloop {

// All CSV emitters share the conventions: one header row of bare symbol
// names, comma separator, 17-significant-digit floats, LF line ends, rows
// in deterministic axis order (outer axis first, ascending index).

namespace detail {

inline void csv_row_orbit(std::string& out, double f, const AttractorSummary& cell) {
  if (cell.ok()) {
    for (const ExitState& pt : cell.orbit) {
      out += format_double(f);
      out += ',';
      out += format_double(pt.alpha1);
      out += ',';
      out += std::to_string(cell.period);
      out += ',';
      out += cell.stable ? '1' : '0';
      out += '\n';
    }
  } else {
    out += format_double(f);
    out += ",nan,0,0\n";
  }
}

} // namespace detail

/// One detected attractor: one row per orbit point.
inline std::string csv_attractor(const AttractorSummary& cell, double f) {
  std::string out = "f,alpha1,theta1,period,stable,lambda1_mod,lambda2_mod\n";
  const double l1 = cell.ok() ? std::abs(cell.eigenvalues[0])
                              : std::numeric_limits<double>::quiet_NaN();
  const double l2 = cell.ok() ? std::abs(cell.eigenvalues[1])
                              : std::numeric_limits<double>::quiet_NaN();
  if (cell.ok()) {
    for (const ExitState& pt : cell.orbit) {
      out += format_double(f);
      out += ',';
      out += format_double(pt.alpha1);
      out += ',';
      out += format_double(pt.theta1);
      out += ',';
      out += std::to_string(cell.period);
      out += ',';
      out += cell.stable ? '1' : '0';
      out += ',';
      out += format_double(l1);
      out += ',';
      out += format_double(l2);
      out += '\n';
    }
  } else {
    out += format_double(f);
    out += ",nan,nan,0,0,nan,nan\n";
  }
  return out;
}

/// Bifurcation diagram: period-k cells contribute k rows sharing the f
/// value; failed cells keep one marker row (period 0).
inline std::string csv_bifurcation(const BifurcationSeries& s) {
  std::string out = "f,alpha1,period,stable\n";
  for (int i = 0; i < s.f_axis.count; ++i)
    detail::csv_row_orbit(out, s.f_axis.value(i),
                          s.cells[static_cast<std::size_t>(i)]);
  return out;
}

/// Eigenvalue moduli along f: one row per cell.
inline std::string csv_eigenvalues(const EigenvalueSeries& s) {
  std::string out = "f,lambda1_mod,lambda2_mod,period,stable\n";
  for (int i = 0; i < s.f_axis.count; ++i) {
    const AttractorSummary& cell = s.cells[static_cast<std::size_t>(i)];
    out += format_double(s.f_axis.value(i));
    if (cell.ok()) {
      out += ',';
      out += format_double(std::abs(cell.eigenvalues[0]));
      out += ',';
      out += format_double(std::abs(cell.eigenvalues[1]));
      out += ',';
      out += std::to_string(cell.period);
      out += ',';
      out += cell.stable ? '1' : '0';
      out += '\n';
    } else {
      out += ",nan,nan,0,0\n";
    }
  }
  return out;
}

/// 1D iteration profile.
inline std::string csv_profile_1d(const NGrid& g) {
  std::string out = "alpha0,N\n";
  for (int i = 0; i < g.nx(); ++i) {
    out += format_double(g.x_axis.value(i));
    out += ',';
    out += std::to_string(g.at(i, 0));
    out += '\n';
  }
  return out;
}

/// Profile tree over (f, alpha0): rows grouped by f, alpha0 ascending
/// within a group, so each group is one column profile.
inline std::string csv_tree(const NGrid& g) {
  std::string out = "f,alpha0,N\n";
  for (int ix = 0; ix < g.nx(); ++ix)
    for (int iy = 0; iy < g.ny(); ++iy) {
      out += format_double(g.x_axis.value(ix));
      out += ',';
      out += format_double(g.y_axis->value(iy));
      out += ',';
      out += std::to_string(g.at(ix, iy));
      out += '\n';
    }
  return out;
}

/// 2D start-state profile over (alpha0, theta0): rows grouped by theta0.
inline std::string csv_profile_2d(const NGrid& g) {
  std::string out = "alpha0,theta0,N\n";
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix) {
      out += format_double(g.x_axis.value(ix));
      out += ',';
      out += format_double(g.y_axis->value(iy));
      out += ',';
      out += std::to_string(g.at(ix, iy));
      out += '\n';
    }
  return out;
}

/// Profile peaks: the x position and height of each retained peak.
inline std::string csv_peaks(const NGrid& g, std::span<const int> peak_indices) {
  std::string out = "alpha0,N\n";
  for (int i : peak_indices) {
    out += format_double(g.x_axis.value(i));
    out += ',';
    out += std::to_string(g.at(i, 0));
    out += '\n';
  }
  return out;
}

/// Consecutive-peak pairs (the peak Poincare section).
inline std::string csv_poincare(std::span<const std::pair<int, int>> pairs) {
  std::string out = "N_j,N_j1\n";
  for (const auto& [a, b] : pairs) {
    out += std::to_string(a);
    out += ',';
    out += std::to_string(b);
    out += '\n';
  }
  return out;
}

/// Periodicity window edges.
inline std::string csv_window(const Window& w, int k_from) {
  std::string out = "k_from,f_left,f_right\n";
  out += std::to_string(k_from);
  out += ',';
  out += format_double(w.f_left);
  out += ',';
  out += format_double(w.f_right);
  out += '\n';
  return out;
}

/// Attractor classification over (theta_H, f): rows grouped by theta_H.
inline std::string csv_classify(const ClassifyGrid& g) {
  std::string out = "theta_H,f,period,stable\n";
  for (int it = 0; it < g.theta_H_axis.count; ++it)
    for (int i = 0; i < g.f_axis.count; ++i) {
      const AttractorSummary& cell = g.at(i, it);
      out += format_double(g.theta_H_axis.value(it));
      out += ',';
      out += format_double(g.f_axis.value(i));
      out += ',';
      out += std::to_string(cell.period);
      out += ',';
      out += cell.ok() && cell.stable ? '1' : '0';
      out += '\n';
    }
  return out;
}

} // namespace reloop
