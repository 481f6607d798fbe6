#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reloop/errors.hpp"
#include "reloop/integrate.hpp"
#include "reloop/map.hpp"
#include "reloop/model.hpp"

namespace reloop {

/// count evenly spaced samples over [start, stop], both endpoints included.
/// A grid of count 1 consists of start alone.
struct Grid1D {
  double start = 0.0;
  double stop = 1.0;
  int count = 2;

  void validate(const char* name = "grid") const {
    if (count < 1)
      throw InvariantViolation(std::string(name) + ": count must be >= 1");
    if (count >= 2 && !(start < stop))
      throw InvariantViolation(std::string(name) + ": start must be < stop");
  }

  /// i-th sample. Computed as start + i*(stop-start)/(count-1) with the
  /// last index pinned to stop exactly, so endpoints are reproduced
  /// bit-for-bit and equal spacing parameters give equal values.
  double value(int i) const {
    if (count == 1 || i == 0) return start;
    if (i == count - 1) return stop;
    return start +
           (static_cast<double>(i) * (stop - start)) / static_cast<double>(count - 1);
  }

  double spacing() const {
    return count < 2 ? 0.0 : (stop - start) / static_cast<double>(count - 1);
  }
};

/// Everything a sweep artifact needs to be reproduced.
struct SweepMeta {
  ReactorParams params;
  IntegratorConfig integrator;
  StoppingCriterion criterion;
};

/// Iteration counts over a 1D or 2D grid of start states. Row-major over
/// (y, x); a 1D grid has no y axis and ny() == 1. Counts lie in
/// [0, n_max], with n_max the not-converged sentinel.
struct NGrid {
  Grid1D x_axis;
  std::optional<Grid1D> y_axis;
  std::vector<int> counts;
  SweepMeta meta;

  int nx() const { return x_axis.count; }
  int ny() const { return y_axis ? y_axis->count : 1; }

  int& at(int ix, int iy) {
    return counts[static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx()) +
                  static_cast<std::size_t>(ix)];
  }
  int at(int ix, int iy) const {
    return counts[static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx()) +
                  static_cast<std::size_t>(ix)];
  }
};

} // namespace reloop
