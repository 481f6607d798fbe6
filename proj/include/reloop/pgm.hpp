#pragma once

#include <cmath>
#include <string>

#include "reloop/errors.hpp"
#include "reloop/grid.hpp"

namespace reloop {

struct PgmImage {
  std::string bytes;
  /// All non-sentinel cells share one value (or every cell is the
  /// sentinel); the image was painted uniform mid-gray instead of scaled.
  bool degenerate = false;
  int n_min = 0;
  int n_max = 0;
};

/// Render an iteration-count grid as a binary PGM (magic P5, maxval 255).
/// Width is the x count, height the y count, and file row 0 is the
/// maximum-y grid row. Brightness scales linearly between the smallest and
/// largest non-sentinel count, rounded half-up; cells that never converged
/// (count == n_max sentinel) are forced to white (255).
inline PgmImage emit_pgm(const NGrid& g) {
  if (!g.y_axis) throw Error("PGM emission requires a 2D grid");

  const int sentinel = g.meta.criterion.n_max;
  int lo = 0, hi = 0;
  bool any = false;
  for (int v : g.counts) {
    if (v == sentinel) continue;
    if (!any) {
      lo = hi = v;
      any = true;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  PgmImage img;
  img.degenerate = !any || lo == hi;
  img.n_min = lo;
  img.n_max = hi;

  const int w = g.nx(), h = g.ny();
  img.bytes = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  img.bytes.reserve(img.bytes.size() + static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int iy = h - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < w; ++ix) {
      const int v = g.at(ix, iy);
      unsigned char px;
      if (v == sentinel)
        px = 255;
      else if (img.degenerate)
        px = 128;
      else
        px = static_cast<unsigned char>(
            std::floor(255.0 * (static_cast<double>(v) - static_cast<double>(lo)) /
                           (static_cast<double>(hi) - static_cast<double>(lo)) +
                       0.5));
      img.bytes.push_back(static_cast<char>(px));
    }
  }
  return img;
}

} // namespace reloop
