#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include "reloop/integrate.hpp"
#include "reloop/map.hpp"
#include "reloop/matrix2.hpp"
#include "reloop/model.hpp"

namespace test_support {

// Central finite differences of the pass exit state w.r.t. the inlet.
inline reloop::Matrix2 fd_pass_jacobian(const reloop::ReactorState& inlet,
                                        const reloop::ReactorParams& p,
                                        const reloop::IntegratorConfig& c,
                                        double h = 1e-6) {
  const auto exit_at = [&](double a, double t) {
    return reloop::integrate_pass({a, t}, p, c).exit;
  };
  const auto xp = exit_at(inlet.alpha + h, inlet.theta);
  const auto xm = exit_at(inlet.alpha - h, inlet.theta);
  const auto yp = exit_at(inlet.alpha, inlet.theta + h);
  const auto ym = exit_at(inlet.alpha, inlet.theta - h);
  return {(xp.alpha - xm.alpha) / (2 * h), (yp.alpha - ym.alpha) / (2 * h),
          (xp.theta - xm.theta) / (2 * h), (yp.theta - ym.theta) / (2 * h)};
}

// Central finite differences of the k-fold recycle map.
inline reloop::Matrix2 fd_map_power_jacobian(const reloop::ExitState& x, int k,
                                             const reloop::ReactorParams& p,
                                             const reloop::IntegratorConfig& c,
                                             double h = 1e-7) {
  const auto image = [&](reloop::ExitState s) {
    for (int i = 0; i < k; ++i) s = reloop::recycle_map(s, p, c).exit;
    return s;
  };
  const auto xp = image({x.alpha1 + h, x.theta1});
  const auto xm = image({x.alpha1 - h, x.theta1});
  const auto yp = image({x.alpha1, x.theta1 + h});
  const auto ym = image({x.alpha1, x.theta1 - h});
  return {(xp.alpha1 - xm.alpha1) / (2 * h), (yp.alpha1 - ym.alpha1) / (2 * h),
          (xp.theta1 - xm.theta1) / (2 * h), (yp.theta1 - ym.theta1) / (2 * h)};
}

// Scratch directory unique to one test, removed by the destructor.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("reloop_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace test_support
