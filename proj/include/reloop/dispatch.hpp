#pragma once

#include <array>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "reloop/analysis.hpp"
#include "reloop/config.hpp"
#include "reloop/csv.hpp"
#include "reloop/errors.hpp"
#include "reloop/manifest.hpp"
#include "reloop/pgm.hpp"

namespace reloop {

inline constexpr std::array<std::string_view, 10> kSubcommands = {
    "attractor", "eigenvalues",    "bifurcation", "profile1d", "tree",
    "profile2d", "peaks",          "poincare-peaks", "fb-window", "classify"};

namespace detail {

inline bool write_file(const std::string& path, std::string_view bytes,
                       std::ostream& diag) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  f.flush();
  if (!f) {
    diag << "error: cannot write " << path << "\n";
    return false;
  }
  return true;
}

// Periods of a classification rendered as an image grid: brightness scales
// with the period, failed cells take the sentinel (white).
inline NGrid classify_image(const ClassifyGrid& c, const StoppingCriterion& crit,
                            const ReactorParams& params,
                            const IntegratorConfig& integ) {
  NGrid g;
  g.x_axis = c.f_axis;
  g.y_axis = c.theta_H_axis;
  g.meta = {params, integ, crit};
  g.counts.resize(c.cells.size());
  for (int iy = 0; iy < c.theta_H_axis.count; ++iy)
    for (int ix = 0; ix < c.f_axis.count; ++ix) {
      const AttractorSummary& cell = c.at(ix, iy);
      g.at(ix, iy) = cell.ok() ? cell.period : crit.n_max;
    }
  return g;
}

} // namespace detail

/// Run one subcommand against a resolved config: compute, then write
/// `<out>.csv`, `<out>.pgm` for grid commands, and `<out>.manifest.txt`.
/// Exit status 0 on success, 1 for configuration problems (including an
/// unknown subcommand), 2 for numerical or I/O failures.
inline int dispatch(const std::string& subcommand, RunConfig cfg,
                    std::ostream& diag = std::cerr) {
  bool known = false;
  for (const std::string_view s : kSubcommands) known = known || s == subcommand;
  if (!known) {
    diag << "error: unknown subcommand '" << subcommand << "'\n";
    return 1;
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    diag << "error: " << e.what() << "\n";
    return 1;
  }

  cfg.command = subcommand;
  if (cfg.out.empty()) cfg.out = subcommand;

  const auto t0 = std::chrono::steady_clock::now();
  std::string csv;
  std::optional<PgmImage> image;

  try {
    if (subcommand == "attractor") {
      Attractor a = detect_attractor(cfg.seed, cfg.params, cfg.integrator,
                                     cfg.criterion, cfg.detection);
      csv = csv_attractor(detail::summarize(std::move(a)), cfg.params.f);
    } else if (subcommand == "eigenvalues") {
      csv = csv_eigenvalues(eigenvalue_curve(cfg.params, cfg.f_axis,
                                             cfg.k_expected, cfg.seed,
                                             cfg.integrator, cfg.criterion,
                                             cfg.detection));
    } else if (subcommand == "bifurcation") {
      csv = csv_bifurcation(bifurcation_diagram(cfg.params, cfg.f_axis, cfg.seed,
                                                cfg.integrator, cfg.criterion,
                                                cfg.detection));
    } else if (subcommand == "profile1d") {
      csv = csv_profile_1d(profile_1d(cfg.params, cfg.alpha0_axis, cfg.theta0,
                                      cfg.seed, cfg.integrator, cfg.criterion,
                                      cfg.detection, cfg.workers));
    } else if (subcommand == "tree") {
      const NGrid g = tree_profile(cfg.params, cfg.f_axis, cfg.alpha0_axis,
                                   cfg.theta0, cfg.seed, cfg.integrator,
                                   cfg.criterion, cfg.detection, cfg.workers);
      csv = csv_tree(g);
      image = emit_pgm(g);
    } else if (subcommand == "profile2d") {
      const NGrid g = profile_2d(cfg.params, cfg.alpha0_axis, cfg.theta0_axis,
                                 cfg.seed, cfg.integrator, cfg.criterion,
                                 cfg.detection, cfg.workers);
      csv = csv_profile_2d(g);
      image = emit_pgm(g);
    } else if (subcommand == "peaks") {
      const NGrid g = profile_1d(cfg.params, cfg.alpha0_axis, cfg.theta0,
                                 cfg.seed, cfg.integrator, cfg.criterion,
                                 cfg.detection, cfg.workers);
      csv = csv_peaks(g, detect_peaks(g, cfg.prominence));
    } else if (subcommand == "poincare-peaks") {
      const NGrid g = profile_1d(cfg.params, cfg.alpha0_axis, cfg.theta0,
                                 cfg.seed, cfg.integrator, cfg.criterion,
                                 cfg.detection, cfg.workers);
      csv = csv_poincare(peak_poincare_section(g, cfg.prominence));
    } else if (subcommand == "fb-window") {
      const Window w =
          fb_window(cfg.params, cfg.f_lo, cfg.f_hi, cfg.k_from, cfg.fb_tol,
                    cfg.seed, cfg.integrator, cfg.criterion, cfg.detection);
      csv = csv_window(w, cfg.k_from);
    } else if (subcommand == "classify") {
      const ClassifyGrid c =
          classify_grid(cfg.params, cfg.theta_H_axis, cfg.f_axis, cfg.seed,
                        cfg.integrator, cfg.criterion, cfg.detection, cfg.workers);
      csv = csv_classify(c);
      image = emit_pgm(
          detail::classify_image(c, cfg.criterion, cfg.params, cfg.integrator));
    }
  } catch (const ConfigError& e) {
    diag << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    diag << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << "\n";
    return 2;
  }

  if (image && image->degenerate)
    diag << "warning: degenerate count range, PGM painted uniform mid-gray\n";

  std::vector<OutputRecord> outputs;
  const std::string csv_path = cfg.out + ".csv";
  if (!detail::write_file(csv_path, csv, diag)) return 2;
  outputs.push_back({csv_path, fnv1a64(csv)});
  if (image) {
    const std::string pgm_path = cfg.out + ".pgm";
    if (!detail::write_file(pgm_path, image->bytes, diag)) return 2;
    outputs.push_back({pgm_path, fnv1a64(image->bytes)});
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string manifest = render_manifest(cfg, seconds, outputs);
  if (!detail::write_file(cfg.out + ".manifest.txt", manifest, diag)) return 2;

  for (const OutputRecord& rec : outputs)
    diag << "wrote " << rec.filename << " (fnv1a64 " << hex64(rec.checksum)
         << ")\n";
  diag << "wrote " << cfg.out << ".manifest.txt\n";
  return 0;
}

} // namespace reloop
