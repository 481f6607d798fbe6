#pragma once

#include <charconv>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reloop/attractor.hpp"
#include "reloop/errors.hpp"
#include "reloop/format.hpp"
#include "reloop/grid.hpp"
#include "reloop/integrate.hpp"
#include "reloop/map.hpp"
#include "reloop/model.hpp"

namespace reloop {

/// Every knob of the artifact in one flat bag. Defaults are the base case
/// used throughout: Da=0.15, n=1.5, gamma=15, beta=2, delta=3,
/// theta_H=-0.001, f=0.427, theta0=0.2, epsilon=0.001 (percent),
/// steps=1000, n_max=100000.
struct RunConfig {
  ReactorParams params;
  IntegratorConfig integrator;
  StoppingCriterion criterion;
  DetectionSettings detection;

  /// Seed exit state for attractor detection.
  ExitState seed{0.5, 0.2};
  /// Start temperature for iteration profiles.
  double theta0 = 0.2;

  Grid1D alpha0_axis{0.0, 1.0, 2000};
  Grid1D theta0_axis{0.0, 0.5, 200};
  Grid1D f_axis{0.30, 0.55, 251};
  Grid1D theta_H_axis{-0.012, -0.001, 12};

  /// eigenvalues subcommand: period the curve tracks.
  int k_expected = 1;
  /// fb-window subcommand: bracket, outside period, edge tolerance.
  double f_lo = 0.30;
  double f_hi = 0.55;
  int k_from = 1;
  double fb_tol = 1e-4;
  /// peaks / poincare-peaks subcommands.
  int prominence = 1;

  /// Output path prefix; empty means "use the subcommand name".
  std::string out;
  int workers = 1;
  /// Subcommand recorded in manifests so a run can be reproduced from one.
  std::string command;

  void validate() const {
    params.validate();
    integrator.validate();
    criterion.validate();
    detection.validate();
    if (!std::isfinite(seed.alpha1) || !std::isfinite(seed.theta1))
      throw InvariantViolation("seed state must be finite");
    if (!std::isfinite(theta0)) throw InvariantViolation("theta0 must be finite");
    alpha0_axis.validate("alpha0 axis");
    theta0_axis.validate("theta0 axis");
    f_axis.validate("f axis");
    theta_H_axis.validate("theta_H axis");
    if (!(f_axis.start >= 0.0 && f_axis.stop < 1.0))
      throw InvariantViolation("f axis must lie in [0, 1)");
    if (k_expected < 1)
      throw InvariantViolation("k_expected must satisfy k_expected >= 1");
    if (!(f_lo < f_hi)) throw InvariantViolation("f_lo must be < f_hi");
    if (!(f_lo >= 0.0 && f_hi < 1.0))
      throw InvariantViolation("[f_lo, f_hi] must lie in [0, 1)");
    if (k_from < 1) throw InvariantViolation("k_from must satisfy k_from >= 1");
    if (!(fb_tol > 0.0)) throw InvariantViolation("fb_tol must satisfy fb_tol > 0");
    if (prominence < 1)
      throw InvariantViolation("prominence must satisfy prominence >= 1");
    if (workers < 1) throw InvariantViolation("workers must satisfy workers >= 1");
  }
};

namespace detail {

inline double parse_double_value(std::string_view v) {
  double out{};
  const char* last = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), last, out);
  if (ec != std::errc{} || ptr != last)
    throw ParseError("'" + std::string(v) + "' is not a number");
  return out;
}

inline int parse_int_value(std::string_view v) {
  int out{};
  const char* last = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), last, out);
  if (ec != std::errc{} || ptr != last)
    throw ParseError("'" + std::string(v) + "' is not an integer");
  return out;
}

struct ConfigKey {
  std::string name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

/// The single source of truth tying key names to RunConfig fields; used by
/// the parser, the CLI overrides, and manifest serialization alike.
inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    const auto dbl = [&k](const char* name, auto acc) {
      k.push_back({name,
                   [acc](RunConfig& c, std::string_view v) {
                     acc(c) = parse_double_value(v);
                   },
                   [acc](const RunConfig& c) { return format_double(acc(c)); }});
    };
    const auto integer = [&k](const char* name, auto acc) {
      k.push_back({name,
                   [acc](RunConfig& c, std::string_view v) {
                     acc(c) = parse_int_value(v);
                   },
                   [acc](const RunConfig& c) { return std::to_string(acc(c)); }});
    };
    const auto text = [&k](const char* name, auto acc) {
      k.push_back({name,
                   [acc](RunConfig& c, std::string_view v) {
                     acc(c) = std::string(v);
                   },
                   [acc](const RunConfig& c) { return std::string(acc(c)); }});
    };

    dbl("Da", [](auto& c) -> auto& { return c.params.Da; });
    dbl("n", [](auto& c) -> auto& { return c.params.n; });
    dbl("gamma", [](auto& c) -> auto& { return c.params.gamma; });
    dbl("beta", [](auto& c) -> auto& { return c.params.beta; });
    dbl("delta", [](auto& c) -> auto& { return c.params.delta; });
    dbl("theta_H", [](auto& c) -> auto& { return c.params.theta_H; });
    dbl("f", [](auto& c) -> auto& { return c.params.f; });

    integer("steps", [](auto& c) -> auto& { return c.integrator.steps; });

    dbl("epsilon", [](auto& c) -> auto& { return c.criterion.epsilon_percent; });
    integer("n_max", [](auto& c) -> auto& { return c.criterion.n_max; });
    dbl("denom_floor", [](auto& c) -> auto& { return c.criterion.denom_floor; });

    integer("transient", [](auto& c) -> auto& { return c.detection.transient; });
    integer("k_max", [](auto& c) -> auto& { return c.detection.k_max; });
    dbl("detect_epsilon",
        [](auto& c) -> auto& { return c.detection.recurrence_epsilon_percent; });
    dbl("minimality_epsilon",
        [](auto& c) -> auto& { return c.detection.minimality_epsilon_percent; });
    dbl("newton_tol", [](auto& c) -> auto& { return c.detection.newton_tol; });
    integer("newton_max_steps",
            [](auto& c) -> auto& { return c.detection.newton_max_steps; });
    dbl("stability_margin",
        [](auto& c) -> auto& { return c.detection.stability_margin; });

    dbl("seed_alpha0", [](auto& c) -> auto& { return c.seed.alpha1; });
    dbl("seed_theta0", [](auto& c) -> auto& { return c.seed.theta1; });
    dbl("theta0", [](auto& c) -> auto& { return c.theta0; });

    dbl("alpha0_min", [](auto& c) -> auto& { return c.alpha0_axis.start; });
    dbl("alpha0_max", [](auto& c) -> auto& { return c.alpha0_axis.stop; });
    integer("alpha0_count", [](auto& c) -> auto& { return c.alpha0_axis.count; });
    dbl("theta0_min", [](auto& c) -> auto& { return c.theta0_axis.start; });
    dbl("theta0_max", [](auto& c) -> auto& { return c.theta0_axis.stop; });
    integer("theta0_count", [](auto& c) -> auto& { return c.theta0_axis.count; });
    dbl("f_min", [](auto& c) -> auto& { return c.f_axis.start; });
    dbl("f_max", [](auto& c) -> auto& { return c.f_axis.stop; });
    integer("f_count", [](auto& c) -> auto& { return c.f_axis.count; });
    dbl("theta_H_min", [](auto& c) -> auto& { return c.theta_H_axis.start; });
    dbl("theta_H_max", [](auto& c) -> auto& { return c.theta_H_axis.stop; });
    integer("theta_H_count",
            [](auto& c) -> auto& { return c.theta_H_axis.count; });

    integer("k_expected", [](auto& c) -> auto& { return c.k_expected; });
    dbl("f_lo", [](auto& c) -> auto& { return c.f_lo; });
    dbl("f_hi", [](auto& c) -> auto& { return c.f_hi; });
    integer("k_from", [](auto& c) -> auto& { return c.k_from; });
    dbl("fb_tol", [](auto& c) -> auto& { return c.fb_tol; });
    integer("prominence", [](auto& c) -> auto& { return c.prominence; });

    text("out", [](auto& c) -> auto& { return c.out; });
    integer("workers", [](auto& c) -> auto& { return c.workers; });
    text("command", [](auto& c) -> auto& { return c.command; });
    return k;
  }();
  return keys;
}

inline const ConfigKey* find_key(std::string_view name) {
  for (const ConfigKey& k : config_keys())
    if (k.name == name) return &k;
  return nullptr;
}

inline std::string_view trim(std::string_view s) {
  const auto issp = [](char ch) {
    return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n';
  };
  while (!s.empty() && issp(s.front())) s.remove_prefix(1);
  while (!s.empty() && issp(s.back())) s.remove_suffix(1);
  return s;
}

} // namespace detail

/// Parse a line-oriented `key = value` config file (# starts a comment)
/// and apply `--key value` command-line overrides on top. Overrides beat
/// file values beat defaults; a key given twice in the file keeps the
/// later value. The resolved config is validated before being returned.
inline RunConfig parse_config(
    std::string_view text,
    std::span<const std::pair<std::string, std::string>> overrides = {}) {
  RunConfig cfg;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 'key = value'");
    const std::string_view key = detail::trim(line.substr(0, eq));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty key");
    if (value.empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty value for '" +
                       std::string(key) + "'");
    const detail::ConfigKey* desc = detail::find_key(key);
    if (!desc)
      throw UnknownKey("line " + std::to_string(line_no) + ": unknown key '" +
                       std::string(key) + "'");
    try {
      desc->set(cfg, value);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  for (const auto& [key, value] : overrides) {
    const detail::ConfigKey* desc = detail::find_key(key);
    if (!desc) throw UnknownKey("unknown key '" + key + "'");
    try {
      desc->set(cfg, detail::trim(value));
    } catch (const ParseError& e) {
      throw ParseError("--" + key + ": " + e.what());
    }
  }

  cfg.validate();
  return cfg;
}

/// Render a config as a parseable `key = value` document covering every
/// key, with doubles at 17 significant digits for exact round-trip.
inline std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const detail::ConfigKey& k : detail::config_keys()) {
    const std::string v = k.get(cfg);
    if (v.empty()) continue;
    out += k.name;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

} // namespace reloop
