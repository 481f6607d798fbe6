#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "reloop/config.hpp"
#include "reloop/dispatch.hpp"
#include "reloop/version.hpp"

namespace {

void print_usage(std::ostream& os) {
  os << "usage: reloop <subcommand> [--config path] [--key value ...]\n"
        "\n"
        "subcommands:\n"
        "  attractor        detect the attractor at the configured parameters\n"
        "  eigenvalues      eigenvalue moduli along the f axis\n"
        "  bifurcation      attractor branches along the f axis\n"
        "  profile1d        iteration counts over start conversions\n"
        "  tree             iteration profiles over (f, alpha0)\n"
        "  profile2d        iteration counts over (alpha0, theta0)\n"
        "  peaks            local maxima of a 1D iteration profile\n"
        "  poincare-peaks   consecutive-peak pairs of a 1D profile\n"
        "  fb-window        bisect the edges of a periodicity window\n"
        "  classify         attractor period over (theta_H, f)\n"
        "\n"
        "Every config key can be set with --key value. --config loads a\n"
        "key = value file first; explicit flags win over the file. Useful\n"
        "keys: --out prefix (default: subcommand name), --workers n.\n"
        "Outputs: <prefix>.csv, <prefix>.pgm (grid subcommands), and\n"
        "<prefix>.manifest.txt; the manifest is itself a config file that\n"
        "reproduces the run.\n";
}

} // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    print_usage(std::cerr);
    return 1;
  }
  if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    print_usage(std::cout);
    return 0;
  }
  if (args[0] == "--version") {
    std::cout << reloop::kVersion << "\n";
    return 0;
  }

  const std::string subcommand = args[0];
  std::string config_text;
  std::vector<std::pair<std::string, std::string>> overrides;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) {
      std::cerr << "error: expected --key value, got '" << a << "'\n";
      return 1;
    }
    if (i + 1 >= args.size()) {
      std::cerr << "error: missing value for '" << a << "'\n";
      return 1;
    }
    std::string key = a.substr(2);
    const std::string& value = args[++i];
    if (key == "config") {
      std::ifstream f(value, std::ios::binary);
      if (!f) {
        std::cerr << "error: cannot read config file '" << value << "'\n";
        return 1;
      }
      std::ostringstream ss;
      ss << f.rdbuf();
      config_text = ss.str();
    } else {
      overrides.emplace_back(std::move(key), value);
    }
  }

  try {
    reloop::RunConfig cfg = reloop::parse_config(config_text, overrides);
    return reloop::dispatch(subcommand, std::move(cfg));
  } catch (const reloop::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
