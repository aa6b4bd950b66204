// Outage sweeps for the multi-pair energy-harvesting relay, written as CSV.
//
// Exit codes: 0 success, 2 invalid configuration or arguments, 3 a run that
// finished but did not converge (auction or bound quadrature).

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ehrelay/config.hpp"
#include "ehrelay/sweep.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNotConverged = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outage sweeps for the multi-pair energy-harvesting relay"};
  app.set_version_flag("--version", "ehrelay 1.0");

  std::string config_path;
  std::string preset_name;
  std::string out_path;
  bool dump = false;
  bool list_presets = false;
  bool verbose = false;
  std::vector<std::string> extra;

  auto* config_opt = app.add_option("--config", config_path, "Config file (key = value lines)");
  app.add_option("--preset", preset_name, "Start from a named preset")->excludes(config_opt);
  app.add_option("--out", out_path, "Write CSV here instead of standard output");
  app.add_flag("--dump-config", dump, "Print the effective config and exit");
  app.add_flag("--list-presets", list_presets, "Print preset names and exit");
  app.add_flag("-v,--verbose", verbose, "Report progress on standard error");

  // Flags that mirror config keys, applied in this order after the file.
  const std::vector<std::pair<std::string, std::string>> mirrored = {
      {"pairs", "M, or a comma-separated list"},
      {"rate", "Target rate R (bits per channel use)"},
      {"eta", "Harvesting efficiency in (0, 1]"},
      {"snr", "SNR grid start:stop:step in dB"},
      {"strategy", "Comma-separated strategies"},
      {"metric", "Comma-separated metrics"},
      {"mode", "mc, exact, asymptotic, bounds (comma-separated) or all"},
      {"trials", "Monte Carlo trials per grid point"},
      {"seed", "Random seed"},
      {"threads", "Worker threads (0: all hardware threads)"},
  };
  std::vector<std::optional<std::string>> mirrored_values(mirrored.size());
  for (std::size_t k = 0; k < mirrored.size(); ++k)
    app.add_option("--" + mirrored[k].first, mirrored_values[k], mirrored[k].second);
  app.add_option("--set", extra, "Any other config key as key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  if (list_presets) {
    for (const auto& name : ehrelay::preset_names()) std::cout << name << '\n';
    return 0;
  }

  ehrelay::RunConfig config;
  ehrelay::RequiredKeys seen;
  try {
    if (!config_path.empty()) {
      config = ehrelay::parse_config_file(config_path);
      seen = {true, true, true, true, true};
    } else if (!preset_name.empty()) {
      config = ehrelay::preset(preset_name);
      seen = {true, true, true, true, true};
    } else {
      config = ehrelay::default_run_config();
    }
    for (std::size_t k = 0; k < mirrored.size(); ++k)
      if (mirrored_values[k]) ehrelay::apply_setting(config, mirrored[k].first, *mirrored_values[k], &seen);
    for (const std::string& kv : extra) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw ehrelay::ConfigError(fmt::format("--set expects key=value, got '{}'", kv));
      ehrelay::apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1), &seen);
    }
    ehrelay::validate_config(config, seen);
  } catch (const ehrelay::ConfigError& e) {
    std::cerr << "ehrelay: " << e.what() << '\n';
    return kExitInvalid;
  }

  if (dump) {
    std::cout << ehrelay::dump_config(config);
    return 0;
  }

  ehrelay::SweepResult result;
  try {
    ehrelay::SweepProgress progress;
    if (verbose) progress = [](const std::string& msg) { std::cerr << msg << '\n'; };
    result = ehrelay::run_sweep(config, progress);
  } catch (const std::invalid_argument& e) {
    std::cerr << "ehrelay: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "ehrelay: " << e.what() << '\n';
    return kExitInvalid;
  }

  if (out_path.empty()) {
    ehrelay::write_csv(std::cout, result.rows);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "ehrelay: cannot write '" << out_path << "'\n";
      return kExitInvalid;
    }
    ehrelay::write_csv(out, result.rows);
  }

  if (result.outside_regime > 0)
    std::cerr << fmt::format("ehrelay: {} asymptotic rows are outside the high-SNR regime\n",
                             result.outside_regime);
  if (!result.converged()) {
    std::cerr << fmt::format(
        "ehrelay: not converged ({} auction trials, {} bound evaluations)\n",
        result.auction_failures, result.quadrature_failures);
    return kExitNotConverged;
  }
  return 0;
}
