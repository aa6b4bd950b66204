#pragma once

// Experiment configuration: a flat `key = value` file, one entry per line,
// `#` starts a comment. List values are comma separated.
//
//   key                     default        meaning
//   pairs                   (required)     M, or a list of M values
//   rate                    (required)     R in bits per channel use
//   snr                     (required)     start:stop:step in dB
//   snr_start/stop/step                    alternative to `snr`
//   eta                     1              harvesting efficiency, (0, 1]
//   strategies              all five       individual, equal, waterfill, maxmin, auction
//   metrics                 average,best,worst   plus `success`
//   mode                    mc             list of mc, exact, asymptotic, bounds; or all
//   trials                  1000000
//   seed                    1
//   threads                 0              0 uses every hardware thread
//   distance_sr             unset          source-relay distance in metres
//   distance_rd             unset          relay-destination distance in metres
//   pathloss_exponent       3
//   reserve_factor          0.01           xi / P_r
//   price_margin            0.05           delta
//   price_policy            contraction    or clearing
//   clearing_fill           0.99
//   auction_tolerance       1e-12
//   auction_max_iterations  500
//   bound_c                 0              c of the closed-form worst-user bound

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ehrelay/analytic.hpp"
#include "ehrelay/auction.hpp"
#include "ehrelay/strategies.hpp"

namespace ehrelay {

enum class Method { mc, exact, asymptotic, bounds };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct SweepSpec {
  double snr_start = 0.0;
  double snr_stop = 0.0;
  double snr_step = 0.0;
  std::vector<int> pairs;
  std::vector<Strategy> strategies;
  std::vector<analytic::Metric> metrics;
  std::vector<Method> methods;
  long long trials = 1'000'000;
  std::uint64_t seed = 1;
  int threads = 0;

  /// start, start + step, ... up to stop (inclusive up to rounding).
  std::vector<double> snr_grid() const;

  bool operator==(const SweepSpec&) const = default;
};

struct Geometry {
  double source_relay = 0.0;
  double relay_destination = 0.0;
  double exponent = 3.0;

  bool operator==(const Geometry&) const = default;
};

struct RunConfig {
  double rate = 0.0;
  double eta = 1.0;
  std::optional<Geometry> geometry;
  auction::AuctionPolicy auction;
  double bound_c = 0.0;
  SweepSpec sweep;

  /// System at one grid point; variances come from the geometry if set.
  SystemConfig system(int pairs, double snr_db) const;

  bool operator==(const RunConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

/// Fields a config must set before validate_config accepts it.
struct RequiredKeys {
  bool pairs = false;
  bool rate = false;
  bool snr_start = false;
  bool snr_stop = false;
  bool snr_step = false;
};

/// Defaults for every optional key; required keys left unset.
RunConfig default_run_config();

/// Sets one key. Throws ConfigError for unknown keys and malformed values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value,
                   RequiredKeys* seen = nullptr);

/// Cross-field checks. Throws ConfigError naming the offending key.
void validate_config(const RunConfig& config, const RequiredKeys& seen = {true, true, true, true,
                                                                         true});

/// Parses and validates; errors carry the 1-based line number.
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config_file(const std::string& path);

/// Effective configuration in the file format; parses back to an equal value.
std::string dump_config(const RunConfig& config);

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
RunConfig preset(std::string_view name);

}  // namespace ehrelay
