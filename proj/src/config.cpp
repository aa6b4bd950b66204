#include "ehrelay/config.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ehrelay/specfun.hpp"

namespace ehrelay {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = s.find(sep);
    parts.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw ConfigError(fmt::format("{}: '{}' is not a valid number", key, text));
  return value;
}

double parse_real(std::string_view key, std::string_view text) {
  const double v = parse_number<double>(key, text);
  if (!std::isfinite(v)) throw ConfigError(fmt::format("{}: value must be finite", key));
  return v;
}

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view key, std::string_view text, Parse parse) {
  std::vector<T> out;
  for (std::string_view item : split(text, ',')) {
    if (item.empty()) throw ConfigError(fmt::format("{}: empty list entry", key));
    try {
      out.push_back(parse(item));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("{}: {}", key, e.what()));
    }
  }
  return out;
}

template <typename T>
std::string join_names(const std::vector<T>& items) {
  std::vector<std::string_view> names;
  for (const T& x : items) names.push_back(to_string(x));
  return fmt::format("{}", fmt::join(names, ","));
}

Geometry& geometry_of(RunConfig& c) {
  if (!c.geometry) c.geometry.emplace();
  return *c.geometry;
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, message) : message),
      line_(line) {}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::mc: return "mc";
    case Method::exact: return "exact";
    case Method::asymptotic: return "asymptotic";
    case Method::bounds: return "bounds";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::mc, Method::exact, Method::asymptotic, Method::bounds})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "' (expected mc|exact|asymptotic|bounds|all)");
}

std::vector<double> SweepSpec::snr_grid() const {
  std::vector<double> grid;
  if (!(snr_step > 0) || snr_stop < snr_start) return grid;
  const auto count = static_cast<long>(std::floor((snr_stop - snr_start) / snr_step + 1e-9)) + 1;
  for (long k = 0; k < count; ++k) grid.push_back(snr_start + k * snr_step);
  return grid;
}

SystemConfig RunConfig::system(int pairs, double snr_db) const {
  SystemConfig s;
  s.pairs = pairs;
  s.rate = rate;
  s.eta = eta;
  s.source_power = snr_db_to_power(snr_db);
  if (geometry)
    apply_path_loss(s, geometry->source_relay, geometry->relay_destination, geometry->exponent);
  return s;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value,
                   RequiredKeys* seen) {
  RequiredKeys scratch;
  RequiredKeys& mark = seen ? *seen : scratch;
  value = trim(value);
  SweepSpec& s = c.sweep;

  if (key == "pairs") {
    s.pairs = parse_list<int>(key, value, [&](std::string_view v) {
      return parse_number<int>(key, v);
    });
    mark.pairs = true;
  } else if (key == "rate") {
    c.rate = parse_real(key, value);
    mark.rate = true;
  } else if (key == "eta") {
    c.eta = parse_real(key, value);
  } else if (key == "snr") {
    const auto parts = split(value, ':');
    if (parts.size() != 3) throw ConfigError("snr: expected start:stop:step");
    s.snr_start = parse_real(key, parts[0]);
    s.snr_stop = parse_real(key, parts[1]);
    s.snr_step = parse_real(key, parts[2]);
    mark.snr_start = mark.snr_stop = mark.snr_step = true;
  } else if (key == "snr_start") {
    s.snr_start = parse_real(key, value);
    mark.snr_start = true;
  } else if (key == "snr_stop") {
    s.snr_stop = parse_real(key, value);
    mark.snr_stop = true;
  } else if (key == "snr_step") {
    s.snr_step = parse_real(key, value);
    mark.snr_step = true;
  } else if (key == "strategies" || key == "strategy") {
    s.strategies = parse_list<Strategy>(key, value, parse_strategy);
  } else if (key == "metrics" || key == "metric") {
    s.metrics = parse_list<analytic::Metric>(key, value, analytic::parse_metric);
  } else if (key == "mode") {
    if (value == "all")
      s.methods = {Method::mc, Method::exact, Method::asymptotic, Method::bounds};
    else
      s.methods = parse_list<Method>(key, value, parse_method);
  } else if (key == "trials") {
    s.trials = parse_number<long long>(key, value);
  } else if (key == "seed") {
    s.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "threads") {
    s.threads = parse_number<int>(key, value);
  } else if (key == "distance_sr") {
    geometry_of(c).source_relay = parse_real(key, value);
  } else if (key == "distance_rd") {
    geometry_of(c).relay_destination = parse_real(key, value);
  } else if (key == "pathloss_exponent") {
    geometry_of(c).exponent = parse_real(key, value);
  } else if (key == "reserve_factor") {
    c.auction.reserve_factor = parse_real(key, value);
  } else if (key == "price_margin") {
    c.auction.price_margin = parse_real(key, value);
  } else if (key == "price_policy") {
    try {
      c.auction.price_policy = auction::parse_price_policy(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("price_policy: {}", e.what()));
    }
  } else if (key == "clearing_fill") {
    c.auction.clearing_fill = parse_real(key, value);
  } else if (key == "auction_tolerance") {
    c.auction.tolerance = parse_real(key, value);
  } else if (key == "auction_max_iterations") {
    c.auction.max_iterations = parse_number<int>(key, value);
  } else if (key == "bound_c") {
    c.bound_c = parse_real(key, value);
  } else {
    throw ConfigError(fmt::format("unknown key '{}'", key));
  }
}

void validate_config(const RunConfig& c, const RequiredKeys& seen) {
  const SweepSpec& s = c.sweep;
  if (!seen.pairs) throw ConfigError("missing required key 'pairs'");
  if (!seen.rate) throw ConfigError("missing required key 'rate'");
  if (!seen.snr_start) throw ConfigError("missing required key 'snr' (or 'snr_start')");
  if (!seen.snr_stop) throw ConfigError("missing required key 'snr' (or 'snr_stop')");
  if (!seen.snr_step) throw ConfigError("missing required key 'snr' (or 'snr_step')");

  if (s.pairs.empty()) throw ConfigError("pairs: list is empty");
  for (int m : s.pairs)
    if (m < 1 || m > specfun::kMaxOrder)
      throw ConfigError(fmt::format("pairs: {} is outside [1, {}]", m, specfun::kMaxOrder));
  if (!(c.rate > 0)) throw ConfigError("rate: must be > 0");
  if (!(c.eta > 0 && c.eta <= 1)) throw ConfigError("eta: must lie in (0, 1]");
  if (!(s.snr_step > 0)) throw ConfigError("snr_step: must be > 0");
  if (s.snr_stop < s.snr_start) throw ConfigError("snr_stop: must be >= snr_start");
  if (s.strategies.empty()) throw ConfigError("strategies: list is empty");
  if (s.metrics.empty()) throw ConfigError("metrics: list is empty");
  if (s.methods.empty()) throw ConfigError("mode: list is empty");
  if (s.trials < 1) throw ConfigError("trials: must be >= 1");
  if (s.threads < 0) throw ConfigError("threads: must be >= 0");
  if (c.geometry) {
    if (!(c.geometry->source_relay > 0)) throw ConfigError("distance_sr: must be set and > 0");
    if (!(c.geometry->relay_destination > 0))
      throw ConfigError("distance_rd: must be set and > 0");
    if (!(c.geometry->exponent > 0)) throw ConfigError("pathloss_exponent: must be > 0");
  }
  const auto& a = c.auction;
  if (!(a.reserve_factor > 0)) throw ConfigError("reserve_factor: must be > 0");
  if (!(a.price_margin >= 0)) throw ConfigError("price_margin: must be >= 0");
  if (!(a.clearing_fill > 0 && a.clearing_fill <= 1))
    throw ConfigError("clearing_fill: must lie in (0, 1]");
  if (!(a.tolerance > 0)) throw ConfigError("auction_tolerance: must be > 0");
  if (a.max_iterations < 1) throw ConfigError("auction_max_iterations: must be >= 1");
  if (!(c.bound_c >= 0)) throw ConfigError("bound_c: must be >= 0");
}

RunConfig default_run_config() {
  RunConfig c;
  c.sweep.strategies.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
  c.sweep.metrics = {analytic::Metric::average, analytic::Metric::best, analytic::Metric::worst};
  c.sweep.methods = {Method::mc};
  return c;
}

RunConfig parse_config_text(std::string_view text) {
  RunConfig c = default_run_config();
  RequiredKeys seen;
  std::vector<std::string> keys_seen;

  int line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    if (std::find(keys_seen.begin(), keys_seen.end(), key) != keys_seen.end())
      throw ConfigError(fmt::format("duplicate key '{}'", key), line_no);
    keys_seen.push_back(key);
    try {
      apply_setting(c, key, line.substr(eq + 1), &seen);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), line_no);
    }
  }
  validate_config(c, seen);
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string dump_config(const RunConfig& c) {
  const SweepSpec& s = c.sweep;
  std::string out;
  auto line = [&out](std::string_view key, const auto& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  line("pairs", fmt::format("{}", fmt::join(s.pairs, ",")));
  line("rate", c.rate);
  line("eta", c.eta);
  line("snr", fmt::format("{}:{}:{}", s.snr_start, s.snr_stop, s.snr_step));
  line("strategies", join_names(s.strategies));
  line("metrics", join_names(s.metrics));
  line("mode", join_names(s.methods));
  line("trials", s.trials);
  line("seed", s.seed);
  line("threads", s.threads);
  if (c.geometry) {
    line("distance_sr", c.geometry->source_relay);
    line("distance_rd", c.geometry->relay_destination);
    line("pathloss_exponent", c.geometry->exponent);
  }
  line("reserve_factor", c.auction.reserve_factor);
  line("price_margin", c.auction.price_margin);
  line("price_policy", auction::to_string(c.auction.price_policy));
  line("clearing_fill", c.auction.clearing_fill);
  line("auction_tolerance", c.auction.tolerance);
  line("auction_max_iterations", c.auction.max_iterations);
  line("bound_c", c.bound_c);
  return out;
}

std::vector<std::string> preset_names() {
  return {"fig-individual-vs-equal", "fig-wf-bounds", "fig-strategy-outage",
          "fig-success-count"};
}

RunConfig preset(std::string_view name) {
  if (name == "fig-individual-vs-equal")
    return parse_config_text(
        "pairs = 2,3\nrate = 2\neta = 1\nsnr = 0:40:2.5\n"
        "strategies = individual,equal\nmetrics = average,best,worst\nmode = mc,exact\n");
  if (name == "fig-wf-bounds")
    return parse_config_text(
        "pairs = 3,5,10,20\nrate = 2\neta = 1\nsnr = 0:40:2.5\n"
        "strategies = waterfill\nmetrics = worst\nmode = mc,bounds\n");
  if (name == "fig-strategy-outage")
    return parse_config_text(
        "pairs = 20\nrate = 0.5\neta = 1\nsnr = 0:30:2.5\n"
        "distance_sr = 2\ndistance_rd = 2\npathloss_exponent = 3\n"
        "metrics = average,worst\nmode = mc\ntrials = 100000\n");
  if (name == "fig-success-count")
    return parse_config_text(
        "pairs = 20\nrate = 0.5\neta = 1\nsnr = 0:30:2.5\n"
        "distance_sr = 2\ndistance_rd = 2\npathloss_exponent = 3\n"
        "metrics = success\nmode = mc\ntrials = 100000\n");
  throw ConfigError(fmt::format("unknown preset '{}' (expected one of: {})", name,
                                fmt::join(preset_names(), ", ")));
}

}  // namespace ehrelay
