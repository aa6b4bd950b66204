#include "ehrelay/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ehrelay {

void SystemConfig::validate() const {
  if (pairs < 1) throw std::invalid_argument("pairs must be >= 1");
  if (!(rate > 0)) throw std::invalid_argument("rate must be > 0");
  if (!(source_power > 0) || !std::isfinite(source_power))
    throw std::invalid_argument("source_power must be finite and > 0");
  if (!(eta > 0 && eta <= 1)) throw std::invalid_argument("eta must lie in (0, 1]");
  auto check_variances = [this](const std::vector<double>& v, const char* name) {
    if (v.empty()) return;
    if (v.size() != static_cast<std::size_t>(pairs))
      throw std::invalid_argument(std::string(name) + " must have one entry per pair");
    if (!std::all_of(v.begin(), v.end(), [](double x) { return x > 0 && std::isfinite(x); }))
      throw std::invalid_argument(std::string(name) + " entries must be finite and > 0");
  };
  check_variances(h_variance, "h_variance");
  check_variances(g_variance, "g_variance");
}

bool SystemConfig::unit_variances() const {
  auto unit = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 1.0; });
  };
  return unit(h_variance) && unit(g_variance);
}

double snr_db_to_power(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

double path_loss_gain(double distance, double exponent) {
  if (!(distance > 0)) throw std::invalid_argument("distance must be > 0");
  if (!(exponent >= 0)) throw std::invalid_argument("path-loss exponent must be >= 0");
  return std::pow(distance, -exponent);
}

void apply_path_loss(SystemConfig& config, double source_relay_distance,
                     double relay_destination_distance, double exponent) {
  const auto m = static_cast<std::size_t>(config.pairs);
  config.h_variance.assign(m, path_loss_gain(source_relay_distance, exponent));
  config.g_variance.assign(m, path_loss_gain(relay_destination_distance, exponent));
}

DerivedParams derive_params(const SystemConfig& config) {
  config.validate();
  DerivedParams p;
  p.a = std::exp2(2.0 * config.rate) - 1.0;
  p.epsilon = p.a / config.source_power;
  return p;
}

void sample_channels(Rng& stream, const SystemConfig& config, ChannelDraw& out) {
  const auto m = static_cast<std::size_t>(config.pairs);
  out.h2.resize(m);
  out.g2.resize(m);
  std::exponential_distribution<double> unit(1.0);
  for (std::size_t i = 0; i < m; ++i) {
    out.h2[i] = config.h_mean(i) * unit(stream);
    out.g2[i] = config.g_mean(i) * unit(stream);
  }
}

ChannelDraw sample_channels(Rng& stream, const SystemConfig& config) {
  ChannelDraw draw;
  sample_channels(stream, config, draw);
  return draw;
}

double power_split_theta(double power, double h2, double a) {
  const double received = power * h2;
  if (!(received > a)) return 0.0;
  return 1.0 - a / received;
}

void harvest(const ChannelDraw& draw, const SystemConfig& config, const DerivedParams& params,
             HarvestState& out) {
  out.decoding_set.clear();
  out.total_power = 0.0;
  for (std::size_t i = 0; i < draw.h2.size(); ++i) {
    const double received = config.source_power * draw.h2[i];
    if (received > params.a) {
      out.decoding_set.push_back(static_cast<int>(i));
      out.total_power += config.eta * (received - params.a);
    }
  }
}

HarvestState harvest(const ChannelDraw& draw, const SystemConfig& config,
                     const DerivedParams& params) {
  HarvestState state;
  harvest(draw, config, params, state);
  return state;
}

}  // namespace ehrelay
