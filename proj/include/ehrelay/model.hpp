#pragma once

#include <cstddef>
#include <random>
#include <vector>

namespace ehrelay {

/// Random stream used for channel sampling.
using Rng = std::mt19937_64;

/// M source-destination pairs sharing one power-splitting DF relay.
///
/// Noise variance is one at every receiver, so source_power is the transmit
/// SNR in linear scale. The variance vectors hold the mean of |h_i|^2 and
/// |g_i|^2; an empty vector means unit mean on every link.
struct SystemConfig {
  int pairs = 1;
  double rate = 1.0;          // bits per channel use
  double source_power = 1.0;  // linear
  double eta = 1.0;           // harvesting efficiency
  std::vector<double> h_variance;
  std::vector<double> g_variance;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  double h_mean(std::size_t i) const { return h_variance.empty() ? 1.0 : h_variance[i]; }
  double g_mean(std::size_t i) const { return g_variance.empty() ? 1.0 : g_variance[i]; }
  bool unit_variances() const;

  bool operator==(const SystemConfig&) const = default;
};

/// 10^(dB/10).
double snr_db_to_power(double snr_db);

/// Mean channel gain d^{-exponent} for a link of length d.
double path_loss_gain(double distance, double exponent);

/// Fills both variance vectors from link distances.
void apply_path_loss(SystemConfig& config, double source_relay_distance,
                     double relay_destination_distance, double exponent);

struct DerivedParams {
  double a = 0.0;        // 2^{2R} - 1, the SNR threshold
  double epsilon = 0.0;  // a / P_s, the decoding threshold on |h|^2
};

DerivedParams derive_params(const SystemConfig& config);

/// One fading realisation: squared magnitudes of the source-relay (h2) and
/// relay-destination (g2) channels.
struct ChannelDraw {
  std::vector<double> h2;
  std::vector<double> g2;
};

ChannelDraw sample_channels(Rng& stream, const SystemConfig& config);
void sample_channels(Rng& stream, const SystemConfig& config, ChannelDraw& out);

/// Fraction of the received signal diverted to the harvester so that the
/// remainder decodes at exactly rate R. Zero when P h2 <= a.
double power_split_theta(double power, double h2, double a);

struct HarvestState {
  std::vector<int> decoding_set;  // ascending user indices with P_s h2 > a
  double total_power = 0.0;       // P_r
  int decoded() const { return static_cast<int>(decoding_set.size()); }
};

HarvestState harvest(const ChannelDraw& draw, const SystemConfig& config,
                     const DerivedParams& params);
void harvest(const ChannelDraw& draw, const SystemConfig& config, const DerivedParams& params,
             HarvestState& out);

}  // namespace ehrelay
