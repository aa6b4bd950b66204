#pragma once

// Closed-form outage probabilities, bounds and high-SNR asymptotes for the
// energy-harvesting relay with i.i.d. unit-mean Rayleigh links.
//
// Metrics, evaluated per channel realisation over the M users:
//   average - outage probability of a given user
//   best    - probability that every user is in outage
//   worst   - probability that at least one user is in outage
//
// Functions that take a SystemConfig throw std::domain_error when the
// configuration has non-unit channel variances: none of the formulas cover
// path loss.

#include <optional>
#include <string_view>
#include <vector>

#include "ehrelay/model.hpp"
#include "ehrelay/strategies.hpp"

namespace ehrelay::analytic {

enum class Metric { average, best, worst, success };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view name);

enum class Method { exact, bound_lower, bound_upper, asymptotic };

struct OutageValue {
  double probability = 0.0;
  Metric metric = Metric::average;
  Strategy strategy = Strategy::individual;
  Method method = Method::exact;
};

struct OutageTriple {
  double average = 0.0;
  double best = 0.0;
  double worst = 0.0;

  double get(Metric m) const;
};

/// Pr(N = n) = C(M, n) e^{-n eps} (1 - e^{-eps})^{M - n}.
double prob_decoding_count(int pairs, double epsilon, int n);

/// Density of sum_{i<=n} |h_i|^2 given every |h_i|^2 > eps:
///   (y - n eps)^{n-1} / (n-1)! e^{-(y - n eps)} for y > n eps.
double conditioned_sum_pdf(int n, double epsilon, double y);

/// Non-cooperative individual transmission.
OutageTriple outage_individual(const SystemConfig& config);

/// Equal power allocation.
OutageTriple outage_equal(const SystemConfig& config);

/// Best-user outage of sequential water-filling (the strongest decoded
/// destination gets the whole pool).
double outage_wf_best(const SystemConfig& config);

struct WorstBounds {
  double lower = 0.0;
  double upper_integral = 0.0;
  double upper_closed = 0.0;
  double upper_integral_error = 0.0;
  double upper_closed_error = 0.0;
  bool converged = true;
};

/// Bounds on the worst-user outage of water-filling, from
///   z_(M) <= sum z_i <= z_(M) + (M-1) z_(M-1),   z_i = 1 / g_i.
/// upper_integral integrates the order-statistic bound numerically in two
/// dimensions; upper_closed reduces the outer integral to Bessel kernels and
/// starts the remaining y-integral at `c` (c = 0 reproduces upper_integral).
/// Requires M >= 2 and c in [0, M-1].
WorstBounds wf_worst_bounds(const SystemConfig& config, double c = 0.0);

struct AsymptoticValue {
  double value = 0.0;
  std::optional<double> upper;  // second edge of a sandwich, when there is one
  bool outside_regime = false;  // eps > kAsymptoticRegime
};

inline constexpr double kAsymptoticRegime = 0.05;

/// High-SNR forms. Available pairs:
///   individual: average, best, worst
///   equal:      average, best, worst
///   waterfill:  worst (lower edge in value, upper edge in upper; uses c)
/// Throws std::invalid_argument for any other pair.
AsymptoticValue asymptotic_outage(Strategy strategy, Metric metric, const SystemConfig& config,
                                  double c = 0.0);

/// True when asymptotic_outage covers the pair.
bool has_asymptote(Strategy strategy, Metric metric);

/// Leading-log constant of the equal-power best-user asymptote,
///   sum_n (n/eta)^n M! / ((n-1)! n! (M-n)!).
double best_user_log_constant(int pairs, double eta);

struct OrderStatDiagnostics {
  double mean_z_second_max = 0.0;
  double stderr_z_second_max = 0.0;
  /// Running mean of z_(M) at sample counts samples/100, samples/10, samples.
  std::vector<std::pair<long, double>> z_max_running_mean;
  /// Empirical Pr(z_1 <= t) at the probe points in `cdf_probes`.
  std::vector<double> cdf_probes;
  std::vector<double> cdf_values;
};

/// Monte Carlo look at z_i = 1/g_i, g_i ~ Exp(1): finite mean of the second
/// largest, diverging mean of the largest.
OrderStatDiagnostics order_stat_diagnostics(int pairs, long samples, unsigned long long seed);

}  // namespace ehrelay::analytic
