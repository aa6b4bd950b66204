#include "ehrelay/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "ehrelay/quadrature.hpp"
#include "ehrelay/specfun.hpp"

namespace ehrelay::analytic {
namespace {

using Real = long double;
using specfun::bessel_kernel;

constexpr int kExactFactorialLimit = 15;

Real log_factorial(int n) {
  static const auto table = [] {
    std::array<Real, kExactFactorialLimit + 1> t{};
    Real f = 1;
    for (int k = 0; k <= kExactFactorialLimit; ++k) {
      if (k > 0) f *= k;
      t[k] = std::log(f);
    }
    return t;
  }();
  if (n <= kExactFactorialLimit) return table[n];
  return std::lgamma(static_cast<Real>(n) + 1);
}

Real factorial(int n) { return std::exp(log_factorial(n)); }

Real log_binomial(int n, int k) { return log_factorial(n) - log_factorial(k) - log_factorial(n - k); }

// Exact for the sizes used here (n <= 64).
Real binomial(int n, int k) {
  Real c = 1;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return std::round(c);
}

// C(total, chosen) e^{-n eps} (1 - e^{-eps})^{total - chosen} with n = decoded.
Real decoding_weight(int total, int chosen, int decoded, int undecoded, Real eps) {
  Real log_w = log_binomial(total, chosen) - decoded * eps;
  if (undecoded > 0) log_w += undecoded * std::log(-std::expm1(-eps));
  return std::exp(log_w);
}

Real clamp_probability(Real p) { return std::clamp<Real>(p, 0, 1); }

void require_unit_variances(const SystemConfig& config) {
  config.validate();
  if (!config.unit_variances())
    throw std::domain_error("closed-form outage results assume unit channel variances");
}

// Q_n = E[(1 - exp(-step / u))^n], u ~ Gamma(n, 1), by binomial expansion:
//   (1/(n-1)!) sum_{i=0}^{n} C(n,i) (-1)^i G_n(i step)
Real all_fail_given_n(int n, Real step) {
  Real sum = 0, magnitude = 0;
  for (int i = 0; i <= n; ++i) {
    const Real term = binomial(n, i) * bessel_kernel(n, i * step);
    sum += (i % 2 == 0) ? term : -term;
    magnitude += term;
  }
  if (sum > 1e-8L * magnitude) return clamp_probability(sum / factorial(n - 1));

  // Small step: the alternating sum cancels, so integrate over t = ln u.
  const double s = static_cast<double>(step);
  const double log_norm = static_cast<double>(log_factorial(n - 1));
  auto f = [&](double t) {
    const double miss = -std::expm1(-s * std::exp(-t));
    return std::exp(n * std::log(miss) + n * t - std::exp(t) - log_norm);
  };
  const double lo = std::log(s) - 40.0;
  const double hi = std::log(n + 40.0 + 12.0 * std::sqrt(double(n)));
  const QuadratureTolerance tol{0.0, 1e-12, 18};
  Real q = 0;
  double a = lo;
  for (double b : {std::log(s), std::min(0.0, hi), hi}) {
    if (!(b > a)) continue;
    q += integrate(f, a, b, tol).value;
    a = b;
  }
  return clamp_probability(q);
}

// 1 - E[exp(-z / u)], u ~ Gamma(n, 1)
Real one_fails_given_n(int n, Real z) {
  return clamp_probability(1 - bessel_kernel(n, z) / factorial(n - 1));
}

Real pair_threshold(const SystemConfig& config) { return std::exp2(2.0L * config.rate) - 1; }

}  // namespace

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::average: return "average";
    case Metric::best: return "best";
    case Metric::worst: return "worst";
    case Metric::success: return "success";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : {Metric::average, Metric::best, Metric::worst, Metric::success})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown metric '" + std::string(name) +
                              "' (expected average|best|worst|success)");
}

double OutageTriple::get(Metric m) const {
  switch (m) {
    case Metric::average: return average;
    case Metric::best: return best;
    case Metric::worst: return worst;
    case Metric::success: break;
  }
  throw std::invalid_argument("success count has no outage value");
}

double prob_decoding_count(int pairs, double epsilon, int n) {
  if (n < 0 || n > pairs) throw std::invalid_argument("decoding count out of range");
  return static_cast<double>(decoding_weight(pairs, n, n, pairs - n, epsilon));
}

double conditioned_sum_pdf(int n, double epsilon, double y) {
  if (n < 1) throw std::invalid_argument("conditioned_sum_pdf needs n >= 1");
  const double u = y - n * epsilon;
  if (!(u > 0)) return 0.0;
  return std::exp((n - 1) * std::log(u) - u - std::lgamma(static_cast<double>(n)));
}

OutageTriple outage_individual(const SystemConfig& config) {
  require_unit_variances(config);
  const Real a = pair_threshold(config);
  const Real eps = a / config.source_power;
  // 1 - e^{-eps} x K_1(x) with x = 2 sqrt(eps / eta)
  const Real avg = clamp_probability(-std::expm1(-eps) +
                                     std::exp(-eps) * (1 - bessel_kernel(1, eps / config.eta)));
  const int m = config.pairs;
  OutageTriple out;
  out.average = static_cast<double>(avg);
  out.best = static_cast<double>(std::pow(avg, m));
  out.worst = static_cast<double>(clamp_probability(-std::expm1(m * std::log1p(-avg))));
  return out;
}

OutageTriple outage_equal(const SystemConfig& config) {
  require_unit_variances(config);
  const int m = config.pairs;
  const Real eta = config.eta;
  const Real eps = pair_threshold(config) / config.source_power;

  Real average = -std::expm1(-eps);
  Real best = std::pow(-std::expm1(-eps), m);
  for (int n = 1; n <= m; ++n) {
    // b_n / P = n eps / eta
    const Real step = n * eps / eta;
    average += one_fails_given_n(n, step) * decoding_weight(m - 1, n - 1, n, m - n, eps);
    best += all_fail_given_n(n, step) * decoding_weight(m, n, n, m - n, eps);
  }
  // M b_M / P = M^2 eps / eta
  const Real all_decoded = std::exp(-m * eps);
  const Real worst = one_fails_given_n(m, m * m * eps / eta) * all_decoded - std::expm1(-m * eps);

  OutageTriple out;
  out.average = static_cast<double>(clamp_probability(average));
  out.best = static_cast<double>(clamp_probability(best));
  out.worst = static_cast<double>(clamp_probability(worst));
  return out;
}

double outage_wf_best(const SystemConfig& config) {
  require_unit_variances(config);
  const int m = config.pairs;
  const Real eps = pair_threshold(config) / config.source_power;
  const Real step = eps / config.eta;  // b~ / P
  Real best = std::pow(-std::expm1(-eps), m);
  for (int n = 1; n <= m; ++n)
    best += all_fail_given_n(n, step) * decoding_weight(m, n, n, m - n, eps);
  return static_cast<double>(clamp_probability(best));
}

WorstBounds wf_worst_bounds(const SystemConfig& config, double c) {
  require_unit_variances(config);
  const int m = config.pairs;
  if (m < 2) throw std::invalid_argument("worst-user bounds need at least two pairs");
  if (!(c >= 0 && c <= m - 1)) throw std::invalid_argument("bound constant c must lie in [0, M-1]");

  const double eta = config.eta;
  const double eps = static_cast<double>(pair_threshold(config)) / config.source_power;
  const double m1 = m - 1;
  const double all_decoded = std::exp(-m * eps);
  const double some_lost = -std::expm1(-m * eps);
  auto a_of_y = [m1](double y) { return (y + 1.0) * (m1 * m1 + y) / y; };

  WorstBounds b;
  const Real fact_m1 = factorial(m - 1);

  b.lower = static_cast<double>(
      clamp_probability(some_lost + all_decoded * (1 - bessel_kernel(m, m * eps / eta) / fact_m1)));

  // Upper bound, two-dimensional form. The decoded sum enters through
  // w = s eta / eps with s ~ Gamma(M, 1).
  const QuadratureTolerance inner_tol{1e-13, 1e-11, 18};
  const QuadratureTolerance outer_tol{1e-11, 1e-9, 18};
  bool inner_ok = true;
  double inner_err_max = 0.0;
  auto exceed_given_w = [&](double w) {
    // Pr(z_(M) + (M-1) z_(M-1) > w)
    // The integrand rises from 0 to 1 over y ~ (M-1)^2 / w, so integrate in
    // v = ln y from the point where it drops below e^{-700}.
    const double v_lo = std::log(std::min(m1, m1 * m1 / (700.0 * w)));
    const QuadratureResult inner = integrate(
        [&](double v) {
          const double y = std::exp(v);
          return std::exp(v - a_of_y(y) / w);
        },
        v_lo, std::log(m1), inner_tol);
    inner_ok = inner_ok && inner.converged;
    inner_err_max = std::max(inner_err_max, m * inner.error / w);
    return -std::expm1(-double(m) * m / w) - m / w * inner.value;
  };
  const double log_norm = static_cast<double>(log_factorial(m - 1));
  const QuadratureResult outer = integrate(
      [&](double s) {
        if (!(s > 0)) return 0.0;
        const double density = std::exp((m - 1) * std::log(s) - s - log_norm);
        if (density == 0.0) return 0.0;
        return exceed_given_w(s * eta / eps) * density;
      },
      0.0, std::numeric_limits<double>::infinity(), outer_tol);
  b.upper_integral = std::clamp(some_lost + all_decoded * outer.value, 0.0, 1.0);
  b.upper_integral_error = all_decoded * (outer.error + inner_err_max);

  // Upper bound, Bessel-reduced form starting the y-integral at c.
  const QuadratureResult tail = integrate(
      [&](double y) -> double {
        if (!(y > 0)) return 0.0;
        const double z = a_of_y(y) * eps / eta;
        if (!(z < 1e5)) return 0.0;  // kernel below e^{-600}
        return static_cast<double>(bessel_kernel(m - 1, z));
      },
      c, m1, inner_tol);
  const Real bracket = 1 - bessel_kernel(m, Real(m) * m * eps / eta) / fact_m1 -
                       Real(m) * eps / eta / fact_m1 * tail.value;
  b.upper_closed = static_cast<double>(clamp_probability(some_lost + all_decoded * bracket));
  b.upper_closed_error = static_cast<double>(all_decoded * m * eps / eta / fact_m1 * tail.error);

  b.converged = outer.converged && inner_ok && tail.converged;
  return b;
}

double best_user_log_constant(int pairs, double eta) {
  Real c = 0;
  for (int n = 1; n <= pairs; ++n)
    c += std::exp(n * std::log(Real(n) / eta) + log_binomial(pairs, n) - log_factorial(n - 1));
  return static_cast<double>(c);
}

bool has_asymptote(Strategy strategy, Metric metric) {
  if (metric == Metric::success) return false;
  switch (strategy) {
    case Strategy::individual:
    case Strategy::equal: return true;
    case Strategy::waterfill: return metric == Metric::worst;
    default: return false;
  }
}

AsymptoticValue asymptotic_outage(Strategy strategy, Metric metric, const SystemConfig& config,
                                  double c) {
  if (!has_asymptote(strategy, metric))
    throw std::invalid_argument("no high-SNR form for " + std::string(to_string(strategy)) + "/" +
                                std::string(to_string(metric)));
  config.validate();
  const double eps = static_cast<double>(pair_threshold(config)) / config.source_power;
  const double eta = config.eta;
  const int m = config.pairs;
  AsymptoticValue out;
  out.outside_regime = eps > kAsymptoticRegime;

  // eps (1 - (2/eta) ln sqrt(eps/eta)): decays as log(SNR) / SNR
  const double individual = eps * (1.0 - 2.0 / eta * std::log(std::sqrt(eps / eta)));

  if (strategy == Strategy::individual || m == 1) {
    // a single pair has nobody to share with: equal power is individual
    switch (metric) {
      case Metric::average: out.value = individual; break;
      case Metric::best: out.value = std::pow(individual, m); break;
      default: out.value = m * individual; break;
    }
    if (strategy != Strategy::waterfill) return out;
  }

  const double m1 = m - 1;
  if (strategy == Strategy::equal) {
    switch (metric) {
      case Metric::average: out.value = (1.0 + m / (m1 * eta)) * eps; break;
      case Metric::best:
        out.value = std::pow(eps, m) * (1.0 - best_user_log_constant(m, eta) * std::log(eps));
        break;
      default: out.value = eps * m * (1.0 + m / (eta * m1)); break;
    }
    return out;
  }

  // water-filling worst user
  if (m == 1) {
    out.upper = out.value;
    return out;
  }
  out.value = eps * m * (1.0 + 1.0 / (eta * m1));
  out.upper = eps * (m - m * (m1 - c) / (m1 * eta) + double(m) * m / (m1 * eta));
  return out;
}

OrderStatDiagnostics order_stat_diagnostics(int pairs, long samples, unsigned long long seed) {
  if (pairs < 2) throw std::invalid_argument("order statistics need at least two pairs");
  if (samples < 100) throw std::invalid_argument("order statistics need at least 100 samples");
  OrderStatDiagnostics d;
  d.cdf_probes = {0.25, 0.5, 1.0, 2.0, 5.0};
  std::vector<long> cdf_hits(d.cdf_probes.size(), 0);
  const std::array<long, 3> checkpoints{samples / 100, samples / 10, samples};

  Rng rng(seed);
  std::exponential_distribution<double> unit(1.0);
  double sum_second = 0.0;
  double sum_second_sq = 0.0;
  double sum_max = 0.0;
  std::size_t next_checkpoint = 0;
  for (long s = 1; s <= samples; ++s) {
    double largest = 0.0;
    double second = 0.0;
    for (int i = 0; i < pairs; ++i) {
      const double z = 1.0 / unit(rng);
      if (i == 0)
        for (std::size_t k = 0; k < d.cdf_probes.size(); ++k) cdf_hits[k] += z <= d.cdf_probes[k];
      if (z > largest) {
        second = largest;
        largest = z;
      } else if (z > second) {
        second = z;
      }
    }
    sum_second += second;
    sum_second_sq += second * second;
    sum_max += largest;
    if (next_checkpoint < checkpoints.size() && s == checkpoints[next_checkpoint]) {
      d.z_max_running_mean.emplace_back(s, sum_max / s);
      ++next_checkpoint;
    }
  }
  const double n = static_cast<double>(samples);
  d.mean_z_second_max = sum_second / n;
  const double var = std::max(0.0, sum_second_sq / n - d.mean_z_second_max * d.mean_z_second_max);
  d.stderr_z_second_max = std::sqrt(var / n);
  for (long hits : cdf_hits) d.cdf_values.push_back(hits / n);
  return d;
}

}  // namespace ehrelay::analytic
