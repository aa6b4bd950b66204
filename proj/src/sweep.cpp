#include "ehrelay/sweep.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "ehrelay/engine.hpp"

namespace ehrelay {
namespace {

using analytic::Metric;

bool wants(const std::vector<Method>& methods, Method m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

std::optional<double> exact_value(Strategy strategy, Metric metric, const SystemConfig& system) {
  if (metric == Metric::success) return std::nullopt;
  switch (strategy) {
    case Strategy::individual: return analytic::outage_individual(system).get(metric);
    case Strategy::equal: return analytic::outage_equal(system).get(metric);
    case Strategy::waterfill:
      if (metric == Metric::best) return analytic::outage_wf_best(system);
      return std::nullopt;
    default: return std::nullopt;
  }
}

}  // namespace

SweepResult run_sweep(const RunConfig& config, const SweepProgress& progress) {
  validate_config(config);
  const SweepSpec& spec = config.sweep;
  EngineOptions options;
  options.threads = spec.threads;
  options.auction = config.auction;

  SweepResult result;
  for (int pairs : spec.pairs) {
    for (double snr : spec.snr_grid()) {
      const SystemConfig system = config.system(pairs, snr);
      const bool closed_form = system.unit_variances();
      for (Strategy strategy : spec.strategies) {
        if (progress)
          progress(fmt::format("M={} snr={} dB {}", pairs, snr, to_string(strategy)));
        std::optional<OutageReport> mc;
        if (wants(spec.methods, Method::mc)) {
          mc = run_experiment(system, strategy, spec.trials, spec.seed, options);
          result.auction_failures += mc->auction_failures;
        }
        for (Metric metric : spec.metrics) {
          auto row = [&](std::string method, double value) {
            SweepRow r;
            r.snr_db = snr;
            r.strategy = strategy;
            r.metric = metric;
            r.method = std::move(method);
            r.value = value;
            r.pairs = pairs;
            return r;
          };
          if (mc) {
            SweepRow r = row("mc", mc->value(metric));
            r.stderr_value = mc->standard_error(metric);
            r.trials = mc->trials;
            r.seed = mc->seed;
            result.rows.push_back(r);
          }
          if (!closed_form) continue;
          if (wants(spec.methods, Method::exact))
            if (auto v = exact_value(strategy, metric, system)) result.rows.push_back(row("exact", *v));
          if (wants(spec.methods, Method::asymptotic) && analytic::has_asymptote(strategy, metric)) {
            const double c = std::min(config.bound_c, pairs - 1.0);
            const auto a = analytic::asymptotic_outage(strategy, metric, system, c);
            result.outside_regime += a.outside_regime;
            result.rows.push_back(row("asymptotic", a.value));
            if (a.upper) result.rows.push_back(row("asymptotic-upper", *a.upper));
          }
          if (wants(spec.methods, Method::bounds) && strategy == Strategy::waterfill &&
              metric == Metric::worst && pairs >= 2) {
            const double c = std::min(config.bound_c, pairs - 1.0);
            const auto b = analytic::wf_worst_bounds(system, c);
            result.quadrature_failures += !b.converged;
            result.rows.push_back(row("bound-lower", b.lower));
            result.rows.push_back(row("bound-upper", b.upper_integral));
            result.rows.push_back(row("bound-upper-closed", b.upper_closed));
          }
        }
      }
    }
  }
  return result;
}

std::string format_csv(const std::vector<SweepRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const SweepRow& r : rows) {
    out += fmt::format("{},{},{},{},{},", r.snr_db, to_string(r.strategy),
                       analytic::to_string(r.metric), r.method, r.value);
    if (r.stderr_value) out += fmt::format("{}", *r.stderr_value);
    out += ',';
    if (r.trials) out += fmt::format("{}", *r.trials);
    out += ',';
    if (r.seed) out += fmt::format("{}", *r.seed);
    out += fmt::format(",{}\n", r.pairs);
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) { out << format_csv(rows); }

}  // namespace ehrelay
