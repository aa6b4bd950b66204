#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ehrelay/config.hpp"

namespace ehrelay {

/// One CSV line. Analytic rows leave stderr, trials and seed empty.
struct SweepRow {
  double snr_db = 0.0;
  Strategy strategy = Strategy::individual;
  analytic::Metric metric = analytic::Metric::average;
  std::string method;  // mc, exact, asymptotic, asymptotic-upper, bound-lower, ...
  double value = 0.0;
  std::optional<double> stderr_value;
  std::optional<long long> trials;
  std::optional<std::uint64_t> seed;
  int pairs = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  long long auction_failures = 0;     // trials whose auction did not converge
  int quadrature_failures = 0;        // bound evaluations short of tolerance
  int outside_regime = 0;             // asymptotic rows with eps > 0.05
  bool converged() const { return auction_failures == 0 && quadrature_failures == 0; }
};

using SweepProgress = std::function<void(const std::string&)>;

/// Rows ordered by pairs, SNR, strategy, metric, method. Analytic rows are
/// emitted only for unit channel variances and for pairs that have a formula.
SweepResult run_sweep(const RunConfig& config, const SweepProgress& progress = {});

inline constexpr const char* kCsvHeader = "snr_db,strategy,metric,method,value,stderr,trials,seed,pairs";

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::string format_csv(const std::vector<SweepRow>& rows);

}  // namespace ehrelay
