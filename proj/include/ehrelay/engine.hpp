#pragma once

// Monte Carlo runner. Trials are grouped into fixed blocks of kBlockSize; each
// block draws from its own stream seeded by (seed, block index), and block
// statistics are combined in block order. Results are therefore bit-identical
// for any number of worker threads.

#include <cstdint>
#include <vector>

#include "ehrelay/analytic.hpp"
#include "ehrelay/auction.hpp"
#include "ehrelay/model.hpp"
#include "ehrelay/strategies.hpp"

namespace ehrelay {

inline constexpr long long kBlockSize = 4096;

struct TrialResult {
  std::vector<std::uint8_t> outage;  // per user
  int success_count = 0;
  double leftover = 0.0;
  bool auction_converged = true;
};

struct EngineOptions {
  int threads = 0;  // 0: one per hardware thread
  auction::AuctionPolicy auction;
};

/// Stream for block `block` of an experiment seeded with `seed`.
Rng block_stream(std::uint64_t seed, std::uint64_t block);

/// One draw, one allocation, one outage decision per user.
TrialResult run_trial(Rng& stream, const SystemConfig& config, Strategy strategy,
                      const auction::AuctionPolicy& policy = {});

struct OutageReport {
  long long trials = 0;
  std::uint64_t seed = 0;
  int pairs = 0;
  double average = 0.0;
  double average_se = 0.0;
  double best = 0.0;  // every user fails
  double best_se = 0.0;
  double worst = 0.0;  // at least one user fails
  double worst_se = 0.0;
  double mean_success = 0.0;
  double mean_success_se = 0.0;
  double mean_leftover = 0.0;
  long long auction_failures = 0;  // trials whose auction hit max_iterations

  /// Estimate for `m`; Metric::success gives the mean success count.
  double value(analytic::Metric m) const;
  double standard_error(analytic::Metric m) const;
};

/// Throws std::invalid_argument for trials < 1.
OutageReport run_experiment(const SystemConfig& config, Strategy strategy, long long trials,
                            std::uint64_t seed, const EngineOptions& options = {});

/// Runs water-filling and max-min on the same draws and counts trials whose
/// worst-user outage indicators differ.
long long lemma_equivalence_check(const SystemConfig& config, long long trials, std::uint64_t seed,
                                  int threads = 0);

/// Worker count actually used for a requested `threads` value.
int resolve_threads(int threads);

}  // namespace ehrelay
