#include "ehrelay/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ehrelay {
namespace {

struct BlockStats {
  long long trials = 0;
  long long failed_users = 0;      // sum of per-trial outage counts k
  long long failed_users_sq = 0;   // sum of k^2
  long long all_failed = 0;
  long long any_failed = 0;
  long long auction_failures = 0;
  long long violations = 0;
  double leftover = 0.0;
};

// Runs fn(block, stats) for every block on `threads` workers. Each block's
// stats land in their own slot, so the caller's in-order reduction does not
// depend on scheduling.
template <typename Fn>
std::vector<BlockStats> run_blocks(long long trials, int threads, Fn fn) {
  const long long blocks = (trials + kBlockSize - 1) / kBlockSize;
  std::vector<BlockStats> stats(static_cast<std::size_t>(blocks));
  std::atomic<long long> next{0};
  auto worker = [&] {
    for (long long b = next++; b < blocks; b = next++) {
      const long long count = std::min(kBlockSize, trials - b * kBlockSize);
      stats[b].trials = count;
      fn(b, count, stats[b]);
    }
  };
  const int n = static_cast<int>(std::min<long long>(resolve_threads(threads), blocks));
  std::vector<std::jthread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  return stats;
}

class TrialRunner {
 public:
  TrialRunner(const SystemConfig& config, Strategy strategy, const auction::AuctionPolicy& policy)
      : config_(config), strategy_(strategy), policy_(policy), params_(derive_params(config)) {}

  const TrialResult& run(Rng& stream) {
    sample_channels(stream, config_, draw_);
    harvest(draw_, config_, params_, state_);
    result_.auction_converged = true;
    PowerAllocation alloc;
    switch (strategy_) {
      case Strategy::individual:
        alloc = allocate_individual(draw_, state_, config_, params_);
        break;
      case Strategy::equal: alloc = allocate_equal(state_, config_.pairs); break;
      case Strategy::waterfill: alloc = allocate_waterfill(draw_, state_, params_); break;
      case Strategy::maxmin: alloc = allocate_maxmin(draw_, state_); break;
      case Strategy::auction: {
        auction::AuctionState st;
        alloc = auction::allocate_auction(draw_, state_, policy_, &st);
        result_.auction_converged = st.converged;
        break;
      }
    }
    const int m = config_.pairs;
    result_.outage.assign(static_cast<std::size_t>(m), 1);
    result_.success_count = 0;
    for (int i : state_.decoding_set) {
      if (destination_succeeds(alloc.power[i], draw_.g2[i], params_.a)) {
        result_.outage[i] = 0;
        ++result_.success_count;
      }
    }
    result_.leftover = alloc.leftover;
    return result_;
  }

 private:
  const SystemConfig& config_;
  Strategy strategy_;
  const auction::AuctionPolicy& policy_;
  DerivedParams params_;
  ChannelDraw draw_;
  HarvestState state_;
  TrialResult result_;
};

bool worst_user_fails(const PowerAllocation& alloc, const ChannelDraw& draw,
                      const HarvestState& state, int pairs, double a) {
  if (state.decoded() < pairs) return true;
  for (int i : state.decoding_set)
    if (!destination_succeeds(alloc.power[i], draw.g2[i], a)) return true;
  return false;
}

}  // namespace

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

Rng block_stream(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return Rng(seq);
}

TrialResult run_trial(Rng& stream, const SystemConfig& config, Strategy strategy,
                      const auction::AuctionPolicy& policy) {
  TrialRunner runner(config, strategy, policy);
  return runner.run(stream);
}

double OutageReport::value(analytic::Metric m) const {
  switch (m) {
    case analytic::Metric::average: return average;
    case analytic::Metric::best: return best;
    case analytic::Metric::worst: return worst;
    case analytic::Metric::success: return mean_success;
  }
  return 0.0;
}

double OutageReport::standard_error(analytic::Metric m) const {
  switch (m) {
    case analytic::Metric::average: return average_se;
    case analytic::Metric::best: return best_se;
    case analytic::Metric::worst: return worst_se;
    case analytic::Metric::success: return mean_success_se;
  }
  return 0.0;
}

OutageReport run_experiment(const SystemConfig& config, Strategy strategy, long long trials,
                            std::uint64_t seed, const EngineOptions& options) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  config.validate();

  const auto blocks = run_blocks(trials, options.threads, [&](long long b, long long count,
                                                             BlockStats& s) {
    Rng stream = block_stream(seed, static_cast<std::uint64_t>(b));
    TrialRunner runner(config, strategy, options.auction);
    for (long long t = 0; t < count; ++t) {
      const TrialResult& r = runner.run(stream);
      const long long k = config.pairs - r.success_count;
      s.failed_users += k;
      s.failed_users_sq += k * k;
      s.all_failed += k == config.pairs;
      s.any_failed += k > 0;
      s.auction_failures += !r.auction_converged;
      s.leftover += r.leftover;
    }
  });

  BlockStats total;
  for (const BlockStats& s : blocks) {
    total.failed_users += s.failed_users;
    total.failed_users_sq += s.failed_users_sq;
    total.all_failed += s.all_failed;
    total.any_failed += s.any_failed;
    total.auction_failures += s.auction_failures;
    total.leftover += s.leftover;
  }

  const double n = static_cast<double>(trials);
  const double m = config.pairs;
  auto binomial_se = [n](double p) { return std::sqrt(p * (1.0 - p) / n); };
  // per-trial sample variance of k; users within a trial are correlated
  const double mean_k = total.failed_users / n;
  const double var_k =
      trials > 1 ? std::max(0.0, (total.failed_users_sq - n * mean_k * mean_k) / (n - 1.0)) : 0.0;

  OutageReport r;
  r.trials = trials;
  r.seed = seed;
  r.pairs = config.pairs;
  r.average = mean_k / m;
  r.average_se = std::sqrt(var_k / n) / m;
  r.best = total.all_failed / n;
  r.best_se = binomial_se(r.best);
  r.worst = total.any_failed / n;
  r.worst_se = binomial_se(r.worst);
  r.mean_success = m - mean_k;
  r.mean_success_se = std::sqrt(var_k / n);
  r.mean_leftover = total.leftover / n;
  r.auction_failures = total.auction_failures;
  return r;
}

long long lemma_equivalence_check(const SystemConfig& config, long long trials, std::uint64_t seed,
                                  int threads) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const DerivedParams params = derive_params(config);
  const auto blocks = run_blocks(trials, threads, [&](long long b, long long count,
                                                      BlockStats& s) {
    Rng stream = block_stream(seed, static_cast<std::uint64_t>(b));
    ChannelDraw draw;
    HarvestState state;
    for (long long t = 0; t < count; ++t) {
      sample_channels(stream, config, draw);
      harvest(draw, config, params, state);
      const bool wf = worst_user_fails(allocate_waterfill(draw, state, params), draw, state,
                                       config.pairs, params.a);
      const bool mm =
          worst_user_fails(allocate_maxmin(draw, state), draw, state, config.pairs, params.a);
      s.violations += wf != mm;
    }
  });
  long long violations = 0;
  for (const BlockStats& s : blocks) violations += s.violations;
  return violations;
}

}  // namespace ehrelay
