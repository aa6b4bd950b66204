#include "ehrelay/auction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ehrelay::auction {
namespace {

constexpr double kTwoLn2 = 2.0 * std::numbers::ln2;
constexpr int kBisectionSteps = 200;

double sum_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

template <typename Pred>
double bisect_price(double lo, double hi, Pred accept_hi) {
  // invariant: accept_hi(hi) holds, accept_hi(lo) does not
  for (int k = 0; k < kBisectionSteps && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (accept_hi(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

std::string_view to_string(PricePolicy p) {
  return p == PricePolicy::contraction ? "contraction" : "clearing";
}

PricePolicy parse_price_policy(std::string_view name) {
  if (name == "contraction") return PricePolicy::contraction;
  if (name == "clearing") return PricePolicy::clearing;
  throw std::invalid_argument("unknown price policy '" + std::string(name) +
                              "' (expected contraction|clearing)");
}

double allocated_power(std::size_t i, std::span<const double> bids, double relay_power,
                       double reserve) {
  return bids[i] / (sum_of(bids) + reserve) * relay_power;
}

double payoff(std::size_t i, std::span<const double> bids, double price, double relay_power,
              double g2, double reserve) {
  const double p = allocated_power(i, bids, relay_power, reserve);
  return 0.5 * std::log2(1.0 + p * g2) - price * p;
}

double target_power(double price, double g2) {
  if (!(price > 0)) throw std::domain_error("auction price must be > 0");
  return 1.0 / (kTwoLn2 * price) - 1.0 / g2;
}

double threshold_price(double g2, double relay_power) {
  return g2 / (kTwoLn2 * (1.0 + relay_power * g2));
}

double quit_price(double g2) { return g2 / kTwoLn2; }

double response_slope(double price, double g2, double relay_power) {
  const double t = target_power(price, g2);
  if (t <= 0) return 0.0;
  if (t >= relay_power) return std::numeric_limits<double>::infinity();
  return t / (relay_power - t);
}

double best_response(std::size_t i, std::span<const double> bids, double price,
                     double relay_power, double g2, double reserve) {
  const double t = target_power(price, g2);
  if (t <= 0) return 0.0;
  if (t >= relay_power) return kBidCap;
  const double others = sum_of(bids) - bids[i];
  return t / (relay_power - t) * (others + reserve);
}

double best_response_local(double price, double g2, double relay_power, double own_bid,
                           double own_power) {
  const double rho = response_slope(price, g2, relay_power);
  return rho * (relay_power - own_power) * own_bid / own_power;
}

double contraction_modulus(double price, std::span<const double> g2, double relay_power) {
  double sum_sq = 0.0;
  double max_rho = 0.0;
  for (double g : g2) {
    const double rho = response_slope(price, g, relay_power);
    if (std::isinf(rho)) return rho;
    sum_sq += rho * rho;
    max_rho = std::max(max_rho, rho);
  }
  return std::sqrt(static_cast<double>(g2.size()) * sum_sq) + max_rho;
}

double select_price(std::span<const double> g2, double relay_power, double margin) {
  if (g2.empty()) throw std::invalid_argument("select_price needs at least one bidder");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double g : g2) {
    lo = std::min(lo, threshold_price(g, relay_power));
    hi = std::max(hi, quit_price(g));
  }
  if (!(contraction_modulus(hi, g2, relay_power) < 1.0)) return hi;
  const double price = bisect_price(
      lo, hi, [&](double p) { return contraction_modulus(p, g2, relay_power) < 1.0; });
  return (1.0 + margin) * price;
}

double clearing_price(std::span<const double> g2, double relay_power, double fill) {
  if (g2.empty()) throw std::invalid_argument("clearing_price needs at least one bidder");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double g : g2) {
    lo = std::min(lo, threshold_price(g, relay_power));
    hi = std::max(hi, quit_price(g));
  }
  const double budget = fill * relay_power;
  return bisect_price(lo, hi, [&](double p) {
    double demand = 0.0;
    for (double g : g2) demand += std::max(target_power(p, g), 0.0);
    return demand <= budget;
  });
}

AuctionState run_auction(std::span<const double> g2, double relay_power,
                         const AuctionConfig& config) {
  if (g2.empty()) throw std::invalid_argument("run_auction needs at least one bidder");
  if (!(config.reserve > 0)) throw std::invalid_argument("auction reserve must be > 0");
  if (!(config.tolerance > 0)) throw std::invalid_argument("auction tolerance must be > 0");
  if (!(config.price > 0)) throw std::domain_error("auction price must be > 0");

  const std::size_t n = g2.size();
  AuctionState st;
  st.bids.assign(n, 1.0);
  std::vector<double> next(n);
  for (st.iterations = 1; st.iterations <= config.max_iterations; ++st.iterations) {
    double largest = 0.0;
    st.residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = best_response(i, st.bids, config.price, relay_power, g2[i], config.reserve);
      st.residual = std::max(st.residual, std::abs(next[i] - st.bids[i]));
      largest = std::max(largest, std::abs(next[i]));
    }
    st.bids.swap(next);
    if (st.residual <= config.tolerance * std::max(1.0, largest)) {
      st.converged = true;
      break;
    }
  }
  st.iterations = std::min(st.iterations, config.max_iterations);

  const double denom = sum_of(st.bids) + config.reserve;
  st.power.resize(n);
  for (std::size_t i = 0; i < n; ++i) st.power[i] = st.bids[i] / denom * relay_power;
  return st;
}

PowerAllocation allocate_auction(const ChannelDraw& draw, const HarvestState& state,
                                 const AuctionPolicy& policy, AuctionState* state_out) {
  PowerAllocation out;
  out.power.assign(draw.g2.size(), 0.0);
  out.leftover = state.total_power;
  if (state.decoding_set.empty()) {
    if (state_out) {
      *state_out = AuctionState{};
      state_out->converged = true;
    }
    return out;
  }

  std::vector<double> gains;
  gains.reserve(state.decoding_set.size());
  for (int i : state.decoding_set) gains.push_back(draw.g2[i]);

  AuctionConfig cfg;
  cfg.price = policy.price_policy == PricePolicy::contraction
                  ? select_price(gains, state.total_power, policy.price_margin)
                  : clearing_price(gains, state.total_power, policy.clearing_fill);
  cfg.reserve = policy.reserve_factor * state.total_power;
  cfg.tolerance = policy.tolerance;
  cfg.max_iterations = policy.max_iterations;

  AuctionState result = run_auction(gains, state.total_power, cfg);
  double handed_out = 0.0;
  for (std::size_t k = 0; k < state.decoding_set.size(); ++k) {
    out.power[state.decoding_set[k]] = result.power[k];
    handed_out += result.power[k];
  }
  out.leftover = state.total_power - handed_out;
  if (state_out) *state_out = std::move(result);
  return out;
}

}  // namespace ehrelay::auction
