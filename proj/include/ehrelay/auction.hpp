#pragma once

// Power auction among the destinations whose sources the relay decoded.
//
// Each user i bids b_i >= 0 and receives
//     P_ri = b_i / (sum_j b_j + xi) * P_r,
// paying pi * P_ri. Its payoff is 1/2 log2(1 + P_ri g_i) - pi P_ri, which is
// maximised at the target power
//     T_i = 1 / (2 ln2 pi) - 1 / g_i.
// The best response reaches T_i given the others' bids, so an interior Nash
// equilibrium hands every participating user exactly T_i.

#include <span>
#include <string_view>
#include <vector>

#include "ehrelay/model.hpp"
#include "ehrelay/strategies.hpp"

namespace ehrelay::auction {

/// Stand-in for an unbounded bid when the price is below a user's threshold.
inline constexpr double kBidCap = 1e12;

struct AuctionConfig {
  double price = 0.0;    // pi
  double reserve = 0.0;  // xi
  double tolerance = 1e-12;
  int max_iterations = 500;
};

struct AuctionState {
  std::vector<double> bids;
  std::vector<double> power;  // P_ri
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // last max |b^k - b^{k-1}|
};

enum class PricePolicy {
  contraction,  // smallest price with a certified contraction, plus a margin
  clearing,     // price at which the equilibrium targets fill a share of P_r
};

std::string_view to_string(PricePolicy p);
PricePolicy parse_price_policy(std::string_view name);

/// How the relay runs the auction inside one time slot.
struct AuctionPolicy {
  PricePolicy price_policy = PricePolicy::contraction;
  double price_margin = 0.05;    // delta
  double reserve_factor = 0.01;  // xi = reserve_factor * P_r
  double clearing_fill = 0.99;
  double tolerance = 1e-12;
  int max_iterations = 500;

  bool operator==(const AuctionPolicy&) const = default;
};

double allocated_power(std::size_t i, std::span<const double> bids, double relay_power,
                       double reserve);

double payoff(std::size_t i, std::span<const double> bids, double price, double relay_power,
              double g2, double reserve);

/// T_i = 1 / (2 ln2 pi) - 1 / g2. Throws std::domain_error for pi <= 0.
double target_power(double price, double g2);

/// Below this price user i would take all of P_r: g2 / (2 ln2 (1 + P_r g2)).
double threshold_price(double g2, double relay_power);

/// Above this price user i quits: g2 / (2 ln2).
double quit_price(double g2);

/// rho_i = T_i / (P_r - T_i) for an interior user, 0 for one priced out,
/// +inf for one at or below its threshold price.
double response_slope(double price, double g2, double relay_power);

/// Best response of user i to the other entries of `bids` (bids[i] ignored).
/// Throws std::domain_error for price <= 0.
double best_response(std::size_t i, std::span<const double> bids, double price,
                     double relay_power, double g2, double reserve);

/// Same response computed from user i's own last bid and allocation:
///   rho_i (P_r - P_ri) b_i / P_ri.
/// Requires an interior user with b_i > 0.
double best_response_local(double price, double g2, double relay_power, double own_bid,
                           double own_power);

/// mu = sqrt(N) ||rho||_2 + max rho; mu < 1 certifies that the joint best
/// response is a contraction in the Euclidean norm.
double contraction_modulus(double price, std::span<const double> g2, double relay_power);

/// (1 + margin) times the smallest price with mu < 1, found by bisection over
/// (min threshold price, max quit price).
double select_price(std::span<const double> g2, double relay_power, double margin);

/// Price at which sum_i max(T_i, 0) = fill * P_r.
double clearing_price(std::span<const double> g2, double relay_power, double fill);

/// Synchronous best-response iteration from b = (1, ..., 1).
/// Non-convergence is reported through the flag and residual.
AuctionState run_auction(std::span<const double> g2, double relay_power,
                         const AuctionConfig& config);

/// Runs the auction over the decoding set of one draw and returns the
/// allocation; the relay keeps whatever the bids leave unallocated.
PowerAllocation allocate_auction(const ChannelDraw& draw, const HarvestState& state,
                                 const AuctionPolicy& policy, AuctionState* state_out = nullptr);

}  // namespace ehrelay::auction
