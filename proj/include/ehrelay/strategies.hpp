#pragma once

#include <string_view>
#include <vector>

#include "ehrelay/model.hpp"

namespace ehrelay {

enum class Strategy { individual, equal, waterfill, maxmin, auction };

inline constexpr Strategy kAllStrategies[] = {Strategy::individual, Strategy::equal,
                                              Strategy::waterfill, Strategy::maxmin,
                                              Strategy::auction};

std::string_view to_string(Strategy s);
/// Throws std::invalid_argument for unknown names.
Strategy parse_strategy(std::string_view name);

/// Relay transmit power per destination. Users outside the decoding set get
/// zero; whatever the policy does not hand out is kept as leftover.
struct PowerAllocation {
  std::vector<double> power;
  double leftover = 0.0;

  double total() const;
};

/// Relative slack on the p g >= a success test. Strategies that hand a user
/// exactly a / g would otherwise fail it through rounding in p g.
inline constexpr double kSuccessSlack = 1e-12;

inline bool destination_succeeds(double power, double g2, double a) {
  return power * g2 >= a * (1.0 - kSuccessSlack);
}

/// Energy harvested from source i powers relay transmission to destination i.
PowerAllocation allocate_individual(const ChannelDraw& draw, const HarvestState& state,
                                    const SystemConfig& config, const DerivedParams& params);

/// P_r split evenly over the decoding set.
PowerAllocation allocate_equal(const HarvestState& state, int pairs);

/// Sequential water-filling: serve decoded destinations in descending g2
/// (ties by ascending index) with exactly a / g2 each, stopping at the first
/// one the remaining budget cannot cover.
PowerAllocation allocate_waterfill(const ChannelDraw& draw, const HarvestState& state,
                                   const DerivedParams& params);

/// Order in which water-filling visits the decoding set.
std::vector<int> waterfill_order(const ChannelDraw& draw, const HarvestState& state);

/// Max-min fair split: every decoded user gets the common rate
///   t = 1/2 log2(1 + P_r / sum 1/g2)
/// with p_i = (2^{2t} - 1) / g2_i.
PowerAllocation allocate_maxmin(const ChannelDraw& draw, const HarvestState& state);

/// Common rate reached by allocate_maxmin; zero when nothing was decoded.
double maxmin_common_rate(const ChannelDraw& draw, const HarvestState& state);

}  // namespace ehrelay
