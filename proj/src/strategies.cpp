#include "ehrelay/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ehrelay {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::individual: return "individual";
    case Strategy::equal: return "equal";
    case Strategy::waterfill: return "waterfill";
    case Strategy::maxmin: return "maxmin";
    case Strategy::auction: return "auction";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies)
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown strategy '" + std::string(name) +
                              "' (expected individual|equal|waterfill|maxmin|auction)");
}

double PowerAllocation::total() const {
  return std::accumulate(power.begin(), power.end(), 0.0) + leftover;
}

PowerAllocation allocate_individual(const ChannelDraw& draw, const HarvestState& state,
                                    const SystemConfig& config, const DerivedParams& params) {
  PowerAllocation out;
  out.power.assign(draw.h2.size(), 0.0);
  for (int i : state.decoding_set)
    out.power[i] = config.eta * (config.source_power * draw.h2[i] - params.a);
  return out;
}

PowerAllocation allocate_equal(const HarvestState& state, int pairs) {
  PowerAllocation out;
  out.power.assign(static_cast<std::size_t>(pairs), 0.0);
  if (state.decoding_set.empty()) {
    out.leftover = state.total_power;
    return out;
  }
  const double share = state.total_power / state.decoded();
  for (int i : state.decoding_set) out.power[i] = share;
  return out;
}

std::vector<int> waterfill_order(const ChannelDraw& draw, const HarvestState& state) {
  std::vector<int> order = state.decoding_set;
  std::stable_sort(order.begin(), order.end(),
                   [&](int l, int r) { return draw.g2[l] > draw.g2[r]; });
  return order;
}

PowerAllocation allocate_waterfill(const ChannelDraw& draw, const HarvestState& state,
                                   const DerivedParams& params) {
  PowerAllocation out;
  out.power.assign(draw.g2.size(), 0.0);
  double remaining = state.total_power;
  for (int i : waterfill_order(draw, state)) {
    const double required = params.a / draw.g2[i];
    if (required > remaining) break;
    out.power[i] = required;
    remaining -= required;
  }
  out.leftover = remaining;
  return out;
}

double maxmin_common_rate(const ChannelDraw& draw, const HarvestState& state) {
  if (state.decoding_set.empty()) return 0.0;
  double inverse_sum = 0.0;
  for (int i : state.decoding_set) inverse_sum += 1.0 / draw.g2[i];
  return 0.5 * std::log2(1.0 + state.total_power / inverse_sum);
}

PowerAllocation allocate_maxmin(const ChannelDraw& draw, const HarvestState& state) {
  PowerAllocation out;
  out.power.assign(draw.g2.size(), 0.0);
  if (state.decoding_set.empty()) {
    out.leftover = state.total_power;
    return out;
  }
  double inverse_sum = 0.0;
  for (int i : state.decoding_set) inverse_sum += 1.0 / draw.g2[i];
  // 2^{2t} - 1 = P_r / sum(1/g2); written this way the shares sum to P_r exactly
  const double level = state.total_power / inverse_sum;
  for (int i : state.decoding_set) out.power[i] = level / draw.g2[i];
  return out;
}

}  // namespace ehrelay
