#pragma once

#include <cstddef>
#include <set>

#include "upr/topology.hpp"
#include "upr/trace.hpp"

namespace upr {

/// Which channels form the denominator of the drained ratio.
enum class ChannelDenominator : std::uint8_t { All, NetworkOnly };

struct DrainedChannels {
    std::set<ChannelIndex> channels;
    double ratio{0.0};
};

struct HaltedFlows {
    std::set<Flow> flows;
    double ratio{0.0};
};

/// A channel is drained when a prevailing dependency into or out of it was
/// removed by drainage or halting. Throws std::invalid_argument when some
/// channel never upgraded (truncated trace).
DrainedChannels drained_channel_ratio(const Trace& trace, const Network& net,
                                      ChannelDenominator denominator = ChannelDenominator::All);

/// Flows with an InjectionHalted event over |P| (|P| - 1) ordered pairs.
HaltedFlows halted_flow_ratio(const Trace& trace, const Network& net);

/// Distinct channels whose condition check ever reported offending targets.
std::size_t raw_condition_failures(const Trace& trace);

/// Every halted flow is resumed later in the trace.
bool halted_flows_resumed(const Trace& trace);

}  // namespace upr
