#include "upr/metrics.hpp"

#include <stdexcept>
#include <vector>

namespace upr {

namespace {

void require_complete(const Trace& trace, const Network& net) {
    std::vector<char> up(net.channel_count(), 0);
    std::size_t count = 0;
    for (const ReconfigEvent& e : trace)
        if (e.kind == EventKind::Upgrade && e.channel && !up[idx(*e.channel)]) {
            up[idx(*e.channel)] = 1;
            ++count;
        }
    if (count != net.channel_count()) throw std::invalid_argument("truncated trace: not every channel upgraded");
}

}  // namespace

DrainedChannels drained_channel_ratio(const Trace& trace, const Network& net, ChannelDenominator denominator) {
    require_complete(trace, net);
    DrainedChannels out;
    auto counted = [&](ChannelIndex c) {
        return denominator == ChannelDenominator::All || net.channel_class(c) == ChannelClass::Network;
    };
    for (const ReconfigEvent& e : trace) {
        if (e.kind != EventKind::DependencyRemoved || e.graph != GraphTag::Prevailing || !e.dep) continue;
        if (e.cause != Cause::Drainage && e.cause != Cause::Halting) continue;
        if (counted(e.dep->src)) out.channels.insert(e.dep->src);
        if (counted(e.dep->dst)) out.channels.insert(e.dep->dst);
    }
    std::size_t total = 0;
    for (std::size_t i = 0; i < net.channel_count(); ++i) total += counted(channel_at(i));
    out.ratio = total == 0 ? 0.0 : static_cast<double>(out.channels.size()) / static_cast<double>(total);
    return out;
}

HaltedFlows halted_flow_ratio(const Trace& trace, const Network& net) {
    require_complete(trace, net);
    HaltedFlows out;
    for (const ReconfigEvent& e : trace)
        if (e.kind == EventKind::InjectionHalted && e.flow) out.flows.insert(*e.flow);
    const double p = static_cast<double>(net.processing_count());
    out.ratio = p < 2 ? 0.0 : static_cast<double>(out.flows.size()) / (p * (p - 1));
    return out;
}

std::size_t raw_condition_failures(const Trace& trace) {
    std::set<ChannelIndex> failed;
    for (const ReconfigEvent& e : trace)
        if (e.kind == EventKind::ConditionCheck && e.outcome == CheckOutcome::Offending && e.channel)
            failed.insert(*e.channel);
    return failed.size();
}

bool halted_flows_resumed(const Trace& trace) {
    std::set<Flow> open;
    for (const ReconfigEvent& e : trace) {
        if (!e.flow) continue;
        if (e.kind == EventKind::InjectionHalted) open.insert(*e.flow);
        if (e.kind == EventKind::InjectionResumed) open.erase(*e.flow);
    }
    return open.empty();
}

}  // namespace upr
