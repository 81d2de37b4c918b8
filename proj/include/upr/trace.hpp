#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "upr/routing.hpp"
#include "upr/tcdg.hpp"
#include "upr/topology.hpp"

namespace upr {

enum class EventKind : std::uint8_t {
    ConditionCheck,
    Upgrade,
    RemovalRequested,
    DependencyRemoved,
    DependencyAdded,
    InjectionHalted,
    InjectionResumed,
    RiRestored,
    GhostRemoved,
};

/// Which live graph an event edits.
enum class GraphTag : std::uint8_t { None, Prevailing, Intermediate };

/// Why a dependency left or entered a graph.
enum class Cause : std::uint8_t {
    None,
    Conformability,  // alternative already present (reduced function)
    Compatibility,   // alternative added (extended function)
    Drainage,        // upstream drained of the target
    Halting,         // injection of the flow halted at its source
    OrderRelease,    // intermediate function reduced to leave the partial order
};

enum class CheckOutcome : std::uint8_t { Satisfied, SinkException, Offending };

using Flow = std::pair<NodeId, NodeId>;  // (source, target) processing nodes

struct ReconfigEvent {
    std::uint64_t timestamp{0};
    EventKind kind{EventKind::ConditionCheck};
    std::optional<ChannelIndex> channel;  // checker, upgrader or requester
    std::optional<Dependency> dep;
    GraphTag graph{GraphTag::None};
    Cause cause{Cause::None};
    std::optional<CheckOutcome> outcome;
    std::vector<NodeId> targets;  // offending targets of a failed check
    std::optional<Flow> flow;
    /// Pruned as a consequence of another removal (liveness vanished), not
    /// a routing-table edit of its own.
    bool cascade{false};

    friend bool operator==(const ReconfigEvent&, const ReconfigEvent&) = default;
};

using Trace = std::vector<ReconfigEvent>;

std::string_view to_string(EventKind k);
std::string_view to_string(GraphTag g);
std::string_view to_string(Cause c);
std::string_view to_string(CheckOutcome o);

/// One JSON object per line: t, kind, channel, dep {src,dst,target}, graph,
/// cause, outcome, targets, flow. Absent fields are omitted.
void write_trace_jsonl(std::ostream& os, const Network& net, const Trace& trace);
std::string event_to_json(const Network& net, const ReconfigEvent& e);
/// Inverse of write_trace_jsonl; throws std::invalid_argument on malformed input.
Trace read_trace_jsonl(std::istream& is, const Network& net);

/// Re-applies the routing-table edits recorded in `trace` to (R_S, R_F) and
/// returns the resulting prevailing routing function.
RoutingFunction replay_trace(const Network& net, const RoutingFunction& start, const RoutingFunction& final,
                             const Trace& trace);

}  // namespace upr
