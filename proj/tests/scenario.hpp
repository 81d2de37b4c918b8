#pragma once

// Small hand-built networks with explicit routing tables, plus a
// deterministic driver for stepping a Reconfiguration in a chosen order.

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "upr/reconfiguration.hpp"

namespace scenario {

using namespace upr;

// Router i hosts processing node Pi; `links` are directed router pairs.
inline Network make_network(std::uint32_t routers,
                            std::initializer_list<std::pair<std::uint32_t, std::uint32_t>> links) {
    Network::Builder b;
    for (std::uint32_t i = 0; i < routers; ++i) b.add_router();
    for (std::uint32_t i = 0; i < routers; ++i) b.add_processing(router_node(i));
    for (auto [from, to] : links) b.add_channel(router_node(from), router_node(to));
    return std::move(b).build();
}

inline ChannelIndex ch(const Network& net, const std::string& name) {
    const auto c = net.parse_channel(name);
    if (!c) throw std::invalid_argument("no channel " + name);
    return *c;
}

// Adds every hop of a route written as router indices, e.g. {0, 1, 2} is
// P0>R0, R0>R1, R1>R2, R2>P2. The target is the processing node of the last
// router.
inline void add_route(RoutingFunction& r, const Network& net, std::initializer_list<std::uint32_t> routers) {
    const std::vector<std::uint32_t> hops(routers);
    const NodeId src = processing_node(hops.front());
    const NodeId dst = processing_node(hops.back());
    std::vector<ChannelIndex> path{net.injection_channel(src)};
    for (std::size_t i = 0; i + 1 < hops.size(); ++i)
        path.push_back(net.index_of({router_node(hops[i]), router_node(hops[i + 1]), 0}));
    path.push_back(net.delivery_channel(dst));
    for (std::size_t i = 0; i + 1 < path.size(); ++i) r.add_choice(path[i], dst, path[i + 1]);
}

// Direct single-hop routes for every ordered pair not listed in `skip`.
inline void add_direct_routes(RoutingFunction& r, const Network& net, std::uint32_t routers,
                              const std::vector<std::pair<std::uint32_t, std::uint32_t>>& skip) {
    for (std::uint32_t s = 0; s < routers; ++s)
        for (std::uint32_t t = 0; t < routers; ++t) {
            if (s == t || std::find(skip.begin(), skip.end(), std::pair{s, t}) != skip.end()) continue;
            add_route(r, net, {s, t});
        }
}

inline void process_requests(Reconfiguration& st) {
    while (!st.pending_requests().empty()) st.process_removal_request(RemovalRequest(st.pending_requests().front()));
}

// Checks the named channels in order, resolving requests after each one.
inline void visit(Reconfiguration& st, std::initializer_list<std::string> names) {
    for (const std::string& n : names) {
        run_channel_check(st, ch(st.network(), n));
        process_requests(st);
    }
}

// Round-robin over every channel until the reconfiguration completes or
// stops making progress.
inline bool finish(Reconfiguration& st, int rounds = 200) {
    const Network& net = st.network();
    for (int round = 0; round < rounds && !st.complete(); ++round) {
        for (std::size_t i = 0; i < net.channel_count(); ++i) {
            run_channel_check(st, channel_at(i));
            process_requests(st);
        }
        st.take_wakeups();
    }
    return st.complete();
}

inline std::vector<const ReconfigEvent*> events_of(const Trace& trace, EventKind kind) {
    std::vector<const ReconfigEvent*> out;
    for (const ReconfigEvent& e : trace)
        if (e.kind == kind) out.push_back(&e);
    return out;
}

inline std::optional<std::uint64_t> upgrade_time(const Trace& trace, ChannelIndex c) {
    for (const ReconfigEvent& e : trace)
        if (e.kind == EventKind::Upgrade && e.channel == c) return e.timestamp;
    return std::nullopt;
}

inline bool has_dep_event(const Trace& trace, EventKind kind, GraphTag graph, Cause cause, const Dependency& d) {
    for (const ReconfigEvent& e : trace)
        if (e.kind == kind && e.graph == graph && e.cause == cause && e.dep == d) return true;
    return false;
}

// Five routers. Channel roles: cj = R0>R1, ci = R1>R2, ck = R2>R0,
// cl = R1>R3, cm = R4>R1. The final function routes P3 from cj both through
// ci and through cl, and routes P1 from R2 through ck then cj, so ck is a
// final-graph predecessor of ci. The starting function sends P4's traffic
// for P0 through cm, ci and ck.
inline Network restoration_cycle_network() {
    return make_network(5, {{0, 1}, {1, 2}, {2, 0}, {1, 3}, {4, 1}, {2, 3}, {4, 0}, {2, 4}, {3, 1}, {0, 2}, {3, 4}});
}

inline RoutingFunction restoration_cycle_routes(const Network& net, bool final) {
    RoutingFunction r(net);
    for (auto route : {std::initializer_list<std::uint32_t>{0, 1}, {0, 2}, {0, 1, 2, 3}, {0, 1, 3}, {0, 1, 3, 4},
                       {1, 3, 4, 0}, {1, 2}, {1, 3}, {1, 3, 4}, {2, 0}, {2, 3}, {2, 4}, {3, 4, 0}, {3, 1}, {3, 1, 2},
                       {3, 4}, {4, 1}, {4, 1, 2}, {4, 1, 2, 3}})
        add_route(r, net, route);
    if (final) {
        add_route(r, net, {2, 0, 1});
        add_route(r, net, {4, 0});
    } else {
        add_route(r, net, {2, 4, 1});
        add_route(r, net, {4, 1, 2, 0});
    }
    return r;
}

inline ReconfigOptions restoration_cycle_options(bool union_check, bool defer) {
    ReconfigOptions o = ReconfigOptions::both_exploits();
    o.invariant_checks = InvariantChecks::EveryEvent;
    o.union_predecessor_check = union_check;
    o.defer_cyclic_restoration = defer;
    return o;
}

// cl upgrades, cj releases its arc to ci and upgrades, ck upgrades, then ci
// meets P0 from cm, which it has no final route for.
inline void drive_restoration_cycle(Reconfiguration& st) {
    visit(st, {"R0>P0", "R1>P1", "R2>P2", "R3>P3", "R4>P4", "R4>R0", "R3>R4", "R1>R3", "R0>R1", "R2>R0", "R2>R3",
               "R1>R2"});
}

inline bool intermediate_cycle(const std::vector<Violation>& v) {
    return std::any_of(v.begin(), v.end(), [](const Violation& x) {
        return x.condition == 2 && x.message.find("intermediate") != std::string::npos;
    });
}

}  // namespace scenario
