#pragma once

// Independent reference implementations used only by tests. None of these
// share code with the library beyond the Network and RoutingFunction types.

#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "upr/routing.hpp"
#include "upr/tcdg.hpp"
#include "upr/topology.hpp"

namespace oracle {

using upr::ChannelIndex;
using upr::Dependency;
using upr::NodeId;

// Enumerates every route of every flow (s, t), s != t, one full path at a
// time, and records each consecutive channel pair. Exponential in path
// length; meant for meshes up to 3x3. A path longer than the channel count
// means the routing loops; the walk abandons it and sets `looped`.
inline std::set<Dependency> path_walk_tcdg(const upr::Network& net, const upr::RoutingFunction& r,
                                           bool* looped = nullptr) {
    std::set<Dependency> out;
    const std::size_t limit = net.channel_count() + 1;
    for (NodeId s : net.processing_nodes()) {
        for (NodeId t : net.processing_nodes()) {
            if (s == t) continue;
            for (std::uint32_t lane = 0; lane < net.lanes(); ++lane) {
                std::vector<std::pair<ChannelIndex, std::size_t>> stack{{net.injection_channel(s, lane), 0}};
                while (!stack.empty()) {
                    auto [c, depth] = stack.back();
                    stack.pop_back();
                    if (net.channel_class(c) == upr::ChannelClass::Delivery) continue;
                    if (depth > limit) {
                        if (looped) *looped = true;
                        continue;
                    }
                    for (ChannelIndex n : r.route(c, t)) {
                        out.insert(Dependency{c, n, t});
                        stack.emplace_back(n, depth + 1);
                    }
                }
            }
        }
    }
    return out;
}

// Cycle search by transitive closure: a cycle exists iff some vertex
// reaches itself through at least one arc.
inline bool closure_has_cycle(std::size_t n, const std::set<std::pair<std::size_t, std::size_t>>& arcs) {
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (auto [a, b] : arcs) reach[a][b] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (reach[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = 1;
    for (std::size_t i = 0; i < n; ++i)
        if (reach[i][i]) return true;
    return false;
}

// b reachable from a by breadth-first search over an explicit arc set.
inline bool bfs_reaches(std::size_t n, const std::set<std::pair<std::size_t, std::size_t>>& arcs, std::size_t a,
                        std::size_t b) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> frontier{a};
    seen[a] = 1;
    for (std::size_t i = 0; i < frontier.size(); ++i)
        for (auto [x, y] : arcs)
            if (x == frontier[i] && !seen[y]) {
                seen[y] = 1;
                frontier.push_back(y);
            }
    return seen[b] != 0;
}

inline std::set<std::pair<std::size_t, std::size_t>> projection(const std::set<Dependency>& deps) {
    std::set<std::pair<std::size_t, std::size_t>> arcs;
    for (const Dependency& d : deps) arcs.emplace(upr::idx(d.src), upr::idx(d.dst));
    return arcs;
}

// 2wh processing links plus 2(w-1)h + 2w(h-1) router links, times lanes.
inline std::size_t mesh_channel_count(std::size_t w, std::size_t h, std::size_t lanes = 1) {
    return lanes * (2 * w * h + 2 * (w - 1) * h + 2 * w * (h - 1));
}

// Random dependency set over `n` channels; targets only label arcs.
inline std::set<Dependency> random_deps(std::mt19937_64& rng, std::size_t n, std::size_t arcs) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_int_distribution<std::uint32_t> target(0, 3);
    std::set<Dependency> out;
    for (std::size_t i = 0; i < arcs; ++i) {
        const std::size_t a = pick(rng);
        const std::size_t b = pick(rng);
        if (a == b) continue;
        out.insert(Dependency{upr::channel_at(a), upr::channel_at(b), upr::processing_node(target(rng))});
    }
    return out;
}

}  // namespace oracle
