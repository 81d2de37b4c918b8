#pragma once

#include <iosfwd>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "upr/routing.hpp"
#include "upr/topology.hpp"

namespace upr {

/// Target-labelled channel dependency (src, dst, target): a packet bound to
/// `target` at the head of `src` may next be forwarded to `dst`.
struct Dependency {
    ChannelIndex src{};
    ChannelIndex dst{};
    NodeId target{};

    friend auto operator<=>(const Dependency&, const Dependency&) = default;
};

/// Target channel dependency graph: a multigraph over the channel set whose
/// arcs are Dependency values. Parallel arcs with distinct targets coexist.
class Tcdg {
public:
    Tcdg() = default;
    explicit Tcdg(std::size_t channel_count) : out_(channel_count), in_(channel_count) {}

    std::size_t channel_count() const { return out_.size(); }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool add(const Dependency& d);
    bool remove(const Dependency& d);
    bool contains(const Dependency& d) const;
    /// Drops every arc labelled with `target`.
    void remove_target(NodeId target);

    /// D+(c) and D-(c), sorted.
    std::span<const Dependency> out_deps(ChannelIndex c) const { return out_.at(idx(c)); }
    std::span<const Dependency> in_deps(ChannelIndex c) const { return in_.at(idx(c)); }
    /// T+(c) and T-(c), sorted and unique.
    std::vector<NodeId> out_targets(ChannelIndex c) const;
    std::vector<NodeId> in_targets(ChannelIndex c) const;
    bool has_out_target(ChannelIndex c, NodeId t) const;
    bool has_in_target(ChannelIndex c, NodeId t) const;

    /// All arcs in (src, dst, target) order.
    std::vector<Dependency> deps() const;

    friend bool operator==(const Tcdg& a, const Tcdg& b) { return a.out_ == b.out_; }

private:
    std::vector<std::vector<Dependency>> out_;
    std::vector<std::vector<Dependency>> in_;
    std::size_t size_{0};
};

/// Seeds excluded from the liveness fixpoint: (injection channel, target).
using BlockedInjections = std::set<std::pair<ChannelIndex, NodeId>>;

/// Dependencies of R restricted to live (channel, target) pairs: the least
/// fixpoint seeded by every (injection of s, t) with s != t that is not
/// blocked, closed under following R.
Tcdg build_tcdg(const Network& net, const RoutingFunction& r, const BlockedInjections& blocked = {});

/// Recomputes only the arcs labelled `target` of `t` against R.
void rebuild_target(Tcdg& t, const Network& net, const RoutingFunction& r, NodeId target,
                    const BlockedInjections& blocked = {});

/// T-_{a}(c) subset of T+_{b}(c): the local function behind `b` conforms
/// at `c` with respect to the function behind `a`.
bool is_target_conforming(const Tcdg& a, const Tcdg& b, ChannelIndex c);

/// Every direct successor of `c` in `t` is upgraded. Throws std::logic_error
/// when the channel projection of `t` is cyclic.
bool reverse_topological_ready(const Tcdg& t, const std::vector<bool>& upgraded, ChannelIndex c);

/// (T_P \ D+_P(c)) u D+_I(c).
Tcdg compose_next(const Tcdg& prevailing, const Tcdg& intermediate, ChannelIndex c);

/// Target-erased adjacency of one or more TCDGs (parallel arcs merged).
class ChannelGraph {
public:
    explicit ChannelGraph(std::size_t channel_count) : adj_(channel_count) {}
    explicit ChannelGraph(const Tcdg& t);
    ChannelGraph(const Tcdg& a, const Tcdg& b);

    void add_arc(ChannelIndex from, ChannelIndex to);
    std::span<const ChannelIndex> successors(ChannelIndex c) const { return adj_.at(idx(c)); }
    std::size_t vertex_count() const { return adj_.size(); }

    bool acyclic() const;
    /// A directed path from `from` to `to` exists (a channel reaches itself).
    bool reaches(ChannelIndex from, ChannelIndex to) const;
    /// One directed cycle as a channel sequence, or empty when acyclic.
    std::vector<ChannelIndex> find_cycle() const;

private:
    std::vector<std::vector<ChannelIndex>> adj_;
};

bool projection_acyclic(const Tcdg& t);

/// `a` is a predecessor of `b`: b is reachable from a in the channel
/// projection, so an arc b -> a would close a cycle. A channel is its own
/// predecessor.
bool is_predecessor(const Tcdg& t, ChannelIndex a, ChannelIndex b);

/// `src_channel -> dst_channel [target]`, one arc per line.
void write_edge_list(std::ostream& os, const Network& net, const Tcdg& t);
/// Graphviz digraph with one edge per arc labelled by target.
void write_dot(std::ostream& os, const Network& net, const Tcdg& t, std::string_view graph_name = "tcdg");

}  // namespace upr
