#include "upr/tcdg.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace upr {

namespace {

bool insert_sorted(std::vector<Dependency>& v, const Dependency& d) {
    auto it = std::lower_bound(v.begin(), v.end(), d);
    if (it != v.end() && *it == d) return false;
    v.insert(it, d);
    return true;
}

bool erase_sorted(std::vector<Dependency>& v, const Dependency& d) {
    auto it = std::lower_bound(v.begin(), v.end(), d);
    if (it == v.end() || *it != d) return false;
    v.erase(it);
    return true;
}

std::vector<NodeId> targets_of(std::span<const Dependency> deps) {
    std::vector<NodeId> out;
    out.reserve(deps.size());
    for (const Dependency& d : deps) out.push_back(d.target);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void propagate_target(Tcdg& t, const Network& net, const RoutingFunction& r, NodeId target,
                      const BlockedInjections& blocked, std::vector<char>& live,
                      std::vector<ChannelIndex>& work) {
    std::fill(live.begin(), live.end(), 0);
    work.clear();
    for (NodeId s : net.processing_nodes()) {
        if (s == target) continue;
        for (std::uint32_t lane = 0; lane < net.lanes(); ++lane) {
            const ChannelIndex inj = net.injection_channel(s, lane);
            if (blocked.contains({inj, target})) continue;
            live[idx(inj)] = 1;
            work.push_back(inj);
        }
    }
    while (!work.empty()) {
        const ChannelIndex c = work.back();
        work.pop_back();
        for (ChannelIndex o : r.route(c, target)) {
            t.add({c, o, target});
            if (net.channel_class(o) != ChannelClass::Delivery && !live[idx(o)]) {
                live[idx(o)] = 1;
                work.push_back(o);
            }
        }
    }
}

}  // namespace

bool Tcdg::add(const Dependency& d) {
    if (!insert_sorted(out_.at(idx(d.src)), d)) return false;
    insert_sorted(in_.at(idx(d.dst)), d);
    ++size_;
    return true;
}

bool Tcdg::remove(const Dependency& d) {
    if (!erase_sorted(out_.at(idx(d.src)), d)) return false;
    erase_sorted(in_.at(idx(d.dst)), d);
    --size_;
    return true;
}

bool Tcdg::contains(const Dependency& d) const {
    const auto& v = out_.at(idx(d.src));
    return std::binary_search(v.begin(), v.end(), d);
}

void Tcdg::remove_target(NodeId target) {
    auto match = [target](const Dependency& d) { return d.target == target; };
    for (auto& v : out_) size_ -= std::erase_if(v, match);
    for (auto& v : in_) std::erase_if(v, match);
}

std::vector<NodeId> Tcdg::out_targets(ChannelIndex c) const { return targets_of(out_deps(c)); }
std::vector<NodeId> Tcdg::in_targets(ChannelIndex c) const { return targets_of(in_deps(c)); }

bool Tcdg::has_out_target(ChannelIndex c, NodeId t) const {
    return std::any_of(out_.at(idx(c)).begin(), out_.at(idx(c)).end(),
                       [t](const Dependency& d) { return d.target == t; });
}

bool Tcdg::has_in_target(ChannelIndex c, NodeId t) const {
    return std::any_of(in_.at(idx(c)).begin(), in_.at(idx(c)).end(),
                       [t](const Dependency& d) { return d.target == t; });
}

std::vector<Dependency> Tcdg::deps() const {
    std::vector<Dependency> all;
    all.reserve(size_);
    for (const auto& v : out_) all.insert(all.end(), v.begin(), v.end());
    return all;
}

Tcdg build_tcdg(const Network& net, const RoutingFunction& r, const BlockedInjections& blocked) {
    Tcdg t(net.channel_count());
    std::vector<char> live(net.channel_count());
    std::vector<ChannelIndex> work;
    for (NodeId target : net.processing_nodes()) propagate_target(t, net, r, target, blocked, live, work);
    return t;
}

void rebuild_target(Tcdg& t, const Network& net, const RoutingFunction& r, NodeId target,
                    const BlockedInjections& blocked) {
    t.remove_target(target);
    std::vector<char> live(net.channel_count());
    std::vector<ChannelIndex> work;
    propagate_target(t, net, r, target, blocked, live, work);
}

bool is_target_conforming(const Tcdg& a, const Tcdg& b, ChannelIndex c) {
    const auto need = a.in_targets(c);
    const auto have = b.out_targets(c);
    return std::includes(have.begin(), have.end(), need.begin(), need.end());
}

bool reverse_topological_ready(const Tcdg& t, const std::vector<bool>& upgraded, ChannelIndex c) {
    if (!projection_acyclic(t)) throw std::logic_error("intermediate TCDG projection is cyclic");
    return std::all_of(t.out_deps(c).begin(), t.out_deps(c).end(),
                       [&](const Dependency& d) { return upgraded.at(idx(d.dst)); });
}

Tcdg compose_next(const Tcdg& prevailing, const Tcdg& intermediate, ChannelIndex c) {
    Tcdg next = prevailing;
    const std::vector<Dependency> old(prevailing.out_deps(c).begin(), prevailing.out_deps(c).end());
    for (const Dependency& d : old) next.remove(d);
    for (const Dependency& d : intermediate.out_deps(c)) next.add(d);
    return next;
}

ChannelGraph::ChannelGraph(const Tcdg& t) : adj_(t.channel_count()) {
    for (std::size_t i = 0; i < t.channel_count(); ++i)
        for (const Dependency& d : t.out_deps(channel_at(i))) add_arc(d.src, d.dst);
}

ChannelGraph::ChannelGraph(const Tcdg& a, const Tcdg& b) : ChannelGraph(a) {
    for (std::size_t i = 0; i < b.channel_count(); ++i)
        for (const Dependency& d : b.out_deps(channel_at(i))) add_arc(d.src, d.dst);
}

void ChannelGraph::add_arc(ChannelIndex from, ChannelIndex to) {
    auto& v = adj_.at(idx(from));
    auto it = std::lower_bound(v.begin(), v.end(), to);
    if (it == v.end() || *it != to) v.insert(it, to);
}

std::vector<ChannelIndex> ChannelGraph::find_cycle() const {
    // Iterative three-colour DFS; the grey stack holds the current path.
    enum : char { White, Grey, Black };
    std::vector<char> colour(adj_.size(), White);
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (std::size_t root = 0; root < adj_.size(); ++root) {
        if (colour[root] != White) continue;
        stack.assign(1, {root, 0});
        colour[root] = Grey;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < adj_[v].size()) {
                const std::size_t w = idx(adj_[v][next++]);
                if (colour[w] == Grey) {
                    std::vector<ChannelIndex> cycle;
                    auto it = std::find_if(stack.begin(), stack.end(), [w](auto& f) { return f.first == w; });
                    for (; it != stack.end(); ++it) cycle.push_back(channel_at(it->first));
                    return cycle;
                }
                if (colour[w] == White) {
                    colour[w] = Grey;
                    stack.emplace_back(w, 0);
                }
            } else {
                colour[v] = Black;
                stack.pop_back();
            }
        }
    }
    return {};
}

bool ChannelGraph::acyclic() const { return find_cycle().empty(); }

bool ChannelGraph::reaches(ChannelIndex from, ChannelIndex to) const {
    if (from == to) return true;
    std::vector<char> seen(adj_.size());
    std::vector<ChannelIndex> stack{from};
    seen[idx(from)] = 1;
    while (!stack.empty()) {
        const ChannelIndex v = stack.back();
        stack.pop_back();
        for (ChannelIndex w : adj_[idx(v)]) {
            if (w == to) return true;
            if (!seen[idx(w)]) {
                seen[idx(w)] = 1;
                stack.push_back(w);
            }
        }
    }
    return false;
}

bool projection_acyclic(const Tcdg& t) { return ChannelGraph(t).acyclic(); }

bool is_predecessor(const Tcdg& t, ChannelIndex a, ChannelIndex b) { return ChannelGraph(t).reaches(a, b); }

void write_edge_list(std::ostream& os, const Network& net, const Tcdg& t) {
    for (const Dependency& d : t.deps())
        os << net.name(d.src) << " -> " << net.name(d.dst) << " [" << net.name(d.target) << "]\n";
}

void write_dot(std::ostream& os, const Network& net, const Tcdg& t, std::string_view graph_name) {
    os << "digraph " << graph_name << " {\n";
    for (std::size_t i = 0; i < net.channel_count(); ++i)
        os << "  \"" << net.name(channel_at(i)) << "\";\n";
    for (const Dependency& d : t.deps())
        os << "  \"" << net.name(d.src) << "\" -> \"" << net.name(d.dst) << "\" [label=\""
           << net.name(d.target) << "\"];\n";
    os << "}\n";
}

}  // namespace upr
