#include "upr/routing.hpp"

#include <algorithm>
#include <array>
#include <ostream>
#include <stdexcept>

namespace upr {

RoutingFunction::RoutingFunction(const Network& net)
    : channels_(net.channel_count()),
      targets_(net.processing_count()),
      routable_(net.channel_count()),
      table_(net.channel_count() * net.processing_count()) {
    for (std::size_t i = 0; i < channels_; ++i)
        routable_[i] = net.channel_class(channel_at(i)) != ChannelClass::Delivery;
}

std::size_t RoutingFunction::cell(ChannelIndex c, NodeId target) const {
    if (idx(c) >= channels_) throw std::out_of_range("channel outside routing table");
    if (target.kind != NodeKind::Processing || target.index >= targets_)
        throw std::out_of_range("routing targets are processing nodes");
    if (!routable_[idx(c)]) throw std::logic_error("delivery channels terminate routes");
    return idx(c) * targets_ + target.index;
}

const ChannelSet& RoutingFunction::route(ChannelIndex c, NodeId target) const {
    return table_[cell(c, target)];
}

LocalRoutingFunction RoutingFunction::local(ChannelIndex c) const {
    LocalRoutingFunction l{c, {}};
    if (idx(c) >= channels_) throw std::out_of_range("channel outside routing table");
    if (!routable_[idx(c)]) return l;
    for (std::uint32_t t = 0; t < targets_; ++t) {
        const ChannelSet& s = table_[idx(c) * targets_ + t];
        if (!s.empty()) l.choices.emplace(processing_node(t), s);
    }
    return l;
}

void RoutingFunction::assign_local(const LocalRoutingFunction& local) {
    if (idx(local.channel) >= channels_) throw std::out_of_range("channel outside routing table");
    if (!routable_[idx(local.channel)]) {
        if (!local.choices.empty()) throw std::logic_error("delivery channels terminate routes");
        return;
    }
    for (std::uint32_t t = 0; t < targets_; ++t) table_[idx(local.channel) * targets_ + t].clear();
    for (const auto& [target, outs] : local.choices) {
        ChannelSet& s = table_[cell(local.channel, target)];
        s = outs;
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
}

bool RoutingFunction::add_choice(ChannelIndex c, NodeId target, ChannelIndex out) {
    ChannelSet& s = table_[cell(c, target)];
    auto it = std::lower_bound(s.begin(), s.end(), out);
    if (it != s.end() && *it == out) return false;
    s.insert(it, out);
    return true;
}

bool RoutingFunction::remove_choice(ChannelIndex c, NodeId target, ChannelIndex out) {
    ChannelSet& s = table_[cell(c, target)];
    auto it = std::lower_bound(s.begin(), s.end(), out);
    if (it == s.end() || *it != out) return false;
    s.erase(it);
    return true;
}

RoutingFunction extend(const Network& net, RoutingFunction r, ChannelIndex c, NodeId target,
                       ChannelIndex out) {
    if (net.channel_class(out) == ChannelClass::Injection || net.channel(out).src != net.channel(c).dst)
        throw std::invalid_argument("output " + net.name(out) + " does not leave " +
                                    net.name(net.channel(c).dst));
    r.add_choice(c, target, out);
    return r;
}

RoutingFunction reduce(RoutingFunction r, ChannelIndex c, NodeId target, ChannelIndex out) {
    if (!r.remove_choice(c, target, out)) throw std::invalid_argument("routing choice not present");
    return r;
}

bool is_connected(const RoutingFunction& r, const Network& net) {
    const auto pes = net.processing_nodes();
    std::vector<char> seen(net.channel_count());
    std::vector<ChannelIndex> stack;
    for (NodeId t : pes) {
        for (std::uint32_t lane = 0; lane < net.lanes(); ++lane) {
            const ChannelIndex goal = net.delivery_channel(t, lane);
            for (NodeId s : pes) {
                if (s == t) continue;
                std::fill(seen.begin(), seen.end(), 0);
                stack.assign(1, net.injection_channel(s, lane));
                bool found = false;
                while (!stack.empty() && !found) {
                    const ChannelIndex c = stack.back();
                    stack.pop_back();
                    if (seen[idx(c)]) continue;
                    seen[idx(c)] = 1;
                    if (c == goal) {
                        found = true;
                        break;
                    }
                    if (net.channel_class(c) == ChannelClass::Delivery) continue;
                    for (ChannelIndex o : r.route(c, t)) stack.push_back(o);
                }
                if (!found) return false;
            }
        }
    }
    return true;
}

// ---- mesh routing algorithms -------------------------------------------

Direction mesh_direction(const Network& net, ChannelIndex c) {
    if (!net.mesh_shape()) throw std::invalid_argument("mesh_direction needs a mesh network");
    if (net.channel_class(c) != ChannelClass::Network)
        throw std::invalid_argument("only network channels have a direction");
    const ChannelId& ch = net.channel(c);
    const auto [sx, sy] = net.mesh_coordinates(ch.src);
    const auto [dx, dy] = net.mesh_coordinates(ch.dst);
    if (dx == sx + 1) return Direction::East;
    if (dx + 1 == sx) return Direction::West;
    if (dy == sy + 1) return Direction::North;
    return Direction::South;
}

namespace {

bool is_x(Direction d) { return d == Direction::East || d == Direction::West; }
bool is_positive(Direction d) { return d == Direction::East || d == Direction::North; }

}  // namespace

bool xy_turn(Direction in, Direction out, std::uint32_t, std::uint32_t) {
    return !(!is_x(in) && is_x(out));
}

bool yx_turn(Direction in, Direction out, std::uint32_t, std::uint32_t) {
    return !(is_x(in) && !is_x(out));
}

bool odd_even_turn(Direction in, Direction out, std::uint32_t x, std::uint32_t) {
    const bool even = x % 2 == 0;
    if (even && in == Direction::East && !is_x(out)) return false;
    if (!even && !is_x(in) && out == Direction::West) return false;
    return true;
}

bool negative_first_turn(Direction in, Direction out, std::uint32_t, std::uint32_t) {
    return !(is_positive(in) && !is_positive(out));
}

RoutingFunction make_turn_model_routing(const Network& net, const TurnRule& rule) {
    if (!net.mesh_shape()) throw std::invalid_argument("turn-model routing needs a mesh network");
    const std::size_t nc = net.channel_count();
    const auto pes = net.processing_nodes();

    auto target_router = [&](NodeId t) { return net.attached_router(t); };
    auto minimal = [&](ChannelIndex o, NodeId t) {
        const ChannelId& ch = net.channel(o);
        return *net.hop_distance(ch.dst, target_router(t)) + 1 ==
               *net.hop_distance(ch.src, target_router(t));
    };
    auto turn_ok = [&](ChannelIndex in, ChannelIndex out) {
        if (net.channel_class(in) != ChannelClass::Network) return true;
        const auto [x, y] = net.mesh_coordinates(net.channel(in).dst);
        return rule(mesh_direction(net, in), mesh_direction(net, out), x, y);
    };

    // reach[c][t]: a legal minimal continuation from network channel c to t.
    // Filled in increasing remaining distance so lookups are always ready.
    std::vector<char> reach(nc * pes.size(), 0);
    std::vector<ChannelIndex> network_channels;
    for (std::size_t i = 0; i < nc; ++i)
        if (net.channel_class(channel_at(i)) == ChannelClass::Network) network_channels.push_back(channel_at(i));
    for (NodeId t : pes) {
        std::vector<ChannelIndex> order = network_channels;
        std::stable_sort(order.begin(), order.end(), [&](ChannelIndex a, ChannelIndex b) {
            return *net.hop_distance(net.channel(a).dst, target_router(t)) <
                   *net.hop_distance(net.channel(b).dst, target_router(t));
        });
        for (ChannelIndex c : order) {
            const NodeId here = net.channel(c).dst;
            bool ok = here == target_router(t);
            for (ChannelIndex o : net.output_channels(here)) {
                if (ok) break;
                if (net.channel_class(o) != ChannelClass::Network) continue;
                if (net.channel(o).lane != net.channel(c).lane) continue;
                ok = minimal(o, t) && turn_ok(c, o) && reach[idx(o) * pes.size() + t.index];
            }
            reach[idx(c) * pes.size() + t.index] = ok;
        }
    }

    RoutingFunction r(net);
    for (std::size_t i = 0; i < nc; ++i) {
        const ChannelIndex c = channel_at(i);
        if (net.channel_class(c) == ChannelClass::Delivery) continue;
        const ChannelId& ch = net.channel(c);
        const NodeId here = ch.dst;
        for (NodeId t : pes) {
            if (here == target_router(t)) {
                r.add_choice(c, t, net.delivery_channel(t, ch.lane));
                continue;
            }
            for (ChannelIndex o : net.output_channels(here)) {
                if (net.channel_class(o) != ChannelClass::Network || net.channel(o).lane != ch.lane) continue;
                if (minimal(o, t) && turn_ok(c, o) && reach[idx(o) * pes.size() + t.index])
                    r.add_choice(c, t, o);
            }
        }
    }
    return r;
}

RoutingFunction make_xy(const Network& net) { return make_turn_model_routing(net, xy_turn); }
RoutingFunction make_yx(const Network& net) { return make_turn_model_routing(net, yx_turn); }
RoutingFunction make_odd_even(const Network& net) { return make_turn_model_routing(net, odd_even_turn); }
RoutingFunction make_negative_first(const Network& net) {
    return make_turn_model_routing(net, negative_first_turn);
}

const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names{"xy", "yx", "oe", "nf"};
    return names;
}

bool is_algorithm_name(std::string_view name) {
    const auto& n = algorithm_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

TurnRule turn_rule(std::string_view name) {
    if (name == "xy") return xy_turn;
    if (name == "yx") return yx_turn;
    if (name == "oe") return odd_even_turn;
    if (name == "nf") return negative_first_turn;
    throw std::invalid_argument("unknown routing algorithm '" + std::string(name) + "'");
}

RoutingFunction make_routing(const Network& net, std::string_view name) {
    return make_turn_model_routing(net, turn_rule(name));
}

void write_routing_table(std::ostream& os, const Network& net, const RoutingFunction& r) {
    for (std::size_t i = 0; i < net.channel_count(); ++i) {
        const ChannelIndex c = channel_at(i);
        if (net.channel_class(c) == ChannelClass::Delivery) continue;
        for (NodeId t : net.processing_nodes()) {
            const ChannelSet& outs = r.route(c, t);
            if (outs.empty()) continue;
            os << net.name(c) << ' ' << net.name(t) << " :";
            for (ChannelIndex o : outs) os << ' ' << net.name(o);
            os << '\n';
        }
    }
}

}  // namespace upr
