#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "upr/topology.hpp"

namespace upr {

using ChannelSet = std::vector<ChannelIndex>;  // sorted, unique

/// Slice of a routing function at one input channel: target -> choices.
/// Only targets with a non-empty choice set are stored.
struct LocalRoutingFunction {
    ChannelIndex channel{};
    std::map<NodeId, ChannelSet> choices;

    friend bool operator==(const LocalRoutingFunction&, const LocalRoutingFunction&) = default;
};

/// Explicit table (input channel in C_I u C_N, target processing node) ->
/// set of output channels in C_N u C_D.
class RoutingFunction {
public:
    RoutingFunction() = default;
    explicit RoutingFunction(const Network& net);

    std::size_t channel_count() const { return channels_; }
    std::size_t target_count() const { return targets_; }

    /// Candidate outputs for a packet at the head of `c` bound to `target`.
    /// Throws std::logic_error for delivery channels.
    const ChannelSet& route(ChannelIndex c, NodeId target) const;

    LocalRoutingFunction local(ChannelIndex c) const;
    /// Overwrites every cell of `local.channel`.
    void assign_local(const LocalRoutingFunction& local);

    /// Adds `out` to the cell; returns false when already present. Adjacency
    /// is validated by the free function extend().
    bool add_choice(ChannelIndex c, NodeId target, ChannelIndex out);
    /// Removes `out` from the cell; returns false when absent.
    bool remove_choice(ChannelIndex c, NodeId target, ChannelIndex out);

    friend bool operator==(const RoutingFunction&, const RoutingFunction&) = default;

private:
    std::size_t cell(ChannelIndex c, NodeId target) const;

    std::size_t channels_{0};
    std::size_t targets_{0};
    std::vector<bool> routable_;  // false for delivery channels
    std::vector<ChannelSet> table_;
};

/// R' = R with `out` added to R(c, target). Throws std::invalid_argument when
/// `out` does not leave Dst(c).
RoutingFunction extend(const Network& net, RoutingFunction r, ChannelIndex c, NodeId target,
                       ChannelIndex out);
/// R'' = R with `out` removed from R(c, target). Throws std::invalid_argument
/// when the choice is absent.
RoutingFunction reduce(RoutingFunction r, ChannelIndex c, NodeId target, ChannelIndex out);

/// True iff from every injection channel the closure of route() reaches the
/// delivery channel of every other processing node.
bool is_connected(const RoutingFunction& r, const Network& net);

// ---- mesh routing algorithms -------------------------------------------

enum class Direction : std::uint8_t { East, West, North, South };

/// Direction of a network channel in a mesh (x grows east, y grows north).
Direction mesh_direction(const Network& net, ChannelIndex c);

/// Turn legality at router (x, y) for a packet arriving along `in` and
/// leaving along `out`.
using TurnRule = std::function<bool(Direction in, Direction out, std::uint32_t x, std::uint32_t y)>;

/// Table holding every minimal-path hop that is legal under `rule` and from
/// which a legal minimal continuation to the target exists. Lanes stay fixed
/// along a route. Throws std::invalid_argument on non-mesh networks.
RoutingFunction make_turn_model_routing(const Network& net, const TurnRule& rule);

RoutingFunction make_xy(const Network& net);
RoutingFunction make_yx(const Network& net);
RoutingFunction make_odd_even(const Network& net);
RoutingFunction make_negative_first(const Network& net);

bool xy_turn(Direction in, Direction out, std::uint32_t x, std::uint32_t y);
bool yx_turn(Direction in, Direction out, std::uint32_t x, std::uint32_t y);
bool odd_even_turn(Direction in, Direction out, std::uint32_t x, std::uint32_t y);
bool negative_first_turn(Direction in, Direction out, std::uint32_t x, std::uint32_t y);

/// Short algorithm names: xy, yx, oe, nf.
const std::vector<std::string>& algorithm_names();
bool is_algorithm_name(std::string_view name);
RoutingFunction make_routing(const Network& net, std::string_view name);
TurnRule turn_rule(std::string_view name);

/// One line per non-empty (channel, target) cell:
/// `<channel> <target> : <out> <out> ...`
void write_routing_table(std::ostream& os, const Network& net, const RoutingFunction& r);

}  // namespace upr
