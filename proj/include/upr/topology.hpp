#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace upr {

enum class NodeKind : std::uint8_t { Processing, Router };

struct NodeId {
    NodeKind kind{NodeKind::Router};
    std::uint32_t index{0};

    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

constexpr NodeId router_node(std::uint32_t index) { return {NodeKind::Router, index}; }
constexpr NodeId processing_node(std::uint32_t index) { return {NodeKind::Processing, index}; }

// Structural channel identity: endpoints plus virtual-channel lane.
struct ChannelId {
    NodeId src;
    NodeId dst;
    std::uint32_t lane{0};

    friend auto operator<=>(const ChannelId&, const ChannelId&) = default;
};

enum class ChannelClass : std::uint8_t { Injection, Network, Delivery };

// Dense handle of a channel inside one Network. Only meaningful together
// with the network that issued it.
enum class ChannelIndex : std::uint32_t {};

constexpr std::size_t idx(ChannelIndex c) { return static_cast<std::size_t>(c); }
constexpr ChannelIndex channel_at(std::size_t i) { return static_cast<ChannelIndex>(i); }

struct MeshShape {
    std::uint32_t width{0};
    std::uint32_t height{0};
};

/// Directed channel multigraph over processing nodes and routers.
///
/// Immutable once built. Every processing node attaches to one router through
/// one injection and one delivery channel per lane; router-to-router channels
/// form the network class.
class Network {
public:
    class Builder {
    public:
        explicit Builder(std::uint32_t lanes = 1);

        NodeId add_router();
        /// Adds a processing node attached to `router` with its injection and
        /// delivery channels (one per lane).
        NodeId add_processing(NodeId router);
        /// Adds one unidirectional router-to-router channel per lane.
        void add_channel(NodeId from, NodeId to);
        /// Adds both directions of a physical link.
        void add_link(NodeId a, NodeId b);
        void set_mesh_shape(MeshShape shape);

        Network build() &&;

    private:
        std::uint32_t lanes_;
        std::uint32_t routers_{0};
        std::vector<std::uint32_t> attach_;
        std::vector<ChannelId> channels_;
        std::optional<MeshShape> mesh_;
    };

    std::size_t router_count() const { return router_count_; }
    std::size_t processing_count() const { return attach_.size(); }
    std::size_t channel_count() const { return channels_.size(); }
    std::uint32_t lanes() const { return lanes_; }

    bool contains(NodeId n) const;
    bool contains(ChannelId c) const { return find(c).has_value(); }

    const ChannelId& channel(ChannelIndex c) const { return channels_.at(idx(c)); }
    ChannelClass channel_class(ChannelIndex c) const { return classes_.at(idx(c)); }
    /// Throws std::out_of_range for a channel that is not part of the network.
    ChannelClass channel_class(const ChannelId& c) const { return channel_class(index_of(c)); }

    std::optional<ChannelIndex> find(const ChannelId& c) const;
    ChannelIndex index_of(const ChannelId& c) const;

    /// Channels with src = n (resp. dst = n), ordered by index.
    std::span<const ChannelIndex> output_channels(NodeId n) const;
    std::span<const ChannelIndex> input_channels(NodeId n) const;

    NodeId attached_router(NodeId processing) const;
    /// Processing nodes attached to a router, in index order.
    std::span<const NodeId> attached_processing(NodeId router) const;
    ChannelIndex injection_channel(NodeId processing, std::uint32_t lane = 0) const;
    ChannelIndex delivery_channel(NodeId processing, std::uint32_t lane = 0) const;

    std::vector<NodeId> processing_nodes() const;
    std::vector<NodeId> routers() const;

    /// Router-graph hop count (number of network channels) between routers;
    /// nullopt when unreachable.
    std::optional<std::uint32_t> hop_distance(NodeId from_router, NodeId to_router) const;

    bool routers_strongly_connected() const;

    const std::optional<MeshShape>& mesh_shape() const { return mesh_; }
    /// (x, y) of a router in a mesh built by build_mesh.
    std::pair<std::uint32_t, std::uint32_t> mesh_coordinates(NodeId router) const;

    std::string name(NodeId n) const;
    std::string name(ChannelIndex c) const;
    std::string name(const ChannelId& c) const;
    /// Inverse of name(ChannelIndex).
    std::optional<ChannelIndex> parse_channel(std::string_view text) const;

private:
    Network() = default;
    std::size_t node_slot(NodeId n) const;

    std::uint32_t lanes_{1};
    std::size_t router_count_{0};
    std::vector<std::uint32_t> attach_;
    std::vector<std::vector<NodeId>> attached_by_router_;
    std::vector<ChannelId> channels_;
    std::vector<ChannelClass> classes_;
    std::vector<std::vector<ChannelIndex>> out_;
    std::vector<std::vector<ChannelIndex>> in_;
    std::vector<ChannelIndex> injection_;  // [processing * lanes + lane]
    std::vector<ChannelIndex> delivery_;
    std::vector<std::uint32_t> distance_;  // router x router, UINT32_MAX = unreachable
    std::optional<MeshShape> mesh_;
};

/// width x height mesh, one processing node per router. Router (x, y) has
/// index y * width + x and links to its four neighbours when in range.
Network build_mesh(std::uint32_t width, std::uint32_t height, std::uint32_t lanes = 1);

}  // namespace upr
