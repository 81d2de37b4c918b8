#include "upr/topology.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

namespace upr {

namespace {

constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

ChannelClass classify(const ChannelId& c) {
    const bool from_pe = c.src.kind == NodeKind::Processing;
    const bool to_pe = c.dst.kind == NodeKind::Processing;
    if (from_pe && to_pe) throw std::invalid_argument("channel between two processing nodes");
    if (from_pe) return ChannelClass::Injection;
    if (to_pe) return ChannelClass::Delivery;
    return ChannelClass::Network;
}

std::optional<NodeId> parse_node(std::string_view s) {
    if (s.size() < 2) return std::nullopt;
    NodeKind kind;
    if (s[0] == 'R') kind = NodeKind::Router;
    else if (s[0] == 'P') kind = NodeKind::Processing;
    else return std::nullopt;
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return NodeId{kind, v};
}

}  // namespace

Network::Builder::Builder(std::uint32_t lanes) : lanes_(lanes) {
    if (lanes == 0) throw std::invalid_argument("lanes must be positive");
}

NodeId Network::Builder::add_router() { return router_node(routers_++); }

NodeId Network::Builder::add_processing(NodeId router) {
    if (router.kind != NodeKind::Router || router.index >= routers_)
        throw std::invalid_argument("processing node must attach to an existing router");
    const NodeId pe = processing_node(static_cast<std::uint32_t>(attach_.size()));
    attach_.push_back(router.index);
    for (std::uint32_t l = 0; l < lanes_; ++l) {
        channels_.push_back({pe, router, l});
        channels_.push_back({router, pe, l});
    }
    return pe;
}

void Network::Builder::add_channel(NodeId from, NodeId to) {
    if (from.kind != NodeKind::Router || to.kind != NodeKind::Router || from.index >= routers_ ||
        to.index >= routers_ || from == to)
        throw std::invalid_argument("network channels connect two distinct existing routers");
    for (std::uint32_t l = 0; l < lanes_; ++l) channels_.push_back({from, to, l});
}

void Network::Builder::add_link(NodeId a, NodeId b) {
    add_channel(a, b);
    add_channel(b, a);
}

void Network::Builder::set_mesh_shape(MeshShape shape) { mesh_ = shape; }

Network Network::Builder::build() && {
    Network net;
    net.lanes_ = lanes_;
    net.router_count_ = routers_;
    net.attach_ = std::move(attach_);
    net.mesh_ = mesh_;
    net.channels_ = std::move(channels_);

    std::map<ChannelId, std::size_t> seen;
    for (std::size_t i = 0; i < net.channels_.size(); ++i) {
        if (!seen.emplace(net.channels_[i], i).second)
            throw std::invalid_argument("duplicate channel " + net.name(net.channels_[i]));
    }

    const std::size_t nodes = net.router_count_ + net.attach_.size();
    net.out_.assign(nodes, {});
    net.in_.assign(nodes, {});
    net.attached_by_router_.assign(net.router_count_, {});
    net.injection_.assign(net.attach_.size() * lanes_, ChannelIndex{});
    net.delivery_.assign(net.attach_.size() * lanes_, ChannelIndex{});
    for (std::uint32_t p = 0; p < net.attach_.size(); ++p)
        net.attached_by_router_[net.attach_[p]].push_back(processing_node(p));

    net.classes_.reserve(net.channels_.size());
    for (std::size_t i = 0; i < net.channels_.size(); ++i) {
        const ChannelId& c = net.channels_[i];
        const ChannelClass cls = classify(c);
        net.classes_.push_back(cls);
        net.out_[net.node_slot(c.src)].push_back(channel_at(i));
        net.in_[net.node_slot(c.dst)].push_back(channel_at(i));
        if (cls == ChannelClass::Injection) net.injection_[c.src.index * lanes_ + c.lane] = channel_at(i);
        if (cls == ChannelClass::Delivery) net.delivery_[c.dst.index * lanes_ + c.lane] = channel_at(i);
    }

    // All-pairs BFS over the router graph (lane 0 suffices: lanes share links).
    const std::size_t r = net.router_count_;
    net.distance_.assign(r * r, kUnreachable);
    for (std::size_t s = 0; s < r; ++s) {
        std::deque<std::size_t> q{s};
        net.distance_[s * r + s] = 0;
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop_front();
            for (ChannelIndex c : net.out_[u]) {
                const ChannelId& ch = net.channels_[idx(c)];
                if (ch.dst.kind != NodeKind::Router) continue;
                std::uint32_t& d = net.distance_[s * r + ch.dst.index];
                if (d == kUnreachable) {
                    d = net.distance_[s * r + u] + 1;
                    q.push_back(ch.dst.index);
                }
            }
        }
    }
    return net;
}

std::size_t Network::node_slot(NodeId n) const {
    if (!contains(n)) throw std::out_of_range("unknown node " + name(n));
    return n.kind == NodeKind::Router ? n.index : router_count_ + n.index;
}

bool Network::contains(NodeId n) const {
    return n.kind == NodeKind::Router ? n.index < router_count_ : n.index < attach_.size();
}

std::optional<ChannelIndex> Network::find(const ChannelId& c) const {
    if (!contains(c.src) || !contains(c.dst)) return std::nullopt;
    for (ChannelIndex i : out_[node_slot(c.src)])
        if (channels_[idx(i)] == c) return i;
    return std::nullopt;
}

ChannelIndex Network::index_of(const ChannelId& c) const {
    if (auto i = find(c)) return *i;
    throw std::out_of_range("unknown channel " + name(c));
}

std::span<const ChannelIndex> Network::output_channels(NodeId n) const { return out_[node_slot(n)]; }
std::span<const ChannelIndex> Network::input_channels(NodeId n) const { return in_[node_slot(n)]; }

NodeId Network::attached_router(NodeId processing) const {
    if (processing.kind != NodeKind::Processing || !contains(processing))
        throw std::out_of_range("not a processing node: " + name(processing));
    return router_node(attach_[processing.index]);
}

std::span<const NodeId> Network::attached_processing(NodeId router) const {
    if (router.kind != NodeKind::Router || !contains(router))
        throw std::out_of_range("not a router: " + name(router));
    return attached_by_router_[router.index];
}

ChannelIndex Network::injection_channel(NodeId processing, std::uint32_t lane) const {
    attached_router(processing);
    if (lane >= lanes_) throw std::out_of_range("lane out of range");
    return injection_[processing.index * lanes_ + lane];
}

ChannelIndex Network::delivery_channel(NodeId processing, std::uint32_t lane) const {
    attached_router(processing);
    if (lane >= lanes_) throw std::out_of_range("lane out of range");
    return delivery_[processing.index * lanes_ + lane];
}

std::vector<NodeId> Network::processing_nodes() const {
    std::vector<NodeId> v;
    for (std::uint32_t i = 0; i < attach_.size(); ++i) v.push_back(processing_node(i));
    return v;
}

std::vector<NodeId> Network::routers() const {
    std::vector<NodeId> v;
    for (std::uint32_t i = 0; i < router_count_; ++i) v.push_back(router_node(i));
    return v;
}

std::optional<std::uint32_t> Network::hop_distance(NodeId from_router, NodeId to_router) const {
    if (from_router.kind != NodeKind::Router || to_router.kind != NodeKind::Router ||
        !contains(from_router) || !contains(to_router))
        throw std::out_of_range("hop_distance expects routers");
    const std::uint32_t d = distance_[from_router.index * router_count_ + to_router.index];
    if (d == kUnreachable) return std::nullopt;
    return d;
}

bool Network::routers_strongly_connected() const {
    return std::none_of(distance_.begin(), distance_.end(),
                        [](std::uint32_t d) { return d == kUnreachable; });
}

std::pair<std::uint32_t, std::uint32_t> Network::mesh_coordinates(NodeId router) const {
    if (!mesh_) throw std::logic_error("network is not a mesh");
    if (router.kind != NodeKind::Router || !contains(router)) throw std::out_of_range("not a router");
    return {router.index % mesh_->width, router.index / mesh_->width};
}

std::string Network::name(NodeId n) const {
    return (n.kind == NodeKind::Router ? "R" : "P") + std::to_string(n.index);
}

std::string Network::name(const ChannelId& c) const {
    std::string s = name(c.src) + ">" + name(c.dst);
    if (c.lane != 0) s += "/" + std::to_string(c.lane);
    return s;
}

std::string Network::name(ChannelIndex c) const { return name(channel(c)); }

std::optional<ChannelIndex> Network::parse_channel(std::string_view text) const {
    std::uint32_t lane = 0;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto tail = text.substr(slash + 1);
        auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), lane);
        if (ec != std::errc{} || ptr != tail.data() + tail.size()) return std::nullopt;
        text = text.substr(0, slash);
    }
    const auto gt = text.find('>');
    if (gt == std::string_view::npos) return std::nullopt;
    auto src = parse_node(text.substr(0, gt));
    auto dst = parse_node(text.substr(gt + 1));
    if (!src || !dst) return std::nullopt;
    return find({*src, *dst, lane});
}

Network build_mesh(std::uint32_t width, std::uint32_t height, std::uint32_t lanes) {
    if (width == 0 || height == 0) throw std::invalid_argument("mesh dimensions must be positive");
    if (static_cast<std::uint64_t>(width) * height < 2)
        throw std::invalid_argument("mesh needs at least two routers");
    Network::Builder b(lanes);
    for (std::uint32_t i = 0; i < width * height; ++i) b.add_router();
    for (std::uint32_t i = 0; i < width * height; ++i) b.add_processing(router_node(i));
    for (std::uint32_t y = 0; y < height; ++y) {
        for (std::uint32_t x = 0; x < width; ++x) {
            const NodeId here = router_node(y * width + x);
            if (x + 1 < width) b.add_link(here, router_node(y * width + x + 1));
            if (y + 1 < height) b.add_link(here, router_node((y + 1) * width + x));
        }
    }
    b.set_mesh_shape({width, height});
    return std::move(b).build();
}

}  // namespace upr
