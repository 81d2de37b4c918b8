#include <gtest/gtest.h>

#include <cstdlib>
#include <set>

#include "oracles.hpp"
#include "upr/topology.hpp"

using namespace upr;

TEST(Mesh, ChannelCountsMatchClosedForm) {
    for (std::uint32_t w = 1; w <= 6; ++w)
        for (std::uint32_t h = 1; h <= 6; ++h) {
            if (w * h < 2) continue;
            for (std::uint32_t lanes : {1u, 2u}) {
                const Network net = build_mesh(w, h, lanes);
                EXPECT_EQ(net.channel_count(), oracle::mesh_channel_count(w, h, lanes)) << w << "x" << h;
                EXPECT_EQ(net.router_count(), w * h);
                EXPECT_EQ(net.processing_count(), w * h);
            }
        }
    EXPECT_EQ(build_mesh(5, 5).channel_count(), 130u);
}

TEST(Mesh, ClassesPartitionChannels) {
    const Network net = build_mesh(4, 3);
    std::size_t inj = 0, nw = 0, del = 0;
    for (std::size_t i = 0; i < net.channel_count(); ++i) {
        const ChannelIndex c = channel_at(i);
        const ChannelId& id = net.channel(c);
        switch (net.channel_class(c)) {
            case ChannelClass::Injection:
                ++inj;
                EXPECT_EQ(id.src.kind, NodeKind::Processing);
                EXPECT_EQ(id.dst, net.attached_router(id.src));
                break;
            case ChannelClass::Network:
                ++nw;
                EXPECT_EQ(id.src.kind, NodeKind::Router);
                EXPECT_EQ(id.dst.kind, NodeKind::Router);
                break;
            case ChannelClass::Delivery:
                ++del;
                EXPECT_EQ(id.dst.kind, NodeKind::Processing);
                break;
        }
    }
    EXPECT_EQ(inj, 12u);
    EXPECT_EQ(del, 12u);
    EXPECT_EQ(nw, 2u * (3 * 3 + 4 * 2));
}

TEST(Mesh, AdjacencyListsAreConsistent) {
    const Network net = build_mesh(3, 4);
    for (std::size_t i = 0; i < net.channel_count(); ++i) {
        const ChannelIndex c = channel_at(i);
        const auto outs = net.output_channels(net.channel(c).src);
        const auto ins = net.input_channels(net.channel(c).dst);
        EXPECT_NE(std::find(outs.begin(), outs.end(), c), outs.end());
        EXPECT_NE(std::find(ins.begin(), ins.end(), c), ins.end());
    }
}

TEST(Mesh, HopDistanceIsManhattan) {
    const Network net = build_mesh(4, 3);
    for (NodeId a : net.routers())
        for (NodeId b : net.routers()) {
            auto [ax, ay] = net.mesh_coordinates(a);
            auto [bx, by] = net.mesh_coordinates(b);
            const auto d = net.hop_distance(a, b);
            ASSERT_TRUE(d.has_value());
            EXPECT_EQ(*d, static_cast<std::uint32_t>(std::abs(int(ax) - int(bx)) + std::abs(int(ay) - int(by))));
        }
    EXPECT_TRUE(net.routers_strongly_connected());
}

TEST(Mesh, CoordinatesFollowRowMajorIndex) {
    const Network net = build_mesh(5, 5);
    EXPECT_EQ(net.mesh_coordinates(router_node(0)), std::make_pair(0u, 0u));
    EXPECT_EQ(net.mesh_coordinates(router_node(7)), std::make_pair(2u, 1u));
    EXPECT_EQ(net.mesh_coordinates(router_node(24)), std::make_pair(4u, 4u));
}

TEST(Mesh, DegenerateShapesRejected) {
    EXPECT_THROW(build_mesh(0, 3), std::invalid_argument);
    EXPECT_THROW(build_mesh(1, 1), std::invalid_argument);
    EXPECT_THROW(build_mesh(2, 2, 0), std::invalid_argument);
}

TEST(Names, RoundTripEveryChannel) {
    const Network net = build_mesh(3, 3, 2);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < net.channel_count(); ++i) {
        const ChannelIndex c = channel_at(i);
        const std::string n = net.name(c);
        EXPECT_TRUE(seen.insert(n).second) << n;
        const auto back = net.parse_channel(n);
        ASSERT_TRUE(back.has_value()) << n;
        EXPECT_EQ(*back, c);
    }
    EXPECT_EQ(net.name(net.injection_channel(processing_node(4), 1)), "P4>R4/1");
}

TEST(Names, MalformedTextRejected) {
    const Network net = build_mesh(2, 2);
    EXPECT_FALSE(net.parse_channel("R0R1"));
    EXPECT_FALSE(net.parse_channel("R0>R3"));  // diagonal, not a link
    EXPECT_FALSE(net.parse_channel("X0>R1"));
    EXPECT_FALSE(net.parse_channel("R0>R1/"));
    EXPECT_FALSE(net.parse_channel("R0>R1/1"));
}

TEST(Builder, RejectsInvalidChannels) {
    Network::Builder b;
    const NodeId r0 = b.add_router();
    const NodeId r1 = b.add_router();
    EXPECT_THROW(b.add_channel(r0, r0), std::invalid_argument);
    EXPECT_THROW(b.add_channel(r0, router_node(9)), std::invalid_argument);
    EXPECT_THROW(b.add_processing(router_node(5)), std::invalid_argument);
    b.add_link(r0, r1);
    b.add_channel(r0, r1);
    EXPECT_THROW(std::move(b).build(), std::invalid_argument);
}

TEST(Builder, IrregularTopology) {
    Network::Builder b;
    const NodeId r0 = b.add_router();
    const NodeId r1 = b.add_router();
    const NodeId r2 = b.add_router();
    b.add_processing(r0);
    b.add_processing(r2);
    b.add_link(r0, r1);
    b.add_channel(r1, r2);
    const Network net = std::move(b).build();
    EXPECT_EQ(net.channel_count(), 4u + 3u);
    EXPECT_EQ(net.hop_distance(r0, r2), 2u);
    EXPECT_FALSE(net.hop_distance(r2, r0).has_value());
    EXPECT_FALSE(net.routers_strongly_connected());
    EXPECT_FALSE(net.mesh_shape().has_value());
    EXPECT_THROW(net.mesh_coordinates(r0), std::logic_error);
}
