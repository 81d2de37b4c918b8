#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "upr/routing.hpp"
#include "upr/tcdg.hpp"

using namespace upr;

namespace {

std::set<Dependency> as_set(const Tcdg& t) {
    const auto d = t.deps();
    return {d.begin(), d.end()};
}

Tcdg from_set(std::size_t n, const std::set<Dependency>& deps) {
    Tcdg t(n);
    for (const Dependency& d : deps) t.add(d);
    return t;
}

// Random table: every cell gets 0..2 adjacent outputs, most often one.
RoutingFunction random_routing(const Network& net, std::mt19937_64& rng) {
    RoutingFunction r(net);
    std::uniform_int_distribution<int> count(0, 9);
    for (std::size_t i = 0; i < net.channel_count(); ++i) {
        const ChannelIndex c = channel_at(i);
        if (net.channel_class(c) == ChannelClass::Delivery) continue;
        const auto outs = net.output_channels(net.channel(c).dst);
        std::uniform_int_distribution<std::size_t> pick(0, outs.size() - 1);
        for (NodeId t : net.processing_nodes()) {
            const int k = count(rng);
            const int choices = k == 0 ? 0 : (k == 9 ? 2 : 1);
            for (int j = 0; j < choices; ++j) r.add_choice(c, t, outs[pick(rng)]);
        }
    }
    return r;
}

}  // namespace

TEST(TcdgOracle, TurnModelsMatchPathWalkOnSmallMeshes) {
    for (std::uint32_t w = 1; w <= 3; ++w)
        for (std::uint32_t h = 1; h <= 3; ++h) {
            if (w * h < 2) continue;
            const Network net = build_mesh(w, h);
            for (const std::string& alg : algorithm_names()) {
                const RoutingFunction r = make_routing(net, alg);
                bool looped = false;
                const auto expected = oracle::path_walk_tcdg(net, r, &looped);
                const Tcdg built = build_tcdg(net, r);
                EXPECT_FALSE(looped) << alg;
                EXPECT_EQ(as_set(built), expected) << alg << " on " << w << "x" << h;
                EXPECT_EQ(projection_acyclic(built), !oracle::closure_has_cycle(net.channel_count(), oracle::projection(expected)));
            }
        }
}

TEST(TcdgOracle, RandomTablesMatchPathWalk) {
    std::mt19937_64 rng(7);
    const Network net = build_mesh(2, 2);
    for (int trial = 0; trial < 200; ++trial) {
        const RoutingFunction r = random_routing(net, rng);
        const auto expected = oracle::path_walk_tcdg(net, r);
        const Tcdg built = build_tcdg(net, r);
        ASSERT_EQ(as_set(built), expected) << "trial " << trial;
        ASSERT_EQ(projection_acyclic(built), !oracle::closure_has_cycle(net.channel_count(), oracle::projection(expected)))
            << "trial " << trial;
    }
}

TEST(TcdgOracle, AcyclicityMatchesClosureOnRandomGraphs) {
    std::mt19937_64 rng(11);
    std::size_t cyclic = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 3 + trial % 12;
        const auto deps = oracle::random_deps(rng, n, trial % 20);
        const Tcdg t = from_set(n, deps);
        const bool has_cycle = oracle::closure_has_cycle(n, oracle::projection(deps));
        cyclic += has_cycle;
        ASSERT_EQ(projection_acyclic(t), !has_cycle) << "trial " << trial;
        const auto cycle = ChannelGraph(t).find_cycle();
        ASSERT_EQ(cycle.empty(), !has_cycle);
        // The reported cycle is a real closed walk.
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            const ChannelIndex a = cycle[i];
            const ChannelIndex b = cycle[(i + 1) % cycle.size()];
            ASSERT_TRUE(oracle::projection(deps).contains({idx(a), idx(b)}));
        }
    }
    EXPECT_GT(cyclic, 50u);
    EXPECT_LT(cyclic, 450u);
}

TEST(TcdgOracle, PredecessorMatchesBreadthFirstSearch) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 8;
        const auto deps = oracle::random_deps(rng, n, 10);
        const Tcdg t = from_set(n, deps);
        const auto arcs = oracle::projection(deps);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                ASSERT_EQ(is_predecessor(t, channel_at(a), channel_at(b)), oracle::bfs_reaches(n, arcs, a, b))
                    << a << "->" << b;
    }
}

TEST(Tcdg, MultigraphKeepsParallelArcs) {
    Tcdg t(4);
    const ChannelIndex a = channel_at(0), b = channel_at(1);
    EXPECT_TRUE(t.add({a, b, processing_node(0)}));
    EXPECT_TRUE(t.add({a, b, processing_node(1)}));
    EXPECT_FALSE(t.add({a, b, processing_node(1)}));
    EXPECT_EQ(t.size(), 2u);
    EXPECT_EQ(t.out_targets(a).size(), 2u);
    EXPECT_EQ(t.in_targets(b).size(), 2u);
    EXPECT_TRUE(t.has_out_target(a, processing_node(1)));
    EXPECT_FALSE(t.has_in_target(a, processing_node(1)));
    t.remove_target(processing_node(0));
    EXPECT_EQ(t.size(), 1u);
    EXPECT_TRUE(t.remove({a, b, processing_node(1)}));
    EXPECT_FALSE(t.remove({a, b, processing_node(1)}));
    EXPECT_TRUE(t.empty());
}

TEST(Tcdg, BlockedInjectionPrunesOnlyItsFlow) {
    const Network net = build_mesh(3, 1);
    const RoutingFunction r = make_xy(net);
    const NodeId t = processing_node(2);
    const ChannelIndex inj0 = net.injection_channel(processing_node(0));
    const Tcdg full = build_tcdg(net, r);
    const Tcdg blocked = build_tcdg(net, r, {{inj0, t}});
    EXPECT_TRUE(full.has_out_target(inj0, t));
    EXPECT_FALSE(blocked.has_out_target(inj0, t));
    // R0>R1 carries only P0's traffic for P2.
    EXPECT_FALSE(blocked.has_out_target(*net.parse_channel("R0>R1"), t));
    // R1>R2 still carries P1's traffic.
    EXPECT_TRUE(blocked.has_out_target(*net.parse_channel("R1>R2"), t));
}

TEST(Tcdg, IllegalTurnsLeaveEmptyCells) {
    const Network net = build_mesh(3, 3);
    const RoutingFunction r = make_xy(net);
    const Tcdg t = build_tcdg(net, r);
    // Northbound into R3 and then east would be a Y-to-X turn.
    const ChannelIndex north = *net.parse_channel("R0>R3");
    const NodeId other_column = processing_node(5);
    EXPECT_TRUE(r.route(north, other_column).empty());
    EXPECT_FALSE(t.has_out_target(north, other_column));
    EXPECT_EQ(r.route(north, processing_node(6)).size(), 1u);
}

TEST(Tcdg, RebuildTargetMatchesFullBuild) {
    const Network net = build_mesh(4, 4);
    RoutingFunction r = make_odd_even(net);
    Tcdg t = build_tcdg(net, r);
    const ChannelIndex inj = net.injection_channel(processing_node(0));
    const NodeId target = processing_node(15);
    const ChannelIndex drop = r.route(inj, target).front();
    r.remove_choice(inj, target, drop);
    rebuild_target(t, net, r, target);
    EXPECT_EQ(t, build_tcdg(net, r));
    const BlockedInjections blocked{{inj, target}};
    rebuild_target(t, net, r, target, blocked);
    EXPECT_EQ(t, build_tcdg(net, r, blocked));
}

TEST(Tcdg, TargetConformance) {
    const Network net = build_mesh(3, 3);
    const Tcdg xy = build_tcdg(net, make_xy(net));
    const Tcdg yx = build_tcdg(net, make_yx(net));
    const Tcdg nf = build_tcdg(net, make_negative_first(net));
    std::size_t xy_yx_fail = 0;
    for (std::size_t i = 0; i < net.channel_count(); ++i) {
        const ChannelIndex c = channel_at(i);
        if (net.channel_class(c) == ChannelClass::Delivery) continue;
        EXPECT_TRUE(is_target_conforming(xy, xy, c));
        if (!is_target_conforming(xy, yx, c)) ++xy_yx_fail;
    }
    EXPECT_GT(xy_yx_fail, 0u);
    // Delivery channels have no outgoing arcs, so only an empty incoming
    // target set conforms there.
    const ChannelIndex del = net.delivery_channel(processing_node(4));
    EXPECT_FALSE(is_target_conforming(nf, nf, del));
}

TEST(Tcdg, ComposeNextSwapsOneChannel) {
    const Network net = build_mesh(3, 3);
    const Tcdg p = build_tcdg(net, make_xy(net));
    const Tcdg i = build_tcdg(net, make_yx(net));
    const ChannelIndex c = *net.parse_channel("R4>R5");
    const Tcdg next = compose_next(p, i, c);
    EXPECT_TRUE(std::equal(next.out_deps(c).begin(), next.out_deps(c).end(), i.out_deps(c).begin(),
                           i.out_deps(c).end()));
    const ChannelIndex other = *net.parse_channel("R3>R4");
    EXPECT_TRUE(std::equal(next.out_deps(other).begin(), next.out_deps(other).end(), p.out_deps(other).begin(),
                           p.out_deps(other).end()));
}

TEST(Tcdg, ReverseTopologicalReadiness) {
    Tcdg t(3);
    t.add({channel_at(0), channel_at(1), processing_node(0)});
    t.add({channel_at(1), channel_at(2), processing_node(0)});
    std::vector<bool> up{false, false, true};
    EXPECT_TRUE(reverse_topological_ready(t, up, channel_at(1)));
    EXPECT_FALSE(reverse_topological_ready(t, up, channel_at(0)));
    EXPECT_TRUE(reverse_topological_ready(t, up, channel_at(2)));
    t.add({channel_at(2), channel_at(0), processing_node(1)});
    EXPECT_THROW(reverse_topological_ready(t, up, channel_at(1)), std::logic_error);
}

TEST(Tcdg, PredecessorIsReflexive) {
    Tcdg t(3);
    t.add({channel_at(0), channel_at(1), processing_node(0)});
    EXPECT_TRUE(is_predecessor(t, channel_at(0), channel_at(0)));
    EXPECT_TRUE(is_predecessor(t, channel_at(0), channel_at(1)));
    EXPECT_FALSE(is_predecessor(t, channel_at(1), channel_at(0)));
    EXPECT_FALSE(is_predecessor(t, channel_at(0), channel_at(2)));
}

TEST(Tcdg, TextOutputs) {
    const Network net = build_mesh(2, 1);
    const Tcdg t = build_tcdg(net, make_xy(net));
    std::ostringstream edges, dot;
    write_edge_list(edges, net, t);
    write_dot(dot, net, t, "g");
    EXPECT_NE(edges.str().find("P0>R0 -> R0>R1 [P1]"), std::string::npos) << edges.str();
    EXPECT_EQ(dot.str().rfind("digraph g {", 0), 0u) << dot.str();
    EXPECT_NE(dot.str().find("label=\"P1\""), std::string::npos) << dot.str();
}
