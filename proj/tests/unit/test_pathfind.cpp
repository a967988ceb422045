#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "waynav/error.hpp"
#include "waynav/pathfind.hpp"

using namespace waynav;

namespace {

WaypointGraph grid_graph(int n, double spacing = 1.0) {
    const TerrainGrid g = oracle::flat(n, n, 1.0);
    GraphConfig cfg;
    cfg.spacing = spacing;
    cfg.vstep_max = 1.0;
    const WalkMask m = walkable_mask(g, cfg.slope_max_deg);
    return fill_gaps(generate(g, m, cfg), g, m);
}

NodeId at(const WaypointGraph& g, int i, int j) { return *g.find({i, j}); }

// Replaces the edge in direction d (and its twin) by an invalid copy.
WaypointGraph invalidate(const WaypointGraph& g, NodeId from, Direction d) {
    std::vector<Waypoint> nodes(g.nodes().begin(), g.nodes().end());
    std::vector<Edge> edges = g.edges();
    const NodeId to = g.edge(from, d)->to;
    for (Edge& e : edges)
        if ((e.from == from && e.to == to) || (e.from == to && e.to == from)) {
            e.valid = false;
            e.reason = EdgeFault::detour;
        }
    return WaypointGraph::from_parts(g.config(), nodes, edges);
}

}  // namespace

TEST(Action, CodesAndOpposites) {
    EXPECT_EQ(code(Action::stay), 0);
    EXPECT_EQ(code(Action::N), 1);
    EXPECT_EQ(code(Action::NW), 8);
    EXPECT_EQ(opposite(Action::N), Action::S);
    EXPECT_EQ(opposite(Action::NE), Action::SW);
    EXPECT_EQ(opposite(Action::stay), Action::stay);
    EXPECT_FALSE(action_from_code(9));
    EXPECT_FALSE(action_from_code(-1));
    for (int c = 0; c < kActionCount; ++c) EXPECT_EQ(code(*action_from_code(c)), c);
}

TEST(ActionMask, InteriorAndCorner) {
    const WaypointGraph g = grid_graph(3);
    const ActionMask inner = action_mask(g, at(g, 1, 1));
    for (bool b : inner) EXPECT_TRUE(b);
    const ActionMask sw = action_mask(g, at(g, 0, 0));
    const ActionMask expect = {true, true, true, true, false, false, false, false, false};
    EXPECT_EQ(sw, expect);
}

TEST(ActionMask, InvalidatedEdge) {
    const WaypointGraph g = grid_graph(3);
    const NodeId c = at(g, 1, 1);
    const WaypointGraph h = invalidate(g, c, Direction::E);
    ActionMask m = action_mask(h, c);
    EXPECT_FALSE(m[code(Action::E)]);
    m[code(Action::E)] = true;
    EXPECT_EQ(m, action_mask(g, c));
}

TEST(ActionMask, InvalidNodeRejected) {
    const WaypointGraph g = grid_graph(3);
    EXPECT_THROW(action_mask(g, 99), ContractError);
    EXPECT_THROW(action_mask(g, -1), ContractError);
    // a graph with an invalid waypoint: ridge through the middle column
    const TerrainGrid t = oracle::from_function(5, 3, 1.0, [](int c, int) { return c == 2 ? 5.0 : 0.0; });
    GraphConfig cfg;
    cfg.spacing = 1.0;
    const WalkMask m = walkable_mask(t, 45);
    const WaypointGraph r = generate(t, m, cfg);
    for (const Waypoint& w : r.nodes())
        if (!w.valid) EXPECT_THROW(action_mask(r, w.id), ContractError);
}

TEST(ApplyAction, MovesAndErrors) {
    const WaypointGraph g = grid_graph(3);
    const NodeId o = at(g, 0, 0);
    EXPECT_EQ(apply_action(g, o, Action::stay), o);
    EXPECT_EQ(apply_action(g, o, Action::N), at(g, 0, 1));
    EXPECT_THROW(apply_action(g, o, Action::SW), IllegalMoveError);
}

TEST(ApplyAction, OppositeReturns) {
    const WaypointGraph g = grid_graph(5);
    for (const Waypoint& w : g.nodes()) {
        const ActionMask m = action_mask(g, w.id);
        for (int c = 1; c < kActionCount; ++c) {
            if (!m[static_cast<std::size_t>(c)]) continue;
            const Action a = *action_from_code(c);
            const NodeId v = apply_action(g, w.id, a);
            EXPECT_EQ(apply_action(g, v, opposite(a)), w.id);
        }
    }
}

TEST(ShortestPath, TrivialCases) {
    const WaypointGraph g = grid_graph(3);
    const NodeId s = at(g, 0, 0);
    const PathResult self = shortest_path(g, s, s, CostMode::unit);
    EXPECT_EQ(self.nodes, std::vector<NodeId>{s});
    EXPECT_EQ(self.cost, 0.0);
    const PathResult line = shortest_path(g, at(g, 0, 0), at(g, 2, 0), CostMode::euclid);
    EXPECT_EQ(line.cost, 2.0);
    EXPECT_EQ(line.nodes, (std::vector<NodeId>{at(g, 0, 0), at(g, 1, 0), at(g, 2, 0)}));
    // in unit mode the bent route via (1, 1) costs the same and has the lower id
    const PathResult hops = shortest_path(g, at(g, 0, 0), at(g, 2, 0), CostMode::unit);
    EXPECT_EQ(hops.cost, 2.0);
    EXPECT_EQ(hops.nodes, (std::vector<NodeId>{at(g, 0, 0), std::min(at(g, 1, 0), at(g, 1, 1)), at(g, 2, 0)}));
}

TEST(ShortestPath, NoPath) {
    const TerrainGrid t = oracle::from_function(9, 3, 1.0, [](int c, int) { return c == 4 ? 9.0 : 0.0; });
    GraphConfig cfg;
    cfg.spacing = 1.0;
    const WalkMask m = walkable_mask(t, 45);
    const WaypointGraph g = fill_gaps(generate(t, m, cfg), t, m);
    EXPECT_THROW(shortest_path(g, at(g, 0, 0), at(g, 8, 0), CostMode::unit), NoPathError);
}

TEST(ShortestPath, FullGridMatchesFloydWarshall) {
    const WaypointGraph g = grid_graph(6);
    std::mt19937_64 rng(2);
    for (CostMode mode : {CostMode::unit, CostMode::euclid}) {
        const auto fw = oracle::floyd_warshall(g, mode);
        for (int k = 0; k < 30; ++k) {
            const auto s = static_cast<NodeId>(rng() % g.size());
            const auto t = static_cast<NodeId>(rng() % g.size());
            const double c = shortest_path(g, s, t, mode).cost;
            EXPECT_NEAR(c, fw[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)], 1e-9 * (1 + c));
        }
    }
}

TEST(ShortestPath, LexicographicTieBreak) {
    // From the greedy construction over exact unit distances.
    const WaypointGraph g = grid_graph(5);
    const auto fw = oracle::floyd_warshall(g, CostMode::unit);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 50; ++k) {
        const auto s = static_cast<NodeId>(rng() % g.size());
        const auto t = static_cast<NodeId>(rng() % g.size());
        std::vector<NodeId> expect{s};
        while (expect.back() != t) {
            NodeId best = kNoNode;
            for (Direction d : kDirections) {
                const Edge* e = g.edge(expect.back(), d);
                if (!e || !e->valid) continue;
                if (1.0 + fw[static_cast<std::size_t>(e->to)][static_cast<std::size_t>(t)] ==
                        fw[static_cast<std::size_t>(expect.back())][static_cast<std::size_t>(t)] &&
                    (best == kNoNode || e->to < best))
                    best = e->to;
            }
            expect.push_back(best);
        }
        EXPECT_EQ(shortest_path(g, s, t, CostMode::unit).nodes, expect);
    }
}

TEST(ShortestPath, PathPropertiesOnRandomTerrain) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 6; ++trial) {
        const TerrainGrid t = oracle::random_terrain(rng, 14);
        const WalkMask m = walkable_mask(t, 45);
        if (m.count() == 0) continue;
        GraphConfig cfg;
        cfg.spacing = t.cell_size() * 2;
        cfg.vstep_max = cfg.spacing / 2;
        for (int r = 0; r < t.nrows(); ++r)
            for (int c = 0; c < t.ncols(); ++c)
                if (m.walkable(c, r)) cfg.seed_point = t.cell_center({c, r});
        const WaypointGraph g = fill_gaps(generate(t, m, cfg), t, m);
        if (g.size() > 60) continue;
        const auto unit = oracle::floyd_warshall(g, CostMode::unit);
        const auto eu = oracle::floyd_warshall(g, CostMode::euclid);
        double min_len = INFINITY;
        for (const Edge& e : g.edges())
            if (e.valid) min_len = std::min(min_len, e.euclid_len);
        for (const Waypoint& a : g.nodes()) {
            if (!a.valid) continue;
            for (const Waypoint& b : g.nodes()) {
                if (!b.valid) continue;
                const auto ia = static_cast<std::size_t>(a.id), ib = static_cast<std::size_t>(b.id);
                if (std::isinf(unit[ia][ib])) {
                    EXPECT_THROW(shortest_path(g, a.id, b.id, CostMode::unit), NoPathError);
                    continue;
                }
                const PathResult pu = shortest_path(g, a.id, b.id, CostMode::unit);
                const PathResult pe = shortest_path(g, a.id, b.id, CostMode::euclid);
                EXPECT_EQ(pu.cost, unit[ia][ib]);
                EXPECT_EQ(pu.cost, static_cast<double>(pu.nodes.size() - 1));
                EXPECT_NEAR(pe.cost, eu[ia][ib], 1e-9 * pe.cost);
                EXPECT_EQ(pu.cost, shortest_path(g, b.id, a.id, CostMode::unit).cost);
                EXPECT_NEAR(pe.cost, shortest_path(g, b.id, a.id, CostMode::euclid).cost, 1e-9 * pe.cost);
                EXPECT_LE(pu.cost, pe.cost / min_len + 1e-9);
                for (std::size_t k = 1; k < pe.nodes.size(); ++k) {
                    const Lattice p = g.node(pe.nodes[k - 1]).lattice, q = g.node(pe.nodes[k]).lattice;
                    const Edge* e = g.edge(pe.nodes[k - 1], *direction_between(q.i - p.i, q.j - p.j));
                    ASSERT_NE(e, nullptr);
                    EXPECT_TRUE(e->valid);
                }
                for (const Waypoint& c : g.nodes()) {
                    const auto ic = static_cast<std::size_t>(c.id);
                    if (c.valid && !std::isinf(unit[ib][ic])) EXPECT_LE(unit[ia][ic], unit[ia][ib] + unit[ib][ic]);
                }
            }
        }
    }
}

TEST(DistanceField, NextHopFollowsCanonicalPath) {
    const WaypointGraph g = grid_graph(6);
    const NodeId target = at(g, 5, 2);
    const auto field = distance_field(g, target, CostMode::unit);
    for (const Waypoint& w : g.nodes()) {
        const PathResult p = shortest_path(g, w.id, target, CostMode::unit);
        EXPECT_EQ(field[static_cast<std::size_t>(w.id)], p.cost);
        const auto hop = next_hop(g, field, w.id, CostMode::unit);
        if (w.id == target) {
            EXPECT_FALSE(hop);
        } else {
            ASSERT_TRUE(hop);
            EXPECT_EQ(*hop, p.nodes[1]);
        }
    }
}
