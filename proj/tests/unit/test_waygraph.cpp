#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "waynav/error.hpp"
#include "waynav/graph_io.hpp"
#include "waynav/waygraph.hpp"

using namespace waynav;

namespace {

GraphConfig config(double spacing, Vec2 seed, double detour = 1.5, double vstep = -1.0) {
    GraphConfig cfg;
    cfg.spacing = spacing;
    cfg.detour_max = detour;
    cfg.vstep_max = vstep < 0 ? spacing / 2 : vstep;
    cfg.seed_point = seed;
    return cfg;
}

WaypointGraph build(const TerrainGrid& g, const GraphConfig& cfg) {
    const WalkMask m = walkable_mask(g, cfg.slope_max_deg);
    return fill_gaps(generate(g, m, cfg), g, m);
}

// Terrain split by a steep ridge along column 10.
TerrainGrid split_map() {
    return oracle::from_function(21, 11, 1.0, [](int c, int) { return c == 10 ? 8.0 : 0.0; });
}

}  // namespace

TEST(Generate, FlatThreeByThree) {
    const TerrainGrid g = oracle::flat(3, 3, 1.0);
    const WaypointGraph graph = build(g, config(1.0, {1, 1}));
    EXPECT_EQ(graph.size(), 9u);
    EXPECT_EQ(graph.valid_node_count(), 9u);
    int ew = 0, ns = 0, diag = 0;
    for (const Edge& e : graph.edges()) {
        if (e.from > e.to) continue;
        EXPECT_TRUE(e.valid);
        const auto [di, dj] = lattice_delta(e.direction);
        if (dj == 0) ++ew;
        else if (di == 0) ++ns;
        else ++diag;
    }
    EXPECT_EQ(ew, 6);
    EXPECT_EQ(ns, 6);
    EXPECT_EQ(diag, 8);
    // every lattice pair within one step is joined, and no other pair
    std::size_t pairs = 0;
    for (const Waypoint& a : graph.nodes())
        for (const Waypoint& b : graph.nodes())
            if (a.id < b.id && std::max(std::abs(a.lattice.i - b.lattice.i), std::abs(a.lattice.j - b.lattice.j)) == 1)
                ++pairs;
    EXPECT_EQ(pairs, 20u);
    EXPECT_EQ(graph.directed_edge_count(), 40u);
}

TEST(Generate, FirstNodesFollowDirectionOrder) {
    const TerrainGrid g = oracle::flat(5, 5, 1.0);
    const WaypointGraph graph = generate(g, walkable_mask(g, 45), config(1.0, {2, 2}));
    const std::vector<Lattice> expected = {{0, 0}, {0, 1}, {1, 1}, {1, 0}, {1, -1},
                                           {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};
    for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_EQ(graph.node(static_cast<NodeId>(k)).lattice, expected[k]);
}

TEST(Generate, SeedOnUnwalkableCell) {
    const TerrainGrid g = split_map();
    EXPECT_THROW(generate(g, walkable_mask(g, 45), config(1.0, {10, 5})), SeedError);
    EXPECT_THROW(generate(g, walkable_mask(g, 45), config(1.0, {-3, 5})), SeedError);
}

TEST(Generate, ConfigErrors) {
    const TerrainGrid g = oracle::flat(5, 5, 2.0);
    const WalkMask m = walkable_mask(g, 45);
    EXPECT_THROW(generate(g, m, config(0.4, {0, 0})), ConfigError);
    EXPECT_NO_THROW(generate(g, m, config(0.5, {0, 0})));
    EXPECT_THROW(generate(g, m, config(2.0, {0, 0}, 1.0)), ConfigError);
    GraphConfig other = config(2.0, {0, 0});
    other.slope_max_deg = 30;
    EXPECT_THROW(generate(g, m, other), ConfigError);
}

TEST(Generate, SplitMapStaysWestUntilGapFill) {
    const TerrainGrid g = split_map();
    const WalkMask m = walkable_mask(g, 45);
    const GraphConfig cfg = config(1.0, {2, 5});
    const WaypointGraph west = generate(g, m, cfg);
    for (const Waypoint& w : west.nodes())
        if (w.valid) EXPECT_LT(w.position.x, 10.0);
    // BFS reachability over walkable lattice points, independent of the library
    const auto census = oracle::lattice_census(g, cfg);
    std::set<std::pair<int, int>> seen{{0, 0}}, frontier{{0, 0}};
    while (!frontier.empty()) {
        std::set<std::pair<int, int>> next;
        for (auto [i, j] : frontier)
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    const auto it = census.find({i + di, j + dj});
                    if (it != census.end() && it->second && seen.insert(it->first).second) next.insert(it->first);
                }
        frontier = std::move(next);
    }
    EXPECT_EQ(west.valid_node_count(), seen.size());

    const WaypointGraph full = fill_gaps(west, g, m);
    std::size_t walkable = 0;
    for (const auto& [ij, ok] : census) walkable += ok;
    EXPECT_EQ(full.valid_node_count(), walkable);
    EXPECT_GT(full.valid_node_count(), west.valid_node_count());
    for (std::size_t k = 0; k < west.size(); ++k)
        EXPECT_EQ(full.node(static_cast<NodeId>(k)), west.node(static_cast<NodeId>(k)));
}

TEST(FillGaps, Idempotent) {
    const TerrainGrid g = split_map();
    const WalkMask m = walkable_mask(g, 45);
    const WaypointGraph once = fill_gaps(generate(g, m, config(1.0, {2, 5})), g, m);
    EXPECT_TRUE(fill_gaps(once, g, m) == once);
}

TEST(FillGaps, CompleteGraphUnchanged) {
    const TerrainGrid g = oracle::flat(6, 6, 1.0);
    const WalkMask m = walkable_mask(g, 45);
    const WaypointGraph graph = generate(g, m, config(1.0, {0, 0}));
    EXPECT_TRUE(fill_gaps(graph, g, m) == graph);
}

TEST(FillGaps, UnwalkableRemainderUnchanged) {
    // east half is a steep ramp: nothing there can be added
    const TerrainGrid g = oracle::from_function(12, 6, 1.0, [](int c, int) { return c > 5 ? 3.0 * (c - 5) : 0.0; });
    const WalkMask m = walkable_mask(g, 45);
    const WaypointGraph graph = generate(g, m, config(1.0, {0, 0}));
    EXPECT_EQ(fill_gaps(graph, g, m).size(), graph.size());
}

TEST(FillGaps, MatchesLatticeCensusOnRandomTerrain) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 8; ++trial) {
        const TerrainGrid g = oracle::random_terrain(rng, 35);
        const WalkMask m = walkable_mask(g, 40);
        std::vector<Cell> open;
        for (int r = 0; r < g.nrows(); ++r)
            for (int c = 0; c < g.ncols(); ++c)
                if (m.walkable(c, r)) open.push_back({c, r});
        if (open.empty()) continue;
        GraphConfig cfg = config(g.cell_size() * 1.5, g.cell_center(open[rng() % open.size()]));
        cfg.slope_max_deg = 40;
        const WaypointGraph graph = fill_gaps(generate(g, m, cfg), g, m);
        const auto census = oracle::lattice_census(g, graph.config());
        ASSERT_EQ(graph.size(), census.size());
        for (const Waypoint& w : graph.nodes()) {
            const auto it = census.find({w.lattice.i, w.lattice.j});
            ASSERT_NE(it, census.end());
            EXPECT_EQ(w.valid, it->second);
        }
    }
}

TEST(ValidateEdge, FlatPairIsStraight) {
    const TerrainGrid g = oracle::flat(5, 5, 1.0);
    const WalkMask m = walkable_mask(g, 45);
    const WaypointGraph graph = generate(g, m, config(2.0, {0, 0}));
    const Edge* e = graph.edge(*graph.find({0, 0}), Direction::E);
    ASSERT_NE(e, nullptr);
    EXPECT_TRUE(e->valid);
    EXPECT_NEAR(e->walk_len / e->euclid_len, 1.0, 1e-6);
    const Edge* d = graph.edge(*graph.find({0, 0}), Direction::NE);
    EXPECT_NEAR(d->walk_len / d->euclid_len, 1.0, 1e-6);
}

TEST(ValidateEdge, VerticalThreshold) {
    // 0.3 m rise per metre: walkable, 0.6 m per 2 m edge
    const TerrainGrid g = oracle::from_function(7, 3, 1.0, [](int c, int) { return 0.3 * c; });
    const WalkMask m = walkable_mask(g, 45);
    const WaypointGraph tight = generate(g, m, config(2.0, {0, 0}, 1.5, 0.5));
    const Edge* e = tight.edge(*tight.find({0, 0}), Direction::E);
    EXPECT_FALSE(e->valid);
    EXPECT_EQ(e->reason, EdgeFault::vertical);
    const WaypointGraph loose = generate(g, m, config(2.0, {0, 0}, 1.5, 0.6));
    EXPECT_TRUE(loose.edge(*loose.find({0, 0}), Direction::E)->valid);
}

TEST(ValidateEdge, UCorridorIsADetour) {
    // walkable cells form a U: column 0, row 0, column 2 (rows 0..2)
    const TerrainGrid g = oracle::flat(5, 5, 1.0);
    std::vector<bool> flags(25, false);
    auto open = [](int c, int r) { return (r <= 2 && (c == 0 || c == 2)) || (r == 0 && c <= 2); };
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) flags[static_cast<std::size_t>(r * 5 + c)] = open(c, r);
    const WalkMask m(5, 5, 45.0, flags);
    Waypoint a{0, {0, 0}, {0, 0, 2}, true};
    Waypoint b{1, {1, 0}, {2, 0, 2}, true};
    const Edge e = validate_edge(g, m, a, b, config(2.0, {0, 2}));
    const double oracle_len = oracle::box_walk_length(g, open, {0, 2}, {2, 2}, -2, 4, 0, 4);
    EXPECT_DOUBLE_EQ(e.walk_len, oracle_len);
    EXPECT_DOUBLE_EQ(e.walk_len, 3.0 * e.euclid_len);
    EXPECT_FALSE(e.valid);
    EXPECT_EQ(e.reason, EdgeFault::detour);
    EXPECT_EQ(corridor_walk_length(g, m, {0, 2}, {0, 2}), 0.0);
}

TEST(ValidateEdge, NonAdjacentRejected) {
    const TerrainGrid g = oracle::flat(5, 5, 1.0);
    const WalkMask m = walkable_mask(g, 45);
    Waypoint a{0, {0, 0}, {0, 0, 0}, true};
    Waypoint b{1, {2, 0}, {2, 0, 0}, true};
    EXPECT_THROW(validate_edge(g, m, a, b, config(1.0, {0, 0})), ContractError);
}

TEST(ValidateEdge, ReasonOrderNoPathBeforeVertical) {
    // B sits on a plateau behind a cliff: no path and too high
    const TerrainGrid g = oracle::from_function(8, 3, 1.0, [](int c, int) { return c >= 4 ? 5.0 : 0.0; });
    const WalkMask m = walkable_mask(g, 45);
    Waypoint a{0, {0, 0}, {2, 0, 1}, true};
    Waypoint b{1, {1, 0}, {6, 5, 1}, true};
    const Edge e = validate_edge(g, m, a, b, config(4.0, {2, 1}));
    EXPECT_EQ(e.reason, EdgeFault::no_path);
    EXPECT_TRUE(std::isinf(e.walk_len));
}

TEST(WaypointGraphInvariants, SymmetricAndRulesHold) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 6; ++trial) {
        const TerrainGrid g = oracle::random_terrain(rng, 30);
        const WalkMask m = walkable_mask(g, 45);
        if (m.count() == 0) continue;
        std::vector<Cell> open;
        for (int r = 0; r < g.nrows(); ++r)
            for (int c = 0; c < g.ncols(); ++c)
                if (m.walkable(c, r)) open.push_back({c, r});
        const WaypointGraph graph = build(g, config(g.cell_size() * 2, g.cell_center(open[rng() % open.size()])));
        for (std::size_t k = 0; k < graph.size(); ++k) EXPECT_EQ(graph.node(static_cast<NodeId>(k)).id, static_cast<NodeId>(k));
        for (const Edge& e : graph.edges()) {
            const Edge* twin = graph.edge(e.to, opposite(e.direction));
            ASSERT_NE(twin, nullptr);
            EXPECT_EQ(twin->valid, e.valid);
            EXPECT_EQ(twin->to, e.from);
            const auto v = oracle::judge_edge(g, graph.config(), graph.node(e.from), graph.node(e.to));
            EXPECT_EQ(v.valid, e.valid);
            EXPECT_EQ(v.reason, e.reason);
            if (e.valid) {
                EXPECT_LE(e.walk_len / e.euclid_len, graph.config().detour_max);
                EXPECT_LE(std::abs(graph.node(e.from).position.y - graph.node(e.to).position.y), graph.config().vstep_max);
                EXPECT_TRUE(graph.node(e.from).valid && graph.node(e.to).valid);
            }
        }
    }
}

TEST(WaypointGraphInvariants, LooserThresholdsNeverInvalidate) {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 5; ++trial) {
        const TerrainGrid g = oracle::random_terrain(rng, 25);
        const WalkMask m = walkable_mask(g, 45);
        if (m.count() == 0) continue;
        Vec2 seed;
        for (int r = 0, found = 0; r < g.nrows() && !found; ++r)
            for (int c = 0; c < g.ncols() && !found; ++c)
                if (m.walkable(c, r)) { seed = g.cell_center({c, r}); found = 1; }
        const WaypointGraph tight = build(g, config(g.cell_size(), seed, 1.2, 0.2));
        const WaypointGraph loose = build(g, config(g.cell_size(), seed, 2.0, 1.0));
        ASSERT_EQ(tight.size(), loose.size());
        for (const Edge& e : tight.edges()) {
            if (!e.valid) continue;
            const Edge* l = loose.edge(e.from, e.direction);
            ASSERT_NE(l, nullptr);
            EXPECT_TRUE(l->valid);
        }
    }
}

TEST(GraphIo, RoundTripAndDeterministicBytes) {
    std::mt19937_64 rng(41);
    const TerrainGrid g = oracle::random_terrain(rng, 20);
    const WalkMask m = walkable_mask(g, 45);
    ASSERT_GT(m.count(), 0u);
    Vec2 seed;
    for (int r = g.nrows() - 1; r >= 0; --r)
        for (int c = 0; c < g.ncols(); ++c)
            if (m.walkable(c, r)) seed = g.cell_center({c, r});
    seed.x += 0.123456789;  // exercises config quantization
    seed.z -= 0.0000004;
    if (!oracle::site_walkable(g, 45, seed)) seed = {seed.x - 0.123456789, seed.z + 0.0000004};
    const WaypointGraph graph = build(g, config(g.cell_size() * 1.3, seed));
    const std::string text = graph_to_string(graph);
    std::istringstream in(text);
    const WaypointGraph back = read_graph(in);
    EXPECT_EQ(back.size(), graph.size());
    EXPECT_EQ(graph_to_string(back), text);
    EXPECT_EQ(graph_to_string(build(g, config(g.cell_size() * 1.3, seed))), text);
    for (std::size_t k = 0; k < graph.size(); ++k) {
        EXPECT_EQ(back.node(static_cast<NodeId>(k)).lattice, graph.node(static_cast<NodeId>(k)).lattice);
        EXPECT_EQ(back.node(static_cast<NodeId>(k)).valid, graph.node(static_cast<NodeId>(k)).valid);
    }
}

TEST(GraphIo, NineNodeRoundTripIsEqual) {
    const TerrainGrid g = oracle::flat(3, 3, 1.0);
    const WaypointGraph graph = build(g, config(1.0, {1, 1}));
    std::istringstream in(graph_to_string(graph));
    const WaypointGraph back = read_graph(in);
    // lengths are stored to 6 decimals, so equality holds from the first reload on
    std::istringstream again(graph_to_string(back));
    EXPECT_TRUE(read_graph(again) == back);
    EXPECT_EQ(back.config(), graph.config());
    ASSERT_EQ(back.size(), 9u);
    const auto a = back.edges(), b = graph.edges();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].to, b[k].to);
        EXPECT_EQ(a[k].valid, b[k].valid);
        EXPECT_NEAR(a[k].euclid_len, b[k].euclid_len, 5e-7);
        EXPECT_NEAR(a[k].walk_len, b[k].walk_len, 5e-7);
    }
}

TEST(GraphIo, UnknownVersionRejected) {
    const TerrainGrid g = oracle::flat(3, 3, 1.0);
    std::string text = graph_to_string(build(g, config(1.0, {1, 1})));
    text.replace(text.find("\"format_version\": 1"), 19, "\"format_version\": 7");
    std::istringstream in(text);
    EXPECT_THROW(read_graph(in), LoadError);
}

TEST(GraphIo, BrokenSymmetryRejected) {
    const TerrainGrid g = oracle::flat(3, 3, 1.0);
    std::string text = graph_to_string(build(g, config(1.0, {1, 1})));
    // invalidate a single directed edge without touching its twin
    const auto at = text.find("\"valid\": true, \"reason\": null", text.find("\"edges\""));
    ASSERT_NE(at, std::string::npos);
    text.replace(at, 30, "\"valid\": false, \"reason\": \"detour\"");
    std::istringstream in(text);
    EXPECT_THROW(read_graph(in), LoadError);
}

TEST(GraphIo, GarbageRejected) {
    std::istringstream a("not json");
    EXPECT_THROW(read_graph(a), LoadError);
    std::istringstream b("{\"format_version\": 1}");
    EXPECT_THROW(read_graph(b), LoadError);
    EXPECT_THROW(load_graph("/nonexistent/g.graph"), LoadError);
}
