#include "waynav/waygraph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include "waynav/error.hpp"

namespace waynav {

namespace {

constexpr std::array<std::string_view, kDirectionCount> kDirectionNames = {
    "N", "NE", "E", "SE", "S", "SW", "W", "NW"};

double quantize(double v) {
    const double q = std::round(v * 1e6) / 1e6;
    return q == 0.0 ? 0.0 : q;  // drop negative zero
}

void check_config(const TerrainGrid& grid, const WalkMask& mask, const GraphConfig& cfg) {
    if (!(cfg.spacing > 0.0)) throw ConfigError("graph config: spacing must be > 0");
    if (cfg.spacing < grid.cell_size() / 4.0) {
        throw ConfigError("graph config: spacing smaller than cell_size/4 aliases the terrain");
    }
    if (!(cfg.detour_max > 1.0)) throw ConfigError("graph config: detour_max must be > 1");
    if (!(cfg.vstep_max >= 0.0)) throw ConfigError("graph config: vstep_max must be >= 0");
    if (mask.ncols() != grid.ncols() || mask.nrows() != grid.nrows()) {
        throw ConfigError("graph config: walk mask does not match terrain dimensions");
    }
    if (mask.slope_max_deg() != cfg.slope_max_deg) {
        throw ConfigError("graph config: slope_max_deg differs from the walk mask's");
    }
}

Waypoint make_waypoint(const TerrainGrid& grid, const WalkMask& mask,
                       const WaypointGraph& graph, Lattice l) {
    const Vec2 p = graph.lattice_position(l);
    Waypoint w;
    w.lattice = l;
    w.position = {p.x, height_at(grid, p.x, p.z), p.z};
    w.valid = waypoint_site_valid(grid, mask, p);
    return w;
}

// Visit-triggered expansion from `start`, which must be absent and valid.
void flood(WaypointGraph& graph, const TerrainGrid& grid, const WalkMask& mask, Lattice start) {
    const Waypoint first = make_waypoint(grid, mask, graph, start);
    std::deque<NodeId> queue;
    queue.push_back(graph.add_node(first.lattice, first.position, first.valid));

    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        const Lattice lu = graph.node(u).lattice;
        for (Direction d : kDirections) {
            const auto [di, dj] = lattice_delta(d);
            const Lattice lv{lu.i + di, lu.j + dj};
            auto v = graph.find(lv);
            if (!v) {
                if (!grid.contains(graph.lattice_position(lv))) continue;
                const Waypoint w = make_waypoint(grid, mask, graph, lv);
                v = graph.add_node(w.lattice, w.position, w.valid);
                if (w.valid) queue.push_back(*v);
            }
            if (graph.edge(u, d) == nullptr) {
                graph.add_edge_pair(
                    validate_edge(grid, mask, graph.node(u), graph.node(*v), graph.config()));
            }
        }
    }
}

}  // namespace

std::string_view to_string(Direction d) noexcept { return kDirectionNames[static_cast<int>(d)]; }

std::optional<Direction> direction_from_string(std::string_view s) noexcept {
    for (int k = 0; k < kDirectionCount; ++k) {
        if (kDirectionNames[k] == s) return static_cast<Direction>(k);
    }
    return std::nullopt;
}

std::optional<Direction> direction_between(int di, int dj) noexcept {
    for (Direction d : kDirections) {
        const auto delta = lattice_delta(d);
        if (delta[0] == di && delta[1] == dj) return d;
    }
    return std::nullopt;
}

std::string_view to_string(EdgeFault f) noexcept {
    switch (f) {
        case EdgeFault::none: return "none";
        case EdgeFault::no_path: return "no_path";
        case EdgeFault::vertical: return "vertical";
        case EdgeFault::detour: return "detour";
    }
    return "none";
}

std::optional<EdgeFault> edge_fault_from_string(std::string_view s) noexcept {
    for (EdgeFault f : {EdgeFault::none, EdgeFault::no_path, EdgeFault::vertical, EdgeFault::detour}) {
        if (to_string(f) == s) return f;
    }
    return std::nullopt;
}

GraphConfig quantized(const GraphConfig& cfg) {
    GraphConfig q = cfg;
    q.spacing = quantize(cfg.spacing);
    q.slope_max_deg = quantize(cfg.slope_max_deg);
    q.detour_max = quantize(cfg.detour_max);
    q.vstep_max = quantize(cfg.vstep_max);
    q.seed_point = {quantize(cfg.seed_point.x), quantize(cfg.seed_point.z)};
    return q;
}

// --- WaypointGraph ----------------------------------------------------------

const Waypoint& WaypointGraph::node(NodeId id) const {
    if (!contains(id)) throw ContractError("graph: unknown node id " + std::to_string(id));
    return nodes_[static_cast<std::size_t>(id)];
}

const Edge* WaypointGraph::edge(NodeId id, Direction d) const {
    if (!contains(id)) throw ContractError("graph: unknown node id " + std::to_string(id));
    const auto slot = adjacency_[static_cast<std::size_t>(id)][static_cast<int>(d)];
    return slot < 0 ? nullptr : &edges_[static_cast<std::size_t>(slot)];
}

std::vector<Edge> WaypointGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const auto& slots : adjacency_) {
        for (auto slot : slots) {
            if (slot >= 0) out.push_back(edges_[static_cast<std::size_t>(slot)]);
        }
    }
    return out;
}

std::optional<NodeId> WaypointGraph::find(Lattice l) const {
    const auto it = lattice_index_.find(key(l));
    if (it == lattice_index_.end()) return std::nullopt;
    return it->second;
}

std::size_t WaypointGraph::valid_node_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Waypoint& w) { return w.valid; }));
}

NodeId WaypointGraph::add_node(Lattice l, Vec3 position, bool valid) {
    if (lattice_index_.contains(key(l))) {
        throw ContractError("graph: duplicate lattice point (" + std::to_string(l.i) + ", " +
                            std::to_string(l.j) + ")");
    }
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({id, l, position, valid});
    adjacency_.push_back({-1, -1, -1, -1, -1, -1, -1, -1});
    lattice_index_.emplace(key(l), id);
    return id;
}

void WaypointGraph::add_edge_pair(const Edge& e) {
    if (!contains(e.from) || !contains(e.to)) throw ContractError("graph: edge endpoint unknown");
    auto& fwd = adjacency_[static_cast<std::size_t>(e.from)][static_cast<int>(e.direction)];
    auto& rev = adjacency_[static_cast<std::size_t>(e.to)][static_cast<int>(opposite(e.direction))];
    if (fwd >= 0 || rev >= 0) throw ContractError("graph: edge slot already occupied");
    Edge twin = e;
    std::swap(twin.from, twin.to);
    twin.direction = opposite(e.direction);
    fwd = static_cast<std::int32_t>(edges_.size());
    edges_.push_back(e);
    rev = static_cast<std::int32_t>(edges_.size());
    edges_.push_back(twin);
}

bool operator==(const WaypointGraph& a, const WaypointGraph& b) {
    return a.config_ == b.config_ && a.nodes_ == b.nodes_ && a.edges() == b.edges();
}

WaypointGraph WaypointGraph::from_parts(const GraphConfig& cfg, std::vector<Waypoint> nodes,
                                        std::vector<Edge> edges) {
    WaypointGraph g(cfg);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Waypoint& w = nodes[k];
        if (w.id != static_cast<NodeId>(k)) {
            throw LoadError("graph: node ids must be dense and sorted (found id " +
                            std::to_string(w.id) + " at position " + std::to_string(k) + ")");
        }
        if (g.find(w.lattice)) {
            throw LoadError("graph: duplicate lattice point for node " + std::to_string(w.id));
        }
        const Vec2 expect = g.lattice_position(w.lattice);
        const double tol = 1e-6 * (1.0 + std::abs(expect.x) + std::abs(expect.z));
        if (std::abs(expect.x - w.position.x) > tol || std::abs(expect.z - w.position.z) > tol) {
            throw LoadError("graph: node " + std::to_string(w.id) +
                            " position does not match its lattice coordinates");
        }
        g.add_node(w.lattice, w.position, w.valid);
    }

    auto slot_of = [&](const Edge& e) -> std::int32_t& {
        return g.adjacency_[static_cast<std::size_t>(e.from)][static_cast<int>(e.direction)];
    };
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const Edge& e = edges[k];
        const std::string where = "graph: edge " + std::to_string(e.from) + "->" +
                                  std::to_string(e.to) + " (" + std::string(to_string(e.direction)) +
                                  ")";
        if (!g.contains(e.from) || !g.contains(e.to)) throw LoadError(where + ": unknown endpoint");
        const Lattice a = g.nodes_[static_cast<std::size_t>(e.from)].lattice;
        const Lattice b = g.nodes_[static_cast<std::size_t>(e.to)].lattice;
        if (direction_between(b.i - a.i, b.j - a.j) != e.direction) {
            throw LoadError(where + ": direction disagrees with lattice coordinates");
        }
        if (e.valid != (e.reason == EdgeFault::none)) {
            throw LoadError(where + ": validity flag disagrees with reason");
        }
        if (e.valid && (!g.nodes_[static_cast<std::size_t>(e.from)].valid ||
                        !g.nodes_[static_cast<std::size_t>(e.to)].valid)) {
            throw LoadError(where + ": valid edge touches an invalid waypoint");
        }
        auto& slot = slot_of(e);
        if (slot >= 0) throw LoadError(where + ": duplicate edge");
        slot = static_cast<std::int32_t>(g.edges_.size());
        g.edges_.push_back(e);
    }
    for (const Edge& e : g.edges_) {
        const auto twin_slot =
            g.adjacency_[static_cast<std::size_t>(e.to)][static_cast<int>(opposite(e.direction))];
        const std::string where = "graph: edge " + std::to_string(e.from) + "->" +
                                  std::to_string(e.to);
        if (twin_slot < 0) throw LoadError(where + " has no reverse twin (asymmetric adjacency)");
        const Edge& t = g.edges_[static_cast<std::size_t>(twin_slot)];
        if (t.valid != e.valid || t.reason != e.reason) {
            throw LoadError(where + " and its reverse twin disagree on validity");
        }
    }
    return g;
}

// --- validation ---------------------------------------------------------------

bool waypoint_site_valid(const TerrainGrid& grid, const WalkMask& mask, Vec2 p) {
    return grid.contains(p) && mask.walkable(grid.cell_at(p));
}

double corridor_walk_length(const TerrainGrid& grid, const WalkMask& mask, Cell from, Cell to) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    if (!mask.walkable(from) || !mask.walkable(to)) return kInf;
    if (from == to) return 0.0;

    const int span = std::max(std::abs(from.col - to.col), std::abs(from.row - to.row));
    const int c0 = std::max(0, std::min(from.col, to.col) - span);
    const int c1 = std::min(grid.ncols() - 1, std::max(from.col, to.col) + span);
    const int r0 = std::max(0, std::min(from.row, to.row) - span);
    const int r1 = std::min(grid.nrows() - 1, std::max(from.row, to.row) + span);
    const int w = c1 - c0 + 1;
    const int h = r1 - r0 + 1;
    auto local = [&](int col, int row) { return static_cast<std::size_t>((row - r0) * w + (col - c0)); };
    auto inside = [&](int col, int row) { return col >= c0 && col <= c1 && row >= r0 && row <= r1; };
    auto open = [&](int col, int row) { return inside(col, row) && mask.walkable(col, row); };

    const double orth = grid.cell_size();
    const double diag = std::numbers::sqrt2 * grid.cell_size();
    std::vector<double> dist(static_cast<std::size_t>(w) * h, kInf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[local(from.col, from.row)] = 0.0;
    heap.push({0.0, local(from.col, from.row)});
    const std::size_t goal = local(to.col, to.row);

    while (!heap.empty()) {
        const auto [d, idx] = heap.top();
        heap.pop();
        if (d > dist[idx]) continue;
        if (idx == goal) return d;
        const int col = c0 + static_cast<int>(idx % static_cast<std::size_t>(w));
        const int row = r0 + static_cast<int>(idx / static_cast<std::size_t>(w));
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                const int nc = col + dc;
                const int nr = row + dr;
                if (!open(nc, nr)) continue;
                const bool diagonal = dr != 0 && dc != 0;
                if (diagonal && (!open(col + dc, row) || !open(col, row + dr))) continue;
                const double nd = d + (diagonal ? diag : orth);
                const std::size_t nidx = local(nc, nr);
                if (nd < dist[nidx]) {
                    dist[nidx] = nd;
                    heap.push({nd, nidx});
                }
            }
        }
    }
    return kInf;
}

Edge validate_edge(const TerrainGrid& grid, const WalkMask& mask, const Waypoint& a,
                   const Waypoint& b, const GraphConfig& cfg) {
    const int di = b.lattice.i - a.lattice.i;
    const int dj = b.lattice.j - a.lattice.j;
    const auto dir = direction_between(di, dj);
    if (!dir) {
        throw ContractError("validate_edge: waypoints " + std::to_string(a.id) + " and " +
                            std::to_string(b.id) + " are not lattice neighbours");
    }
    Edge e;
    e.from = a.id;
    e.to = b.id;
    e.direction = *dir;
    e.euclid_len = distance(a.position, b.position);
    const Vec2 pa = a.position.horizontal();
    const Vec2 pb = b.position.horizontal();
    if (grid.contains(pa) && grid.contains(pb)) {
        e.walk_len = corridor_walk_length(grid, mask, grid.cell_at(pa), grid.cell_at(pb));
    } else {
        e.walk_len = std::numeric_limits<double>::infinity();
    }

    if (!std::isfinite(e.walk_len)) {
        e.reason = EdgeFault::no_path;
    } else if (std::abs(a.position.y - b.position.y) > cfg.vstep_max) {
        e.reason = EdgeFault::vertical;
    } else if (e.walk_len / e.euclid_len > cfg.detour_max) {
        e.reason = EdgeFault::detour;
    } else {
        e.reason = EdgeFault::none;
    }
    e.valid = e.reason == EdgeFault::none && a.valid && b.valid;
    if (!e.valid && e.reason == EdgeFault::none) e.reason = EdgeFault::no_path;
    return e;
}

// --- generation ---------------------------------------------------------------

LatticeBounds lattice_bounds(const TerrainGrid& grid, const GraphConfig& cfg) {
    constexpr double eps = 1e-9;
    const Vec2 o = grid.origin();
    LatticeBounds b;
    b.i_min = static_cast<int>(std::ceil((o.x - cfg.seed_point.x) / cfg.spacing - eps));
    b.i_max = static_cast<int>(std::floor((o.x + grid.width() - cfg.seed_point.x) / cfg.spacing + eps));
    b.j_min = static_cast<int>(std::ceil((o.z - cfg.seed_point.z) / cfg.spacing - eps));
    b.j_max = static_cast<int>(std::floor((o.z + grid.depth() - cfg.seed_point.z) / cfg.spacing + eps));
    return b;
}

WaypointGraph generate(const TerrainGrid& grid, const WalkMask& mask, const GraphConfig& cfg_in) {
    const GraphConfig cfg = quantized(cfg_in);
    check_config(grid, mask, cfg);
    if (!waypoint_site_valid(grid, mask, cfg.seed_point)) {
        throw SeedError("generate: seed point (" + std::to_string(cfg.seed_point.x) + ", " +
                        std::to_string(cfg.seed_point.z) + ") is not on a walkable cell");
    }
    WaypointGraph graph(cfg);
    flood(graph, grid, mask, Lattice{0, 0});
    return graph;
}

WaypointGraph fill_gaps(const WaypointGraph& graph, const TerrainGrid& grid, const WalkMask& mask) {
    check_config(grid, mask, graph.config());
    WaypointGraph out = graph;
    const LatticeBounds b = lattice_bounds(grid, graph.config());
    for (int j = b.j_min; j <= b.j_max; ++j) {
        for (int i = b.i_min; i <= b.i_max; ++i) {
            const Lattice l{i, j};
            if (out.find(l)) continue;
            if (!waypoint_site_valid(grid, mask, out.lattice_position(l))) continue;
            flood(out, grid, mask, l);
        }
    }
    return out;
}

}  // namespace waynav
