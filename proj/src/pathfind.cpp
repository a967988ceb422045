#include "waynav/pathfind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "waynav/error.hpp"

namespace waynav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative slack for "lies on a minimum-cost path": absorbs summation-order
// rounding, far below any real cost gap on a lattice.
bool on_optimal_path(double du, double w, double dv) noexcept {
    return std::abs(du - (w + dv)) <= 1e-12 * std::max(1.0, du);
}

void require_valid(const WaypointGraph& graph, NodeId id, const char* op) {
    if (!graph.contains(id)) {
        throw ContractError(std::string(op) + ": unknown node id " + std::to_string(id));
    }
    if (!graph.node(id).valid) {
        throw ContractError(std::string(op) + ": node " + std::to_string(id) + " is not a valid waypoint");
    }
}

// Dijkstra from `target`. When `stop_at` is given the search ends once every
// node that can lie on a minimum-cost path from it is settled.
std::vector<double> dijkstra(const WaypointGraph& graph, NodeId target, CostMode mode,
                             std::optional<NodeId> stop_at) {
    std::vector<double> dist(graph.size(), kInf);
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[static_cast<std::size_t>(target)] = 0.0;
    heap.push({0.0, target});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        if (stop_at) {
            const double ds = dist[static_cast<std::size_t>(*stop_at)];
            if (d > ds + 1e-9 * std::max(1.0, ds)) break;
        }
        for (Direction dir : kDirections) {
            const Edge* e = graph.edge(u, dir);
            if (!traversable(e)) continue;
            const double nd = d + edge_cost(*e, mode);
            auto& slot = dist[static_cast<std::size_t>(e->to)];
            if (nd < slot) {
                slot = nd;
                heap.push({nd, e->to});
            }
        }
    }
    return dist;
}

}  // namespace

std::optional<Action> action_from_code(int c) noexcept {
    if (c < 0 || c >= kActionCount) return std::nullopt;
    return static_cast<Action>(c);
}

std::string_view to_string(Action a) noexcept {
    const auto d = to_direction(a);
    return d ? to_string(*d) : std::string_view("stay");
}

std::string_view to_string(CostMode m) noexcept { return m == CostMode::unit ? "unit" : "euclid"; }

std::optional<CostMode> cost_mode_from_string(std::string_view s) noexcept {
    if (s == "unit") return CostMode::unit;
    if (s == "euclid") return CostMode::euclid;
    return std::nullopt;
}

bool traversable(const Edge* e) noexcept { return e != nullptr && e->valid; }

double edge_cost(const Edge& e, CostMode mode) noexcept {
    return mode == CostMode::unit ? 1.0 : e.euclid_len;
}

ActionMask action_mask(const WaypointGraph& graph, NodeId id) {
    require_valid(graph, id, "action_mask");
    ActionMask mask{};
    mask[0] = true;
    for (Direction d : kDirections) {
        const Edge* e = graph.edge(id, d);
        mask[static_cast<std::size_t>(code(to_action(d)))] =
            traversable(e) && graph.node(e->to).valid;
    }
    return mask;
}

NodeId apply_action(const WaypointGraph& graph, NodeId id, Action action) {
    const ActionMask mask = action_mask(graph, id);
    if (!mask[static_cast<std::size_t>(code(action))]) {
        throw IllegalMoveError("apply_action: action " + std::string(to_string(action)) +
                               " is masked at node " + std::to_string(id));
    }
    const auto d = to_direction(action);
    if (!d) return id;
    return graph.edge(id, *d)->to;
}

std::vector<double> distance_field(const WaypointGraph& graph, NodeId target, CostMode mode) {
    require_valid(graph, target, "distance_field");
    return dijkstra(graph, target, mode, std::nullopt);
}

std::optional<NodeId> next_hop(const WaypointGraph& graph, std::span<const double> field,
                               NodeId from, CostMode mode) {
    const double du = field[static_cast<std::size_t>(from)];
    if (du == 0.0 || !std::isfinite(du)) return std::nullopt;
    std::optional<NodeId> best;
    for (Direction dir : kDirections) {
        const Edge* e = graph.edge(from, dir);
        if (!traversable(e)) continue;
        const double dv = field[static_cast<std::size_t>(e->to)];
        if (!std::isfinite(dv) || !on_optimal_path(du, edge_cost(*e, mode), dv)) continue;
        if (!best || e->to < *best) best = e->to;
    }
    return best;
}

PathResult shortest_path(const WaypointGraph& graph, NodeId src, NodeId dst, CostMode mode) {
    require_valid(graph, src, "shortest_path");
    require_valid(graph, dst, "shortest_path");
    PathResult result;
    result.nodes.push_back(src);
    if (src == dst) return result;

    const auto field = dijkstra(graph, dst, mode, src);
    if (!std::isfinite(field[static_cast<std::size_t>(src)])) {
        throw NoPathError("shortest_path: node " + std::to_string(dst) +
                          " is unreachable from node " + std::to_string(src));
    }
    NodeId u = src;
    while (u != dst) {
        const auto v = next_hop(graph, field, u, mode);
        if (!v) throw NoPathError("shortest_path: lost the optimal path at node " + std::to_string(u));
        for (Direction dir : kDirections) {
            const Edge* e = graph.edge(u, dir);
            if (traversable(e) && e->to == *v) {
                result.cost += edge_cost(*e, mode);
                break;
            }
        }
        u = *v;
        result.nodes.push_back(u);
    }
    return result;
}

}  // namespace waynav
