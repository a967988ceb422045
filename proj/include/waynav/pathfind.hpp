#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "waynav/waygraph.hpp"

namespace waynav {

/// Discrete waypoint action: stay, then the eight compass moves.
enum class Action : std::uint8_t { stay = 0, N, NE, E, SE, S, SW, W, NW };
inline constexpr int kActionCount = 9;

using ActionMask = std::array<bool, kActionCount>;

constexpr int code(Action a) noexcept { return static_cast<int>(a); }
std::optional<Action> action_from_code(int code) noexcept;
constexpr Action to_action(Direction d) noexcept {
    return static_cast<Action>(static_cast<int>(d) + 1);
}
/// Direction of a move action; nullopt for stay.
constexpr std::optional<Direction> to_direction(Action a) noexcept {
    if (a == Action::stay) return std::nullopt;
    return static_cast<Direction>(static_cast<int>(a) - 1);
}
constexpr Action opposite(Action a) noexcept {
    const auto d = to_direction(a);
    return d ? to_action(opposite(*d)) : Action::stay;
}
std::string_view to_string(Action a) noexcept;

/// unit: every valid edge costs 1 (the movement abstraction's view).
/// euclid: every valid edge costs its 3-D length.
enum class CostMode : std::uint8_t { unit, euclid };
std::string_view to_string(CostMode m) noexcept;
std::optional<CostMode> cost_mode_from_string(std::string_view s) noexcept;

/// An edge is traversable when it is valid; valid edges always join valid
/// waypoints.
bool traversable(const Edge* e) noexcept;
double edge_cost(const Edge& e, CostMode mode) noexcept;

/// mask[0] is always true; mask[d] is true iff the edge in direction d exists,
/// is valid and leads to a valid waypoint. Throws ContractError for an unknown
/// or invalid waypoint.
ActionMask action_mask(const WaypointGraph& graph, NodeId id);

/// Throws IllegalMoveError when the action is masked.
NodeId apply_action(const WaypointGraph& graph, NodeId id, Action action);

struct PathResult {
    std::vector<NodeId> nodes;  // src first, dst last
    double cost = 0.0;
};

/// Dijkstra over valid edges. Among minimum-cost paths the lexicographically
/// smallest node-id sequence is returned. Throws NoPathError when dst is
/// unreachable.
PathResult shortest_path(const WaypointGraph& graph, NodeId src, NodeId dst, CostMode mode);

/// Cost-to-target for every node (+inf where unreachable).
std::vector<double> distance_field(const WaypointGraph& graph, NodeId target, CostMode mode);

/// First step of the canonical shortest path from `from` towards the field's
/// target: the smallest-id neighbour on some minimum-cost path. Returns
/// nullopt at the target or when the target is unreachable.
std::optional<NodeId> next_hop(const WaypointGraph& graph, std::span<const double> field,
                               NodeId from, CostMode mode);

}  // namespace waynav
