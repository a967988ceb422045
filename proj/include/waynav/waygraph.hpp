#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "waynav/geometry.hpp"
#include "waynav/terrain.hpp"

namespace waynav {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// Compass directions in the fixed order used for BFS expansion and
/// adjacency slots.
enum class Direction : std::uint8_t { N = 0, NE, E, SE, S, SW, W, NW };
inline constexpr int kDirectionCount = 8;
inline constexpr std::array<Direction, kDirectionCount> kDirections = {
    Direction::N, Direction::NE, Direction::E, Direction::SE,
    Direction::S, Direction::SW, Direction::W, Direction::NW};

constexpr Direction opposite(Direction d) noexcept {
    return static_cast<Direction>((static_cast<int>(d) + 4) % kDirectionCount);
}
/// Lattice step (di east, dj north) for a direction.
constexpr std::array<int, 2> lattice_delta(Direction d) noexcept {
    constexpr std::array<std::array<int, 2>, kDirectionCount> table = {
        {{0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}}};
    return table[static_cast<int>(d)];
}
std::string_view to_string(Direction d) noexcept;
std::optional<Direction> direction_from_string(std::string_view s) noexcept;
std::optional<Direction> direction_between(int di, int dj) noexcept;

struct GraphConfig {
    double spacing = 2.0;
    double slope_max_deg = kDefaultSlopeMaxDeg;
    double detour_max = 1.5;
    double vstep_max = 1.0;  // half the default spacing
    Vec2 seed_point;

    friend bool operator==(const GraphConfig&, const GraphConfig&) = default;
};

/// Rounds every real field to the 1e-6 resolution used by the graph file, so a
/// saved and reloaded config compares equal and re-derives identical positions.
GraphConfig quantized(const GraphConfig& cfg);

struct Lattice {
    int i = 0;  // east
    int j = 0;  // north

    friend bool operator==(const Lattice&, const Lattice&) = default;
};

struct Waypoint {
    NodeId id = kNoNode;
    Lattice lattice;
    Vec3 position;
    bool valid = false;

    friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

enum class EdgeFault : std::uint8_t { none, no_path, vertical, detour };
std::string_view to_string(EdgeFault f) noexcept;
std::optional<EdgeFault> edge_fault_from_string(std::string_view s) noexcept;

struct Edge {
    NodeId from = kNoNode;
    NodeId to = kNoNode;
    Direction direction = Direction::N;
    bool valid = false;
    EdgeFault reason = EdgeFault::none;
    double euclid_len = 0.0;
    double walk_len = 0.0;  // +inf when no walkable path exists

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Waypoint lattice with per-node 8-slot adjacency. Invalid waypoints and
/// edges are retained and flagged. Ids are dense in creation order.
class WaypointGraph {
public:
    explicit WaypointGraph(const GraphConfig& cfg) : config_(cfg) {}

    /// Builds a graph from already-materialised parts, checking dense ids,
    /// lattice uniqueness, edge geometry and twin symmetry. Throws LoadError.
    static WaypointGraph from_parts(const GraphConfig& cfg, std::vector<Waypoint> nodes,
                                    std::vector<Edge> edges);

    const GraphConfig& config() const noexcept { return config_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::span<const Waypoint> nodes() const noexcept { return nodes_; }
    const Waypoint& node(NodeId id) const;
    bool contains(NodeId id) const noexcept {
        return id >= 0 && static_cast<std::size_t>(id) < nodes_.size();
    }

    /// Directed edge leaving `id` in direction d, or nullptr.
    const Edge* edge(NodeId id, Direction d) const;
    /// All directed edges, ordered by source id then direction.
    std::vector<Edge> edges() const;
    std::size_t directed_edge_count() const noexcept { return edges_.size(); }

    std::optional<NodeId> find(Lattice l) const;
    Vec2 lattice_position(Lattice l) const noexcept {
        return {config_.seed_point.x + l.i * config_.spacing,
                config_.seed_point.z + l.j * config_.spacing};
    }
    std::size_t valid_node_count() const noexcept;

    friend bool operator==(const WaypointGraph& a, const WaypointGraph& b);

    // Construction interface used by the generator and loader.
    NodeId add_node(Lattice l, Vec3 position, bool valid);
    /// Inserts e and its reverse twin.
    void add_edge_pair(const Edge& e);

private:
    static std::uint64_t key(Lattice l) noexcept {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(l.i)) << 32) |
               static_cast<std::uint32_t>(l.j);
    }

    GraphConfig config_;
    std::vector<Waypoint> nodes_;
    std::vector<std::array<std::int32_t, kDirectionCount>> adjacency_;
    std::vector<Edge> edges_;
    std::unordered_map<std::uint64_t, NodeId> lattice_index_;
};

/// Checks one lattice-adjacent pair against the three edge rules (path
/// exists, vertical step, detour ratio). Throws ContractError if a and b are
/// not lattice neighbours.
Edge validate_edge(const TerrainGrid& grid, const WalkMask& mask, const Waypoint& a,
                   const Waypoint& b, const GraphConfig& cfg);

/// Shortest 8-connected walkable path between two cells (orthogonal step
/// cell_size, diagonal sqrt(2) * cell_size, no corner cutting), searched
/// inside the cells' bounding box grown by their Chebyshev span.
double corridor_walk_length(const TerrainGrid& grid, const WalkMask& mask, Cell from, Cell to);

/// Whether a waypoint at p would be valid: inside the extent and on a
/// walkable cell.
bool waypoint_site_valid(const TerrainGrid& grid, const WalkMask& mask, Vec2 p);

/// Breadth-first flood fill over the spacing lattice starting at the seed.
WaypointGraph generate(const TerrainGrid& grid, const WalkMask& mask, const GraphConfig& cfg);

/// Seeds further flood fills from every walkable lattice point the graph
/// misses, scanning south to north, west to east.
WaypointGraph fill_gaps(const WaypointGraph& graph, const TerrainGrid& grid, const WalkMask& mask);

/// Inclusive lattice index range covering the terrain extent.
struct LatticeBounds {
    int i_min = 0, i_max = -1, j_min = 0, j_max = -1;
};
LatticeBounds lattice_bounds(const TerrainGrid& grid, const GraphConfig& cfg);

}  // namespace waynav
