#include "waynav/policies.hpp"

#include <cmath>
#include <algorithm>

#include "waynav/error.hpp"
#include "waynav/trajectory.hpp"

namespace waynav {
namespace {

NodeId node_near(const WaypointGraph& graph, Vec2 p) {
    const NodeId id = nearest_waypoint(graph, p);
    if (id == kNoNode) throw ConfigError("graph has no valid waypoints");
    return id;
}

int axis_step(double delta, double deadband) {
    if (delta > deadband) return 1;
    if (delta < -deadband) return -1;
    return 0;
}

Move steer(Vec2 from, Vec2 to, double move_step) {
    Move m;
    m.dx = axis_step(to.x - from.x, move_step / 2.0);
    m.dz = axis_step(to.z - from.z, move_step / 2.0);
    return m;
}

Action action_towards(const WaypointGraph& graph, NodeId from, NodeId to) {
    const Lattice a = graph.node(from).lattice;
    const Lattice b = graph.node(to).lattice;
    const auto d = direction_between(b.i - a.i, b.j - a.j);
    return d ? to_action(*d) : Action::stay;
}

// One move for an agent heading along `field`; the final approach in
// finegrained mode aims at `goal` itself.
Move follow_field(const Observation& obs, const AgentView& agent, const std::vector<double>& field,
                  Vec2 goal, bool& fallback) {
    const WaypointGraph& graph = *obs.graph;
    const NodeId here = agent.node;
    if (here == kNoNode || !std::isfinite(field[static_cast<std::size_t>(here)])) {
        fallback = true;
        return {};
    }
    const auto hop = next_hop(graph, field, here, CostMode::unit);
    if (obs.mode == MoveMode::waypoint) {
        if (!hop) return {};
        return Move{action_towards(graph, here, *hop), 0, 0};
    }
    const Vec2 aim = hop ? graph.node(*hop).position.horizontal() : goal;
    return steer(agent.pos, aim, obs.move_step);
}

}  // namespace

GreedyAttacker::GreedyAttacker(const TerrainGrid& terrain, const WaypointGraph& graph,
                               Vec2 target, std::string name)
    : name_(std::move(name)), target_(target) {
    if (!terrain.contains(target)) throw ConfigError("greedy_attacker target outside terrain");
    target_node_ = node_near(graph, target);
    field_ = distance_field(graph, target_node_, CostMode::unit);
}

Decision GreedyAttacker::decide(const Observation& obs, RngStream&) const {
    Decision d;
    for (int idx : obs.living) {
        const AgentView& a = obs.own[static_cast<std::size_t>(idx)];
        d.moves.push_back(follow_field(obs, a, field_, target_, d.fallback));
    }
    return d;
}

StaticDefender::StaticDefender(const TerrainGrid& terrain, const WaypointGraph& graph,
                               std::vector<Vec2> posts, std::string name)
    : name_(std::move(name)) {
    for (const Vec2& p : posts) {
        if (!terrain.contains(p)) throw ConfigError("static_defender post outside terrain");
        posts_.push_back(node_near(graph, p));
        fields_.push_back(distance_field(graph, posts_.back(), CostMode::unit));
    }
}

Decision StaticDefender::decide(const Observation& obs, RngStream&) const {
    Decision d;
    for (int idx : obs.living) {
        if (posts_.empty()) {
            d.moves.emplace_back();
            continue;
        }
        const std::size_t k = static_cast<std::size_t>(idx) % posts_.size();
        const AgentView& a = obs.own[static_cast<std::size_t>(idx)];
        const NodeId post = posts_[k];
        const Vec2 goal = obs.graph->node(post).position.horizontal();
        d.moves.push_back(follow_field(obs, a, fields_[k], goal, d.fallback));
    }
    return d;
}

Patrol::Patrol(const WaypointGraph& graph, std::vector<NodeId> route, std::string name)
    : name_(std::move(name)), route_(std::move(route)) {
    if (route_.empty()) throw ConfigError("patrol route is empty");
    for (NodeId id : route_) {
        if (!graph.contains(id) || !graph.node(id).valid)
            throw ConfigError("patrol route node " + std::to_string(id) + " is not a valid waypoint");
        fields_.push_back(distance_field(graph, id, CostMode::unit));
    }
}

Decision Patrol::decide(const Observation& obs, RngStream&) const {
    Decision d;
    for (int idx : obs.living) {
        const AgentView& a = obs.own[static_cast<std::size_t>(idx)];
        std::size_t next = 0;
        for (std::size_t k = 0; k < route_.size(); ++k) {
            if (route_[k] == a.node) {
                next = (k + 1) % route_.size();
                break;
            }
        }
        const NodeId goal = route_[next];
        d.moves.push_back(follow_field(obs, a, fields_[next],
                                       obs.graph->node(goal).position.horizontal(), d.fallback));
    }
    return d;
}

Stationary::Stationary(bool armed, std::string name)
    : armed_(armed), name_(name.empty() ? (armed ? "stationary" : "pacifist") : std::move(name)) {}

Decision Stationary::decide(const Observation& obs, RngStream&) const {
    Decision d;
    d.moves.resize(obs.living.size());
    return d;
}

Decision RandomWalk::decide(const Observation& obs, RngStream& rng) const {
    Decision d;
    for (std::size_t k = 0; k < obs.living.size(); ++k) {
        if (obs.mode == MoveMode::finegrained) {
            const auto pick = static_cast<int>(rng.uniform() * 9.0);
            d.moves.push_back(Move{Action::stay, pick % 3 - 1, pick / 3 - 1});
            continue;
        }
        std::vector<Action> allowed;
        for (int c = 0; c < kActionCount; ++c)
            if (obs.masks[k][static_cast<std::size_t>(c)]) allowed.push_back(static_cast<Action>(c));
        const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(allowed.size()));
        d.moves.push_back(Move{allowed[std::min(pick, allowed.size() - 1)], 0, 0});
    }
    return d;
}

}  // namespace waynav
