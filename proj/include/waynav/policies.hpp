#pragma once

#include <string>
#include <vector>

#include "waynav/skirmish.hpp"

namespace waynav {

/// Moves every agent along the canonical shortest path to the node nearest
/// the target. Agents whose target is unreachable stay and the decision is
/// flagged as a fallback.
class GreedyAttacker final : public Policy {
public:
    GreedyAttacker(const TerrainGrid& terrain, const WaypointGraph& graph, Vec2 target,
                   std::string name = "greedy_attacker");

    std::string name() const override { return name_; }
    Decision decide(const Observation& obs, RngStream& rng) const override;

    NodeId target_node() const noexcept { return target_node_; }

private:
    std::string name_;
    Vec2 target_;
    NodeId target_node_;
    std::vector<double> field_;
};

/// Agent k walks to post k mod |posts| and holds it. No posts: hold the spawn.
class StaticDefender final : public Policy {
public:
    StaticDefender(const TerrainGrid& terrain, const WaypointGraph& graph, std::vector<Vec2> posts,
                   std::string name = "static_defender");

    std::string name() const override { return name_; }
    Decision decide(const Observation& obs, RngStream& rng) const override;

private:
    std::string name_;
    std::vector<NodeId> posts_;
    std::vector<std::vector<double>> fields_;
};

/// Cycles a closed route of waypoints: an agent standing on route[k] heads
/// for route[k+1]; agents off the route head for route[0].
class Patrol final : public Policy {
public:
    Patrol(const WaypointGraph& graph, std::vector<NodeId> route, std::string name = "patrol");

    std::string name() const override { return name_; }
    Decision decide(const Observation& obs, RngStream& rng) const override;

private:
    std::string name_;
    std::vector<NodeId> route_;
    std::vector<std::vector<double>> fields_;
};

/// Never moves. `armed = false` also never fires.
class Stationary final : public Policy {
public:
    explicit Stationary(bool armed = true, std::string name = "");

    std::string name() const override { return name_; }
    Decision decide(const Observation& obs, RngStream& rng) const override;
    bool armed() const override { return armed_; }

private:
    bool armed_;
    std::string name_;
};

/// Uniformly random unmasked action per agent, drawn from the policy stream.
class RandomWalk final : public Policy {
public:
    explicit RandomWalk(std::string name = "random_walk") : name_(std::move(name)) {}

    std::string name() const override { return name_; }
    Decision decide(const Observation& obs, RngStream& rng) const override;

private:
    std::string name_;
};

}  // namespace waynav
