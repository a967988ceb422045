#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "waynav/skirmish.hpp"

namespace waynav {

struct PolicySpec {
    std::string type;  // greedy_attacker, static_defender, patrol, stationary, pacifist, random_walk
    std::string name;  // defaults to type
    std::vector<Vec2> points;    // greedy target (optional) or defender posts
    std::vector<NodeId> route;   // patrol
};

struct Scenario {
    ScenarioConfig config;
    PolicySpec blue;
    PolicySpec red;
};

/// JSON scenario document. Every ScenarioConfig field is optional except the
/// starts and the target; points are [x, z] pairs. Throws ConfigError naming
/// the offending field.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const TerrainGrid& terrain,
                                    const WaypointGraph& graph, const ScenarioConfig& cfg);

struct ResultsMeta {
    std::string blue_policy;
    std::string red_policy;
    std::uint64_t base_seed = 0;
    int episodes_per_pair = 1;
    MoveMode move_mode = MoveMode::waypoint;
};

/// Per-pair rows then totals, as JSON.
std::string results_to_string(const ResultsMeta& meta, const WinTable& table);

struct ResultsFile {
    ResultsMeta meta;
    std::vector<Team> winners;  // in row order
    int blue_wins = 0;
    int red_wins = 0;
};

/// Throws LoadError on malformed documents.
ResultsFile parse_results(const std::string& text);

/// One line per step: agents (node, position, hits, alive) then shots.
std::string transcript_to_string(const std::vector<StepRecord>& steps);

}  // namespace waynav
