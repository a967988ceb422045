#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "waynav/geometry.hpp"
#include "waynav/pathfind.hpp"
#include "waynav/rng.hpp"
#include "waynav/terrain.hpp"
#include "waynav/waygraph.hpp"

namespace waynav {

enum class Team : std::uint8_t { blue = 0, red = 1 };
enum class MoveMode : std::uint8_t { waypoint, finegrained };
enum class EndReason : std::uint8_t { target_reached, blue_eliminated, timeout };

std::string_view to_string(Team t) noexcept;
std::string_view to_string(MoveMode m) noexcept;
std::string_view to_string(EndReason r) noexcept;
std::optional<MoveMode> move_mode_from_string(std::string_view s) noexcept;
std::optional<EndReason> end_reason_from_string(std::string_view s) noexcept;
std::optional<Team> team_from_string(std::string_view s) noexcept;

/// Rules of one differing-objectives skirmish: Blue tries to reach the
/// target, Red defends it.
struct ScenarioConfig {
    std::vector<Vec2> blue_starts;
    std::vector<Vec2> red_starts;
    int team_size = 4;
    Vec2 target;
    double target_radius = 2.0;
    /// An agent is eliminated once hits_taken exceeds this (on hit 6 for 5).
    int hit_limit = 5;
    int max_steps = 500;
    double fire_range = 30.0;
    double aim_sigma = 0.05;  // radians
    double target_radius_hit = 0.5;
    MoveMode move_mode = MoveMode::waypoint;
    double agent_speed = 4.0;  // m/s, finegrained mode
    double step_dt = 0.5;      // s
    double eye_height = 1.6;   // m above terrain for line of sight
    std::uint64_t rng_seed = 0;
};

/// Throws ConfigError when a field is out of range or a start/target lies
/// outside the terrain.
void validate(const ScenarioConfig& cfg, const TerrainGrid& terrain);

struct AgentView {
    int index = 0;
    Team team = Team::blue;
    NodeId node = kNoNode;  // nearest waypoint in finegrained mode
    Vec2 pos;
    int hits_taken = 0;
    bool alive = true;
};

/// What a policy sees at the start of a step: its whole team, the enemies
/// any of its agents can see, and the action masks of its living agents.
struct Observation {
    Team team = Team::blue;
    int step = 0;
    MoveMode mode = MoveMode::waypoint;
    const TerrainGrid* terrain = nullptr;
    const WaypointGraph* graph = nullptr;
    Vec2 target;
    double target_radius = 0.0;
    double move_step = 0.0;                 // metres per finegrained axis step
    std::vector<AgentView> own;             // every agent of the team, by index
    std::vector<int> living;                // decision order
    std::vector<ActionMask> masks;          // parallel to `living`
    std::vector<AgentView> visible_enemies;
};

/// Waypoint mode reads `action`; finegrained mode reads (dx, dz) in {-1,0,1}.
struct Move {
    Action action = Action::stay;
    int dx = 0;
    int dz = 0;
};

struct Decision {
    std::vector<Move> moves;  // one per living agent, in Observation::living order
    bool fallback = false;    // policy could not pursue its goal this step
};

/// Pure decision function. `decide` must not mutate shared state so the same
/// policy object can serve concurrent episodes.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    virtual Decision decide(const Observation& obs, RngStream& rng) const = 0;
    /// Unarmed teams never fire.
    virtual bool armed() const { return true; }
};

/// Aim-assisted shot with angular jitter theta ~ Normal(0, aim_sigma): a hit
/// iff distance * |tan(theta)| <= target_radius_hit (|theta| < pi/2).
bool resolve_shot(RngStream& rng, double distance, double aim_sigma, double target_radius_hit);

/// Closed-form hit probability 2 * Phi(atan(r / d) / sigma) - 1.
double hit_probability(double distance, double aim_sigma, double target_radius_hit);

struct AgentOutcome {
    int hits_dealt = 0;
    int hits_taken = 0;
    bool alive = true;
    int eliminated_step = 0;  // 0 while alive

    friend bool operator==(const AgentOutcome&, const AgentOutcome&) = default;
};

struct MatchResult {
    Team winner = Team::red;
    EndReason end_reason = EndReason::timeout;
    int steps = 0;
    int blue_start = 0;
    int red_start = 0;
    std::uint64_t seed = 0;
    std::vector<AgentOutcome> blue;
    std::vector<AgentOutcome> red;
    int blue_fallback_steps = 0;
    int red_fallback_steps = 0;

    friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

struct ShotRecord {
    Team team = Team::blue;
    int shooter = 0;
    int target = 0;
    double distance = 0.0;
    bool hit = false;
};

struct StepRecord {
    int step = 0;
    std::vector<AgentView> agents;  // blue agents then red agents, after the step
    std::vector<ShotRecord> shots;
};

struct EpisodeOptions {
    /// Initial hits per agent (missing entries are 0).
    std::vector<int> blue_initial_hits;
    std::vector<int> red_initial_hits;
    /// Exchanges the teams' RNG stream tags; used to check that nothing but
    /// the objectives distinguishes the two teams.
    bool swap_team_streams = false;
    std::vector<StepRecord>* transcript = nullptr;
};

/// Runs one deterministic episode. Each step: both policies decide, all moves
/// apply at once (masked waypoint moves become stay), every living armed agent
/// fires at its nearest visible enemy in range with hits applied together, then
/// target reached / blue eliminated / timeout are checked in that order.
/// Throws PolicyFault when a policy returns a malformed decision.
MatchResult run_episode(const TerrainGrid& terrain, const WaypointGraph& graph,
                        const ScenarioConfig& cfg, const Policy& blue, const Policy& red,
                        int blue_start, int red_start, std::uint64_t episode_seed,
                        const EpisodeOptions& options = {});

/// Valid waypoints an agent team spawns on: the team_size closest to the
/// start (ties by id), repeated cyclically if the graph is smaller.
std::vector<NodeId> spawn_nodes(const TerrainGrid& terrain, const WaypointGraph& graph,
                                Vec2 start, int team_size);

/// mix64(base_seed ^ mix64(blue << 40 | red << 20 | episode)).
std::uint64_t episode_seed(std::uint64_t base_seed, int blue_start, int red_start, int episode) noexcept;

struct PairResult {
    int blue_start = 0;
    int red_start = 0;
    int episode = 0;
    MatchResult result;
};

struct WinTable {
    std::vector<PairResult> rows;  // ordered by (blue_start, red_start, episode)
    int blue_wins = 0;
    int red_wins = 0;
    int episodes() const noexcept { return static_cast<int>(rows.size()); }
};

struct TournamentOptions {
    int episodes_per_pair = 1;
    unsigned threads = 0;  // 0 = hardware concurrency
    bool swap_team_streams = false;
};

/// One episode per (blue start, red start) pair and repetition. Episodes run
/// concurrently; results are merged by pair index so output order is fixed.
WinTable tournament(const TerrainGrid& terrain, const WaypointGraph& graph,
                    const ScenarioConfig& cfg, const Policy& blue, const Policy& red,
                    std::uint64_t base_seed, const TournamentOptions& options = {});

}  // namespace waynav
