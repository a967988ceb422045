#include "waynav/skirmish.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "waynav/error.hpp"
#include "waynav/trajectory.hpp"

namespace waynav {

namespace {

constexpr std::uint32_t kShotPurpose = 0;
constexpr std::uint32_t kPolicyPurpose = 1;
constexpr std::uint32_t kTeamWideAgent = 0xFFFF;

struct Agent {
    Team team = Team::blue;
    int index = 0;
    NodeId node = kNoNode;
    Vec2 pos;
    double y = 0.0;
    int hits_taken = 0;
    int hits_dealt = 0;
    bool alive = true;
    int eliminated_step = 0;

    Vec3 eye_base() const noexcept { return {pos.x, y, pos.z}; }
    AgentView view() const noexcept { return {index, team, node, pos, hits_taken, alive}; }
};

std::uint32_t stream_word(Team team, int agent, bool swapped) {
    auto tag = static_cast<std::uint32_t>(team);
    if (swapped) tag ^= 1u;
    return (tag << 16) | static_cast<std::uint32_t>(agent);
}

// visible[b * red + r]: blue b and red r are alive, within range and in sight.
std::vector<char> visibility(const TerrainGrid& terrain, const ScenarioConfig& cfg,
                             const std::vector<Agent>& blue, const std::vector<Agent>& red) {
    std::vector<char> vis(blue.size() * red.size(), 0);
    for (std::size_t b = 0; b < blue.size(); ++b) {
        if (!blue[b].alive) continue;
        for (std::size_t r = 0; r < red.size(); ++r) {
            if (!red[r].alive) continue;
            if (distance(blue[b].eye_base(), red[r].eye_base()) > cfg.fire_range) continue;
            vis[b * red.size() + r] =
                line_of_sight(terrain, blue[b].pos, red[r].pos, cfg.eye_height) ? 1 : 0;
        }
    }
    return vis;
}

bool sees(const std::vector<char>& vis, std::size_t nred, Team team, std::size_t self,
          std::size_t other) {
    return team == Team::blue ? vis[self * nred + other] != 0 : vis[other * nred + self] != 0;
}

Observation observe(const TerrainGrid& terrain, const WaypointGraph& graph,
                    const ScenarioConfig& cfg, Team team, int step,
                    const std::vector<Agent>& own, const std::vector<Agent>& enemy,
                    const std::vector<char>& vis, std::size_t nred) {
    Observation obs;
    obs.team = team;
    obs.step = step;
    obs.mode = cfg.move_mode;
    obs.terrain = &terrain;
    obs.graph = &graph;
    obs.target = cfg.target;
    obs.target_radius = cfg.target_radius;
    obs.move_step = cfg.agent_speed * cfg.step_dt;
    for (const Agent& a : own) {
        obs.own.push_back(a.view());
        if (!a.alive) continue;
        obs.living.push_back(a.index);
        if (cfg.move_mode == MoveMode::waypoint) {
            obs.masks.push_back(action_mask(graph, a.node));
        } else {
            ActionMask m{};
            m.fill(true);
            obs.masks.push_back(m);
        }
    }
    for (std::size_t e = 0; e < enemy.size(); ++e) {
        if (!enemy[e].alive) continue;
        for (std::size_t s = 0; s < own.size(); ++s) {
            if (own[s].alive && sees(vis, nred, team, s, e)) {
                obs.visible_enemies.push_back(enemy[e].view());
                break;
            }
        }
    }
    return obs;
}

Decision checked_decision(const Policy& policy, const Observation& obs, RngStream& rng) {
    Decision d = policy.decide(obs, rng);
    if (d.moves.size() != obs.living.size()) {
        throw PolicyFault(policy.name(), "returned " + std::to_string(d.moves.size()) +
                                             " moves for " + std::to_string(obs.living.size()) +
                                             " living agents at step " + std::to_string(obs.step));
    }
    for (const Move& m : d.moves) {
        if (obs.mode == MoveMode::waypoint) {
            if (!action_from_code(code(m.action))) {
                throw PolicyFault(policy.name(), "action code " + std::to_string(code(m.action)) +
                                                     " is outside 0..8");
            }
        } else if (m.dx < -1 || m.dx > 1 || m.dz < -1 || m.dz > 1) {
            throw PolicyFault(policy.name(), "finegrained move components must be in {-1, 0, 1}");
        }
    }
    return d;
}

void apply_moves(const TerrainGrid& terrain, const WaypointGraph& graph, const WalkMask* mask,
                 const ScenarioConfig& cfg, std::vector<Agent>& team, const Observation& obs,
                 const Decision& decision) {
    const double step = cfg.agent_speed * cfg.step_dt;
    for (std::size_t k = 0; k < obs.living.size(); ++k) {
        Agent& a = team[static_cast<std::size_t>(obs.living[k])];
        const Move& m = decision.moves[k];
        if (cfg.move_mode == MoveMode::waypoint) {
            if (!obs.masks[k][static_cast<std::size_t>(code(m.action))]) continue;  // masked => stay
            a.node = apply_action(graph, a.node, m.action);
            const Waypoint& w = graph.node(a.node);
            a.pos = w.position.horizontal();
            a.y = w.position.y;
        } else {
            const Vec2 next{a.pos.x + m.dx * step, a.pos.z + m.dz * step};
            if (!terrain.contains(next) || !mask->walkable(terrain.cell_at(next))) continue;
            a.pos = next;
            a.y = height_at(terrain, next.x, next.z);
        }
    }
}

void refresh_nearest(const WaypointGraph& graph, std::vector<Agent>& team) {
    for (Agent& a : team) {
        if (a.alive) a.node = nearest_waypoint(graph, a.pos);
    }
}

}  // namespace

std::string_view to_string(Team t) noexcept { return t == Team::blue ? "blue" : "red"; }

std::string_view to_string(MoveMode m) noexcept {
    return m == MoveMode::waypoint ? "waypoint" : "finegrained";
}

std::string_view to_string(EndReason r) noexcept {
    switch (r) {
        case EndReason::target_reached: return "target_reached";
        case EndReason::blue_eliminated: return "blue_eliminated";
        case EndReason::timeout: return "timeout";
    }
    return "timeout";
}

std::optional<MoveMode> move_mode_from_string(std::string_view s) noexcept {
    if (s == "waypoint") return MoveMode::waypoint;
    if (s == "finegrained") return MoveMode::finegrained;
    return std::nullopt;
}

std::optional<EndReason> end_reason_from_string(std::string_view s) noexcept {
    for (EndReason r : {EndReason::target_reached, EndReason::blue_eliminated, EndReason::timeout}) {
        if (to_string(r) == s) return r;
    }
    return std::nullopt;
}

std::optional<Team> team_from_string(std::string_view s) noexcept {
    if (s == "blue") return Team::blue;
    if (s == "red") return Team::red;
    return std::nullopt;
}

void validate(const ScenarioConfig& cfg, const TerrainGrid& terrain) {
    if (cfg.blue_starts.empty() || cfg.red_starts.empty()) {
        throw ConfigError("scenario: blue_starts and red_starts need at least one entry each");
    }
    if (cfg.team_size < 1) throw ConfigError("scenario: team_size must be >= 1");
    if (cfg.hit_limit < 1) throw ConfigError("scenario: hit_limit must be >= 1");
    if (cfg.max_steps < 1) throw ConfigError("scenario: max_steps must be >= 1");
    if (!(cfg.target_radius >= 0.0)) throw ConfigError("scenario: target_radius must be >= 0");
    if (!(cfg.fire_range >= 0.0)) throw ConfigError("scenario: fire_range must be >= 0");
    if (!(cfg.aim_sigma >= 0.0)) throw ConfigError("scenario: aim_sigma must be >= 0");
    if (!(cfg.target_radius_hit >= 0.0)) throw ConfigError("scenario: target_radius_hit must be >= 0");
    if (!(cfg.agent_speed >= 0.0) || !(cfg.step_dt > 0.0)) {
        throw ConfigError("scenario: agent_speed must be >= 0 and step_dt > 0");
    }
    if (!(cfg.eye_height >= 0.0)) throw ConfigError("scenario: eye_height must be >= 0");
    auto inside = [&](Vec2 p, const std::string& what) {
        if (!terrain.contains(p)) throw ConfigError("scenario: " + what + " lies outside the terrain");
    };
    for (std::size_t k = 0; k < cfg.blue_starts.size(); ++k) {
        inside(cfg.blue_starts[k], "blue_starts[" + std::to_string(k) + "]");
    }
    for (std::size_t k = 0; k < cfg.red_starts.size(); ++k) {
        inside(cfg.red_starts[k], "red_starts[" + std::to_string(k) + "]");
    }
    inside(cfg.target, "target");
}

bool resolve_shot(RngStream& rng, double dist, double aim_sigma, double target_radius_hit) {
    if (dist < 0.0) throw ContractError("resolve_shot: distance must be >= 0");
    const double theta = aim_sigma * rng.normal();
    if (dist == 0.0) return true;
    const double a = std::abs(theta);
    return a < std::numbers::pi / 2.0 && dist * std::tan(a) <= target_radius_hit;
}

double hit_probability(double dist, double aim_sigma, double target_radius_hit) {
    if (dist == 0.0 || aim_sigma == 0.0) return 1.0;
    const double half_angle = std::atan(target_radius_hit / dist);
    return std::erf(half_angle / (aim_sigma * std::numbers::sqrt2));
}

std::vector<NodeId> spawn_nodes(const TerrainGrid& terrain, const WaypointGraph& graph,
                                Vec2 start, int team_size) {
    const Vec3 s{start.x, height_at(terrain, start.x, start.z), start.z};
    std::vector<std::pair<double, NodeId>> ranked;
    for (const Waypoint& w : graph.nodes()) {
        if (w.valid) ranked.emplace_back(distance(w.position, s), w.id);
    }
    if (ranked.empty()) throw ConfigError("scenario: graph has no valid waypoint to spawn on");
    const auto take = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(team_size));
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end());
    std::vector<NodeId> out;
    for (int k = 0; k < team_size; ++k) out.push_back(ranked[static_cast<std::size_t>(k) % take].second);
    return out;
}

std::uint64_t episode_seed(std::uint64_t base_seed, int blue_start, int red_start, int episode) noexcept {
    const std::uint64_t pair = (static_cast<std::uint64_t>(blue_start) << 40) ^
                               (static_cast<std::uint64_t>(red_start) << 20) ^
                               static_cast<std::uint64_t>(episode);
    return mix64(base_seed ^ mix64(pair));
}

namespace {

MatchResult run_episode_impl(const TerrainGrid& terrain, const WaypointGraph& graph,
                             const WalkMask* mask, const ScenarioConfig& cfg, const Policy& blue_policy,
                             const Policy& red_policy, int blue_start, int red_start,
                             std::uint64_t seed, const EpisodeOptions& options) {
    if (blue_start < 0 || static_cast<std::size_t>(blue_start) >= cfg.blue_starts.size() ||
        red_start < 0 || static_cast<std::size_t>(red_start) >= cfg.red_starts.size()) {
        throw ContractError("run_episode: start index out of range");
    }

    auto spawn = [&](Team team, Vec2 start, const std::vector<int>& initial_hits) {
        std::vector<Agent> agents;
        const auto nodes = spawn_nodes(terrain, graph, start, cfg.team_size);
        for (int k = 0; k < cfg.team_size; ++k) {
            Agent a;
            a.team = team;
            a.index = k;
            a.node = nodes[static_cast<std::size_t>(k)];
            a.pos = graph.node(a.node).position.horizontal();
            a.y = graph.node(a.node).position.y;
            if (static_cast<std::size_t>(k) < initial_hits.size()) a.hits_taken = initial_hits[static_cast<std::size_t>(k)];
            a.alive = a.hits_taken <= cfg.hit_limit;
            agents.push_back(a);
        }
        return agents;
    };
    std::vector<Agent> blue = spawn(Team::blue, cfg.blue_starts[static_cast<std::size_t>(blue_start)],
                                    options.blue_initial_hits);
    std::vector<Agent> red = spawn(Team::red, cfg.red_starts[static_cast<std::size_t>(red_start)],
                                   options.red_initial_hits);
    const std::size_t nred = red.size();
    const bool swapped = options.swap_team_streams;

    MatchResult result;
    result.blue_start = blue_start;
    result.red_start = red_start;
    result.seed = seed;

    bool done = false;
    for (int step = 1; step <= cfg.max_steps && !done; ++step) {
        // 1. decide
        const auto vis_before = visibility(terrain, cfg, blue, red);
        const Observation obs_blue =
            observe(terrain, graph, cfg, Team::blue, step, blue, red, vis_before, nred);
        const Observation obs_red =
            observe(terrain, graph, cfg, Team::red, step, red, blue, vis_before, nred);
        RngStream blue_rng(seed, static_cast<std::uint32_t>(step),
                           stream_word(Team::blue, kTeamWideAgent, swapped), kPolicyPurpose);
        RngStream red_rng(seed, static_cast<std::uint32_t>(step),
                          stream_word(Team::red, kTeamWideAgent, swapped), kPolicyPurpose);
        const Decision dec_blue = checked_decision(blue_policy, obs_blue, blue_rng);
        const Decision dec_red = checked_decision(red_policy, obs_red, red_rng);
        if (dec_blue.fallback) ++result.blue_fallback_steps;
        if (dec_red.fallback) ++result.red_fallback_steps;

        // 2. move simultaneously
        apply_moves(terrain, graph, mask, cfg, blue, obs_blue, dec_blue);
        apply_moves(terrain, graph, mask, cfg, red, obs_red, dec_red);
        if (cfg.move_mode == MoveMode::finegrained) {
            refresh_nearest(graph, blue);
            refresh_nearest(graph, red);
        }

        // 3. fire simultaneously
        const auto vis = visibility(terrain, cfg, blue, red);
        std::vector<ShotRecord> shots;
        auto volley = [&](Team team, std::vector<Agent>& shooters, const std::vector<Agent>& targets,
                          bool armed) {
            if (!armed) return;
            for (std::size_t s = 0; s < shooters.size(); ++s) {
                if (!shooters[s].alive) continue;
                int best = -1;
                double best_d = 0.0;
                for (std::size_t t = 0; t < targets.size(); ++t) {
                    if (!targets[t].alive || !sees(vis, nred, team, s, t)) continue;
                    const double d = distance(shooters[s].eye_base(), targets[t].eye_base());
                    if (best < 0 || d < best_d) {
                        best = static_cast<int>(t);
                        best_d = d;
                    }
                }
                if (best < 0) continue;
                RngStream rng(seed, static_cast<std::uint32_t>(step),
                              stream_word(team, static_cast<int>(s), swapped), kShotPurpose);
                const bool hit = resolve_shot(rng, best_d, cfg.aim_sigma, cfg.target_radius_hit);
                shots.push_back({team, static_cast<int>(s), best, best_d, hit});
            }
        };
        volley(Team::blue, blue, red, blue_policy.armed());
        volley(Team::red, red, blue, red_policy.armed());
        for (const ShotRecord& shot : shots) {
            if (!shot.hit) continue;
            auto& shooter = shot.team == Team::blue ? blue : red;
            auto& victims = shot.team == Team::blue ? red : blue;
            ++shooter[static_cast<std::size_t>(shot.shooter)].hits_dealt;
            ++victims[static_cast<std::size_t>(shot.target)].hits_taken;
        }
        for (auto* team : {&blue, &red}) {
            for (Agent& a : *team) {
                if (a.alive && a.hits_taken > cfg.hit_limit) {
                    a.alive = false;
                    a.eliminated_step = step;
                }
            }
        }

        if (options.transcript) {
            StepRecord rec;
            rec.step = step;
            for (const Agent& a : blue) rec.agents.push_back(a.view());
            for (const Agent& a : red) rec.agents.push_back(a.view());
            rec.shots = shots;
            options.transcript->push_back(std::move(rec));
        }

        // 4. termination
        result.steps = step;
        const bool reached = std::any_of(blue.begin(), blue.end(), [&](const Agent& a) {
            return a.alive && distance(a.pos, cfg.target) <= cfg.target_radius;
        });
        const bool blue_dead =
            std::none_of(blue.begin(), blue.end(), [](const Agent& a) { return a.alive; });
        if (reached) {
            result.winner = Team::blue;
            result.end_reason = EndReason::target_reached;
            done = true;
        } else if (blue_dead) {
            result.winner = Team::red;
            result.end_reason = EndReason::blue_eliminated;
            done = true;
        } else if (step == cfg.max_steps) {
            result.winner = Team::red;
            result.end_reason = EndReason::timeout;
            done = true;
        }
    }

    auto outcomes = [](const std::vector<Agent>& team) {
        std::vector<AgentOutcome> out;
        for (const Agent& a : team) out.push_back({a.hits_dealt, a.hits_taken, a.alive, a.eliminated_step});
        return out;
    };
    result.blue = outcomes(blue);
    result.red = outcomes(red);
    return result;
}

std::optional<WalkMask> engine_mask(const TerrainGrid& terrain, const WaypointGraph& graph,
                                    const ScenarioConfig& cfg) {
    if (cfg.move_mode != MoveMode::finegrained) return std::nullopt;
    return walkable_mask(terrain, graph.config().slope_max_deg);
}

}  // namespace

MatchResult run_episode(const TerrainGrid& terrain, const WaypointGraph& graph,
                        const ScenarioConfig& cfg, const Policy& blue, const Policy& red,
                        int blue_start, int red_start, std::uint64_t seed,
                        const EpisodeOptions& options) {
    validate(cfg, terrain);
    const auto mask = engine_mask(terrain, graph, cfg);
    return run_episode_impl(terrain, graph, mask ? &*mask : nullptr, cfg, blue, red, blue_start,
                            red_start, seed, options);
}

WinTable tournament(const TerrainGrid& terrain, const WaypointGraph& graph,
                    const ScenarioConfig& cfg, const Policy& blue, const Policy& red,
                    std::uint64_t base_seed, const TournamentOptions& options) {
    validate(cfg, terrain);
    if (options.episodes_per_pair < 1) throw ConfigError("tournament: episodes_per_pair must be >= 1");
    const auto mask = engine_mask(terrain, graph, cfg);
    const WalkMask* mask_ptr = mask ? &*mask : nullptr;

    const int nb = static_cast<int>(cfg.blue_starts.size());
    const int nr = static_cast<int>(cfg.red_starts.size());
    const int per = options.episodes_per_pair;
    const std::size_t total = static_cast<std::size_t>(nb) * nr * per;

    WinTable table;
    table.rows.resize(total);
    std::vector<std::exception_ptr> errors(total);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            const int e = static_cast<int>(k % static_cast<std::size_t>(per));
            const int r = static_cast<int>((k / static_cast<std::size_t>(per)) % static_cast<std::size_t>(nr));
            const int b = static_cast<int>(k / (static_cast<std::size_t>(per) * nr));
            PairResult& row = table.rows[k];
            row.blue_start = b;
            row.red_start = r;
            row.episode = e;
            try {
                EpisodeOptions eo;
                eo.swap_team_streams = options.swap_team_streams;
                row.result = run_episode_impl(terrain, graph, mask_ptr, cfg, blue, red, b, r,
                                              episode_seed(base_seed, b, r, e), eo);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (std::size_t k = 0; k < total; ++k) {
        if (!errors[k]) continue;
        const PairResult& row = table.rows[k];
        const std::string where = "tournament pair (blue " + std::to_string(row.blue_start) + ", red " +
                                  std::to_string(row.red_start) + ", episode " +
                                  std::to_string(row.episode) + ")";
        try {
            std::rethrow_exception(errors[k]);
        } catch (const PolicyFault& f) {
            throw PolicyFault(f.policy(), where + ": " + f.what());
        } catch (const std::exception& ex) {
            throw Error(where + ": " + ex.what());
        }
    }
    for (const PairResult& row : table.rows) {
        if (row.result.winner == Team::blue) {
            ++table.blue_wins;
        } else {
            ++table.red_wins;
        }
    }
    return table;
}

}  // namespace waynav
