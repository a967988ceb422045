#include "waynav/scenario_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "waynav/error.hpp"
#include "waynav/file_util.hpp"
#include "waynav/policies.hpp"

namespace waynav {
namespace {

using json = nlohmann::ordered_json;

Vec2 point_from(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("'" + field + "' must be an [x, z] pair");
    return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<Vec2> points_from(const json& v, const std::string& field) {
    if (!v.is_array()) throw ConfigError("'" + field + "' must be an array of [x, z] pairs");
    std::vector<Vec2> out;
    for (std::size_t k = 0; k < v.size(); ++k)
        out.push_back(point_from(v[k], field + "[" + std::to_string(k) + "]"));
    return out;
}

template <typename T>
void read_number(const json& doc, const char* field, T& out) {
    const auto it = doc.find(field);
    if (it == doc.end()) return;
    if (!it->is_number()) throw ConfigError(std::string("'") + field + "' must be a number");
    if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw ConfigError(std::string("'") + field + "' must be an integer");
        if constexpr (std::is_unsigned_v<T>) {
            if (it->is_number_unsigned()) {
                out = it->get<T>();
                return;
            }
            if (it->get<std::int64_t>() < 0)
                throw ConfigError(std::string("'") + field + "' must be non-negative");
        }
    }
    out = it->get<T>();
}

PolicySpec policy_from(const json& doc, const std::string& field) {
    if (!doc.is_object()) throw ConfigError("'" + field + "' must be an object");
    PolicySpec spec;
    const auto type = doc.find("type");
    if (type == doc.end() || !type->is_string()) throw ConfigError("'" + field + ".type' is required");
    spec.type = type->get<std::string>();
    static const char* const known[] = {"greedy_attacker", "static_defender", "patrol",
                                        "stationary", "pacifist", "random_walk"};
    if (std::find(std::begin(known), std::end(known), spec.type) == std::end(known))
        throw ConfigError("'" + field + ".type' unknown policy '" + spec.type + "'");
    spec.name = spec.type;
    if (const auto n = doc.find("name"); n != doc.end()) {
        if (!n->is_string() || n->get<std::string>().empty())
            throw ConfigError("'" + field + ".name' must be a non-empty string");
        spec.name = n->get<std::string>();
    }
    if (const auto t = doc.find("target"); t != doc.end())
        spec.points = {point_from(*t, field + ".target")};
    if (const auto p = doc.find("posts"); p != doc.end())
        spec.points = points_from(*p, field + ".posts");
    if (const auto r = doc.find("route"); r != doc.end()) {
        if (!r->is_array()) throw ConfigError("'" + field + ".route' must be an array of node ids");
        for (const auto& id : *r) {
            if (!id.is_number_integer()) throw ConfigError("'" + field + ".route' must hold node ids");
            spec.route.push_back(id.get<NodeId>());
        }
    }
    return spec;
}

json outcome_json(const AgentOutcome& a) {
    return json{{"hits_dealt", a.hits_dealt},
                {"hits_taken", a.hits_taken},
                {"alive", a.alive},
                {"eliminated_step", a.eliminated_step}};
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%016" PRIx64, v);
    return buf;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
    Scenario s;
    ScenarioConfig& c = s.config;
    for (const char* f : {"blue_starts", "red_starts", "target"})
        if (!doc.contains(f)) throw ConfigError(std::string("'") + f + "' is required");
    c.blue_starts = points_from(doc["blue_starts"], "blue_starts");
    c.red_starts = points_from(doc["red_starts"], "red_starts");
    c.target = point_from(doc["target"], "target");
    read_number(doc, "team_size", c.team_size);
    read_number(doc, "target_radius", c.target_radius);
    read_number(doc, "hit_limit", c.hit_limit);
    read_number(doc, "max_steps", c.max_steps);
    read_number(doc, "fire_range", c.fire_range);
    read_number(doc, "aim_sigma", c.aim_sigma);
    read_number(doc, "target_radius_hit", c.target_radius_hit);
    read_number(doc, "agent_speed", c.agent_speed);
    read_number(doc, "step_dt", c.step_dt);
    read_number(doc, "eye_height", c.eye_height);
    read_number(doc, "rng_seed", c.rng_seed);
    if (const auto m = doc.find("move_mode"); m != doc.end()) {
        const auto mode = m->is_string() ? move_mode_from_string(m->get<std::string>()) : std::nullopt;
        if (!mode) throw ConfigError("'move_mode' must be \"waypoint\" or \"finegrained\"");
        c.move_mode = *mode;
    }
    s.blue = doc.contains("blue_policy") ? policy_from(doc["blue_policy"], "blue_policy")
                                          : PolicySpec{"greedy_attacker", "greedy_attacker", {}, {}};
    s.red = doc.contains("red_policy") ? policy_from(doc["red_policy"], "red_policy")
                                        : PolicySpec{"static_defender", "static_defender", {}, {}};
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    try {
        return parse_scenario(read_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const TerrainGrid& terrain,
                                    const WaypointGraph& graph, const ScenarioConfig& cfg) {
    if (spec.type == "greedy_attacker")
        return std::make_unique<GreedyAttacker>(terrain, graph,
                                                spec.points.empty() ? cfg.target : spec.points[0],
                                                spec.name);
    if (spec.type == "static_defender")
        return std::make_unique<StaticDefender>(terrain, graph, spec.points, spec.name);
    if (spec.type == "patrol") return std::make_unique<Patrol>(graph, spec.route, spec.name);
    if (spec.type == "stationary") return std::make_unique<Stationary>(true, spec.name);
    if (spec.type == "pacifist") return std::make_unique<Stationary>(false, spec.name);
    if (spec.type == "random_walk") return std::make_unique<RandomWalk>(spec.name);
    throw ConfigError("unknown policy '" + spec.type + "'");
}

std::string results_to_string(const ResultsMeta& meta, const WinTable& table) {
    json doc;
    doc["format_version"] = 1;
    doc["blue_policy"] = meta.blue_policy;
    doc["red_policy"] = meta.red_policy;
    doc["base_seed"] = hex64(meta.base_seed);
    doc["episodes_per_pair"] = meta.episodes_per_pair;
    doc["move_mode"] = std::string(to_string(meta.move_mode));
    json rows = json::array();
    for (const PairResult& p : table.rows) {
        const MatchResult& r = p.result;
        json blue = json::array(), red = json::array();
        for (const auto& a : r.blue) blue.push_back(outcome_json(a));
        for (const auto& a : r.red) red.push_back(outcome_json(a));
        rows.push_back(json{{"blue_start", p.blue_start},
                            {"red_start", p.red_start},
                            {"episode", p.episode},
                            {"seed", hex64(r.seed)},
                            {"winner", std::string(to_string(r.winner))},
                            {"end_reason", std::string(to_string(r.end_reason))},
                            {"steps", r.steps},
                            {"blue_fallback_steps", r.blue_fallback_steps},
                            {"red_fallback_steps", r.red_fallback_steps},
                            {"blue", std::move(blue)},
                            {"red", std::move(red)}});
    }
    doc["rows"] = std::move(rows);
    doc["totals"] = json{{"episodes", table.episodes()},
                         {"blue_wins", table.blue_wins},
                         {"red_wins", table.red_wins}};
    return doc.dump(2) + "\n";
}

ResultsFile parse_results(const std::string& text) {
    ResultsFile out;
    try {
        const json doc = json::parse(text);
        if (doc.at("format_version").get<int>() != 1) throw LoadError("unsupported results format_version");
        out.meta.blue_policy = doc.at("blue_policy").get<std::string>();
        out.meta.red_policy = doc.at("red_policy").get<std::string>();
        out.meta.base_seed = std::stoull(doc.at("base_seed").get<std::string>(), nullptr, 16);
        out.meta.episodes_per_pair = doc.at("episodes_per_pair").get<int>();
        const auto mode = move_mode_from_string(doc.at("move_mode").get<std::string>());
        if (!mode) throw LoadError("unknown move_mode");
        out.meta.move_mode = *mode;
        for (const auto& row : doc.at("rows")) {
            const auto w = team_from_string(row.at("winner").get<std::string>());
            if (!w) throw LoadError("unknown winner");
            out.winners.push_back(*w);
            (*w == Team::blue ? out.blue_wins : out.red_wins) += 1;
        }
        const json& totals = doc.at("totals");
        if (totals.at("blue_wins").get<int>() != out.blue_wins ||
            totals.at("red_wins").get<int>() != out.red_wins)
            throw LoadError("totals disagree with rows");
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed results: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw LoadError("malformed results: bad base_seed");
    } catch (const std::out_of_range&) {
        throw LoadError("malformed results: bad base_seed");
    }
    return out;
}

std::string transcript_to_string(const std::vector<StepRecord>& steps) {
    std::ostringstream os;
    for (const StepRecord& s : steps) {
        os << "step " << s.step;
        for (const AgentView& a : s.agents) {
            os << " | " << to_string(a.team) << a.index << " node " << a.node << " at "
               << fixed6(a.pos.x) << ',' << fixed6(a.pos.z) << " hits " << a.hits_taken
               << (a.alive ? "" : " dead");
        }
        for (const ShotRecord& sh : s.shots) {
            os << " | shot " << to_string(sh.team) << sh.shooter << "->" << sh.target << " d "
               << fixed6(sh.distance) << (sh.hit ? " hit" : " miss");
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace waynav
