#include "waynav/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "waynav/elo.hpp"
#include "waynav/error.hpp"
#include "waynav/file_util.hpp"
#include "waynav/graph_io.hpp"
#include "waynav/scenario_io.hpp"
#include "waynav/terrain.hpp"
#include "waynav/trajectory.hpp"

namespace waynav {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// Operational failure with the flag and file it concerns already in the text.
struct Failure : Error {
    using Error::Error;
};

template <typename F>
auto with_context(const std::string& flag, const std::string& path, F&& f) {
    try {
        return f();
    } catch (const Failure&) {
        throw;
    } catch (const std::exception& e) {
        throw Failure(flag + " " + path + ": " + e.what());
    }
}

TerrainGrid terrain_arg(const std::string& path) {
    return with_context("--terrain", path, [&] { return load_terrain(path); });
}

WaypointGraph graph_arg(const std::string& path) {
    return with_context("--graph", path, [&] { return load_graph(path); });
}

void write_out(const std::string& path, const std::string& contents) {
    with_context("--out", path, [&] { write_file_atomic(path, contents); });
}

CostMode cost_arg(const std::string& s) {
    const auto m = cost_mode_from_string(s);
    if (!m) throw Failure("--cost: unknown mode '" + s + "'");
    return *m;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

json fidelity_json(const FidelityReport& r) {
    return json{{"actual_total", r.actual_total},
                {"waypoint_total", r.waypoint_total},
                {"relative_difference", r.relative_difference},
                {"r2_stepwise", optional_number(r.r2_stepwise)},
                {"mean_diff_stepwise", r.mean_diff_stepwise},
                {"mean_diff_roundwise", r.mean_diff_roundwise},
                {"out_of_region", r.out_of_region},
                {"actual_step", r.actual_step},
                {"waypoint_step", r.waypoint_step}};
}

// ---- build-graph ----------------------------------------------------------

struct BuildArgs {
    std::string terrain, out;
    double spacing = 2.0;
    double slope_max = kDefaultSlopeMaxDeg;
    double detour_max = 1.5;
    std::optional<double> vstep_max, seed_x, seed_z;
};

std::optional<Vec2> default_seed(const TerrainGrid& grid, const WalkMask& mask) {
    for (int row = 0; row < grid.nrows(); ++row)
        for (int col = 0; col < grid.ncols(); ++col)
            if (mask.walkable(Cell{col, row})) return grid.cell_center(Cell{col, row});
    return std::nullopt;
}

int cmd_build_graph(const BuildArgs& a, std::ostream& out) {
    const TerrainGrid grid = terrain_arg(a.terrain);
    GraphConfig cfg;
    cfg.spacing = a.spacing;
    cfg.slope_max_deg = a.slope_max;
    cfg.detour_max = a.detour_max;
    cfg.vstep_max = a.vstep_max.value_or(0.5 * a.spacing);
    const WalkMask mask = with_context("--slope-max", fmt("%g", a.slope_max),
                                       [&] { return walkable_mask(grid, a.slope_max); });
    if (a.seed_x.has_value() != a.seed_z.has_value())
        throw Failure("--seed-x and --seed-z must be given together");
    if (a.seed_x) {
        cfg.seed_point = {*a.seed_x, *a.seed_z};
    } else {
        const auto seed = default_seed(grid, mask);
        if (!seed) throw Failure("--terrain " + a.terrain + ": no walkable cell to seed from");
        cfg.seed_point = *seed;
    }
    cfg = quantized(cfg);
    WaypointGraph graph = [&] {
        try {
            return fill_gaps(generate(grid, mask, cfg), grid, mask);
        } catch (const SeedError& e) {
            throw Failure(std::string("--seed-x/--seed-z: ") + e.what());
        } catch (const ConfigError& e) {
            throw Failure(std::string("--spacing/--detour-max: ") + e.what());
        }
    }();
    write_out(a.out, graph_to_string(graph));
    std::size_t valid_edges = 0;
    const auto edges = graph.edges();
    for (const Edge& e : edges) valid_edges += e.valid;
    out << "nodes " << graph.size() << " valid " << graph.valid_node_count() << '\n'
        << "directed edges " << edges.size() << " valid " << valid_edges << '\n';
    return 0;
}

// ---- validate-graph --------------------------------------------------------

int cmd_validate_graph(const std::string& terrain_path, const std::string& graph_path,
                       std::ostream& out, std::ostream& err) {
    const TerrainGrid grid = terrain_arg(terrain_path);
    const WaypointGraph graph = graph_arg(graph_path);
    const GraphConfig& cfg = graph.config();
    const WalkMask mask = walkable_mask(grid, cfg.slope_max_deg);
    std::size_t node_mismatch = 0, edge_mismatch = 0;
    for (const Waypoint& w : graph.nodes()) {
        const Vec2 p = graph.lattice_position(w.lattice);
        const bool valid = waypoint_site_valid(grid, mask, p);
        if (valid != w.valid) {
            ++node_mismatch;
            err << "node " << w.id << ": stored valid=" << w.valid << ", terrain gives " << valid << '\n';
        }
    }
    const auto edges = graph.edges();
    for (const Edge& e : edges) {
        const Edge fresh = validate_edge(grid, mask, graph.node(e.from), graph.node(e.to), cfg);
        if (fresh.valid != e.valid || fresh.reason != e.reason) {
            ++edge_mismatch;
            err << "edge " << e.from << "->" << e.to << ": stored " << to_string(e.reason)
                << ", terrain gives " << to_string(fresh.reason) << '\n';
        }
    }
    const LatticeBounds b = lattice_bounds(grid, cfg);
    std::size_t missing = 0;
    for (int j = b.j_min; j <= b.j_max; ++j)
        for (int i = b.i_min; i <= b.i_max; ++i)
            if (!graph.find(Lattice{i, j}) &&
                waypoint_site_valid(grid, mask, graph.lattice_position(Lattice{i, j})))
                ++missing;
    out << "nodes " << graph.size() << " edges " << edges.size() << '\n'
        << "node mismatches " << node_mismatch << '\n'
        << "edge mismatches " << edge_mismatch << '\n'
        << "uncovered walkable lattice points " << missing << '\n';
    return node_mismatch + edge_mismatch == 0 ? 0 : 1;
}

// ---- snap ------------------------------------------------------------------

int cmd_snap(const std::string& graph_path, const std::string& traj_path, const std::string& cost,
             const std::string& out_path, std::ostream& out) {
    const CostMode mode = cost_arg(cost);
    const WaypointGraph graph = graph_arg(graph_path);
    const Trajectory traj =
        with_context("--traj", traj_path, [&] { return load_trajectory(traj_path); });
    const SnappedPath sp =
        with_context("--traj", traj_path, [&] { return snap(graph, traj, mode); });
    json doc;
    doc["source"] = fs::path(traj_path).filename().string();
    doc["cost"] = std::string(to_string(mode));
    doc["samples"] = traj.samples.size();
    doc["out_of_region"] = sp.out_of_region;
    doc["assignments"] = sp.assignments;
    doc["path_index"] = sp.path_index;
    doc["path"] = sp.path;
    std::optional<FidelityReport> fid;
    try {
        fid = fidelity(traj, sp, graph);
        doc["fidelity"] = fidelity_json(*fid);
    } catch (const Error& e) {
        doc["fidelity"] = nullptr;
        doc["fidelity_error"] = e.what();
    }
    write_out(out_path, doc.dump(2) + "\n");
    out << "samples " << traj.samples.size() << " path nodes " << sp.path.size() << '\n';
    if (fid) {
        out << "actual " << fmt("%.3f", fid->actual_total) << " m  waypoint "
            << fmt("%.3f", fid->waypoint_total) << " m  relative difference "
            << fmt("%.5f", fid->relative_difference) << '\n';
    }
    if (sp.out_of_region) out << "warning: " << sp.out_of_region << " samples outside the graph\n";
    return 0;
}

// ---- analyze ---------------------------------------------------------------

int cmd_analyze(const std::string& graph_path, const std::string& dir, const std::string& cost,
                const std::string& out_path, std::ostream& out) {
    const CostMode mode = cost_arg(cost);
    const WaypointGraph graph = graph_arg(graph_path);
    std::vector<fs::path> files;
    with_context("--traj-dir", dir, [&] {
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                files.push_back(entry.path());
    });
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Failure("--traj-dir " + dir + ": no .csv files");
    const CorpusReport rep =
        with_context("--traj-dir", dir, [&] { return analyze_corpus(graph, files, mode); });
    const CorpusAggregate& ag = rep.aggregate;
    json records = json::array();
    for (const CorpusRecord& r : rep.records) {
        json row{{"source", r.source}};
        if (r.report) {
            row["status"] = "analysed";
            const json fid = fidelity_json(*r.report);
            for (const auto& [k, v] : fid.items()) row[k] = v;
        } else {
            row["status"] = "skipped";
            row["error"] = r.error;
        }
        records.push_back(std::move(row));
    }
    json doc;
    doc["cost"] = std::string(to_string(mode));
    doc["aggregate"] = json{{"analysed", ag.analysed},
                            {"skipped", ag.skipped},
                            {"errored", ag.errored},
                            {"mean_relative_difference", ag.mean_relative_difference},
                            {"std_relative_difference", ag.std_relative_difference},
                            {"r2_stepwise", optional_number(ag.r2_stepwise)},
                            {"r2_roundwise", optional_number(ag.r2_roundwise)},
                            {"mean_diff_stepwise", ag.mean_diff_stepwise},
                            {"mean_diff_roundwise", ag.mean_diff_roundwise},
                            {"out_of_region", ag.out_of_region}};
    doc["records"] = std::move(records);
    write_out(out_path, doc.dump(2) + "\n");
    auto opt = [](const std::optional<double>& v) { return v ? fmt("%.4f", *v) : std::string("n/a"); };
    out << "trajectories analysed " << ag.analysed << "  skipped " << ag.skipped << "  errored "
        << ag.errored << '\n'
        << "relative difference  mean " << fmt("%.5f", ag.mean_relative_difference) << "  std "
        << fmt("%.5f", ag.std_relative_difference) << '\n'
        << "r2 stepwise          " << opt(ag.r2_stepwise) << '\n'
        << "r2 round-wise        " << opt(ag.r2_roundwise) << '\n'
        << "mean diff stepwise   " << fmt("%.4f", ag.mean_diff_stepwise) << " m\n"
        << "mean diff round-wise " << fmt("%.4f", ag.mean_diff_roundwise) << " m\n";
    return 0;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    std::string terrain, graph, scenario, out;
    int episodes_per_pair = 1;
    std::uint64_t seed = 0;
    bool transcript = false;
    unsigned threads = 0;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const TerrainGrid grid = terrain_arg(a.terrain);
    const WaypointGraph graph = graph_arg(a.graph);
    Scenario sc = with_context("--scenario", a.scenario, [&] {
        Scenario s = load_scenario(a.scenario);
        s.config.rng_seed = a.seed;
        validate(s.config, grid);
        return s;
    });
    const auto blue = with_context("--scenario", a.scenario,
                                   [&] { return make_policy(sc.blue, grid, graph, sc.config); });
    const auto red = with_context("--scenario", a.scenario,
                                  [&] { return make_policy(sc.red, grid, graph, sc.config); });
    if (a.episodes_per_pair < 1) throw Failure("--episodes-per-pair must be at least 1");
    TournamentOptions opt;
    opt.episodes_per_pair = a.episodes_per_pair;
    opt.threads = a.threads;
    const WinTable table = tournament(grid, graph, sc.config, *blue, *red, a.seed, opt);
    ResultsMeta meta{blue->name(), red->name(), a.seed, a.episodes_per_pair, sc.config.move_mode};
    write_out(a.out, results_to_string(meta, table));
    if (a.transcript) {
        std::string text;
        for (const PairResult& p : table.rows) {
            std::vector<StepRecord> steps;
            EpisodeOptions eo;
            eo.transcript = &steps;
            run_episode(grid, graph, sc.config, *blue, *red, p.blue_start, p.red_start,
                        p.result.seed, eo);
            text += "episode blue_start " + std::to_string(p.blue_start) + " red_start " +
                    std::to_string(p.red_start) + " repeat " + std::to_string(p.episode) + '\n';
            text += transcript_to_string(steps);
        }
        write_out(a.out + ".transcript", text);
    }
    out << blue->name() << " (blue) vs " << red->name() << " (red)\n"
        << "episodes  " << table.episodes() << '\n'
        << "blue wins " << table.blue_wins << '\n'
        << "red wins  " << table.red_wins << '\n';
    return 0;
}

// ---- elo-report ------------------------------------------------------------

int cmd_elo_report(const std::vector<std::string>& results, double k, const std::string& out_path,
                   std::ostream& out) {
    EloTable table = with_context("--k", fmt("%g", k), [&] { return EloTable(k); });
    std::size_t processed = 0;
    for (const std::string& path : results) {
        const ResultsFile rf =
            with_context("--results", path, [&] { return parse_results(read_file(path)); });
        if (rf.meta.blue_policy == rf.meta.red_policy)
            throw Failure("--results " + path + ": both teams are named '" + rf.meta.blue_policy +
                          "'; give the policies distinct names");
        table.add(rf.meta.blue_policy);
        table.add(rf.meta.red_policy);
        for (Team w : rf.winners) {
            table.update(rf.meta.blue_policy, rf.meta.red_policy, w == Team::blue ? 1.0 : 0.0);
            ++processed;
        }
    }
    json standings = json::array();
    for (const EloEntry& e : table.standings())
        standings.push_back(json{{"policy", e.policy}, {"rating", e.rating}, {"matches", e.matches}});
    json doc{{"k", k}, {"initial", 1200.0}, {"matches", processed}, {"standings", standings}};
    write_out(out_path, doc.dump(2) + "\n");
    std::size_t width = 6;
    for (const EloEntry& e : table.standings()) width = std::max(width, e.policy.size());
    for (const EloEntry& e : table.standings()) {
        out << e.policy << std::string(width - e.policy.size() + 2, ' ') << fmt("%9.2f", e.rating)
            << "  " << e.matches << '\n';
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Waypoint navigation graphs, trajectory fidelity and skirmish simulation", "waynav"};
    app.require_subcommand(1);

    BuildArgs build;
    auto* c_build = app.add_subcommand("build-graph", "Generate and gap-fill a waypoint graph");
    c_build->add_option("--terrain", build.terrain, "Terrain file")->required();
    c_build->add_option("--spacing", build.spacing, "Lattice spacing in metres")->required();
    c_build->add_option("--slope-max", build.slope_max, "Walkable slope limit in degrees");
    c_build->add_option("--detour-max", build.detour_max, "Maximum walk/euclid ratio per edge");
    c_build->add_option("--vstep-max", build.vstep_max, "Maximum height step per edge (default spacing/2)");
    c_build->add_option("--seed-x", build.seed_x, "Seed point x");
    c_build->add_option("--seed-z", build.seed_z, "Seed point z");
    c_build->add_option("--out", build.out, "Output graph file")->required();

    std::string v_terrain, v_graph;
    auto* c_validate = app.add_subcommand("validate-graph", "Re-derive graph validity from terrain");
    c_validate->add_option("--terrain", v_terrain, "Terrain file")->required();
    c_validate->add_option("--graph", v_graph, "Graph file")->required();

    std::string s_graph, s_traj, s_cost = "unit", s_out;
    auto* c_snap = app.add_subcommand("snap", "Snap one trajectory onto the graph");
    c_snap->add_option("--graph", s_graph, "Graph file")->required();
    c_snap->add_option("--traj", s_traj, "Trajectory CSV")->required();
    c_snap->add_option("--cost", s_cost, "unit or euclid");
    c_snap->add_option("--out", s_out, "Output file")->required();

    std::string a_graph, a_dir, a_cost = "unit", a_out;
    auto* c_analyze = app.add_subcommand("analyze", "Fidelity report over a trajectory directory");
    c_analyze->add_option("--graph", a_graph, "Graph file")->required();
    c_analyze->add_option("--traj-dir", a_dir, "Directory of trajectory CSVs")->required();
    c_analyze->add_option("--cost", a_cost, "unit or euclid");
    c_analyze->add_option("--out", a_out, "Output report")->required();

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Run a skirmish tournament");
    c_sim->add_option("--terrain", sim.terrain, "Terrain file")->required();
    c_sim->add_option("--graph", sim.graph, "Graph file")->required();
    c_sim->add_option("--scenario", sim.scenario, "Scenario JSON")->required();
    c_sim->add_option("--episodes-per-pair", sim.episodes_per_pair, "Repetitions per start pair");
    c_sim->add_option("--seed", sim.seed, "Base seed")->required();
    c_sim->add_option("--out", sim.out, "Results file")->required();
    c_sim->add_flag("--transcript", sim.transcript, "Also write <out>.transcript");
    c_sim->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");

    std::vector<std::string> e_results;
    double e_k = 16.0;
    std::string e_out;
    auto* c_elo = app.add_subcommand("elo-report", "ELO ratings from results files");
    c_elo->add_option("--results", e_results, "Results files, applied in order")->required();
    c_elo->add_option("--k", e_k, "K factor");
    c_elo->add_option("--out", e_out, "Output table")->required();

    if (!args.empty() && !args[0].empty() && args[0][0] != '-' && app.get_subcommand_no_throw(args[0]) == nullptr) {
        err << "error: unknown subcommand '" << args[0] << "'\n";
        return 2;
    }
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (c_build->parsed()) return cmd_build_graph(build, out);
        if (c_validate->parsed()) return cmd_validate_graph(v_terrain, v_graph, out, err);
        if (c_snap->parsed()) return cmd_snap(s_graph, s_traj, s_cost, s_out, out);
        if (c_analyze->parsed()) return cmd_analyze(a_graph, a_dir, a_cost, a_out, out);
        if (c_sim->parsed()) return cmd_simulate(sim, out);
        if (c_elo->parsed()) return cmd_elo_report(e_results, e_k, e_out, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace waynav
