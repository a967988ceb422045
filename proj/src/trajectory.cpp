#include "waynav/trajectory.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string_view>

#include "waynav/error.hpp"
#include "waynav/stats.hpp"

namespace waynav {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_field(std::string_view tok, const char* column, std::size_t line) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (tok.empty() || ec != std::errc{} || ptr != last) {
        throw ParseError("trajectory: cannot parse column '" + std::string(column) + "' value '" +
                             std::string(tok) + "'",
                         line);
    }
    if (!std::isfinite(v)) {
        throw ParseError("trajectory: non-finite value in column '" + std::string(column) + "'", line);
    }
    return v;
}

const Edge& edge_between(const WaypointGraph& graph, NodeId a, NodeId b) {
    const Lattice la = graph.node(a).lattice;
    const Lattice lb = graph.node(b).lattice;
    const auto d = direction_between(lb.i - la.i, lb.j - la.j);
    const Edge* e = d ? graph.edge(a, *d) : nullptr;
    if (!traversable(e)) {
        throw ContractError("snapped path: nodes " + std::to_string(a) + " and " +
                            std::to_string(b) + " are not joined by a valid edge");
    }
    return *e;
}

struct Footprint {
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -std::numeric_limits<double>::infinity();
    double z0 = std::numeric_limits<double>::infinity();
    double z1 = -std::numeric_limits<double>::infinity();
    bool contains(const Vec3& p) const noexcept {
        return p.x >= x0 && p.x <= x1 && p.z >= z0 && p.z <= z1;
    }
};

Footprint footprint(const WaypointGraph& graph) {
    Footprint f;
    const double pad = graph.config().spacing / 2.0;
    for (const Waypoint& w : graph.nodes()) {
        if (!w.valid) continue;
        f.x0 = std::min(f.x0, w.position.x - pad);
        f.x1 = std::max(f.x1, w.position.x + pad);
        f.z0 = std::min(f.z0, w.position.z - pad);
        f.z1 = std::max(f.z1, w.position.z + pad);
    }
    return f;
}

}  // namespace

Trajectory read_trajectory(std::istream& in) {
    Trajectory traj;
    std::string raw;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto cols = split_commas(line);
        if (!have_header) {
            static constexpr std::array<std::string_view, 4> kHeader = {"t", "x", "y", "z"};
            if (cols.size() != kHeader.size() || !std::equal(cols.begin(), cols.end(), kHeader.begin())) {
                throw ParseError("trajectory: header must be 't,x,y,z'", lineno);
            }
            have_header = true;
            continue;
        }
        if (cols.size() != 4) {
            throw ParseError("trajectory: expected 4 columns, got " + std::to_string(cols.size()),
                             lineno);
        }
        TrajectorySample s;
        s.t = parse_field(cols[0], "t", lineno);
        s.position = {parse_field(cols[1], "x", lineno), parse_field(cols[2], "y", lineno),
                      parse_field(cols[3], "z", lineno)};
        if (!traj.samples.empty() && !(s.t > traj.samples.back().t)) {
            throw ParseError("trajectory: timestamps must be strictly increasing", lineno);
        }
        traj.samples.push_back(s);
    }
    if (!have_header) throw ParseError("trajectory: missing header 't,x,y,z'", lineno);
    return traj;
}

Trajectory load_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("trajectory: cannot open '" + path.string() + "'", 0);
    try {
        return read_trajectory(in);
    } catch (const ParseError& e) {
        throw e.prefixed(path.string());
    }
}

NodeId nearest_waypoint(const WaypointGraph& graph, const Vec3& p) {
    NodeId best = kNoNode;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const Waypoint& w : graph.nodes()) {
        if (!w.valid) continue;
        const double dx = w.position.x - p.x;
        const double dy = w.position.y - p.y;
        const double dz = w.position.z - p.z;
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = w.id;
        }
    }
    if (best == kNoNode) throw ContractError("nearest_waypoint: graph has no valid waypoints");
    return best;
}

NodeId nearest_waypoint(const WaypointGraph& graph, Vec2 p) {
    // When the lattice point under p is a valid waypoint, the answer (ties
    // included) lies in its 3x3 neighbourhood.
    const GraphConfig& cfg = graph.config();
    const Lattice centre{static_cast<int>(std::lround((p.x - cfg.seed_point.x) / cfg.spacing)),
                         static_cast<int>(std::lround((p.z - cfg.seed_point.z) / cfg.spacing))};
    if (const auto c = graph.find(centre); c && graph.node(*c).valid) {
        NodeId best = *c;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                const auto id = graph.find({centre.i + di, centre.j + dj});
                if (!id || !graph.node(*id).valid) continue;
                const Vec3& q = graph.node(*id).position;
                const double d2 = (q.x - p.x) * (q.x - p.x) + (q.z - p.z) * (q.z - p.z);
                if (d2 < best_d2 || (d2 == best_d2 && *id < best)) {
                    best_d2 = d2;
                    best = *id;
                }
            }
        }
        return best;
    }
    NodeId best = kNoNode;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const Waypoint& w : graph.nodes()) {
        if (!w.valid) continue;
        const double dx = w.position.x - p.x;
        const double dz = w.position.z - p.z;
        const double d2 = dx * dx + dz * dz;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = w.id;
        }
    }
    if (best == kNoNode) throw ContractError("nearest_waypoint: graph has no valid waypoints");
    return best;
}

SnappedPath snap(const WaypointGraph& graph, const Trajectory& traj, CostMode mode) {
    SnappedPath out;
    out.mode = mode;
    if (traj.samples.empty()) return out;
    const Footprint fp = footprint(graph);

    out.assignments.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        out.assignments.push_back(nearest_waypoint(graph, s.position));
        if (!fp.contains(s.position)) ++out.out_of_region;
    }

    out.path.push_back(out.assignments.front());
    out.path_index.push_back(0);
    for (std::size_t k = 1; k < out.assignments.size(); ++k) {
        const NodeId target = out.assignments[k];
        if (target != out.path.back()) {
            PathResult seg;
            try {
                seg = shortest_path(graph, out.path.back(), target, mode);
            } catch (const NoPathError&) {
                throw NoPathError("snap: sample " + std::to_string(k) + " (waypoint " +
                                  std::to_string(target) + ") is not reachable from sample " +
                                  std::to_string(k - 1) + " (waypoint " +
                                  std::to_string(out.path.back()) + ")");
            }
            out.path.insert(out.path.end(), seg.nodes.begin() + 1, seg.nodes.end());
        }
        out.path_index.push_back(out.path.size() - 1);
    }
    return out;
}

FidelityReport fidelity(const Trajectory& traj, const SnappedPath& snapped,
                        const WaypointGraph& graph) {
    const auto& samples = traj.samples;
    if (samples.size() < 2) throw ContractError("fidelity: at least two samples are required");
    if (snapped.path_index.size() != samples.size()) {
        throw ContractError("fidelity: snapped path does not belong to this trajectory");
    }

    FidelityReport r;
    r.mode = snapped.mode;
    r.out_of_region = snapped.out_of_region;
    // Each step sums its own edges so equal sub-paths give bit-equal steps.
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        r.actual_step.push_back(distance(samples[k].position, samples[k + 1].position));
        double w = 0.0;
        for (std::size_t p = snapped.path_index[k]; p < snapped.path_index[k + 1]; ++p)
            w += edge_between(graph, snapped.path[p], snapped.path[p + 1]).euclid_len;
        r.waypoint_step.push_back(w);
    }
    for (double d : r.actual_step) r.actual_total += d;
    for (double d : r.waypoint_step) r.waypoint_total += d;

    r.r2_stepwise = stats::pearson_r2(r.actual_step, r.waypoint_step);
    r.r2_roundwise = std::nullopt;
    r.mean_diff_stepwise = stats::mean_difference(r.actual_step, r.waypoint_step);
    r.mean_diff_roundwise = r.waypoint_total - r.actual_total;
    if (r.actual_total == 0.0) {
        throw UndefinedError("fidelity: relative difference is undefined for a trajectory that does not move");
    }
    r.relative_difference = std::abs(r.actual_total - r.waypoint_total) / r.actual_total;
    return r;
}

CorpusReport analyze_trajectories(const WaypointGraph& graph,
                                  const std::vector<NamedTrajectory>& corpus, CostMode mode) {
    CorpusReport out;
    out.mode = mode;
    for (const auto& item : corpus) {
        CorpusRecord rec;
        rec.source = item.source;
        if (item.trajectory.samples.size() < 2) {
            rec.error = "fewer than two samples";
            ++out.aggregate.skipped;
        } else {
            try {
                const SnappedPath sp = snap(graph, item.trajectory, mode);
                rec.report = fidelity(item.trajectory, sp, graph);
            } catch (const Error& e) {
                rec.error = e.what();
                ++out.aggregate.errored;
            }
        }
        out.records.push_back(std::move(rec));
    }
    std::vector<double> rel, actual_steps, waypoint_steps, actual_totals, waypoint_totals;
    for (const auto& rec : out.records) {
        if (!rec.report) continue;
        const auto& r = *rec.report;
        rel.push_back(r.relative_difference);
        actual_steps.insert(actual_steps.end(), r.actual_step.begin(), r.actual_step.end());
        waypoint_steps.insert(waypoint_steps.end(), r.waypoint_step.begin(), r.waypoint_step.end());
        actual_totals.push_back(r.actual_total);
        waypoint_totals.push_back(r.waypoint_total);
        out.aggregate.out_of_region += r.out_of_region;
    }
    if (rel.empty()) throw UndefinedError("analyze: corpus contains no analysable trajectory");
    auto& agg = out.aggregate;
    agg.analysed = rel.size();
    agg.mean_relative_difference = stats::mean(rel);
    agg.std_relative_difference = stats::population_stddev(rel);
    agg.r2_stepwise = stats::pearson_r2(actual_steps, waypoint_steps);
    agg.r2_roundwise = stats::pearson_r2(actual_totals, waypoint_totals);
    agg.mean_diff_stepwise = stats::mean_difference(actual_steps, waypoint_steps);
    agg.mean_diff_roundwise = stats::mean_difference(actual_totals, waypoint_totals);
    return out;
}

CorpusReport analyze_corpus(const WaypointGraph& graph,
                            const std::vector<std::filesystem::path>& files, CostMode mode) {
    std::vector<NamedTrajectory> loaded;
    std::vector<CorpusRecord> failed;
    for (const auto& f : files) {
        try {
            loaded.push_back({f.filename().string(), load_trajectory(f)});
        } catch (const Error& e) {
            failed.push_back({f.filename().string(), std::nullopt, e.what()});
        }
    }
    if (loaded.empty()) throw UndefinedError("analyze: no trajectory file could be loaded");
    CorpusReport report = analyze_trajectories(graph, loaded, mode);
    report.aggregate.errored += failed.size();
    report.records.insert(report.records.end(), failed.begin(), failed.end());
    std::stable_sort(report.records.begin(), report.records.end(),
                     [](const CorpusRecord& a, const CorpusRecord& b) { return a.source < b.source; });
    return report;
}

}  // namespace waynav
