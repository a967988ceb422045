#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "waynav/geometry.hpp"
#include "waynav/pathfind.hpp"
#include "waynav/waygraph.hpp"

namespace waynav {

struct TrajectorySample {
    double t = 0.0;
    Vec3 position;
};

/// Timestamped fine-grained positions; t strictly increasing.
struct Trajectory {
    std::vector<TrajectorySample> samples;
    double nominal_dt = 0.5;
};

/// CSV with header `t,x,y,z`; `#` lines ignored. Throws ParseError with the
/// offending line number on bad columns, non-finite values or non-increasing t.
Trajectory read_trajectory(std::istream& in);
Trajectory load_trajectory(const std::filesystem::path& path);

/// Valid waypoint closest to p in 3-D; ties go to the lowest id.
NodeId nearest_waypoint(const WaypointGraph& graph, const Vec3& p);
/// Horizontal variant: ignores elevation.
NodeId nearest_waypoint(const WaypointGraph& graph, Vec2 p);

struct SnappedPath {
    std::vector<NodeId> assignments;       // closest waypoint per sample
    std::vector<std::size_t> path_index;   // where each assignment sits in `path`
    std::vector<NodeId> path;              // gap-filled, consecutive repeats collapsed
    CostMode mode = CostMode::unit;
    std::size_t out_of_region = 0;         // samples outside the graph's footprint
};

/// Assigns samples to their closest waypoints and joins consecutive
/// assignments with shortest paths. Throws NoPathError naming the sample index
/// when two consecutive assignments lie in different components.
SnappedPath snap(const WaypointGraph& graph, const Trajectory& traj, CostMode mode);

struct FidelityReport {
    std::vector<double> actual_step;    // metres per sample interval
    std::vector<double> waypoint_step;  // metres along the snapped sub-path
    double actual_total = 0.0;
    double waypoint_total = 0.0;
    std::optional<double> r2_stepwise;
    std::optional<double> r2_roundwise;  // undefined for a single round
    double mean_diff_stepwise = 0.0;     // waypoint - actual
    double mean_diff_roundwise = 0.0;
    double relative_difference = 0.0;    // |actual - waypoint| / actual
    CostMode mode = CostMode::unit;
    std::size_t out_of_region = 0;
};

/// Stepwise and round-wise agreement between a trajectory and its snapped
/// path. Waypoint distances always use edge lengths in metres. Throws
/// ContractError with fewer than two samples and UndefinedError when the
/// trajectory does not move.
FidelityReport fidelity(const Trajectory& traj, const SnappedPath& snapped,
                        const WaypointGraph& graph);

struct CorpusRecord {
    std::string source;
    std::optional<FidelityReport> report;
    std::string error;  // set when the record was skipped or failed
};

struct CorpusAggregate {
    std::size_t analysed = 0;
    std::size_t skipped = 0;  // loaded but fewer than two samples
    std::size_t errored = 0;  // unreadable or not analysable
    double mean_relative_difference = 0.0;
    double std_relative_difference = 0.0;  // population
    std::optional<double> r2_stepwise;     // pooled over every interval
    std::optional<double> r2_roundwise;    // over per-trajectory totals
    double mean_diff_stepwise = 0.0;
    double mean_diff_roundwise = 0.0;
    std::size_t out_of_region = 0;
};

struct CorpusReport {
    CostMode mode = CostMode::unit;
    std::vector<CorpusRecord> records;
    CorpusAggregate aggregate;
};

struct NamedTrajectory {
    std::string source;
    Trajectory trajectory;
};

/// Throws UndefinedError when no trajectory could be analysed.
CorpusReport analyze_trajectories(const WaypointGraph& graph,
                                  const std::vector<NamedTrajectory>& corpus, CostMode mode);
CorpusReport analyze_corpus(const WaypointGraph& graph,
                            const std::vector<std::filesystem::path>& files, CostMode mode);

}  // namespace waynav
