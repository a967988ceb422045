#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "waynav/waygraph.hpp"

namespace waynav {

inline constexpr int kGraphFormatVersion = 1;

/// Writes the graph as a JSON document. Reals use fixed 6-decimal notation so
/// identical graphs serialise to identical bytes; an unreachable edge writes
/// walk_len as null.
void write_graph(std::ostream& out, const WaypointGraph& graph);
std::string graph_to_string(const WaypointGraph& graph);

/// Throws LoadError on version mismatch, schema violation or broken
/// graph invariants.
WaypointGraph read_graph(std::istream& in);

void save_graph(const WaypointGraph& graph, const std::filesystem::path& path);
WaypointGraph load_graph(const std::filesystem::path& path);

}  // namespace waynav
