#include "waynav/graph_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "waynav/error.hpp"
#include "waynav/file_util.hpp"

namespace waynav {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* name, const std::string& where) {
    if (!obj.is_object() || !obj.contains(name)) {
        throw LoadError("graph file: " + where + " is missing field '" + name + "'");
    }
    return obj.at(name);
}

double real(const json& obj, const char* name, const std::string& where) {
    const json& v = field(obj, name, where);
    if (!v.is_number()) throw LoadError("graph file: " + where + "." + name + " must be a number");
    return v.get<double>();
}

long long integer(const json& obj, const char* name, const std::string& where) {
    const json& v = field(obj, name, where);
    if (!v.is_number_integer()) {
        throw LoadError("graph file: " + where + "." + name + " must be an integer");
    }
    return v.get<long long>();
}

bool boolean(const json& obj, const char* name, const std::string& where) {
    const json& v = field(obj, name, where);
    if (!v.is_boolean()) throw LoadError("graph file: " + where + "." + name + " must be a boolean");
    return v.get<bool>();
}

}  // namespace

void write_graph(std::ostream& out, const WaypointGraph& graph) {
    const GraphConfig& c = graph.config();
    out << "{\n";
    out << "  \"format_version\": " << kGraphFormatVersion << ",\n";
    out << "  \"config\": {\"spacing\": " << fixed6(c.spacing)
        << ", \"slope_max_deg\": " << fixed6(c.slope_max_deg)
        << ", \"detour_max\": " << fixed6(c.detour_max)
        << ", \"vstep_max\": " << fixed6(c.vstep_max)
        << ", \"seed_x\": " << fixed6(c.seed_point.x)
        << ", \"seed_z\": " << fixed6(c.seed_point.z) << "},\n";

    out << "  \"nodes\": [";
    const auto nodes = graph.nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Waypoint& w = nodes[k];
        out << (k ? ",\n    " : "\n    ") << "{\"id\": " << w.id << ", \"i\": " << w.lattice.i
            << ", \"j\": " << w.lattice.j << ", \"x\": " << fixed6(w.position.x)
            << ", \"y\": " << fixed6(w.position.y) << ", \"z\": " << fixed6(w.position.z)
            << ", \"valid\": " << (w.valid ? "true" : "false") << "}";
    }
    out << (nodes.empty() ? "],\n" : "\n  ],\n");

    out << "  \"edges\": [";
    const auto edges = graph.edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const Edge& e = edges[k];
        out << (k ? ",\n    " : "\n    ") << "{\"from\": " << e.from << ", \"to\": " << e.to
            << ", \"dir\": \"" << to_string(e.direction) << "\", \"valid\": "
            << (e.valid ? "true" : "false") << ", \"reason\": ";
        if (e.valid) {
            out << "null";
        } else {
            out << '"' << to_string(e.reason) << '"';
        }
        out << ", \"euclid_len\": " << fixed6(e.euclid_len) << ", \"walk_len\": ";
        if (std::isfinite(e.walk_len)) {
            out << fixed6(e.walk_len);
        } else {
            out << "null";
        }
        out << "}";
    }
    out << (edges.empty() ? "]\n" : "\n  ]\n");
    out << "}\n";
}

std::string graph_to_string(const WaypointGraph& graph) {
    std::ostringstream ss;
    write_graph(ss, graph);
    return ss.str();
}

WaypointGraph read_graph(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw LoadError(std::string("graph file: not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw LoadError("graph file: top level must be an object");
    const long long version = integer(doc, "format_version", "document");
    if (version != kGraphFormatVersion) {
        throw LoadError("graph file: unsupported format_version " + std::to_string(version) +
                        " (expected " + std::to_string(kGraphFormatVersion) + ")");
    }

    const json& jc = field(doc, "config", "document");
    GraphConfig cfg;
    cfg.spacing = real(jc, "spacing", "config");
    cfg.slope_max_deg = real(jc, "slope_max_deg", "config");
    cfg.detour_max = real(jc, "detour_max", "config");
    cfg.vstep_max = real(jc, "vstep_max", "config");
    cfg.seed_point = {real(jc, "seed_x", "config"), real(jc, "seed_z", "config")};
    if (!(cfg.spacing > 0.0) || !(cfg.detour_max > 1.0) || !(cfg.vstep_max >= 0.0)) {
        throw LoadError("graph file: config values out of range");
    }

    const json& jn = field(doc, "nodes", "document");
    if (!jn.is_array()) throw LoadError("graph file: nodes must be an array");
    std::vector<Waypoint> nodes;
    nodes.reserve(jn.size());
    for (std::size_t k = 0; k < jn.size(); ++k) {
        const std::string where = "nodes[" + std::to_string(k) + "]";
        const json& o = jn[k];
        Waypoint w;
        w.id = static_cast<NodeId>(integer(o, "id", where));
        w.lattice = {static_cast<int>(integer(o, "i", where)), static_cast<int>(integer(o, "j", where))};
        w.position = {real(o, "x", where), real(o, "y", where), real(o, "z", where)};
        w.valid = boolean(o, "valid", where);
        nodes.push_back(w);
    }

    const json& je = field(doc, "edges", "document");
    if (!je.is_array()) throw LoadError("graph file: edges must be an array");
    std::vector<Edge> edges;
    edges.reserve(je.size());
    for (std::size_t k = 0; k < je.size(); ++k) {
        const std::string where = "edges[" + std::to_string(k) + "]";
        const json& o = je[k];
        Edge e;
        e.from = static_cast<NodeId>(integer(o, "from", where));
        e.to = static_cast<NodeId>(integer(o, "to", where));
        const json& dir = field(o, "dir", where);
        const auto d = dir.is_string() ? direction_from_string(dir.get<std::string>()) : std::nullopt;
        if (!d) throw LoadError("graph file: " + where + ".dir is not a compass direction");
        e.direction = *d;
        e.valid = boolean(o, "valid", where);
        const json& reason = field(o, "reason", where);
        if (reason.is_null()) {
            e.reason = EdgeFault::none;
        } else {
            const auto f = reason.is_string() ? edge_fault_from_string(reason.get<std::string>())
                                              : std::nullopt;
            if (!f || *f == EdgeFault::none) {
                throw LoadError("graph file: " + where + ".reason is not a known fault");
            }
            e.reason = *f;
        }
        e.euclid_len = real(o, "euclid_len", where);
        const json& walk = field(o, "walk_len", where);
        if (walk.is_null()) {
            e.walk_len = std::numeric_limits<double>::infinity();
        } else if (walk.is_number()) {
            e.walk_len = walk.get<double>();
        } else {
            throw LoadError("graph file: " + where + ".walk_len must be a number or null");
        }
        edges.push_back(e);
    }
    return WaypointGraph::from_parts(cfg, std::move(nodes), std::move(edges));
}

void save_graph(const WaypointGraph& graph, const std::filesystem::path& path) {
    write_file_atomic(path, graph_to_string(graph));
}

WaypointGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("graph file: cannot open '" + path.string() + "'");
    try {
        return read_graph(in);
    } catch (const LoadError& e) {
        throw LoadError(path.string() + ": " + e.what());
    }
}

}  // namespace waynav
