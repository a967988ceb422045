#include "waynav/terrain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <cctype>

#include "waynav/error.hpp"

namespace waynav {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view tok, const char* what, std::size_t line) {
    T value{};
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError("terrain: cannot parse " + std::string(what) + " '" +
                             std::string(tok) + "'",
                         line);
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) {
            throw ParseError("terrain: non-finite " + std::string(what), line);
        }
    }
    return value;
}

bool is_skippable(std::string_view line) {
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string_view::npos || line[first] == '#';
}

double axis_tolerance(double origin, double extent) {
    return 1e-9 * (1.0 + std::abs(origin) + extent);
}

}  // namespace

TerrainGrid::TerrainGrid(int ncols, int nrows, double cell_size, Vec2 origin,
                         std::vector<double> heights)
    : ncols_(ncols), nrows_(nrows), cell_size_(cell_size), origin_(origin),
      heights_(std::move(heights)) {
    if (ncols < 2 || nrows < 2) throw ConfigError("terrain: grid must be at least 2x2");
    if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
        throw ConfigError("terrain: cell_size must be positive");
    }
    if (!std::isfinite(origin.x) || !std::isfinite(origin.z)) {
        throw ConfigError("terrain: origin must be finite");
    }
    if (heights_.size() != static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows)) {
        throw ConfigError("terrain: height count does not match dimensions");
    }
    for (double h : heights_) {
        if (!std::isfinite(h)) throw ConfigError("terrain: heights must be finite");
    }
}

bool TerrainGrid::contains(Vec2 p) const noexcept {
    const double tx = axis_tolerance(origin_.x, width());
    const double tz = axis_tolerance(origin_.z, depth());
    return p.x >= origin_.x - tx && p.x <= origin_.x + width() + tx &&
           p.z >= origin_.z - tz && p.z <= origin_.z + depth() + tz;
}

Cell TerrainGrid::cell_at(Vec2 p) const {
    if (!contains(p)) throw RangeError("terrain: point outside extent");
    const double u = (p.x - origin_.x) / cell_size_;
    const double v = (p.z - origin_.z) / cell_size_;
    const int col = std::clamp(static_cast<int>(std::lround(u)), 0, ncols_ - 1);
    const int row = std::clamp(static_cast<int>(std::lround(v)), 0, nrows_ - 1);
    return {col, row};
}

WalkMask::WalkMask(int ncols, int nrows, double slope_max_deg, std::vector<bool> walkable)
    : ncols_(ncols), nrows_(nrows), slope_max_deg_(slope_max_deg),
      walkable_(std::move(walkable)) {
    if (walkable_.size() != static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows)) {
        throw ConfigError("walk mask: flag count does not match dimensions");
    }
}

std::size_t WalkMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(walkable_.begin(), walkable_.end(), true));
}

TerrainGrid read_terrain(std::istream& in) {
    std::string raw;
    std::size_t lineno = 0;
    bool have_header = false;
    int ncols = 0;
    int nrows = 0;
    double cell_size = 0.0;
    Vec2 origin;
    std::vector<double> heights;
    int rows_read = 0;

    while (std::getline(in, raw)) {
        ++lineno;
        if (is_skippable(raw)) continue;
        const auto toks = split_ws(raw);
        if (!have_header) {
            if (toks.size() != 5) {
                throw ParseError("terrain: header must be 'ncols nrows cell_size origin_x origin_z'",
                                 lineno);
            }
            ncols = parse_number<int>(toks[0], "ncols", lineno);
            nrows = parse_number<int>(toks[1], "nrows", lineno);
            cell_size = parse_number<double>(toks[2], "cell_size", lineno);
            origin.x = parse_number<double>(toks[3], "origin_x", lineno);
            origin.z = parse_number<double>(toks[4], "origin_z", lineno);
            if (ncols < 2 || nrows < 2) throw ParseError("terrain: grid must be at least 2x2", lineno);
            if (!(cell_size > 0.0)) throw ParseError("terrain: cell_size must be positive", lineno);
            heights.reserve(static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows));
            have_header = true;
            continue;
        }
        if (rows_read == nrows) {
            throw ParseError("terrain: more than " + std::to_string(nrows) + " height rows", lineno);
        }
        if (toks.size() != static_cast<std::size_t>(ncols)) {
            throw ParseError("terrain: expected " + std::to_string(ncols) + " heights, got " +
                                 std::to_string(toks.size()),
                             lineno);
        }
        for (auto tok : toks) heights.push_back(parse_number<double>(tok, "height", lineno));
        ++rows_read;
    }
    if (!have_header) throw ParseError("terrain: missing header", lineno);
    if (rows_read != nrows) {
        throw ParseError("terrain: expected " + std::to_string(nrows) + " height rows, got " +
                             std::to_string(rows_read),
                         lineno);
    }
    return TerrainGrid(ncols, nrows, cell_size, origin, std::move(heights));
}

TerrainGrid load_terrain(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("terrain: cannot open '" + path.string() + "'", 0);
    try {
        return read_terrain(in);
    } catch (const ParseError& e) {
        throw e.prefixed(path.string());
    }
}

WalkMask walkable_mask(const TerrainGrid& grid, double slope_max_deg) {
    if (!(slope_max_deg > 0.0 && slope_max_deg <= 90.0)) {
        throw ConfigError("walkable_mask: slope_max_deg must be in (0, 90]");
    }
    const double diag = std::numbers::sqrt2 * grid.cell_size();
    std::vector<bool> flags(static_cast<std::size_t>(grid.ncols()) * grid.nrows(), true);
    for (int row = 0; row < grid.nrows(); ++row) {
        for (int col = 0; col < grid.ncols(); ++col) {
            const double h = grid.height(col, row);
            double steepest = 0.0;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const Cell n{col + dc, row + dr};
                    if (!grid.contains(n)) continue;
                    const double run = (dr != 0 && dc != 0) ? diag : grid.cell_size();
                    const double deg =
                        std::atan(std::abs(h - grid.height(n)) / run) * 180.0 / std::numbers::pi;
                    steepest = std::max(steepest, deg);
                }
            }
            flags[grid.index(col, row)] = steepest <= slope_max_deg;
        }
    }
    return WalkMask(grid.ncols(), grid.nrows(), slope_max_deg, std::move(flags));
}

double height_at(const TerrainGrid& grid, double x, double z) {
    if (!grid.contains(Vec2{x, z})) throw RangeError("height_at: point outside terrain extent");
    const double u = std::clamp((x - grid.origin().x) / grid.cell_size(), 0.0,
                                static_cast<double>(grid.ncols() - 1));
    const double v = std::clamp((z - grid.origin().z) / grid.cell_size(), 0.0,
                                static_cast<double>(grid.nrows() - 1));
    const int c = std::min(static_cast<int>(u), grid.ncols() - 2);
    const int r = std::min(static_cast<int>(v), grid.nrows() - 2);
    const double fx = u - c;
    const double fz = v - r;
    const double h00 = grid.height(c, r);
    const double h10 = grid.height(c + 1, r);
    const double h01 = grid.height(c, r + 1);
    const double h11 = grid.height(c + 1, r + 1);
    return (h00 * (1.0 - fx) + h10 * fx) * (1.0 - fz) + (h01 * (1.0 - fx) + h11 * fx) * fz;
}

bool line_of_sight(const TerrainGrid& grid, Vec2 a, Vec2 b, double eye_height) {
    if (eye_height < 0.0) throw ContractError("line_of_sight: eye_height must be >= 0");
    if (!grid.contains(a) || !grid.contains(b)) {
        throw RangeError("line_of_sight: endpoint outside terrain extent");
    }
    // Canonical endpoint order keeps LOS(a, b) == LOS(b, a) bit for bit.
    if (std::tie(b.x, b.z) < std::tie(a.x, a.z)) std::swap(a, b);
    const double len = distance(a, b);
    if (len == 0.0) return true;

    const double step = grid.cell_size() / 4.0;
    const auto n = static_cast<long>(std::ceil(len / step));
    const double eye_a = height_at(grid, a.x, a.z) + eye_height;
    const double eye_b = height_at(grid, b.x, b.z) + eye_height;
    for (long i = 1; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n);
        const double x = a.x + (b.x - a.x) * t;
        const double z = a.z + (b.z - a.z) * t;
        const double sight = eye_a + (eye_b - eye_a) * t;
        if (!(height_at(grid, x, z) < sight)) return false;
    }
    return true;
}

}  // namespace waynav
