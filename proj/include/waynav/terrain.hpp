#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <vector>

#include "waynav/geometry.hpp"

namespace waynav {

/// Integer cell coordinate. col grows east, row grows north (row 0 = south).
struct Cell {
    int col = 0;
    int row = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Regular height grid. Heights are stored at grid samples; sample (col, row)
/// sits at (origin_x + col * cell_size, origin_z + row * cell_size).
class TerrainGrid {
public:
    TerrainGrid(int ncols, int nrows, double cell_size, Vec2 origin,
                std::vector<double> heights);

    int ncols() const noexcept { return ncols_; }
    int nrows() const noexcept { return nrows_; }
    double cell_size() const noexcept { return cell_size_; }
    Vec2 origin() const noexcept { return origin_; }
    double width() const noexcept { return (ncols_ - 1) * cell_size_; }
    double depth() const noexcept { return (nrows_ - 1) * cell_size_; }

    double height(int col, int row) const { return heights_[index(col, row)]; }
    double height(Cell c) const { return height(c.col, c.row); }
    Vec2 cell_center(Cell c) const noexcept {
        return {origin_.x + c.col * cell_size_, origin_.z + c.row * cell_size_};
    }

    bool contains(Cell c) const noexcept {
        return c.col >= 0 && c.row >= 0 && c.col < ncols_ && c.row < nrows_;
    }
    /// True when (x, z) lies inside the extent (boundary included, with a
    /// tolerance of a few ulps of the extent).
    bool contains(Vec2 p) const noexcept;

    /// Sample whose square (side cell_size, centred on the sample and clipped
    /// to the extent) contains p. Throws RangeError outside the extent.
    Cell cell_at(Vec2 p) const;

    std::size_t index(int col, int row) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(ncols_) +
               static_cast<std::size_t>(col);
    }
    const std::vector<double>& heights() const noexcept { return heights_; }

private:
    int ncols_;
    int nrows_;
    double cell_size_;
    Vec2 origin_;
    std::vector<double> heights_;
};

/// Per-sample walkability flags derived from a slope limit.
class WalkMask {
public:
    WalkMask(int ncols, int nrows, double slope_max_deg, std::vector<bool> walkable);

    int ncols() const noexcept { return ncols_; }
    int nrows() const noexcept { return nrows_; }
    double slope_max_deg() const noexcept { return slope_max_deg_; }

    bool walkable(int col, int row) const {
        return walkable_[static_cast<std::size_t>(row) * static_cast<std::size_t>(ncols_) +
                         static_cast<std::size_t>(col)];
    }
    bool walkable(Cell c) const { return walkable(c.col, c.row); }
    std::size_t count() const noexcept;

private:
    int ncols_;
    int nrows_;
    double slope_max_deg_;
    std::vector<bool> walkable_;
};

inline constexpr double kDefaultSlopeMaxDeg = 45.0;

/// Parses the text terrain format. Throws ParseError naming the line.
TerrainGrid read_terrain(std::istream& in);
TerrainGrid load_terrain(const std::filesystem::path& path);

/// A cell is walkable iff the steepest slope to any of its existing
/// 8 neighbours is at most slope_max_deg.
WalkMask walkable_mask(const TerrainGrid& grid, double slope_max_deg);

/// Bilinear interpolation of the surrounding samples. Throws RangeError when
/// (x, z) is outside the extent.
double height_at(const TerrainGrid& grid, double x, double z);

/// Samples the segment a->b every cell_size/4 and requires terrain to stay
/// strictly below the sight line joining the two eye points.
bool line_of_sight(const TerrainGrid& grid, Vec2 a, Vec2 b, double eye_height);

}  // namespace waynav
