#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uavnav::world {

/// Continuous 2D position in meters. y grows upward; the map origin (0,0)
/// is the bottom-left corner of the grid.
struct Pose {
    double x_m = 0.0;
    double y_m = 0.0;
};

double distance_m(const Pose& a, const Pose& b);

/// One of eight uniformly spaced headings. Index k points along k*45
/// degrees counterclockwise from +x.
struct ActionId {
    static constexpr int kCount = 8;
    int index = 0;  // 0..7

    double heading_rad() const;
};

/// Exact unit direction for action k (diagonals use sqrt(2)/2, axes use
/// exact 0/1, so axis-aligned moves stay on the grid axis bit-exactly).
const std::array<double, 2>& action_direction(int index);

enum class Cell : std::uint8_t { Free = 0, Wall = 1 };

struct MapParseError : std::runtime_error {
    MapParseError(const std::string& message, int line, int column);
    int line;    // 1-based line in the map text
    int column;  // 1-based column, 0 when the error is not column-specific
};

/// Rasterized indoor floor plan. Immutable once parsed; cells outside the
/// grid are treated as Wall, so the world has no escape even when the file
/// does not draw an explicit boundary.
class OccupancyMap {
public:
    /// Parses the line-oriented map format:
    ///   line 1:  "<width_cells> <height_cells> <cell_size_m>"
    ///   then height_cells rows of width_cells characters from {#,.,S,U},
    ///   first row = top of the map. Exactly one S (source) and one U
    ///   (UAV start), both free. Start and source must be connected
    ///   through free cells (checked by flood fill).
    static OccupancyMap parse(std::string_view text);

    int width_cells() const { return width_; }
    int height_cells() const { return height_; }
    double cell_size_m() const { return cell_size_m_; }
    double width_m() const { return width_ * cell_size_m_; }
    double height_m() const { return height_ * cell_size_m_; }

    /// Cell lookup with bottom-left origin: iy = 0 is the bottom row.
    /// Out-of-range indices read as Wall.
    Cell at(int ix, int iy) const {
        if (ix < 0 || iy < 0 || ix >= width_ || iy >= height_) {
            return Cell::Wall;
        }
        return cells_[static_cast<std::size_t>(iy) * width_ + ix];
    }
    bool is_wall(int ix, int iy) const { return at(ix, iy) == Cell::Wall; }

    /// Continuous positions of the source and start markers (cell centers).
    const Pose& source_xy() const { return source_xy_; }
    const Pose& start_xy() const { return start_xy_; }

private:
    OccupancyMap() = default;

    int width_ = 0;
    int height_ = 0;
    double cell_size_m_ = 0.0;
    std::vector<Cell> cells_;  // row-major, iy = 0 at the bottom
    Pose source_xy_;
    Pose start_xy_;
};

/// True iff the closed segment p0 -> p1 touches no Wall cell. Conservative
/// supercover traversal: every cell whose closed square meets the segment
/// is checked, so a segment that merely grazes a gridline shared with a
/// wall fails. p1 outside the map also fails.
bool is_segment_free(const OccupancyMap& map, const Pose& p0, const Pose& p1);

/// Enumerates the cells the supercover traversal visits (exposed for tests;
/// duplicates possible, out-of-range cells clamped out).
void visit_segment_cells(const OccupancyMap& map, const Pose& p0, const Pose& p1,
                         std::vector<std::array<int, 2>>& out);

/// Straight-line move of `distance_m` along the action heading. Returns the
/// new pose, or std::nullopt (Blocked) when the swept segment touches a
/// wall; a blocked move leaves the pose untouched, there is no partial
/// movement.
std::optional<Pose> apply_action(const OccupancyMap& map, const Pose& pose,
                                 ActionId action, double distance_m);

/// Text of the bundled synthetic floor: 75 m x 120 m at 0.5 m cells, a
/// walled boundary and ten scattered rectangular blocks (rooms) leaving
/// navigable open space between them, start and source in opposite free
/// corners.
std::string make_floor_map();

}  // namespace uavnav::world
