#include "uavnav/world.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <deque>
#include <numbers>
#include <sstream>

namespace uavnav::world {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

const std::array<std::array<double, 2>, ActionId::kCount> kDirections = {{
    {1.0, 0.0},
    {kSqrtHalf, kSqrtHalf},
    {0.0, 1.0},
    {-kSqrtHalf, kSqrtHalf},
    {-1.0, 0.0},
    {-kSqrtHalf, -kSqrtHalf},
    {0.0, -1.0},
    {kSqrtHalf, -kSqrtHalf},
}};

// Tolerance, in cell units, for "this coordinate sits on a gridline".
// Points within it count as touching the cells on both sides.
constexpr double kGridEps = 1e-9;

struct CellSpan {
    int lo;
    int hi;  // inclusive; hi == lo unless the coordinate sits on a gridline
};

CellSpan cells_touching(double grid_coord) {
    const double r = std::round(grid_coord);
    if (std::abs(grid_coord - r) <= kGridEps) {
        const int k = static_cast<int>(r);
        return {k - 1, k};
    }
    const int k = static_cast<int>(std::floor(grid_coord));
    return {k, k};
}

// Calls visit(ix, iy) for every cell the closed segment a->b (grid
// coordinates) touches. Stops early when visit returns false.
template <typename Visit>
bool walk_supercover(double ax, double ay, double bx, double by, Visit&& visit) {
    const double dx = bx - ax;
    const double dy = by - ay;

    auto visit_point = [&](double t) {
        const double x = ax + t * dx;
        const double y = ay + t * dy;
        const CellSpan cx = cells_touching(x);
        const CellSpan cy = cells_touching(y);
        for (int iy = cy.lo; iy <= cy.hi; ++iy) {
            for (int ix = cx.lo; ix <= cx.hi; ++ix) {
                if (!visit(ix, iy)) {
                    return false;
                }
            }
        }
        return true;
    };

    std::vector<double> events;
    events.push_back(0.0);
    events.push_back(1.0);
    if (dx != 0.0) {
        const int k0 = static_cast<int>(std::ceil(std::min(ax, bx)));
        const int k1 = static_cast<int>(std::floor(std::max(ax, bx)));
        for (int k = k0; k <= k1; ++k) {
            const double t = (static_cast<double>(k) - ax) / dx;
            if (t > 0.0 && t < 1.0) {
                events.push_back(t);
            }
        }
    }
    if (dy != 0.0) {
        const int k0 = static_cast<int>(std::ceil(std::min(ay, by)));
        const int k1 = static_cast<int>(std::floor(std::max(ay, by)));
        for (int k = k0; k <= k1; ++k) {
            const double t = (static_cast<double>(k) - ay) / dy;
            if (t > 0.0 && t < 1.0) {
                events.push_back(t);
            }
        }
    }
    std::sort(events.begin(), events.end());

    for (std::size_t i = 0; i < events.size(); ++i) {
        if (!visit_point(events[i])) {
            return false;
        }
        if (i + 1 < events.size() && events[i + 1] > events[i]) {
            if (!visit_point(0.5 * (events[i] + events[i + 1]))) {
                return false;
            }
        }
    }
    return true;
}

[[noreturn]] void fail(const std::string& message, int line, int column) {
    throw MapParseError(message, line, column);
}

}  // namespace

double distance_m(const Pose& a, const Pose& b) {
    return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

double ActionId::heading_rad() const {
    return index * (std::numbers::pi / 4.0);
}

const std::array<double, 2>& action_direction(int index) {
    return kDirections[static_cast<std::size_t>(index)];
}

MapParseError::MapParseError(const std::string& message, int line_arg, int column_arg)
    : std::runtime_error("map parse error at line " + std::to_string(line_arg) +
                         ", column " + std::to_string(column_arg) + ": " + message),
      line(line_arg),
      column(column_arg) {}

OccupancyMap OccupancyMap::parse(std::string_view text) {
    std::vector<std::string_view> lines;
    {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t nl = text.find('\n', pos);
            if (nl == std::string_view::npos) {
                nl = text.size();
            }
            std::string_view line = text.substr(pos, nl - pos);
            if (!line.empty() && line.back() == '\r') {
                line.remove_suffix(1);
            }
            lines.push_back(line);
            if (nl == text.size()) {
                break;
            }
            pos = nl + 1;
        }
    }
    if (lines.empty() || lines[0].empty()) {
        fail("missing header", 1, 1);
    }

    int width = 0;
    int height = 0;
    double cell_size = 0.0;
    {
        std::istringstream header{std::string(lines[0])};
        std::string extra;
        if (!(header >> width >> height >> cell_size)) {
            fail("header must be '<width_cells> <height_cells> <cell_size_m>'", 1, 1);
        }
        if (header >> extra) {
            fail("unexpected trailing token in header", 1, 1);
        }
        if (width <= 0 || height <= 0) {
            fail("width and height must be positive", 1, 1);
        }
        if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
            fail("cell size must be positive", 1, 1);
        }
    }

    if (static_cast<int>(lines.size()) < height + 1) {
        fail("expected " + std::to_string(height) + " grid rows, found " +
                 std::to_string(lines.size() - 1),
             static_cast<int>(lines.size()), 1);
    }
    for (std::size_t i = height + 1; i < lines.size(); ++i) {
        if (!lines[i].empty()) {
            fail("unexpected content after the last grid row", static_cast<int>(i + 1), 1);
        }
    }

    OccupancyMap map;
    map.width_ = width;
    map.height_ = height;
    map.cell_size_m_ = cell_size;
    map.cells_.assign(static_cast<std::size_t>(width) * height, Cell::Free);

    int source_count = 0;
    int start_count = 0;
    for (int row = 0; row < height; ++row) {
        const int line_no = row + 2;
        const std::string_view line = lines[static_cast<std::size_t>(row) + 1];
        if (static_cast<int>(line.size()) != width) {
            fail("row has " + std::to_string(line.size()) + " cells, expected " +
                     std::to_string(width),
                 line_no, static_cast<int>(line.size()) + 1);
        }
        const int iy = height - 1 - row;  // first grid row is the top of the map
        for (int ix = 0; ix < width; ++ix) {
            const char c = line[static_cast<std::size_t>(ix)];
            const Pose center{(ix + 0.5) * cell_size, (iy + 0.5) * cell_size};
            switch (c) {
                case '#':
                    map.cells_[static_cast<std::size_t>(iy) * width + ix] = Cell::Wall;
                    break;
                case '.':
                    break;
                case 'S':
                    if (++source_count > 1) {
                        fail("duplicate source marker 'S'", line_no, ix + 1);
                    }
                    map.source_xy_ = center;
                    break;
                case 'U':
                    if (++start_count > 1) {
                        fail("duplicate start marker 'U'", line_no, ix + 1);
                    }
                    map.start_xy_ = center;
                    break;
                default:
                    fail(std::string("invalid cell character '") + c + "'", line_no, ix + 1);
            }
        }
    }
    if (source_count == 0) {
        fail("missing source marker 'S'", static_cast<int>(lines.size()), 1);
    }
    if (start_count == 0) {
        fail("missing start marker 'U'", static_cast<int>(lines.size()), 1);
    }

    // Start -> source connectivity through free cells (4-connected).
    {
        auto cell_of = [&](const Pose& p) {
            return std::array<int, 2>{static_cast<int>(p.x_m / cell_size),
                                      static_cast<int>(p.y_m / cell_size)};
        };
        const auto start_cell = cell_of(map.start_xy_);
        const auto source_cell = cell_of(map.source_xy_);
        std::vector<char> seen(map.cells_.size(), 0);
        std::deque<std::array<int, 2>> queue{start_cell};
        seen[static_cast<std::size_t>(start_cell[1]) * width + start_cell[0]] = 1;
        bool reached = false;
        while (!queue.empty() && !reached) {
            const auto [cx, cy] = queue.front();
            queue.pop_front();
            if (cx == source_cell[0] && cy == source_cell[1]) {
                reached = true;
                break;
            }
            const std::array<std::array<int, 2>, 4> neighbors = {
                {{cx + 1, cy}, {cx - 1, cy}, {cx, cy + 1}, {cx, cy - 1}}};
            for (const auto& [nx, ny] : neighbors) {
                if (nx < 0 || ny < 0 || nx >= width || ny >= height) {
                    continue;
                }
                const std::size_t idx = static_cast<std::size_t>(ny) * width + nx;
                if (!seen[idx] && map.cells_[idx] == Cell::Free) {
                    seen[idx] = 1;
                    queue.push_back({nx, ny});
                }
            }
        }
        if (!reached) {
            const int source_row = height - 1 - source_cell[1];
            fail("start 'U' and source 'S' are not connected through free cells",
                 source_row + 2, source_cell[0] + 1);
        }
    }
    return map;
}

bool is_segment_free(const OccupancyMap& map, const Pose& p0, const Pose& p1) {
    const double inv = 1.0 / map.cell_size_m();
    return walk_supercover(p0.x_m * inv, p0.y_m * inv, p1.x_m * inv, p1.y_m * inv,
                           [&map](int ix, int iy) { return !map.is_wall(ix, iy); });
}

void visit_segment_cells(const OccupancyMap& map, const Pose& p0, const Pose& p1,
                         std::vector<std::array<int, 2>>& out) {
    const double inv = 1.0 / map.cell_size_m();
    walk_supercover(p0.x_m * inv, p0.y_m * inv, p1.x_m * inv, p1.y_m * inv,
                    [&out](int ix, int iy) {
                        out.push_back({ix, iy});
                        return true;
                    });
}

std::optional<Pose> apply_action(const OccupancyMap& map, const Pose& pose,
                                 ActionId action, double distance_m) {
    if (action.index < 0 || action.index >= ActionId::kCount) {
        throw std::invalid_argument("apply_action: action index out of range");
    }
    if (!(distance_m >= 0.0) || !std::isfinite(distance_m)) {
        throw std::invalid_argument("apply_action: distance must be >= 0 and finite");
    }
    const auto& dir = action_direction(action.index);
    const Pose candidate{pose.x_m + distance_m * dir[0], pose.y_m + distance_m * dir[1]};
    if (!is_segment_free(map, pose, candidate)) {
        return std::nullopt;
    }
    return candidate;
}

std::string make_floor_map() {
    constexpr int kWidth = 150;   // 75 m at 0.5 m cells
    constexpr int kHeight = 240;  // 120 m

    // Rectangular walls in meters: x, y, w, h. Solid rooms plus two
    // south-facing U-shaped rooms sitting across the start->source
    // diagonal (their concave side catches gradient followers). Placed to
    // keep the right and top edge corridors open and at least 4 m of
    // clearance between neighbors.
    constexpr std::array<std::array<int, 4>, 15> kRooms = {{
        {14, 2, 12, 10},
        {60, 2, 10, 10},
        {40, 8, 14, 12},
        {58, 26, 12, 14},
        {6, 34, 12, 12},
        {46, 44, 12, 12},
        {12, 62, 14, 12},
        {24, 86, 14, 12},
        {44, 98, 12, 12},
        // U-room, mouth at y=32 spanning x in [28,38]
        {26, 32, 2, 14},
        {38, 32, 2, 14},
        {26, 46, 14, 2},
        // U-room, mouth at y=64 spanning x in [48,58]
        {46, 64, 2, 14},
        {58, 64, 2, 14},
        {46, 78, 14, 2},
    }};

    std::vector<std::string> rows(kHeight, std::string(kWidth, '.'));
    for (int x = 0; x < kWidth; ++x) {
        rows[0][x] = '#';
        rows[kHeight - 1][x] = '#';
    }
    for (int y = 0; y < kHeight; ++y) {
        rows[y][0] = '#';
        rows[y][kWidth - 1] = '#';
    }
    for (const auto& [rx, ry, rw, rh] : kRooms) {
        for (int y = 2 * ry; y < 2 * (ry + rh); ++y) {
            for (int x = 2 * rx; x < 2 * (rx + rw); ++x) {
                rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = '#';
            }
        }
    }
    // rows[] is indexed bottom-up here; the file's first grid row is the top.
    rows[2][2] = 'U';
    rows[237][147] = 'S';

    std::string text = "150 240 0.5\n";
    for (int y = kHeight - 1; y >= 0; --y) {
        text += rows[static_cast<std::size_t>(y)];
        text += '\n';
    }
    return text;
}

}  // namespace uavnav::world
