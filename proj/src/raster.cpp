#include "vborder/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace vborder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/* Parametric distance to the first grid line crossed along one axis */
double first_crossing(double start, int cell, int step, double delta)
{
    if (step > 0)
        return (cell + 1 - start) / delta;
    if (step < 0)
        return (cell - start) / delta;
    return kInf;
}

} // namespace

std::vector<CellIndex> supercover_segment(const GridSpec& spec, Point2 a, Point2 b)
{
    const double u0 = (a.x - spec.origin_x) / spec.resolution;
    const double v0 = (a.y - spec.origin_y) / spec.resolution;
    const double u1 = (b.x - spec.origin_x) / spec.resolution;
    const double v1 = (b.y - spec.origin_y) / spec.resolution;

    int col = static_cast<int>(std::floor(u0));
    int row = static_cast<int>(std::floor(v0));
    const int end_col = static_cast<int>(std::floor(u1));
    const int end_row = static_cast<int>(std::floor(v1));

    const double du = u1 - u0;
    const double dv = v1 - v0;
    const int step_col = end_col > col ? 1 : (end_col < col ? -1 : 0);
    const int step_row = end_row > row ? 1 : (end_row < row ? -1 : 0);

    double t_col = first_crossing(u0, col, step_col, du);
    double t_row = first_crossing(v0, row, step_row, dv);
    const double dt_col = step_col ? 1.0 / std::abs(du) : kInf;
    const double dt_row = step_row ? 1.0 / std::abs(dv) : kInf;

    std::vector<CellIndex> cells;
    cells.reserve(static_cast<std::size_t>(std::abs(end_col - col) + std::abs(end_row - row)) + 1);
    cells.push_back({ col, row });

    /* Every iteration advances towards the end cell along at least one axis,
     * so the loop runs at most |dcol| + |drow| times. */
    constexpr double kCornerTol = 1e-9;
    while (col != end_col || row != end_row) {
        const bool can_col = col != end_col;
        const bool can_row = row != end_row;
        if (can_col && can_row && std::abs(t_col - t_row) <= kCornerTol * std::max(1.0, t_col)) {
            /* passing exactly through a corner touches both side neighbours */
            cells.push_back({ col + step_col, row });
            cells.push_back({ col, row + step_row });
            col += step_col;
            row += step_row;
            t_col += dt_col;
            t_row += dt_row;
        } else if (can_col && (!can_row || t_col < t_row)) {
            col += step_col;
            t_col += dt_col;
        } else {
            row += step_row;
            t_row += dt_row;
        }
        cells.push_back({ col, row });
    }
    return cells;
}

std::vector<CellIndex> rasterize_boundary(const BorderPolygon& polygon, const GridSpec& spec)
{
    const auto v = polygon.vertices();
    for (const Point2& p : v)
        world_to_cell(spec, p.x, p.y);

    std::vector<CellIndex> cells;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto edge = supercover_segment(spec, v[i], v[(i + 1) % v.size()]);
        cells.insert(cells.end(), edge.begin(), edge.end());
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

} // namespace vborder
