#include "vborder/teaching.hpp"

#include <algorithm>
#include <vector>

namespace vborder {

OccupancyGrid build_virtual_map(const VirtualBorder& border, const GridSpec& spec)
{
    const std::vector<CellIndex> outline = rasterize_boundary(border.polygon, spec);

    OccupancyGrid grid(spec, kFree);
    const auto v = border.polygon.vertices();
    const double inside_value = border.keep_off_inside ? kOccupied : kFree;
    const double outside_value = border.keep_off_inside ? kFree : kOccupied;

    /* Scanline through the cell centers of each row. A center left of an odd
     * number of edge crossings is inside; crossings use the same half-open
     * rule as point_in_polygon, so only on-edge centers can disagree with it
     * and those belong to the outline anyway. */
    std::vector<double> crossings;
    for (int row = 0; row < spec.height; ++row) {
        const double y = spec.origin_y + (row + 0.5) * spec.resolution;
        crossings.clear();
        for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
            const Point2 a = v[j];
            const Point2 b = v[i];
            if ((a.y > y) != (b.y > y))
                crossings.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
        std::sort(crossings.begin(), crossings.end());

        std::size_t passed = 0;
        for (int col = 0; col < spec.width; ++col) {
            const double x = spec.origin_x + (col + 0.5) * spec.resolution;
            while (passed < crossings.size() && crossings[passed] <= x)
                ++passed;
            const bool inside = (crossings.size() - passed) % 2 == 1;
            grid.at(col, row) = inside ? inside_value : outside_value;
        }
    }

    for (const CellIndex& c : outline)
        grid.at(c.col, c.row) = kOccupied;
    return grid;
}

} // namespace vborder
