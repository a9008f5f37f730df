#include "vborder/lab.hpp"

#include "vborder/errors.hpp"

#include <cmath>

namespace vborder {

OccupancyGrid make_walled_room(double width_m, double height_m, double resolution, double wall_m)
{
    if (!(width_m > 0.0) || !(height_m > 0.0) || !(resolution > 0.0))
        throw ValueError("room width, height and resolution must be positive");
    if (wall_m < 0.0)
        throw ValueError("wall thickness must be non-negative");

    GridSpec spec;
    spec.width = static_cast<int>(std::lround(width_m / resolution));
    spec.height = static_cast<int>(std::lround(height_m / resolution));
    spec.resolution = resolution;
    if (spec.width < 1 || spec.height < 1)
        throw ValueError("room is smaller than one cell");

    const int wall = static_cast<int>(std::lround(wall_m / resolution));
    OccupancyGrid grid(spec, kFree);
    for (int r = 0; r < spec.height; ++r)
        for (int c = 0; c < spec.width; ++c)
            if (c < wall || r < wall || c >= spec.width - wall || r >= spec.height - wall)
                grid.at(c, r) = kOccupied;
    return grid;
}

namespace {

BorderTask shifted(std::vector<Point2> shape, Point2 offset, bool keep_off)
{
    for (auto& p : shape)
        p = p + offset;
    return { std::move(shape), keep_off };
}

} // namespace

std::vector<LabBorder> lab_borders()
{
    std::vector<LabBorder> out;
    const auto add = [&](const char* name, double length, BorderTask task) {
        out.push_back({ name, std::move(task), length });
    };

    /* rectangles */
    add("Map 1", 4.0, shifted({ { 0, 0 }, { 1.2, 0 }, { 1.2, 0.8 }, { 0, 0.8 } }, { 2.45, 1.35 }, true));
    add("Map 2", 5.0, shifted({ { 0, 0 }, { 1.5, 0 }, { 1.5, 1.0 }, { 0, 1.0 } }, { 2.3, 1.25 }, true));
    add("Map 3", 6.0, shifted({ { 0, 0 }, { 1.8, 0 }, { 1.8, 1.2 }, { 0, 1.2 } }, { 2.15, 1.15 }, false));

    /* L shapes */
    add("Map 4", 7.0,
        shifted({ { 0, 0 }, { 2.0, 0 }, { 2.0, 0.8 }, { 1.0, 0.8 }, { 1.0, 1.5 }, { 0, 1.5 } }, { 2.05, 1.0 },
                true));
    add("Map 5", 8.0,
        shifted({ { 0, 0 }, { 2.5, 0 }, { 2.5, 0.7 }, { 1.2, 0.7 }, { 1.2, 1.5 }, { 0, 1.5 } }, { 1.8, 1.0 },
                true));
    add("Map 6", 9.0,
        shifted({ { 0, 0 }, { 2.5, 0 }, { 2.5, 2.0 }, { 1.5, 2.0 }, { 1.5, 1.0 }, { 0, 1.0 } }, { 1.8, 0.75 },
                true));

    /* U shapes */
    add("Map 7", 10.0,
        shifted({ { 0, 0 }, { 3.0, 0 }, { 3.0, 1.5 }, { 2.0, 1.5 }, { 2.0, 1.0 }, { 1.0, 1.0 }, { 1.0, 1.5 },
                  { 0, 1.5 } },
                { 1.55, 1.0 }, true));
    add("Map 8", 11.0,
        shifted({ { 0, 0 }, { 3.5, 0 }, { 3.5, 1.6 }, { 2.5, 1.6 }, { 2.5, 1.2 }, { 1.0, 1.2 }, { 1.0, 1.6 },
                  { 0, 1.6 } },
                { 1.3, 0.95 }, false));
    add("Map 9", 12.0,
        shifted({ { 0, 0 }, { 3.8, 0 }, { 3.8, 1.8 }, { 2.7, 1.8 }, { 2.7, 1.4 }, { 1.1, 1.4 }, { 1.1, 1.8 },
                  { 0, 1.8 } },
                { 1.15, 0.85 }, true));
    add("Map 10", 13.0,
        shifted({ { 0, 0 }, { 4.0, 0 }, { 4.0, 2.0 }, { 3.0, 2.0 }, { 3.0, 1.5 }, { 1.0, 1.5 }, { 1.0, 2.0 },
                  { 0, 2.0 } },
                { 1.05, 0.75 }, true));
    return out;
}

LabBorder carpet_border()
{
    return { "Carpet", shifted({ { 0, 0 }, { 1.6, 0 }, { 1.6, 1.0 }, { 0, 1.0 } }, { 3.2, 1.0 }, true), 5.2 };
}

} // namespace vborder
