#pragma once

#include "vborder/gridmap.hpp"
#include "vborder/script_gen.hpp"

#include <string>
#include <vector>

namespace vborder {

/* Empty rectangular room: free interior, occupied walls of the given
 * thickness along the outer edge. Throws ValueError for non-positive sizes. */
OccupancyGrid make_walled_room(double width_m, double height_m, double resolution, double wall_m);

struct LabBorder
{
    std::string name;
    BorderTask task;
    double length_m = 0.0;
};

/* Ten convex and non-convex borders, 4 m to 13 m long, laid out inside a
 * 6.1 m x 3.5 m room */
std::vector<LabBorder> lab_borders();

/* Keep-off rectangle around a carpet in the same room */
LabBorder carpet_border();

inline constexpr double kLabWidth = 6.1;
inline constexpr double kLabHeight = 3.5;
inline constexpr double kLabResolution = 0.025;
inline constexpr double kLabWall = 0.05;

} // namespace vborder
