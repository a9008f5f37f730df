#include "vborder/gridmap.hpp"

#include "vborder/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vborder {

void GridSpec::validate() const
{
    if (width < 1 || height < 1)
        throw ValueError("grid dimensions must be at least 1x1");
    if (!(resolution > 0.0) || !std::isfinite(resolution))
        throw ValueError("grid resolution must be positive");
    if (!std::isfinite(origin_x) || !std::isfinite(origin_y))
        throw ValueError("grid origin must be finite");
}

bool in_bounds(const GridSpec& spec, CellIndex idx)
{
    return idx.col >= 0 && idx.col < spec.width &&
           idx.row >= 0 && idx.row < spec.height;
}

CellIndex world_to_cell(const GridSpec& spec, double x, double y)
{
    const double u = std::floor((x - spec.origin_x) / spec.resolution);
    const double v = std::floor((y - spec.origin_y) / spec.resolution);
    if (!(u >= 0.0 && u < spec.width && v >= 0.0 && v < spec.height)) {
        std::ostringstream os;
        os << "point (" << x << ", " << y << ") lies outside the grid extent";
        throw OutOfBounds(os.str());
    }
    return { static_cast<int>(u), static_cast<int>(v) };
}

WorldPoint cell_to_world(const GridSpec& spec, CellIndex idx)
{
    return { spec.origin_x + (idx.col + 0.5) * spec.resolution,
             spec.origin_y + (idx.row + 0.5) * spec.resolution };
}

bool is_valid_cell_value(double value)
{
    return value == kUnknown || (value >= 0.0 && value <= 1.0);
}

OccupancyGrid::OccupancyGrid(const GridSpec& spec, double fill)
    : spec_(spec)
{
    spec_.validate();
    if (!is_valid_cell_value(fill))
        throw ValueError("fill value must be -1 or within [0, 1]");
    cells_.assign(spec_.cell_count(), fill);
}

OccupancyGrid::OccupancyGrid(const GridSpec& spec, std::vector<double> cells)
    : spec_(spec), cells_(std::move(cells))
{
    spec_.validate();
    if (cells_.size() != spec_.cell_count())
        throw ValueError("cell array length does not match width x height");
    if (!std::all_of(cells_.begin(), cells_.end(), is_valid_cell_value))
        throw ValueError("cell values must be -1 or within [0, 1]");
}

std::size_t OccupancyGrid::offset(CellIndex idx) const
{
    if (!in_bounds(spec_, idx)) {
        std::ostringstream os;
        os << "cell (" << idx.col << ", " << idx.row << ") outside "
           << spec_.width << "x" << spec_.height << " grid";
        throw OutOfBounds(os.str());
    }
    return static_cast<std::size_t>(idx.row) * spec_.width + idx.col;
}

double OccupancyGrid::get(CellIndex idx) const
{
    return cells_[offset(idx)];
}

void OccupancyGrid::set(CellIndex idx, double value)
{
    if (!is_valid_cell_value(value))
        throw ValueError("cell values must be -1 or within [0, 1]");
    cells_[offset(idx)] = value;
}

OccupancyGrid merge(const OccupancyGrid& prior, const OccupancyGrid& virtual_map,
                    MergeMode mode)
{
    if (!(prior.spec() == virtual_map.spec()))
        throw SpecMismatch("prior and virtual maps differ in size, resolution or origin");

    const auto p = prior.cells();
    const auto v = virtual_map.cells();
    std::vector<double> out(p.size());

    for (std::size_t i = 0; i < p.size(); ++i) {
        if (mode == MergeMode::LiteralMax) {
            out[i] = std::max(p[i], v[i]);
            continue;
        }
        if (v[i] == kUnknown)
            out[i] = p[i];
        else if (p[i] == kUnknown)
            /* only positive occupancy evidence may overwrite an unknown cell */
            out[i] = v[i] > 0.0 ? v[i] : kUnknown;
        else
            out[i] = std::max(p[i], v[i]);
    }
    return OccupancyGrid(prior.spec(), std::move(out));
}

void Thresholds::validate() const
{
    if (!(free >= 0.0 && free < occupied && occupied <= 1.0))
        throw ValueError("thresholds must satisfy 0 <= free < occupied <= 1");
}

double trinarize_value(double value, const Thresholds& thresholds)
{
    if (value == kUnknown)
        return kUnknown;
    if (value > thresholds.occupied)
        return kOccupied;
    if (value < thresholds.free)
        return kFree;
    return kUnknown;
}

OccupancyGrid trinarize(const OccupancyGrid& grid, const Thresholds& thresholds)
{
    thresholds.validate();
    std::vector<double> out(grid.cells().begin(), grid.cells().end());
    for (auto& c : out)
        c = trinarize_value(c, thresholds);
    return OccupancyGrid(grid.spec(), std::move(out));
}

} // namespace vborder
