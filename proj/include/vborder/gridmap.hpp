#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vborder {

/// Cell value of an unobserved cell.
inline constexpr double kUnknown = -1.0;
inline constexpr double kFree = 0.0;
inline constexpr double kOccupied = 1.0;

/// Geometry of a grid: cell counts, cell size and the world position of the
/// lower-left corner of cell (0, 0). Origins are axis aligned.
struct GridSpec
{
    int width = 1;
    int height = 1;
    double resolution = 0.025;
    double origin_x = 0.0;
    double origin_y = 0.0;

    /* Throws ValueError unless width, height >= 1 and resolution > 0 */
    void validate() const;

    std::size_t cell_count() const
    { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }

    double extent_x() const { return width * resolution; }
    double extent_y() const { return height * resolution; }

    bool operator==(const GridSpec&) const = default;
};

struct CellIndex
{
    int col = 0;
    int row = 0;

    auto operator<=>(const CellIndex&) const = default;
};

struct WorldPoint
{
    double x = 0.0;
    double y = 0.0;
};

bool in_bounds(const GridSpec& spec, CellIndex idx);

/* Cell containing the world point, floor convention on cell borders.
 * Throws OutOfBounds for points outside [origin, origin + extent). */
CellIndex world_to_cell(const GridSpec& spec, double x, double y);

/* Center of the cell in world coordinates */
WorldPoint cell_to_world(const GridSpec& spec, CellIndex idx);

/// Tri-state occupancy grid. Every cell is either kUnknown or a probability
/// in [0, 1]. Row 0 is the minimum-y world row.
class OccupancyGrid
{
public:
    explicit OccupancyGrid(const GridSpec& spec, double fill = kUnknown);
    OccupancyGrid(const GridSpec& spec, std::vector<double> cells);

    const GridSpec& spec() const { return spec_; }
    int width() const { return spec_.width; }
    int height() const { return spec_.height; }

    double get(CellIndex idx) const;
    void set(CellIndex idx, double value);

    /* Unchecked row-major access */
    double at(int col, int row) const
    { return cells_[static_cast<std::size_t>(row) * spec_.width + col]; }
    double& at(int col, int row)
    { return cells_[static_cast<std::size_t>(row) * spec_.width + col]; }

    std::span<const double> cells() const { return cells_; }

    bool operator==(const OccupancyGrid&) const = default;

private:
    std::size_t offset(CellIndex idx) const;

    GridSpec spec_;
    std::vector<double> cells_;
};

bool is_valid_cell_value(double value);

enum class MergeMode
{
    /* Virtual 1 overrides, virtual 0 keeps the prior (unknown stays unknown) */
    PreserveUnknown,
    /* Plain cell-wise maximum, turns unknown into free under a free virtual cell */
    LiteralMax,
};

/* Posterior map from prior and virtual maps. Throws SpecMismatch. */
OccupancyGrid merge(const OccupancyGrid& prior, const OccupancyGrid& virtual_map,
                    MergeMode mode = MergeMode::PreserveUnknown);

struct Thresholds
{
    double occupied = 0.65;
    double free = 0.196;

    void validate() const;
};

double trinarize_value(double value, const Thresholds& thresholds);

/* Maps each cell to {-1, 0, 1} */
OccupancyGrid trinarize(const OccupancyGrid& grid, const Thresholds& thresholds = {});

} // namespace vborder
