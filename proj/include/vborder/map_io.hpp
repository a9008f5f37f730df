#pragma once

#include "vborder/gridmap.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace vborder {

/// Contents of the YAML-style metadata file accompanying a PGM map image.
struct MapMetadata
{
    std::string image;
    double resolution = 0.025;
    double origin_x = 0.0;
    double origin_y = 0.0;
    double origin_theta = 0.0;
    Thresholds thresholds;
    int negate = 0;
};

struct LoadOptions
{
    /* Snap decoded cells to {-1, 0, 1} using the metadata thresholds */
    bool trinarize = false;
    /* Reject pixels other than 0, 205 and 255 with ValueError */
    bool strict_trinary = false;
};

inline constexpr std::uint8_t kUnknownPixel = 205;

/* Pixel for a cell value: unknown -> 205, p -> round(255 (1 - p)). A known
 * value whose pixel would collide with 205 is nudged to the neighbouring
 * pixel on its own side so it never decodes as unknown. */
std::uint8_t encode_cell(double value);

/* Cell value for a pixel: 205 -> unknown, otherwise 1 - pixel / 255 */
double decode_pixel(std::uint8_t pixel);

MapMetadata read_metadata(const std::filesystem::path& meta_path);
void write_metadata(const MapMetadata& meta, const std::filesystem::path& meta_path);

/* Loads the image named explicitly; the `image` key of the metadata is ignored */
OccupancyGrid load_map(const std::filesystem::path& image_path,
                       const std::filesystem::path& meta_path,
                       const LoadOptions& options = {});

/* Loads the image referenced by the metadata, relative to the metadata file */
OccupancyGrid load_map(const std::filesystem::path& meta_path,
                       const LoadOptions& options = {});

void save_map(const OccupancyGrid& grid,
              const std::filesystem::path& image_path,
              const std::filesystem::path& meta_path,
              const Thresholds& thresholds = {});

} // namespace vborder
