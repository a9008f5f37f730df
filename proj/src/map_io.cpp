#include "vborder/map_io.hpp"

#include "vborder/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

namespace vborder {

namespace {

std::string format_number(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string mark_prefix(const std::filesystem::path& path, const YAML::Mark& mark)
{
    std::ostringstream os;
    os << path.string();
    if (mark.line >= 0)
        os << ":" << (mark.line + 1) << ":" << (mark.column + 1);
    os << ": ";
    return os.str();
}

template <typename T>
T required(const YAML::Node& root, const char* key, const std::filesystem::path& path)
{
    const YAML::Node node = root[key];
    if (!node)
        throw ParseError(mark_prefix(path, root.Mark()) + "missing key '" + key + "'");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ParseError(mark_prefix(path, node.Mark()) + "bad value for key '" + key + "'");
    }
}

/* Cursor over PGM header tokens, tracking the byte offset for diagnostics */
class PgmReader
{
public:
    PgmReader(const std::vector<char>& bytes, std::string name)
        : bytes_(bytes), name_(std::move(name)) { }

    std::string token()
    {
        skip_space_and_comments();
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && !is_space(bytes_[pos_]))
            ++pos_;
        if (start == pos_)
            fail("unexpected end of header");
        return std::string(bytes_.begin() + start, bytes_.begin() + pos_);
    }

    long integer(const char* what)
    {
        const std::size_t at = pos_;
        const std::string tok = token();
        long value = 0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || value <= 0)
            fail(std::string("invalid ") + what + " '" + tok + "'", at);
        return value;
    }

    /* Exactly one whitespace byte separates the header from the raster */
    void single_space()
    {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_]))
            fail("expected whitespace after maxval");
        ++pos_;
    }

    std::size_t position() const { return pos_; }

    [[noreturn]] void fail(const std::string& msg, std::size_t at) const
    {
        throw ParseError(name_ + ": offset " + std::to_string(at) + ": " + msg);
    }
    [[noreturn]] void fail(const std::string& msg) const { fail(msg, pos_); }

private:
    static bool is_space(char c)
    { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
                    ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<char>& bytes_;
    std::string name_;
    std::size_t pos_ = 0;
};

std::vector<char> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError(path.string() + ": cannot open file");
    return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

} // namespace

std::uint8_t encode_cell(double value)
{
    if (value == kUnknown)
        return kUnknownPixel;
    const long pixel = std::lround(255.0 * (1.0 - value));
    if (pixel == kUnknownPixel)
        return value < (255.0 - kUnknownPixel) / 255.0 ? kUnknownPixel + 1 : kUnknownPixel - 1;
    return static_cast<std::uint8_t>(pixel);
}

double decode_pixel(std::uint8_t pixel)
{
    if (pixel == kUnknownPixel)
        return kUnknown;
    return 1.0 - pixel / 255.0;
}

MapMetadata read_metadata(const std::filesystem::path& meta_path)
{
    YAML::Node root;
    try {
        root = YAML::LoadFile(meta_path.string());
    } catch (const YAML::BadFile&) {
        throw ParseError(meta_path.string() + ": cannot open file");
    } catch (const YAML::ParserException& e) {
        throw ParseError(mark_prefix(meta_path, e.mark) + e.msg);
    }
    if (!root.IsMap())
        throw ParseError(mark_prefix(meta_path, root.Mark()) + "metadata must be a key/value mapping");

    MapMetadata meta;
    meta.image = required<std::string>(root, "image", meta_path);
    meta.resolution = required<double>(root, "resolution", meta_path);
    const auto origin = required<std::vector<double>>(root, "origin", meta_path);
    if (origin.size() != 3)
        throw ParseError(mark_prefix(meta_path, root["origin"].Mark()) + "origin must be [x, y, theta]");
    meta.origin_x = origin[0];
    meta.origin_y = origin[1];
    meta.origin_theta = origin[2];
    meta.thresholds.occupied = required<double>(root, "occupied_thresh", meta_path);
    meta.thresholds.free = required<double>(root, "free_thresh", meta_path);
    meta.negate = required<int>(root, "negate", meta_path);

    if (meta.negate != 0)
        throw ValueError(meta_path.string() + ": only negate: 0 is supported");
    if (meta.origin_theta != 0.0)
        throw ValueError(meta_path.string() + ": rotated map origins are not supported");
    if (!(meta.resolution > 0.0))
        throw ValueError(meta_path.string() + ": resolution must be positive");
    meta.thresholds.validate();
    return meta;
}

void write_metadata(const MapMetadata& meta, const std::filesystem::path& meta_path)
{
    std::ofstream out(meta_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ValueError(meta_path.string() + ": cannot write file");
    out << "image: " << meta.image << "\n"
        << "resolution: " << format_number(meta.resolution) << "\n"
        << "origin: [" << format_number(meta.origin_x) << ", "
        << format_number(meta.origin_y) << ", "
        << format_number(meta.origin_theta) << "]\n"
        << "occupied_thresh: " << format_number(meta.thresholds.occupied) << "\n"
        << "free_thresh: " << format_number(meta.thresholds.free) << "\n"
        << "negate: " << meta.negate << "\n";
}

OccupancyGrid load_map(const std::filesystem::path& image_path,
                       const std::filesystem::path& meta_path,
                       const LoadOptions& options)
{
    const MapMetadata meta = read_metadata(meta_path);
    const std::vector<char> bytes = read_file(image_path);

    PgmReader reader(bytes, image_path.string());
    if (reader.token() != "P5")
        reader.fail("not a binary PGM (expected magic P5)", 0);
    const long width = reader.integer("width");
    const long height = reader.integer("height");
    const std::size_t maxval_at = reader.position();
    const long maxval = reader.integer("maxval");
    if (maxval != 255)
        throw ValueError(image_path.string() + ": offset " + std::to_string(maxval_at) +
                         ": only maxval 255 is supported");
    reader.single_space();

    const std::size_t raster = reader.position();
    const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - raster < expected)
        reader.fail("raster truncated: expected " + std::to_string(expected) + " bytes, found " +
                    std::to_string(bytes.size() - raster), bytes.size());

    GridSpec spec;
    spec.width = static_cast<int>(width);
    spec.height = static_cast<int>(height);
    spec.resolution = meta.resolution;
    spec.origin_x = meta.origin_x;
    spec.origin_y = meta.origin_y;

    std::vector<double> cells(expected);
    for (long img_row = 0; img_row < height; ++img_row) {
        const long grid_row = height - 1 - img_row;
        for (long col = 0; col < width; ++col) {
            const std::size_t at = raster + static_cast<std::size_t>(img_row * width + col);
            const auto pixel = static_cast<std::uint8_t>(bytes[at]);
            if (options.strict_trinary && pixel != 0 && pixel != 255 && pixel != kUnknownPixel)
                throw ValueError(image_path.string() + ": offset " + std::to_string(at) +
                                 ": pixel " + std::to_string(pixel) + " outside the trinary encoding");
            double value = decode_pixel(pixel);
            if (options.trinarize)
                value = trinarize_value(value, meta.thresholds);
            cells[static_cast<std::size_t>(grid_row * width + col)] = value;
        }
    }
    return OccupancyGrid(spec, std::move(cells));
}

OccupancyGrid load_map(const std::filesystem::path& meta_path, const LoadOptions& options)
{
    const MapMetadata meta = read_metadata(meta_path);
    std::filesystem::path image(meta.image);
    if (image.is_relative())
        image = meta_path.parent_path() / image;
    return load_map(image, meta_path, options);
}

void save_map(const OccupancyGrid& grid,
              const std::filesystem::path& image_path,
              const std::filesystem::path& meta_path,
              const Thresholds& thresholds)
{
    thresholds.validate();
    const GridSpec& spec = grid.spec();

    std::ofstream out(image_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ValueError(image_path.string() + ": cannot write file");
    out << "P5\n" << spec.width << " " << spec.height << "\n255\n";
    std::vector<char> row(static_cast<std::size_t>(spec.width));
    for (int r = spec.height - 1; r >= 0; --r) {
        for (int c = 0; c < spec.width; ++c)
            row[static_cast<std::size_t>(c)] = static_cast<char>(encode_cell(grid.at(c, r)));
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    out.close();

    MapMetadata meta;
    const auto image_abs = std::filesystem::absolute(image_path);
    const auto meta_dir = std::filesystem::absolute(meta_path).parent_path();
    meta.image = image_abs.parent_path() == meta_dir ? image_path.filename().string()
                                                     : image_abs.string();
    meta.resolution = spec.resolution;
    meta.origin_x = spec.origin_x;
    meta.origin_y = spec.origin_y;
    meta.thresholds = thresholds;
    write_metadata(meta, meta_path);
}

} // namespace vborder
