#pragma once

#include "vborder/gridmap.hpp"

#include <span>
#include <vector>

namespace vborder {

struct Point2
{
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return { a.x + b.x, a.y + b.y }; }
inline Point2 operator-(Point2 a, Point2 b) { return { a.x - b.x, a.y - b.y }; }
inline Point2 operator*(double s, Point2 p) { return { s * p.x, s * p.y }; }

double distance(Point2 a, Point2 b);

/* Wraps an angle into (-pi, pi] */
double normalize_angle(double angle);

/// Planar robot pose in the map frame; theta is kept normalized.
struct Pose2
{
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Pose2() = default;
    Pose2(double x_, double y_, double theta_)
        : x(x_), y(y_), theta(normalize_angle(theta_)) { }

    Point2 position() const { return { x, y }; }

    bool operator==(const Pose2&) const = default;
};

struct TimedPose
{
    double time = 0.0;
    Pose2 pose;
};

/// Time-ordered pose sequence with strictly increasing timestamps.
class PoseHistory
{
public:
    /* Throws ValueError if time does not exceed the last timestamp */
    void append(double time, const Pose2& pose);

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    void clear() { entries_.clear(); }

    const TimedPose& front() const { return entries_.front(); }
    const TimedPose& back() const { return entries_.back(); }
    std::span<const TimedPose> entries() const { return entries_; }

private:
    std::vector<TimedPose> entries_;
};

/* Signed shoelace area, positive for counter-clockwise vertex order */
double signed_area(std::span<const Point2> vertices);

/// Closed simple polygon; the last vertex connects back to the first.
class BorderPolygon
{
public:
    /* Throws DegenerateBorder for fewer than 3 vertices, repeated
     * consecutive vertices or zero enclosed area */
    explicit BorderPolygon(std::vector<Point2> vertices);

    std::span<const Point2> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    double area() const;
    double perimeter() const;

private:
    std::vector<Point2> vertices_;
};

/// Forward-looking camera mounted straight above the robot base origin.
struct CameraModel
{
    double height = 0.3;
    double fov_half_angle = 0.75;
    double min_range = 0.1;
    double max_range = 4.0;

    void validate() const;
};

/* Inside-or-on-boundary test; ray crossings use the half-open edge rule */
bool point_in_polygon(double px, double py, const BorderPolygon& polygon);

/* True iff the point lies on an edge of the polygon (within tol metres) */
bool point_on_boundary(double px, double py, const BorderPolygon& polygon, double tol = 1e-12);

/* Ground-plane distance recovered from the camera-to-marker slant distance.
 * Throws GeometryError if slant < camera height. */
double ground_distance(double slant_distance, double camera_height);

/* Marker position assuming the robot faces the marker */
Point2 marker_ground_position(const Pose2& robot, const CameraModel& camera, double slant_distance);

struct PolygonExtraction
{
    double min_spacing = 0.025;
    /* Smallest accepted enclosed area, m^2 (default 4 cells at 2.5 cm) */
    double min_area = 4.0 * 0.025 * 0.025;
};

/* Thins the recorded positions by min_spacing and closes the loop.
 * Throws DegenerateBorder. */
BorderPolygon polygon_from_history(const PoseHistory& history, const PolygonExtraction& params = {});

/* Supercover traversal of a single segment, in traversal order */
std::vector<CellIndex> supercover_segment(const GridSpec& spec, Point2 a, Point2 b);

/* All cells touched by the closed polygon outline, sorted and unique.
 * Throws OutOfBounds if a vertex lies outside the grid. */
std::vector<CellIndex> rasterize_boundary(const BorderPolygon& polygon, const GridSpec& spec);

} // namespace vborder
