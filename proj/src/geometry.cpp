#include "vborder/geometry.hpp"

#include "vborder/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace vborder {

double distance(Point2 a, Point2 b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

double normalize_angle(double angle)
{
    double r = std::remainder(angle, 2.0 * std::numbers::pi);
    if (r <= -std::numbers::pi)
        r += 2.0 * std::numbers::pi;
    return r;
}

void PoseHistory::append(double time, const Pose2& pose)
{
    if (!entries_.empty() && !(time > entries_.back().time)) {
        std::ostringstream os;
        os << "pose timestamp " << time << " does not follow " << entries_.back().time;
        throw ValueError(os.str());
    }
    entries_.push_back({ time, pose });
}

double signed_area(std::span<const Point2> vertices)
{
    double twice = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = vertices[i];
        const Point2& b = vertices[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * twice;
}

BorderPolygon::BorderPolygon(std::vector<Point2> vertices)
    : vertices_(std::move(vertices))
{
    if (vertices_.size() < 3)
        throw DegenerateBorder("a border polygon needs at least 3 vertices, got " +
                               std::to_string(vertices_.size()));
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (vertices_[i] == vertices_[(i + 1) % vertices_.size()])
            throw DegenerateBorder("border polygon repeats vertex " + std::to_string(i));
    }
    if (!(area() > 0.0))
        throw DegenerateBorder("border polygon encloses no area");
}

double BorderPolygon::area() const
{
    return std::abs(signed_area(vertices_));
}

double BorderPolygon::perimeter() const
{
    double len = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        len += distance(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
    return len;
}

void CameraModel::validate() const
{
    if (!(height >= 0.0))
        throw ValueError("camera height must be non-negative");
    if (!(fov_half_angle > 0.0 && fov_half_angle < std::numbers::pi / 2))
        throw ValueError("camera half field of view must lie in (0, pi/2)");
    if (!(min_range > 0.0 && min_range < max_range))
        throw ValueError("camera ranges must satisfy 0 < min_range < max_range");
}

bool point_on_boundary(double px, double py, const BorderPolygon& polygon, double tol)
{
    const auto v = polygon.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2 a = v[i];
        const Point2 b = v[(i + 1) % v.size()];
        const double ex = b.x - a.x;
        const double ey = b.y - a.y;
        const double wx = px - a.x;
        const double wy = py - a.y;
        const double len2 = ex * ex + ey * ey;
        const double t = (wx * ex + wy * ey) / len2;
        if (t < 0.0 || t > 1.0) {
            if (std::hypot(wx, wy) <= tol || std::hypot(px - b.x, py - b.y) <= tol)
                return true;
            continue;
        }
        if (std::abs(wx * ey - wy * ex) / std::sqrt(len2) <= tol)
            return true;
    }
    return false;
}

bool point_in_polygon(double px, double py, const BorderPolygon& polygon)
{
    if (point_on_boundary(px, py, polygon))
        return true;

    /* Cast a ray towards +x; an edge counts if py lies in [min_y, max_y) */
    bool inside = false;
    const auto v = polygon.vertices();
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const Point2 a = v[j];
        const Point2 b = v[i];
        if ((a.y > py) != (b.y > py)) {
            const double x_cross = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y);
            if (px < x_cross)
                inside = !inside;
        }
    }
    return inside;
}

double ground_distance(double slant_distance, double camera_height)
{
    if (slant_distance < camera_height) {
        std::ostringstream os;
        os << "slant distance " << slant_distance << " is shorter than camera height "
           << camera_height;
        throw GeometryError(os.str());
    }
    return std::sqrt(slant_distance * slant_distance - camera_height * camera_height);
}

Point2 marker_ground_position(const Pose2& robot, const CameraModel& camera, double slant_distance)
{
    const double d = ground_distance(slant_distance, camera.height);
    return { robot.x + d * std::cos(robot.theta), robot.y + d * std::sin(robot.theta) };
}

BorderPolygon polygon_from_history(const PoseHistory& history, const PolygonExtraction& params)
{
    if (history.empty())
        throw DegenerateBorder("pose history is empty");

    std::vector<Point2> kept;
    for (const TimedPose& entry : history.entries()) {
        const Point2 p = entry.pose.position();
        if (kept.empty() || distance(p, kept.back()) >= params.min_spacing - 1e-9)
            kept.push_back(p);
    }
    /* the closing edge is implicit; drop an exact duplicate of the start */
    if (kept.size() > 1 && kept.back() == kept.front())
        kept.pop_back();

    BorderPolygon polygon(std::move(kept));
    if (polygon.area() < params.min_area) {
        std::ostringstream os;
        os << "border encloses " << polygon.area() << " m^2, below the floor of "
           << params.min_area << " m^2";
        throw DegenerateBorder(os.str());
    }
    return polygon;
}

} // namespace vborder
