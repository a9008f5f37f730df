#include "doctest.h"
#include "oracles.hpp"

#include "vborder/errors.hpp"
#include "vborder/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace vborder;

namespace {

const std::vector<Point2> kSquare{ { 0, 0 }, { 1, 0 }, { 1, 1 }, { 0, 1 } };
const std::vector<Point2> kL{ { 0, 0 }, { 2, 0 }, { 2, 1 }, { 1, 1 }, { 1, 2 }, { 0, 2 } };

/* Every cell reachable from the first through 4-neighbours */
bool four_connected(const std::vector<CellIndex>& cells)
{
    if (cells.empty())
        return true;
    std::set<CellIndex> all(cells.begin(), cells.end()), seen{ cells.front() };
    std::vector<CellIndex> stack{ cells.front() };
    while (!stack.empty()) {
        const CellIndex c = stack.back();
        stack.pop_back();
        for (const CellIndex n : { CellIndex{ c.col + 1, c.row }, CellIndex{ c.col - 1, c.row },
                                   CellIndex{ c.col, c.row + 1 }, CellIndex{ c.col, c.row - 1 } })
            if (all.count(n) && seen.insert(n).second)
                stack.push_back(n);
    }
    return seen.size() == all.size();
}

} // namespace

TEST_CASE("normalize_angle range")
{
    CHECK(normalize_angle(M_PI) == doctest::Approx(M_PI));
    CHECK(normalize_angle(-M_PI) == doctest::Approx(M_PI));
    CHECK(normalize_angle(3 * M_PI / 2) == doctest::Approx(-M_PI / 2));
    CHECK(Pose2(0, 0, 7.0).theta == doctest::Approx(7.0 - 2 * M_PI));
    for (double a = -20.0; a < 20.0; a += 0.37) {
        const double n = normalize_angle(a);
        REQUIRE(n > -M_PI);
        REQUIRE(n <= M_PI);
        REQUIRE(std::remainder(n - a, 2 * M_PI) == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("point_in_polygon examples")
{
    const BorderPolygon sq(kSquare);
    CHECK(point_in_polygon(0.5, 0.5, sq));
    CHECK_FALSE(point_in_polygon(2, 2, sq));
    const BorderPolygon l(kL);
    CHECK_FALSE(point_in_polygon(1.5, 1.5, l));
    CHECK(vbtest::winding_number(1.5, 1.5, kL) == 0);
    CHECK(point_in_polygon(0.5, 1.5, l));
}

TEST_CASE("boundary points count as inside")
{
    const BorderPolygon sq(kSquare);
    for (const Point2 p : std::vector<Point2>{ { 0, 0 }, { 1, 0 }, { 1, 1 }, { 0, 1 }, { 0.5, 0 }, { 1, 0.3 },
                                               { 0.7, 1 }, { 0, 0.2 } })
        CHECK(point_in_polygon(p.x, p.y, sq));
    const BorderPolygon l(kL);
    CHECK(point_in_polygon(1.0, 1.5, l));
    CHECK(point_in_polygon(1.5, 1.0, l));
    CHECK(point_in_polygon(1.0, 1.0, l));
    /* ray through vertices from outside */
    CHECK_FALSE(point_in_polygon(-1.0, 1.0, l));
    CHECK_FALSE(point_in_polygon(-1.0, 2.0, l));
    CHECK_FALSE(point_in_polygon(-1.0, 0.0, l));
    CHECK(point_in_polygon(0.5, 1.0, l));
    CHECK_FALSE(point_in_polygon(2.5, 1.0, l));
}

TEST_CASE("point_in_polygon agrees with winding number on random non-convex polygons")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int checked = 0;
    for (int p = 0; p < 100; ++p) {
        const auto poly = vbtest::random_star_polygon(rng, { 0, 0 }, 0.3, 2.5, 3 + p % 12);
        const BorderPolygon b(poly);
        for (int k = 0; k < 200; ++k) {
            const double x = u(rng), y = u(rng);
            if (point_on_boundary(x, y, b, 1e-9))
                continue;
            REQUIRE(point_in_polygon(x, y, b) == (vbtest::winding_number(x, y, poly) != 0));
            ++checked;
        }
    }
    CHECK(checked > 19000);
}

TEST_CASE("polygon orientation does not matter")
{
    std::vector<Point2> cw(kL.rbegin(), kL.rend());
    const BorderPolygon a(kL), b(cw);
    CHECK(a.area() == doctest::Approx(3.0));
    CHECK(b.area() == doctest::Approx(3.0));
    for (double x = -0.25; x < 2.3; x += 0.1)
        for (double y = -0.25; y < 2.3; y += 0.1)
            REQUIRE(point_in_polygon(x, y, a) == point_in_polygon(x, y, b));
}

TEST_CASE("degenerate polygons")
{
    CHECK_THROWS_AS(BorderPolygon({ { 0, 0 }, { 1, 0 } }), DegenerateBorder);
    CHECK_THROWS_AS(BorderPolygon({ { 0, 0 }, { 1, 0 }, { 2, 0 } }), DegenerateBorder);
    CHECK_THROWS_AS(BorderPolygon({ { 0, 0 }, { 1, 0 }, { 1, 0 }, { 0, 1 } }), DegenerateBorder);
    CHECK_THROWS_AS(BorderPolygon({ { 0, 0 }, { 1, 0 }, { 0, 1 }, { 0, 0 } }), DegenerateBorder);
}

TEST_CASE("marker_ground_position examples")
{
    CameraModel flat;
    flat.height = 0.0;
    const Point2 a = marker_ground_position(Pose2(0, 0, 0), flat, 1.0);
    CHECK(a.x == doctest::Approx(1.0));
    CHECK(a.y == doctest::Approx(0.0));

    CameraModel cam;
    cam.height = 0.3;
    const Point2 b = marker_ground_position(Pose2(2, 3, 0), cam, 0.5);
    CHECK(b.x == doctest::Approx(2.4).epsilon(1e-12));
    CHECK(b.y == doctest::Approx(3.0).epsilon(1e-12));
    const Point2 c = marker_ground_position(Pose2(0, 0, M_PI / 2), cam, 0.5);
    CHECK(c.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c.y == doctest::Approx(0.4).epsilon(1e-12));

    CHECK_THROWS_AS(marker_ground_position(Pose2(0, 0, 0), cam, 0.2), GeometryError);
}

TEST_CASE("zero camera height keeps the slant distance")
{
    CameraModel flat;
    flat.height = 0.0;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 1000; ++i) {
        const Pose2 r(u(rng), u(rng), u(rng));
        const double s = std::abs(u(rng)) + 0.01;
        const Point2 p = marker_ground_position(r, flat, s);
        REQUIRE(std::abs(distance(p, r.position()) - s) < 1e-9);
    }
}

TEST_CASE("polygon_from_history on a 1 m square")
{
    PoseHistory h;
    double t = 0.0;
    const Point2 corners[] = { { 0, 0 }, { 1, 0 }, { 1, 1 }, { 0, 1 } };
    std::vector<Point2> input;
    for (int e = 0; e < 4; ++e)
        for (int k = 0; k < 100; ++k) {
            const Point2 a = corners[e], b = corners[(e + 1) % 4];
            const Point2 p = a + (k / 100.0) * (b - a);
            input.push_back(p);
            h.append(t += 0.1, Pose2(p.x, p.y, 0));
        }
    PolygonExtraction params;
    params.min_spacing = 0.05;
    const BorderPolygon poly = polygon_from_history(h, params);
    CHECK(poly.size() >= 76);
    CHECK(poly.size() <= 84);
    const std::vector<Point2> verts(poly.vertices().begin(), poly.vertices().end());
    CHECK(vbtest::shoelace(verts) == doctest::Approx(1.0).epsilon(0.05));

    /* subsequence of the input, spaced by at least min_spacing */
    std::size_t j = 0;
    for (const Point2& v : verts) {
        while (j < input.size() && !(input[j] == v))
            ++j;
        REQUIRE(j < input.size());
    }
    for (std::size_t i = 1; i < verts.size(); ++i)
        REQUIRE(distance(verts[i], verts[i - 1]) >= 0.05 - 1e-9);
}

TEST_CASE("polygon_from_history degenerate inputs")
{
    PoseHistory line;
    for (int k = 0; k < 100; ++k)
        line.append(k, Pose2(k * 0.01, 0, 0));
    CHECK_THROWS_AS(polygon_from_history(line), DegenerateBorder);

    PoseHistory two;
    two.append(0, Pose2(0, 0, 0));
    two.append(1, Pose2(1, 1, 0));
    CHECK_THROWS_AS(polygon_from_history(two), DegenerateBorder);

    /* a 2 cm triangle: three points but below the area floor */
    PoseHistory tiny;
    tiny.append(0, Pose2(0, 0, 0));
    tiny.append(1, Pose2(0.03, 0, 0));
    tiny.append(2, Pose2(0, 0.03, 0));
    CHECK_THROWS_AS(polygon_from_history(tiny), DegenerateBorder);
}

TEST_CASE("pose history timestamps strictly increase")
{
    PoseHistory h;
    h.append(1.0, Pose2());
    CHECK_THROWS_AS(h.append(1.0, Pose2()), ValueError);
    CHECK_THROWS_AS(h.append(0.5, Pose2()), ValueError);
}

TEST_CASE("supercover: axis-aligned square edges")
{
    const GridSpec s{ 80, 80, 0.025, 0, 0 };
    /* edges off the grid lines so the count is unambiguous */
    const Point2 c[] = { { 0.51, 0.51 }, { 1.51, 0.51 }, { 1.51, 1.51 }, { 0.51, 1.51 } };
    for (int e = 0; e < 4; ++e) {
        const auto cells = supercover_segment(s, c[e], c[(e + 1) % 4]);
        CHECK(cells.size() >= 39);
        CHECK(cells.size() <= 41);
        const auto oracle = vbtest::sampled_cells(s, c[e], c[(e + 1) % 4]);
        CHECK(std::set<CellIndex>(cells.begin(), cells.end()) == oracle);
    }
}

TEST_CASE("supercover: single cell and diagonal")
{
    const GridSpec s{ 20, 20, 1.0, 0, 0 };
    const auto one = supercover_segment(s, { 3.2, 4.2 }, { 3.8, 4.7 });
    REQUIRE(one.size() == 1);
    CHECK(one[0] == CellIndex{ 3, 4 });

    /* 45 degrees through cell corners: 10 diagonal cells plus both side
     * neighbours at each of the 9 interior corners */
    const auto diag = supercover_segment(s, { 2.5, 2.5 }, { 12.5, 12.5 });
    CHECK(diag.size() >= 19);
    const auto oracle = vbtest::sampled_cells(s, { 2.5, 2.5 }, { 12.5, 12.5 });
    for (const CellIndex& c : oracle)
        CHECK(std::find(diag.begin(), diag.end(), c) != diag.end());
    CHECK(four_connected(diag));
}

TEST_CASE("supercover contains dense samples and is connected for random segments")
{
    const GridSpec s{ 200, 120, 0.025, 0, 0 };
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> ux(0.0, s.extent_x() - 1e-9), uy(0.0, s.extent_y() - 1e-9);
    for (int i = 0; i < 500; ++i) {
        const Point2 a{ ux(rng), uy(rng) }, b{ ux(rng), uy(rng) };
        const auto cells = supercover_segment(s, a, b);
        const std::set<CellIndex> got(cells.begin(), cells.end());
        for (const CellIndex& c : vbtest::sampled_cells(s, a, b))
            REQUIRE(got.count(c) == 1);
        REQUIRE(four_connected(cells));
    }
}

TEST_CASE("rasterize_boundary")
{
    const GridSpec s{ 100, 100, 0.025, 0, 0 };
    const BorderPolygon l({ { 0.51, 0.51 }, { 1.51, 0.51 }, { 1.51, 1.01 }, { 1.01, 1.01 }, { 1.01, 1.51 }, { 0.51, 1.51 } });
    const auto cells = rasterize_boundary(l, s);
    CHECK(std::is_sorted(cells.begin(), cells.end()));
    CHECK(std::adjacent_find(cells.begin(), cells.end()) == cells.end());
    CHECK(four_connected(cells));
    const auto v = l.vertices();
    for (std::size_t i = 0; i < v.size(); ++i)
        for (const CellIndex& c : vbtest::sampled_cells(s, v[i], v[(i + 1) % v.size()]))
            REQUIRE(std::binary_search(cells.begin(), cells.end(), c));

    const BorderPolygon outside({ { 0.5, 0.5 }, { 3.0, 0.5 }, { 0.5, 1.0 } });
    CHECK_THROWS_AS(rasterize_boundary(outside, s), OutOfBounds);
}

TEST_CASE("camera model validation")
{
    CameraModel c;
    CHECK_NOTHROW(c.validate());
    c.fov_half_angle = 1.6;
    CHECK_THROWS_AS(c.validate(), ValueError);
    c = CameraModel{};
    c.min_range = 5.0;
    CHECK_THROWS_AS(c.validate(), ValueError);
}
