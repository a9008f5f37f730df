#include "doctest.h"

#include "vborder/errors.hpp"
#include "vborder/gridmap.hpp"

#include <cmath>
#include <random>

using namespace vborder;

namespace {

GridSpec spec10()
{
    return GridSpec{ 10, 10, 0.025, 0.0, 0.0 };
}

/* scalar max, applied only where the prior is known */
double merge_oracle(double prior, double virt)
{
    if (virt == 1.0)
        return 1.0;
    if (prior == -1.0)
        return -1.0;
    return std::max(prior, virt);
}

} // namespace

TEST_CASE("fresh grid is unknown, read after write")
{
    OccupancyGrid g(spec10());
    CHECK(g.get({ 0, 0 }) == -1.0);
    g.set({ 3, 4 }, 1.0);
    CHECK(g.get({ 3, 4 }) == 1.0);
    CHECK(g.at(3, 4) == 1.0);
}

TEST_CASE("out of bounds access")
{
    OccupancyGrid g(spec10());
    CHECK_THROWS_AS(g.get({ 10, 0 }), OutOfBounds);
    CHECK_THROWS_AS(g.get({ 0, -1 }), OutOfBounds);
    CHECK_THROWS_AS(g.set({ 0, 10 }, 0.0), OutOfBounds);
}

TEST_CASE("invalid values and specs are rejected")
{
    OccupancyGrid g(spec10());
    CHECK_THROWS_AS(g.set({ 0, 0 }, 1.5), ValueError);
    CHECK_THROWS_AS(g.set({ 0, 0 }, -0.5), ValueError);
    CHECK_THROWS_AS(g.set({ 0, 0 }, NAN), ValueError);
    CHECK_THROWS_AS(OccupancyGrid(GridSpec{ 0, 10, 0.025, 0, 0 }), ValueError);
    CHECK_THROWS_AS(OccupancyGrid(GridSpec{ 3, 3, 0.0, 0, 0 }), ValueError);
    CHECK_THROWS_AS(OccupancyGrid(spec10(), std::vector<double>(99, 0.0)), ValueError);
}

TEST_CASE("world_to_cell and cell_to_world")
{
    const GridSpec s = spec10();
    CHECK(world_to_cell(s, 0.0, 0.0) == CellIndex{ 0, 0 });
    CHECK(world_to_cell(s, 0.0375, 0.06) == CellIndex{ 1, 2 });
    const WorldPoint c = cell_to_world(s, { 1, 2 });
    CHECK(c.x == doctest::Approx(0.0375).epsilon(1e-12));
    CHECK(c.y == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK_THROWS_AS(world_to_cell(s, 0.25, 0.1), OutOfBounds);
    CHECK_THROWS_AS(world_to_cell(s, -0.001, 0.1), OutOfBounds);

    const GridSpec shifted{ 7, 5, 0.1, -1.0, 2.0 };
    CHECK(world_to_cell(shifted, -0.95, 2.05) == CellIndex{ 0, 0 });
    CHECK(world_to_cell(shifted, -0.35, 2.45) == CellIndex{ 6, 4 });
}

TEST_CASE("cell_to_world then world_to_cell is the identity on indices")
{
    const GridSpec specs[] = { { 244, 140, 0.025, 0, 0 }, { 13, 7, 0.1, -3.3, 1.7 }, { 1, 1, 0.5, 0, 0 } };
    for (const GridSpec& s : specs)
        for (int r = 0; r < s.height; ++r)
            for (int c = 0; c < s.width; ++c) {
                const WorldPoint p = cell_to_world(s, { c, r });
                REQUIRE(world_to_cell(s, p.x, p.y) == CellIndex{ c, r });
            }
}

TEST_CASE("merge examples")
{
    const GridSpec s{ 3, 1, 1.0, 0, 0 };
    const OccupancyGrid prior(s, std::vector<double>{ 0.5, 1.0, -1.0 });
    const OccupancyGrid virt(s, std::vector<double>{ 1.0, 0.0, 0.0 });
    const OccupancyGrid post = merge(prior, virt);
    CHECK(post.at(0, 0) == 1.0);
    CHECK(post.at(1, 0) == 1.0);
    CHECK(post.at(2, 0) == -1.0);

    const OccupancyGrid literal = merge(prior, virt, MergeMode::LiteralMax);
    CHECK(literal.at(2, 0) == 0.0);
}

TEST_CASE("merge against scalar oracle on random maps")
{
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick(0, 4);
    const double values[] = { -1.0, 0.0, 0.3, 0.8, 1.0 };
    const GridSpec s{ 31, 17, 0.05, 0, 0 };
    for (int t = 0; t < 20; ++t) {
        std::vector<double> p(s.cell_count()), v(s.cell_count());
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = values[pick(rng)];
            v[i] = pick(rng) < 2 ? 1.0 : 0.0;
        }
        const OccupancyGrid post = merge(OccupancyGrid(s, p), OccupancyGrid(s, v));
        for (std::size_t i = 0; i < p.size(); ++i)
            REQUIRE(post.cells()[i] == merge_oracle(p[i], v[i]));
    }
}

TEST_CASE("merge rejects mismatched specs")
{
    const OccupancyGrid a(GridSpec{ 4, 4, 0.025, 0, 0 });
    CHECK_THROWS_AS(merge(a, OccupancyGrid(GridSpec{ 4, 5, 0.025, 0, 0 })), SpecMismatch);
    CHECK_THROWS_AS(merge(a, OccupancyGrid(GridSpec{ 4, 4, 0.05, 0, 0 })), SpecMismatch);
}

TEST_CASE("trinarize")
{
    const Thresholds t;
    CHECK(trinarize_value(0.9, t) == 1.0);
    CHECK(trinarize_value(0.1, t) == 0.0);
    CHECK(trinarize_value(-1.0, t) == -1.0);
    CHECK(trinarize_value(0.5, t) == -1.0);
    CHECK(trinarize_value(0.65, t) == -1.0);
    CHECK(trinarize_value(0.196, t) == -1.0);
    CHECK_THROWS_AS(trinarize(OccupancyGrid(GridSpec{ 1, 1, 1.0, 0, 0 }), Thresholds{ 0.2, 0.3 }), ValueError);

    const OccupancyGrid g(GridSpec{ 2, 2, 1.0, 0, 0 }, std::vector<double>{ 0.9, 0.1, -1.0, 0.5 });
    const OccupancyGrid tri = trinarize(g);
    CHECK(tri.at(0, 0) == 1.0);
    CHECK(tri.at(1, 0) == 0.0);
    CHECK(tri.at(0, 1) == -1.0);
    CHECK(tri.at(1, 1) == -1.0);
}
