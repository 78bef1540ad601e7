#include <doctest.h>

#include "biparam/error.hpp"
#include "biparam/stratify.hpp"
#include "helpers.hpp"

using namespace biparam;

namespace {

struct Tables {
    BiCoefficientTable a, b, c;
};

Tables tables(int seed)
{
    const GridGeometry g{2, 64, 2.0};
    return {bitile_coefficients(test::random_fn(g, seed, 20), 1),
            bitile_coefficients(test::random_fn(g, seed + 50, 20), 2),
            bitile_coefficients(test::random_fn(g, seed + 90, 20), 3)};
}

} // namespace

TEST_CASE("stratification certificate at automatic thresholds")
{
    for (int s = 0; s < 3; ++s) {
        const auto t = tables(s);
        const auto par = stratify_parameters(t.a, t.b, t.c);
        CHECK(par.c >= 1.01 * hybrid_square(t.a, HybridMode::MS).values.maxCoeff() * (1 - 1e-12));
        CHECK(par.c * std::ldexp(1.0, par.n_start) > hybrid_square(t.c, HybridMode::SS).values.maxCoeff());
        const auto tiles = enumerate_bitiles(0, t.a.k_max);
        const auto res = stratify_levels(t.a, t.b, t.c, tiles, par.c, par.n_start);
        CHECK(res.certificate);
        CHECK(res.min_margin > 0);
        REQUIRE(res.levels.size() == tiles.size());
        for (const auto& lv : res.levels) {
            CHECK(lv[0] >= 1);
            CHECK(lv[1] >= 1);
            CHECK(lv[2] >= 1 - par.n_start);
        }
        CHECK(std::isfinite(res.growth_constant));
        CHECK(res.to_csv(tiles).rows.size() == tiles.size());
    }
}

TEST_CASE("stratification rejects thresholds that are too small")
{
    const auto t = tables(7);
    const auto tiles = enumerate_bitiles(0, t.a.k_max);
    const auto par = stratify_parameters(t.a, t.b, t.c);
    CHECK_THROWS_AS(stratify_levels(t.a, t.b, t.c, tiles, par.c * 1e-3, par.n_start), InvalidArgument);
    CHECK_THROWS_AS(stratify_levels(t.a, t.b, t.c, tiles, -1.0, 0), InvalidArgument);
    CHECK_THROWS_AS(stratify_parameters(t.a, t.b, t.c, 1.0), InvalidArgument);
}

TEST_CASE("Journe maximal rectangles on a single block")
{
    const GridGeometry g{2, 64, 1.0};
    Mask om = Mask::Constant(64, 64, false);
    om.block(24, 24, 16, 16).setConstant(true);
    Mask ot = Mask::Constant(64, 64, false);
    ot.block(8, 8, 48, 48).setConstant(true);
    const auto r = journe_maximal(g, {BiTile{{3, 3}, {3, 3}}}, om, ot);
    REQUIRE(r.maximal.size() == 1);
    CHECK(r.maximal[0].d == 2);
    CHECK(r.maximal[0].rect.rows == 8);
    CHECK(r.assignment == std::vector<std::size_t>{0});

    CHECK_THROWS_AS(journe_maximal(g, {BiTile{{3, 3}, {3, 3}}}, ot, om), InvalidArgument);
    CHECK_THROWS_AS(journe_maximal(g, {BiTile{{1, 0}, {1, 0}}}, om, ot), InvalidArgument);
}

TEST_CASE("Journe constant on random instances")
{
    double cj = 0.0;
    for (int s = 0; s < 10; ++s) {
        const auto in = random_journe_instance(128, static_cast<std::uint64_t>(s));
        const auto r = journe_maximal(in.geometry, in.tiles, in.omega, in.omega_tilde);
        REQUIRE(r.assignment.size() == in.tiles.size());
        for (std::size_t i = 0; i < in.tiles.size(); ++i) {
            const CellRect tr = cell_rect(in.tiles[i], 128);
            const CellRect& m = r.maximal.at(r.assignment[i]).rect;
            CHECK(tr.r0 >= m.r0);
            CHECK(tr.c0 >= m.c0);
            CHECK(tr.r0 + tr.rows <= m.r0 + m.rows);
            CHECK(tr.c0 + tr.cols <= m.c0 + m.cols);
        }
        cj = std::max(cj, r.c_j);
    }
    CHECK(cj <= 20.0);
    // same seed, same instance
    const auto x = random_journe_instance(128, 3), y = random_journe_instance(128, 3);
    CHECK((x.omega == y.omega).all());
    CHECK(x.tiles == y.tiles);
}
