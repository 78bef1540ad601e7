#include <doctest.h>

#include "biparam/error.hpp"
#include "biparam/tiles.hpp"
#include "helpers.hpp"

using namespace biparam;

TEST_CASE("packets are normalised and supported in their band")
{
    const int n = 256;
    const GridGeometry g{1, n, 1.0};
    CHECK(max_tile_scale(n) == 6);
    for (Band band : {Band::low, Band::up, Band::down}) {
        double lo = -0.25, hi = 0.25;
        if (band == Band::up) {
            lo = 0.75, hi = 1.25;
        } else if (band == Band::down) {
            lo = -1.75, hi = -0.25;
        }
        for (int k : {0, 3, 6}) {
            const Tile1D t{k, (1 << k) - 1};
            const auto p = wave_packet(g, t, band);
            CHECK(quasi_norm(p, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
            const auto spec = packet_spectrum(n, 1.0, t, band);
            const double s = std::ldexp(1.0, k);
            for (int i = 0; i < n; ++i) {
                const int nu = i < n / 2 ? i : i - n;
                if (std::abs(spec(i)) > 0.0) {
                    CHECK(nu > lo * s - 1e-12);
                    CHECK(nu < hi * s + 1e-12);
                }
            }
        }
    }
    // the packet at l + 1 is a translate of the packet at l
    const auto a = wave_packet(g, Tile1D{4, 3}, Band::up);
    const auto b = wave_packet(g, Tile1D{4, 4}, Band::up);
    CHECK(test::max_diff(translate(a, n / 16), b) < 1e-12);
    CHECK_THROWS_AS(wave_packet(g, Tile1D{7, 0}, Band::low), InvalidArgument);
    CHECK_THROWS_AS(wave_packet(g, Tile1D{2, 4}, Band::low), InvalidArgument);
}

TEST_CASE("tile enumeration and geometry")
{
    const auto t = enumerate_tiles(0, 3);
    CHECK(t.size() == 15);
    CHECK(std::is_sorted(t.begin(), t.end()));
    CHECK(enumerate_bitiles(0, 2).size() == 49);
    CHECK(Tile1D{3, 5}.inside(Tile1D{1, 1}));
    CHECK_FALSE(Tile1D{3, 5}.inside(Tile1D{1, 0}));
    CHECK(Tile1D{2, 3}.first_cell(64) == 48);
    CHECK(Tile1D{2, 3}.cell_count(64) == 16);
    CHECK(BiTile{{1, 0}, {2, 1}}.measure(2.0) == doctest::Approx(0.5));
}

TEST_CASE("coefficient tables match inner products")
{
    const GridGeometry g{1, 128, 1.0};
    const auto f = test::random_fn(g, 21, 60);
    for (int j = 1; j <= 3; ++j) {
        const auto tab = tile_coefficients(f, j);
        for (const Tile1D t : {Tile1D{0, 0}, Tile1D{2, 1}, Tile1D{5, 17}}) {
            const auto p = wave_packet(g, t, band_for_slot(j));
            const cplx direct = (f.samples() * p.samples().conjugate()).sum() * g.cell_measure();
            CHECK(std::abs(tab(t) - direct) < 1e-12);
        }
        CHECK(bessel_ratio(tab) < 2.0);
    }
    // a packet's coefficient on itself is 1
    const auto self = tile_coefficients(wave_packet(g, Tile1D{3, 5}, Band::down), 3);
    CHECK(std::abs(self(Tile1D{3, 5}) - 1.0) < 1e-12);
    CHECK(bessel_ratio(tile_coefficients(GridFunction::zeros(g), 1)) == 0.0);
}

TEST_CASE("bi-tile coefficients")
{
    const GridGeometry g{2, 32, 1.0};
    const auto f = test::random_fn(g, 22, 15);
    for (int j = 1; j <= 3; ++j) {
        const auto tab = bitile_coefficients(f, j);
        CHECK(tab.k_max == max_tile_scale(32));
        const BiTile t{{1, 1}, {2, 3}};
        const auto p = wave_packet(g, t, j);
        CHECK(quasi_norm(p, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
        const cplx direct = (f.samples() * p.samples().conjugate()).sum() * g.cell_measure();
        CHECK(std::abs(tab(t) - direct) < 1e-11);
        CHECK(bessel_ratio(tab, f) < 4.0);
    }
    const auto a = bitile_coefficients(f, 1), b = bitile_coefficients(f, 2), c = bitile_coefficients(f, 3);
    const auto all = enumerate_bitiles(0, a.k_max);
    CHECK(model_form(a, b, c, all) == doctest::Approx(model_form(a, b, c)).epsilon(1e-12));
    const std::vector<BiTile> keep{{{0, 0}, {1, 1}}, {{2, 3}, {0, 0}}};
    const auto r = restrict_table(a, keep);
    CHECK(r(keep[0]) == a(keep[0]));
    CHECK(r(BiTile{{1, 0}, {1, 0}}) == cplx(0.0));
    CHECK(model_form(r, b, c) == doctest::Approx(model_form(a, b, c, keep)).epsilon(1e-12));
}
