#include <doctest.h>

#include <numbers>

#include "biparam/error.hpp"
#include "biparam/io.hpp"
#include "helpers.hpp"

using namespace biparam;

TEST_CASE("constant has a single DC coefficient")
{
    const GridGeometry g{1, 32, 2.0};
    const auto f = make_grid_function(g, Generator{"constant", {{"value", 1.0}}});
    const Field& c = f.spectrum();
    CHECK(std::abs(c(0, 0) - cplx(1.0)) < 1e-15);
    CHECK(c.abs().bottomRows(31).maxCoeff() < 1e-15);
}

TEST_CASE("gaussian centred at L/2 is symmetric")
{
    const GridGeometry g{1, 64, 1.0};
    const auto f = make_grid_function(g, Generator{"gaussian", {{"width", 0.1}}});
    for (int i = 1; i < 64; ++i) {
        CHECK(std::abs(f.samples()(i, 0) - f.samples()(64 - i, 0)) < 1e-15);
    }
}

TEST_CASE("chirp_xy has unit modulus inside its cutoff")
{
    const GridGeometry g{2, 32, 64.0};
    const auto f = make_grid_function(g, Generator{"chirp_xy", {{"cutoff", 16.0}}});
    int inside = 0;
    for (Eigen::Index i = 0; i < f.samples().size(); ++i) {
        const double a = std::abs(f.samples()(i));
        if (a != 0.0) {
            CHECK(std::abs(a - 1.0) < 1e-14);
            ++inside;
        }
    }
    CHECK(inside > 0);
}

TEST_CASE("exponential lands on a single coefficient")
{
    const GridGeometry g{1, 16, 3.0};
    Field s(16, 1);
    for (int i = 0; i < 16; ++i) {
        s(i, 0) = std::polar(1.0, 2.0 * std::numbers::pi * 3.0 * i / 16.0);
    }
    const GridFunction f(g, s);
    CHECK(std::abs(f.spectrum()(3, 0) - cplx(1.0)) < 1e-14);
    CHECK(f.spectrum().abs().sum() - 1.0 < 1e-13);
}

TEST_CASE("roundtrip, brute-force DFT and Plancherel")
{
    const GridGeometry g{1, 64, 1.5};
    const auto f = test::random_fn(g, 3, 31);
    const GridFunction back(g, fft_inverse(fft_forward(f.samples())));
    CHECK(test::rel_diff(back, f) < 1e-12);
    // direct O(N^2) sum for the coefficients
    double worst = 0.0;
    for (int n = 0; n < 64; ++n) {
        cplx acc = 0.0;
        for (int j = 0; j < 64; ++j) {
            acc += f.samples()(j, 0) * std::polar(1.0, -2.0 * std::numbers::pi * n * j / 64.0);
        }
        worst = std::max(worst, std::abs(acc / 64.0 - f.spectrum()(n, 0)));
    }
    CHECK(worst < 1e-10);
    CHECK(std::abs(quasi_norm(f, 2.0) - spectral_l2_norm(f)) < 1e-10);

    const GridGeometry g2{2, 32, 1.0};
    const auto h = test::random_fn(g2, 4, 15);
    CHECK(test::rel_diff(GridFunction(g2, fft_inverse(fft_forward(h.samples()))), h) < 1e-12);
    CHECK(std::abs(quasi_norm(h, 2.0) - spectral_l2_norm(h)) < 1e-10);
}

TEST_CASE("geometry validation")
{
    CHECK_THROWS_AS(validate(GridGeometry{1, 12, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(GridGeometry{1, 4, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(GridGeometry{3, 16, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(make_grid_function(GridGeometry{1, 16, 1.0}, Generator{"nope", {}}), InvalidArgument);
    const GridGeometry g{2, 16, 3.0};
    CHECK(g.cell_measure() * static_cast<double>(g.size()) == doctest::Approx(9.0).epsilon(1e-15));
}

TEST_CASE("Littlewood-Paley partition")
{
    const auto fam = lp_partition(128, 0, 6);
    CHECK(fam.partition_certificate <= 1e-14);
    for (int k = fam.k_min; k <= fam.k_max; ++k) {
        const auto& p = fam.profile(k);
        for (int i = 0; i < 128; ++i) {
            const double a = std::abs(frequency_index(i, 128));
            if (a < std::ldexp(1.0, k - 1) || a > std::ldexp(1.0, k + 1)) {
                CHECK(p(i) == 0.0);
            }
        }
    }
    CHECK_THROWS_AS(lp_partition(128, 0, 3), InvalidArgument);

    // sum of pieces rebuilds a mean-zero function
    const GridGeometry g{1, 128, 1.0};
    auto f = test::random_fn(g, 9, 60);
    Field c = f.spectrum();
    c(0, 0) = 0.0;
    f = from_spectrum(g, c);
    GridFunction sum = GridFunction::zeros(g);
    for (int k = fam.k_min; k <= fam.k_max; ++k) {
        sum = sum + lp_piece(f, fam, k);
    }
    CHECK(test::max_diff(sum, f) < 1e-12);

    // psi_k at distance 20 2^{-k} L from its centre
    const auto big = lp_partition(1024, 0, 9);
    const int k = 6;
    const GridGeometry gb{1, 1024, 1.0};
    Field spec = Field::Zero(1024, 1);
    spec.col(0) = big.profile(k).cast<cplx>();
    const GridFunction psi = from_spectrum(gb, spec);
    const double peak = psi.samples().abs().maxCoeff();
    const auto offset = static_cast<Eigen::Index>(std::lround(20.0 * std::ldexp(1.0, -k) * 1024));
    CHECK(std::abs(psi.samples()(offset, 0)) < 1e-6 * peak);
}

TEST_CASE("quasi-norms")
{
    const GridGeometry g{1, 64, 1.0};
    Mask m = Mask::Constant(64, 1, false);
    m.topRows(16).setConstant(true);
    CHECK(quasi_norm(indicator(g, m), NormSpec::weak()) == doctest::Approx(0.25).epsilon(1e-15));

    const auto f = test::random_fn(g, 5, 20);
    double direct = 0.0;
    for (int i = 0; i < 64; ++i) {
        direct += std::norm(f.samples()(i, 0)) / 64.0;
    }
    CHECK(std::abs(quasi_norm(f, 2.0) - std::sqrt(direct)) < 1e-12);
    const cplx c(-2.0, 1.5);
    for (const NormSpec s : {NormSpec::lp(0.5), NormSpec::lp(3.0), NormSpec::sup(), NormSpec::weak()}) {
        CHECK(quasi_norm(c * f, s) == doctest::Approx(std::abs(c) * quasi_norm(f, s)).epsilon(1e-12));
    }
    CHECK(quasi_norm(f, NormSpec::weak()) <= quasi_norm(f, 1.0));
    CHECK_THROWS_AS(quasi_norm(f, 0.0), InvalidArgument);
}

TEST_CASE("BPGF and CSV round trips")
{
    const GridGeometry g{2, 8, 2.5};
    const auto f = test::random_fn(g, 2, 3);
    const std::string path = "grid_roundtrip.bpgf";
    write_bpgf(path, f);
    const auto back = read_bpgf(path);
    CHECK(back.geometry() == g);
    CHECK(test::max_diff(back, f) == 0.0);
    const auto t = grid_function_csv(f);
    CHECK(t.header == std::vector<std::string>{"index", "re", "im"});
    CHECK(t.rows.size() == 64);

    Mask m = Mask::Constant(8, 8, false);
    m(1, 2) = m(1, 3) = m(5, 7) = true;
    const Mask r = mask_from_rle(mask_rle_csv(m), 8, 8);
    CHECK((r == m).all());
}

TEST_CASE("translation and dilation")
{
    const GridGeometry g{1, 64, 1.0};
    const auto f = test::random_fn(g, 7, 10);
    const auto t = translate(f, 5);
    CHECK(std::abs(t.samples()(7, 0) - f.samples()(2, 0)) == 0.0);
    const auto d = dilate(f, 1.0, 2.0);
    CHECK(test::max_diff(d, f) < 1e-12);
}
