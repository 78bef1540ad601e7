#include <doctest.h>

#include <numbers>
#include <set>

#include "biparam/error.hpp"
#include "biparam/multipliers.hpp"
#include "biparam/paraproducts.hpp"
#include "helpers.hpp"

using namespace biparam;

namespace {

GridFunction d_axis(const GridFunction& f, int axis, double a)
{
    const double l = f.geometry().length;
    return apply_fourier_multiplier(f, [=](int n0, int n1) {
        const double n = axis == 0 ? n0 : n1;
        return n == 0 ? 0.0 : std::pow(std::abs(2.0 * std::numbers::pi * n / l), a);
    });
}

GridFunction tensor(const GridFunction& a, const GridFunction& b)
{
    const int n = a.geometry().n;
    const GridGeometry g{2, n, a.geometry().length};
    Field s(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            s(r, c) = a.samples()(r, 0) * b.samples()(c, 0);
        }
    }
    return {g, s};
}

} // namespace

TEST_CASE("1D product reconstruction and bilinearity")
{
    const GridGeometry g{1, 256, 1.0};
    const auto f = test::random_fn(g, 1, 100), h = test::random_fn(g, 2, 100);
    GridFunction sum = GridFunction::zeros(g);
    for (int j = 0; j < 4; ++j) {
        const auto p = make_paraproduct(j, 256, 1.0);
        sum = sum + paraproduct(p, f, h);
        CHECK(paraproduct(p, GridFunction::zeros(g), h).samples().abs().maxCoeff() == 0.0);
        const cplx c(1.5, -0.25);
        CHECK(test::max_diff(paraproduct(p, c * f, h), c * paraproduct(p, f, h)) < 1e-12);
    }
    CHECK(test::max_diff(sum, product(f, h)) < 1e-10);
}

TEST_CASE("2D reconstruction and tensor split")
{
    const GridGeometry g{2, 64, 1.0};
    const auto f = test::random_fn(g, 3, 20), h = test::random_fn(g, 4, 20);
    GridFunction sum = GridFunction::zeros(g);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            sum = sum + biparameter_paraproduct(make_paraproduct(i, j, 64, 1.0), f, h);
        }
    }
    CHECK(test::max_diff(sum, product(f, h)) < 1e-9);
    CHECK(biparameter_paraproduct(make_paraproduct(1, 2, 64, 1.0), GridFunction::zeros(g), h)
              .samples().abs().maxCoeff() == 0.0);

    const GridGeometry g1{1, 64, 1.0};
    const auto a1 = test::random_fn(g1, 5, 20), a2 = test::random_fn(g1, 6, 20);
    const auto b1 = test::random_fn(g1, 7, 20), b2 = test::random_fn(g1, 8, 20);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const auto lhs = biparameter_paraproduct(make_paraproduct(i, j, 64, 1.0), tensor(a1, a2), tensor(b1, b2));
            const auto rhs = tensor(paraproduct(make_paraproduct(i, 64, 1.0), a1, b1),
                                    paraproduct(make_paraproduct(j, 64, 1.0), a2, b2));
            CHECK(test::max_diff(lhs, rhs) < 1e-11);
        }
    }
}

TEST_CASE("commutation with homogeneous derivatives")
{
    const GridGeometry g{1, 256, 1.0};
    const auto f = test::random_fn(g, 9, 100), h = test::random_fn(g, 10, 100);
    for (int j = 0; j < 4; ++j) {
        const auto p = make_paraproduct(j, 256, 1.0);
        for (double a : {0.25, 0.5, 1.0, 1.5}) {
            const auto lhs = homogeneous_derivative(paraproduct(p, f, h), a);
            const auto q = commute_derivative(p, a);
            const auto rhs = j == 2 ? paraproduct(q, homogeneous_derivative(f, a), h)
                                    : paraproduct(q, f, homogeneous_derivative(h, a));
            CHECK(test::rel_diff(rhs, lhs) < 1e-10);
        }
    }
    // two half steps equal one full step
    const auto p1 = make_paraproduct(1, 256, 1.0);
    const auto once = paraproduct(commute_derivative(p1, 1.0), f, homogeneous_derivative(h, 1.0));
    const auto twice =
        paraproduct(commute_derivative(commute_derivative(p1, 0.5), 0.5), f, homogeneous_derivative(h, 1.0));
    CHECK(test::rel_diff(twice, once) < 1e-10);
    // phi-type slots cannot absorb a negative power
    CHECK_THROWS_AS(commute_derivative(p1, 0.5, Target::first), InvalidArgument);

    const GridGeometry g2{2, 128, 1.0};
    const auto F = test::random_fn(g2, 11, 40), H = test::random_fn(g2, 12, 40);
    const auto p12 = make_paraproduct(1, 2, 128, 1.0);
    const auto lhs = homogeneous_derivative(biparameter_paraproduct(p12, F, H), 0.5, 1.5);
    const auto rhs = biparameter_paraproduct(commute_derivative(p12, 0.5, 1.5), d_axis(F, 1, 1.5), d_axis(H, 0, 0.5));
    CHECK(test::rel_diff(rhs, lhs) < 1e-9);
}

TEST_CASE("paraproduct equals its induced multiplier")
{
    const GridGeometry g{1, 32, 1.0};
    const auto f = test::random_fn(g, 13, 15), h = test::random_fn(g, 14, 15);
    for (int j = 0; j < 4; ++j) {
        const auto p = make_paraproduct(j, 32, 1.0);
        const MultilinearOperator op{induced_symbol(p), Strategy::full_sum};
        CHECK(test::max_diff(apply_multiplier(op, {f, h}), paraproduct(p, f, h)) < 1e-10);
    }
}

TEST_CASE("Pi_0 output lives on the predicted frequency set")
{
    const int n = 256;
    const GridGeometry g{1, n, 1.0};
    // f on |n| in [60, 70], g on |n| in [2, 3]
    Field a = Field::Zero(n, 1), b = Field::Zero(n, 1);
    for (int k = 60; k <= 70; ++k) {
        a(k, 0) = cplx(1.0, 0.1 * k);
        a(n - k, 0) = cplx(0.5, -0.2);
    }
    for (int k = 2; k <= 3; ++k) {
        b(k, 0) = 1.0;
        b(n - k, 0) = cplx(0.0, 1.0);
    }
    const auto f = from_spectrum(g, a), h = from_spectrum(g, b);
    const auto p = make_paraproduct(0, n, 1.0);
    std::set<Eigen::Index> allowed;
    for (const auto& t : p.terms) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const Eigen::Index s = (i + j) % n;
                if (a(i, 0) != 0.0 && b(j, 0) != 0.0 && t.u(i) != 0.0 && t.v(j) != 0.0 && t.w(s) != 0.0) {
                    allowed.insert(s);
                }
            }
        }
    }
    const Field out = paraproduct(p, f, h).spectrum();
    for (Eigen::Index s = 0; s < n; ++s) {
        if (allowed.count(s) == 0) {
            CHECK(std::abs(out(s, 0)) < 1e-13);
        }
    }
}

TEST_CASE("Kato-Ponce harness")
{
    const GridGeometry g{1, 2048, 1.0};
    KatoPonceConfig c;
    c.alpha = 1.0;
    c.r = 1.0;
    const auto fam = kato_ponce_family(g, 0.005, {1.0, 2.0, 4.0});
    const auto rep = kato_ponce_report(fam, c);
    REQUIRE(rep.rows.size() == 3);
    for (const auto& row : rep.rows) {
        CHECK(std::isfinite(row.ratio));
        CHECK(row.ratio > 0.0);
        CHECK(std::abs(row.ratio / rep.rows[0].ratio - 1.0) < 0.02);
    }
    CHECK(rep.to_csv().header ==
          std::vector<std::string>{"family_member_id", "lhs", "rhs_term_1", "rhs_term_2", "ratio"});

    // zero input
    const auto z = kato_ponce_report({{GridFunction::zeros(g), fam[0].second}}, c);
    CHECK(z.rows[0].lhs == 0.0);
    CHECK(z.rows[0].ratio == 0.0);

    // the left side is symmetric in (f, g)
    const auto swapped = kato_ponce_report({{fam[0].second, fam[0].first}}, c);
    CHECK(swapped.rows[0].lhs == doctest::Approx(rep.rows[0].lhs).epsilon(1e-14));

    KatoPonceConfig bad = c;
    bad.exponents = {{3.0, 2.0}};
    CHECK_THROWS_AS(kato_ponce_report(fam, bad), InvalidArgument);
    CHECK_THROWS_AS(homogeneous_derivative(fam[0].first, -1.0), InvalidArgument);
}

TEST_CASE("bi-parameter Kato-Ponce dilation")
{
    const GridGeometry g{2, 256, 1.0};
    KatoPonceConfig c;
    c.alpha = 1.0;
    c.beta = 1.0;
    const auto rep = kato_ponce_report(kato_ponce_family(g, 0.02, {1.0, 2.0}), c);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].rhs.size() == 4);
    CHECK(std::abs(rep.rows[1].ratio / rep.rows[0].ratio - 1.0) < 0.02);
}
