// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "biparam/maximal.hpp"
#include "biparam/multipliers.hpp"
#include "biparam/paraproducts.hpp"
#include "biparam/singular.hpp"
#include "biparam/special.hpp"
#include "biparam/stopping.hpp"
#include "biparam/stratify.hpp"
#include "helpers.hpp"

using namespace biparam;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(int id, bool pass, const std::string& detail)
{
    std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) {
        ++failures;
    }
}

std::string fmt(const char* f, double a)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

unsigned thread_count()
{
    return std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
}

// --------------------------------------------------------------------------------------------

void log_divergence()
{
    const auto t0 = Clock::now();
    std::vector<int> ns;
    for (int n = 16; n <= 8192; n *= 2) {
        ns.push_back(n);
    }
    const auto sg = sine_growth(ns);
    const double pi = std::numbers::pi;
    const bool slope_ok = sg.fit.slope >= 0.95 * pi && sg.fit.slope <= 1.05 * pi;

    std::vector<int> bd_ns;
    for (int n = 16; n <= 512; n *= 2) {
        bd_ns.push_back(n);
    }
    const int threads = static_cast<int>(thread_count());
    const auto bd = divergence_certificate(DivergenceOperator::double_bht, bd_ns, 2, 2, 1, 3, threads);
    const auto ctl = divergence_certificate(DivergenceOperator::control, bd_ns, 2, 2, 1, 3, threads);
    const double elapsed = seconds_since(t0);

    const bool pass = slope_ok && bd.fit.slope > 0.0 && bd.fit.t_stat > 5.0 && ctl.flat() && elapsed < 120.0;
    verdict(1, pass,
            "S slope/pi=" + fmt("%.6f", sg.fit.slope / pi) + " C1=" + fmt("%.4f", sg.c1) +
                " Bd slope=" + fmt("%.3e", bd.fit.slope) + " t=" + fmt("%.3g", bd.fit.t_stat) +
                " control slope=" + fmt("%.2e", ctl.fit.slope) + " se=" + fmt("%.2e", ctl.fit.slope_se) +
                " time=" + fmt("%.1fs", elapsed));
}

// --------------------------------------------------------------------------------------------

GridFunction axis_derivative(const GridFunction& f, int axis, double a)
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
    Field s(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            s(r, c) = a.samples()(r, 0) * b.samples()(c, 0);
        }
    }
    return {GridGeometry{2, n, a.geometry().length}, s};
}

void exact_identities()
{
    const auto t0 = Clock::now();
    const std::vector<double> orders{0.25, 0.5, 1.0, 1.5};
    const GridGeometry g1{1, 256, 1.0};
    const GridGeometry g2{2, 128, 1.0};
    double comm1 = 0.0, comm2 = 0.0, recon1 = 0.0, recon2 = 0.0, split = 0.0;

    for (int s = 0; s < 20; ++s) {
        const auto f = test::random_fn(g1, 1000 + s, 100), h = test::random_fn(g1, 2000 + s, 100);
        GridFunction sum = GridFunction::zeros(g1);
        for (int j = 0; j < 4; ++j) {
            const auto p = make_paraproduct(j, 256, 1.0);
            const auto value = paraproduct(p, f, h);
            sum = sum + value;
            for (double a : orders) {
                const auto lhs = homogeneous_derivative(value, a);
                const auto q = commute_derivative(p, a);
                const auto rhs = j == 2 ? paraproduct(q, homogeneous_derivative(f, a), h)
                                        : paraproduct(q, f, homogeneous_derivative(h, a));
                comm1 = std::max(comm1, test::rel_diff(rhs, lhs));
            }
        }
        recon1 = std::max(recon1, test::max_diff(sum, product(f, h)));

        // two-parameter: each pair gets one (i, j) type, cycling through all 16, and every (alpha, beta)
        const auto F = test::random_fn(g2, 3000 + s, 40), H = test::random_fn(g2, 4000 + s, 40);
        const int ti = s % 4, tj = (s / 4 + s) % 4;
        const auto p = make_paraproduct(ti, tj, 128, 1.0);
        const auto value = biparameter_paraproduct(p, F, H);
        for (double a : orders) {
            for (double b : orders) {
                const auto lhs = homogeneous_derivative(value, a, b);
                GridFunction fa = F, ha = H;
                (ti == 2 ? fa : ha) = axis_derivative(ti == 2 ? fa : ha, 0, a);
                (tj == 2 ? fa : ha) = axis_derivative(tj == 2 ? fa : ha, 1, b);
                const auto rhs = biparameter_paraproduct(commute_derivative(p, a, b), fa, ha);
                comm2 = std::max(comm2, test::rel_diff(rhs, lhs));
            }
        }
        if (s < 4) {
            GridFunction total = GridFunction::zeros(g2);
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) {
                    total = total + biparameter_paraproduct(make_paraproduct(i, j, 128, 1.0), F, H);
                }
            }
            recon2 = std::max(recon2, test::max_diff(total, product(F, H)));

            const GridGeometry a1{1, 128, 1.0};
            const auto u1 = test::random_fn(a1, 5000 + s, 40), u2 = test::random_fn(a1, 6000 + s, 40);
            const auto v1 = test::random_fn(a1, 7000 + s, 40), v2 = test::random_fn(a1, 8000 + s, 40);
            const auto uu = tensor(u1, u2), vv = tensor(v1, v2);
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) {
                    const auto lhs = biparameter_paraproduct(make_paraproduct(i, j, 128, 1.0), uu, vv);
                    const auto rhs = tensor(paraproduct(make_paraproduct(i, 128, 1.0), u1, v1),
                                            paraproduct(make_paraproduct(j, 128, 1.0), u2, v2));
                    split = std::max(split, test::max_diff(lhs, rhs));
                }
            }
        }
    }
    const double elapsed = seconds_since(t0);
    const bool pass = comm1 <= 1e-9 && comm2 <= 1e-9 && recon1 <= 1e-10 && recon2 <= 1e-9 && split <= 1e-11 &&
                      elapsed < 60.0;
    verdict(2, pass,
            "commute 1D=" + fmt("%.2e", comm1) + " 2D=" + fmt("%.2e", comm2) + " reconstruct 1D=" +
                fmt("%.2e", recon1) + " 2D=" + fmt("%.2e", recon2) + " tensor split=" + fmt("%.2e", split) +
                " time=" + fmt("%.1fs", elapsed));
}

// --------------------------------------------------------------------------------------------

BiCoefficientTable random_table(const GridGeometry& g, int j, std::mt19937_64& rng)
{
    BiCoefficientTable t = bitile_coefficients(GridFunction::zeros(g), j);
    std::normal_distribution<double> z;
    for (auto& b : t.blocks) {
        for (Eigen::Index r = 0; r < b.rows(); ++r) {
            for (Eigen::Index c = 0; c < b.cols(); ++c) {
                b(r, c) = cplx(z(rng), z(rng));
            }
        }
    }
    return t;
}

void majorization()
{
    const GridGeometry g{2, 64, 1.0};
    std::mt19937_64 rng(20240601);
    double slack = std::numeric_limits<double>::infinity();
    bool holds = true;
    for (int s = 0; s < 50; ++s) {
        // alternate raw random tables and tables of random functions
        const bool raw = s % 2 == 0;
        const auto a = raw ? random_table(g, 1, rng) : bitile_coefficients(test::random_fn(g, 100 + s, 31), 1);
        const auto b = raw ? random_table(g, 2, rng) : bitile_coefficients(test::random_fn(g, 200 + s, 31), 2);
        const auto c = raw ? random_table(g, 3, rng) : bitile_coefficients(test::random_fn(g, 300 + s, 31), 3);
        const auto cert = pointwise_majorization(a, b, c);
        slack = std::min(slack, cert.min_slack);
        holds = holds && cert.holds;
    }
    verdict(3, holds && slack >= -1e-12, "min slack=" + fmt("%.3e", slack) + " over 50 tables on 64^2");
}

// --------------------------------------------------------------------------------------------

void stopping_contract()
{
    const GridGeometry g{1, 256, 1.0};
    const auto tiles = enumerate_tiles(0, max_tile_scale(256));
    std::mt19937_64 rng(77);
    bool residual_ok = true, nesting_ok = true, placed_ok = true;
    double c_stop = 0.0, use_min = std::numeric_limits<double>::infinity(), use_max = 0.0;

    for (int s = 0; s < 100; ++s) {
        const int j = 1 + s % 3;
        const auto f = test::random_fn(g, 9000 + s, 100);
        const auto table = tile_coefficients(f, j);
        const auto d = stopping_partition(table, tiles);
        c_stop = std::max(c_stop, d.c_stop);

        // replay every level and re-evaluate the residual criterion
        std::vector<Tile1D> remaining = tiles;
        std::map<int, const Stratum*> by_level;
        for (const auto& st : d.strata) {
            if (!st.cleanup) {
                by_level[st.n] = &st;
            }
        }
        std::size_t placed = 0;
        for (const auto& st : d.strata) {
            for (const auto& tree : st.trees) {
                placed += tree.members.size();
                for (const auto& m : tree.members) {
                    nesting_ok = nesting_ok && m.inside(tree.top);
                }
            }
            nesting_ok = nesting_ok && st.tree_measure <= d.c_stop * std::ldexp(1.0, st.n) * (1 + 1e-12);
        }
        placed_ok = placed_ok && placed == tiles.size();
        if (!by_level.empty()) {
            for (int n = by_level.begin()->first; n <= by_level.rbegin()->first; ++n) {
                const auto step = stopping_decompose(table, remaining, d.energy, n);
                const double bound = std::ldexp(d.energy, -n - 1);
                for (const auto& r : step.residual) {
                    residual_ok = residual_ok && size_criterion(table, step.residual, r) <= bound;
                }
                const auto it = by_level.find(n);
                const std::size_t expected = it == by_level.end() ? 0 : it->second->trees.size();
                nesting_ok = nesting_ok && step.trees.size() == expected;
                remaining = step.residual;
            }
        }

        const auto a = tile_coefficients(test::random_fn(g, 11000 + s, 100), 1);
        const auto b = tile_coefficients(test::random_fn(g, 12000 + s, 100), 2);
        const auto c = tile_coefficients(test::random_fn(g, 13000 + s, 100), 3);
        const auto u = size_energy_estimate({&a, &b, &c}, tiles, {1.0 / 3, 1.0 / 3, 1.0 / 3});
        use_min = std::min(use_min, u.ratio);
        use_max = std::max(use_max, u.ratio);
    }
    const bool pass = residual_ok && nesting_ok && placed_ok && c_stop <= 10.0 && use_max / use_min < 100.0;
    verdict(4, pass,
            std::string("residual ") + (residual_ok ? "ok" : "violated") + ", nesting " +
                (nesting_ok ? "ok" : "violated") + ", C_stop=" + fmt("%.4f", c_stop) +
                ", C_use=" + fmt("%.4f", use_max) + " max/min=" + fmt("%.3f", use_max / use_min));
}

// --------------------------------------------------------------------------------------------

void stratification()
{
    const GridGeometry g{2, 64, 2.0};
    bool all = true;
    long long margin = std::numeric_limits<long long>::max();
    for (int s = 0; s < 20; ++s) {
        const auto a = bitile_coefficients(test::random_fn(g, 400 + s, 20), 1);
        const auto b = bitile_coefficients(test::random_fn(g, 500 + s, 20), 2);
        const auto c = bitile_coefficients(test::random_fn(g, 600 + s, 20), 3);
        const auto par = stratify_parameters(a, b, c);
        const auto res = stratify_levels(a, b, c, enumerate_bitiles(0, a.k_max), par.c, par.n_start);
        all = all && res.certificate && res.min_margin > 0;
        margin = std::min(margin, res.min_margin);
    }
    verdict(5, all, "min 100|I cap good| - 97|I| = " + std::to_string(margin) + " cells over 20 instances");
}

// --------------------------------------------------------------------------------------------

void journe()
{
    double cj = 0.0, recomputed = 0.0;
    for (int s = 0; s < 100; ++s) {
        const auto in = random_journe_instance(256, static_cast<std::uint64_t>(s), 8, 3);
        const auto r = journe_maximal(in.geometry, in.tiles, in.omega, in.omega_tilde, 0.5);
        cj = std::max(cj, r.c_j);
        const double omega = static_cast<double>(in.omega.count());
        std::map<int, double> area;
        for (const auto& m : r.maximal) {
            area[m.d] += static_cast<double>(m.rect.area());
        }
        for (const auto& [d, a] : area) {
            recomputed = std::max(recomputed, a / (std::pow(2.0, 0.5 * d) * omega));
        }
    }
    const bool pass = cj <= 20.0 && std::abs(cj - recomputed) <= 1e-12 * std::max(1.0, cj);
    verdict(6, pass, "C_J=" + fmt("%.4f", cj) + " (recomputed " + fmt("%.4f", recomputed) + ") over 100 instances");
}

// --------------------------------------------------------------------------------------------

void oracles()
{
    const GridGeometry g16{2, 16, 1.0};
    double mult = 0.0;
    for (int s = 0; s < 3; ++s) {
        const auto f = test::random_fn(g16, 20 + s, 7), h = test::random_fn(g16, 30 + s, 7);
        const Symbol m = random_symbol(g16, 2, 40 + static_cast<std::uint64_t>(s));
        const MultilinearOperator op{m, Strategy::full_sum, 2};
        mult = std::max(mult, test::max_diff(apply_multiplier(op, {f, h}), test::brute_force(m, f, h)));
    }

    const GridGeometry g32{1, 32, 1.0};
    double cross = 0.0;
    const auto a = test::random_fn(g32, 50, 15), b = test::random_fn(g32, 51, 15);
    for (int j = 0; j < 4; ++j) {
        const auto p = make_paraproduct(j, 32, 1.0);
        const MultilinearOperator op{induced_symbol(p), Strategy::full_sum};
        cross = std::max(cross, test::max_diff(apply_multiplier(op, {a, b}), paraproduct(p, a, b)));
    }

    const GridGeometry g64{1, 64, 1.0};
    const auto q = make_pv_quadrature(g64);
    const auto f = test::random_fn(g64, 60, 15), h = test::random_fn(g64, 61, 15);
    std::vector<double> xs;
    for (int i = 0; i < 64; ++i) {
        xs.push_back(i * g64.spacing());
    }
    const auto v = bht_eval(f, h, xs, q);
    const auto spec = bht_spectral(f, h);
    double bht = 0.0;
    for (int i = 0; i < 64; ++i) {
        bht = std::max(bht, std::abs(v[i] - spec.samples()(i, 0)));
    }
    const auto q2 = make_pv_quadrature(g16);
    const auto F = test::random_fn(g16, 62, 3), H = test::random_fn(g16, 63, 3);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pts;
    for (Eigen::Index r = 0; r < 16; r += 5) {
        for (Eigen::Index c = 0; c < 16; c += 3) {
            pts.emplace_back(r, c);
        }
    }
    const auto dv = double_bht_eval(F, H, pts, q2);
    const auto ds = double_bht_spectral(F, H).samples();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bht = std::max(bht, std::abs(dv[i] - ds(pts[i].first, pts[i].second)));
    }

    double chirp = 0.0;
    for (int n = 16; n <= 512; n *= 2) {
        const double nn = n;
        for (const auto& [x, y] : {std::pair{0.0, 0.0}, std::pair{nn / 1500, -nn / 3000}, std::pair{-nn / 1100, nn / 1100}}) {
            const double oracle = chirp_double_bht_modulus(nn, x, y);
            chirp = std::max(chirp, std::abs(std::abs(chirp_double_bht(nn, x, y)) - oracle) / oracle);
        }
    }
    const bool pass = mult <= 1e-10 && cross <= 1e-10 && bht <= 1e-6 && chirp <= 0.01;
    verdict(7, pass,
            "multiplier=" + fmt("%.2e", mult) + " paraproduct cross-path=" + fmt("%.2e", cross) +
                " BHT=" + fmt("%.2e", bht) + " chirp rel=" + fmt("%.2e", chirp));
}

// --------------------------------------------------------------------------------------------

double spread(const KatoPonceReport& rep, bool& finite)
{
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : rep.rows) {
        finite = finite && std::isfinite(r.ratio) && r.ratio > 0.0;
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
    }
    return hi / lo - 1.0;
}

void kato_ponce()
{
    const std::vector<double> lambdas{1.0, 2.0, 4.0};
    KatoPonceConfig c1;
    c1.alpha = 1.0;
    const auto r1 = kato_ponce_report(kato_ponce_family(GridGeometry{1, 2048, 1.0}, 0.005, lambdas), c1);
    KatoPonceConfig c2;
    c2.alpha = 1.0;
    c2.beta = 1.0;
    const auto r2 = kato_ponce_report(kato_ponce_family(GridGeometry{2, 512, 1.0}, 0.01, lambdas), c2);
    bool finite = true;
    const double s1 = spread(r1, finite), s2 = spread(r2, finite);
    verdict(8, finite && s1 <= 0.02 && s2 <= 0.02,
            "ratio 1D=" + fmt("%.6f", r1.rows[0].ratio) + " spread=" + fmt("%.2e", s1) +
                ", 2D=" + fmt("%.6f", r2.rows[0].ratio) + " spread=" + fmt("%.2e", s2));
}

} // namespace

// Optional arguments select criteria by number, e.g. `acceptance 2 7`.
int main(int argc, char** argv)
{
    const std::vector<std::function<void()>> criteria{log_divergence, exact_identities, majorization,
                                                      stopping_contract, stratification, journe,
                                                      oracles, kato_ponce};
    std::vector<bool> selected(criteria.size(), argc == 1);
    for (int a = 1; a < argc; ++a) {
        const int k = std::atoi(argv[a]);
        if (k >= 1 && k <= static_cast<int>(criteria.size())) {
            selected[static_cast<std::size_t>(k - 1)] = true;
        }
    }
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected[i]) {
            continue;
        }
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            verdict(static_cast<int>(i + 1), false, std::string("threw: ") + e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true)));
    return failures == 0 ? 0 : 1;
}
