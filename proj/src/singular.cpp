#include "biparam/singular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "biparam/error.hpp"
#include "biparam/io.hpp"
#include "biparam/multipliers.hpp"
#include "biparam/special.hpp"
#include "biparam/symbols.hpp"

namespace biparam {

using std::numbers::pi;

double PVQuadrature::weight(int j) const
{
    if (taper <= 0.0) {
        return h;
    }
    const double u = node(j) / taper;
    return h * std::exp(-u * u);
}

PVQuadrature make_pv_quadrature(const GridGeometry& geometry, double reach_periods, double taper_periods)
{
    validate(geometry);
    require(reach_periods > 0.0 && taper_periods >= 0.0, "quadrature reach must be positive and taper nonnegative");
    PVQuadrature q;
    q.h = 2.0 * geometry.spacing();
    q.m = static_cast<int>(std::ceil(reach_periods * geometry.length / q.h));
    q.taper = taper_periods * geometry.length;
    q.periodic = true;
    return q;
}

cplx pv_integrate(const PVQuadrature& quad, const std::function<cplx(double)>& numerator)
{
    cplx sum = 0.0;
    for (int j = 0; j < quad.m; ++j) {
        const double t = quad.node(j);
        sum += quad.weight(j) * (numerator(t) - numerator(-t)) / t;
    }
    return sum;
}

namespace {

void check_reach(const PVQuadrature& quad, const GridGeometry& g, double x)
{
    if (!quad.periodic && (x - quad.cutoff() < 0.0 || x + quad.cutoff() >= g.length)) {
        throw InvalidArgument("quadrature nodes leave [0, L) and wraparound is disabled");
    }
}

// Sample index if x sits on the grid, else -1.
std::int64_t grid_index(const GridGeometry& g, double x)
{
    const double u = x / g.spacing();
    const double r = std::round(u);
    return std::abs(u - r) < 1e-9 ? static_cast<std::int64_t>(r) : -1;
}

std::int64_t wrap(std::int64_t i, std::int64_t n)
{
    const std::int64_t r = i % n;
    return r < 0 ? r + n : r;
}

bool on_step_grid(const PVQuadrature& quad, const GridGeometry& g)
{
    const double ratio = quad.h / g.spacing();
    return std::abs(ratio - std::round(ratio)) < 1e-12 && std::lround(ratio) % 2 == 0;
}

} // namespace

std::vector<cplx> bht_eval(const GridFunction& f, const GridFunction& g, const std::vector<double>& xs,
                           const PVQuadrature& quad)
{
    require_same_geometry(f.geometry(), g.geometry());
    const auto& geo = f.geometry();
    require(geo.dim == 1, "bht_eval needs 1D grid functions");
    require(quad.m > 0 && quad.h > 0.0, "empty PV quadrature");
    const Field& fs = f.samples();
    const Field& gs = g.samples();
    const auto n = static_cast<std::int64_t>(geo.n);
    const bool aligned = on_step_grid(quad, geo);
    const auto step = aligned ? std::lround(quad.h / geo.spacing()) : 0L;
    std::vector<cplx> out;
    out.reserve(xs.size());
    for (double x : xs) {
        check_reach(quad, geo, x);
        const std::int64_t i0 = aligned ? grid_index(geo, x) : -1;
        cplx sum = 0.0;
        for (int j = 0; j < quad.m; ++j) {
            const double t = quad.node(j);
            cplx plus, minus;  // f(x - t) g(x + t), f(x + t) g(x - t)
            if (i0 >= 0) {
                const std::int64_t o = (2 * j + 1) * step / 2;
                const auto a = wrap(i0 - o, n), b = wrap(i0 + o, n);
                plus = fs(a, 0) * gs(b, 0);
                minus = fs(b, 0) * gs(a, 0);
            } else {
                const cplx fl = interpolate_cubic(f, x - t), fr = interpolate_cubic(f, x + t);
                const cplx gl = interpolate_cubic(g, x - t), gr = interpolate_cubic(g, x + t);
                plus = fl * gr;
                minus = fr * gl;
            }
            sum += quad.weight(j) * (plus - minus) / t;
        }
        out.push_back(sum);
    }
    return out;
}

GridFunction bht_spectral(const GridFunction& f, const GridFunction& g)
{
    require(f.geometry().dim == 1, "bht_spectral needs 1D grid functions");
    MultilinearOperator op{build_symbol("bht"), Strategy::full_sum, 1};
    return cplx(0.0, -pi) * apply_multiplier(op, {f, g});
}

std::vector<cplx> double_bht_eval(const GridFunction& f, const GridFunction& g,
                                  const std::vector<std::pair<Eigen::Index, Eigen::Index>>& points,
                                  const PVQuadrature& quad)
{
    require_same_geometry(f.geometry(), g.geometry());
    const auto& geo = f.geometry();
    require(geo.dim == 2, "double_bht_eval needs 2D grid functions");
    require(quad.m > 0 && on_step_grid(quad, geo), "double_bht_eval needs a quadrature on the even-step grid");
    require(quad.periodic, "double_bht_eval works on the periodic grid only");
    const Field& fs = f.samples();
    const Field& gs = g.samples();
    const auto n = static_cast<std::int64_t>(geo.n);
    const auto step = std::lround(quad.h / geo.spacing());
    std::vector<double> w(static_cast<std::size_t>(quad.m));
    std::vector<std::int64_t> off(static_cast<std::size_t>(quad.m));
    for (int j = 0; j < quad.m; ++j) {
        w[static_cast<std::size_t>(j)] = quad.weight(j) / quad.node(j);
        off[static_cast<std::size_t>(j)] = (2 * j + 1) * step / 2;
    }
    std::vector<cplx> out;
    out.reserve(points.size());
    for (const auto& [r, c] : points) {
        require(r >= 0 && r < geo.n && c >= 0 && c < geo.n, "double_bht_eval point outside the grid");
        cplx sum = 0.0;
        for (int j1 = 0; j1 < quad.m; ++j1) {
            const auto o1 = off[static_cast<std::size_t>(j1)];
            const auto rm = wrap(r - o1, n), rp = wrap(r + o1, n);
            cplx row = 0.0;
            for (int j2 = 0; j2 < quad.m; ++j2) {
                const auto o2 = off[static_cast<std::size_t>(j2)];
                const auto cm = wrap(c - o2, n), cp = wrap(c + o2, n);
                // F(t1,t2) - F(-t1,t2) - F(t1,-t2) + F(-t1,-t2), F(t) = f(x - t) g(x + t)
                const cplx v = fs(rm, cm) * gs(rp, cp) - fs(rp, cm) * gs(rm, cp) - fs(rm, cp) * gs(rp, cm) +
                               fs(rp, cp) * gs(rm, cm);
                row += w[static_cast<std::size_t>(j2)] * v;
            }
            sum += w[static_cast<std::size_t>(j1)] * row;
        }
        out.push_back(sum);
    }
    return out;
}

GridFunction double_bht_spectral(const GridFunction& f, const GridFunction& g)
{
    require(f.geometry().dim == 2, "double_bht_spectral needs 2D grid functions");
    MultilinearOperator op{build_symbol("sgn_sgn"), Strategy::full_sum, 1};
    return cplx(-pi * pi, 0.0) * apply_multiplier(op, {f, g});
}

namespace {

// sum over a panel list of GL(n) applied to fn
template <class Fn>
cplx gl_panel(const GaussLegendre& rule, double a, double b, Fn&& fn)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        s += rule.weights[i] * fn(c + h * rule.nodes[i]);
    }
    return s * h;
}

// Panels [0, resolved] of width `width`, then geometric panels up to `end`.
std::vector<double> outer_breaks(double end, double width, double resolved, double ratio)
{
    std::vector<double> br{0.0};
    const double stop = std::min(end, resolved);
    const auto count = static_cast<long>(std::ceil(stop / width));
    for (long i = 1; i <= count; ++i) {
        br.push_back(std::min(stop, static_cast<double>(i) * width));
    }
    if (br.back() < stop) {
        br.push_back(stop);
    }
    double t = br.back();
    while (t < end) {
        t = std::min(end, t * ratio);
        br.push_back(t);
    }
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return br;
}

} // namespace

cplx double_bht_quadrature(const PlaneFunction& f, const PlaneFunction& g, double x, double y, double a, double b,
                           const ChirpQuadratureOptions& options)
{
    require(a > 0.0 && b > 0.0, "integration box must have positive sides");
    require(options.outer_ratio > 1.0 && options.resolved > 0.0, "invalid chirp quadrature options");
    const auto& inner_rule = gauss_legendre(options.inner_nodes);
    const auto& outer_rule = gauss_legendre(options.outer_nodes);
    auto folded = [&](double t1, double t2) {
        const cplx v = f(x - t1, y - t2) * g(x + t1, y + t2) - f(x + t1, y - t2) * g(x - t1, y + t2) -
                       f(x - t1, y + t2) * g(x + t1, y - t2) + f(x + t1, y + t2) * g(x - t1, y - t2);
        return v / (t1 * t2);
    };
    auto inner = [&](double t1) {
        // Panels of one period pi / t1 of the phase 2 t1 t2.
        const double period = pi / t1;
        const auto panels = std::max<long>(1, static_cast<long>(std::ceil(b / period)));
        const double width = b / static_cast<double>(panels);
        cplx s = 0.0;
        for (long k = 0; k < panels; ++k) {
            s += gl_panel(inner_rule, k * width, (k + 1) * width, [&](double t2) { return folded(t1, t2); });
        }
        return s;
    };
    const auto br = outer_breaks(a, pi / b, options.resolved / b, options.outer_ratio);
    cplx total = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        total += gl_panel(outer_rule, br[i], br[i + 1], inner);
    }
    return total;
}

cplx chirp_double_bht(double n, double x, double y, const ChirpQuadratureOptions& options)
{
    require(n > 0.0 && std::abs(x) < n && std::abs(y) < n, "chirp point must lie inside [-N, N]^2");
    const PlaneFunction chirp = [n](double u, double v) -> cplx {
        if (std::abs(u) > n || std::abs(v) > n) {
            return 0.0;
        }
        return std::polar(1.0, u * v);
    };
    return double_bht_quadrature(chirp, chirp, x, y, n - std::abs(x), n - std::abs(y), options);
}

double chirp_double_bht_modulus(double n, double x, double y)
{
    require(n > 0.0 && std::abs(x) < n && std::abs(y) < n, "chirp point must lie inside [-N, N]^2");
    return 4.0 * phi_integral(2.0 * (n - std::abs(x)) * (n - std::abs(y)));
}

namespace {

// int_c^d e^{i w t} dt / t, 0 < c <= d
cplx exp_over_t(double w, double c, double d)
{
    if (c == d) {
        return 0.0;
    }
    if (w == 0.0) {
        return std::log(d / c);
    }
    const double aw = std::abs(w);
    const double re = cosine_integral(aw * d) - cosine_integral(aw * c);
    const double im = sine_integral(aw * d) - sine_integral(aw * c);
    return {re, w > 0.0 ? im : -im};
}

} // namespace

cplx pv_exponential_integral(double w, double lo, double hi)
{
    require(lo < hi, "PV integral needs lo < hi");
    if (lo >= 0.0) {
        require(lo > 0.0, "PV integral endpoint at the singularity");
        return exp_over_t(w, lo, hi);
    }
    if (hi <= 0.0) {
        require(hi < 0.0, "PV integral endpoint at the singularity");
        // t -> -t
        return -exp_over_t(-w, -hi, -lo);
    }
    const double c = std::min(-lo, hi);
    const cplx sym{0.0, 2.0 * sine_integral(w * c)};
    if (hi > c) {
        return sym + exp_over_t(w, c, hi);
    }
    if (-lo > c) {
        return sym - exp_over_t(-w, c, -lo);
    }
    return sym;
}

double v2_phase_defect(double x, double t1, double t2)
{
    const double a = x - t1, b = x - t1 - t2, c = x - t2;
    return a * a - b * b + c * c - (x * x - 2.0 * t1 * t2);
}

cplx chirp_v2(double n, double x, int panels_per_period, int nodes)
{
    require(n > 0.0 && std::abs(x) < n, "V2 point must lie inside [-N, N]");
    require(panels_per_period >= 1, "need at least one panel per period");
    const auto& rule = gauss_legendre(nodes);
    // inner(t1) = PV int e^{-2 i t1 t2} dt2 / t2 over the t2 where all three cutoffs hold
    auto inner = [n, x](double t1) -> cplx {
        const double lo = std::max(x - n, x - t1 - n);
        const double hi = std::min(x + n, x - t1 + n);
        if (!(lo < hi)) {
            return 0.0;
        }
        return pv_exponential_integral(-2.0 * t1, lo, hi);
    };
    const double paired = n - std::abs(x);
    const double width = pi / (2.0 * n) / panels_per_period;
    cplx total = 0.0;
    const auto count = static_cast<long>(std::ceil(paired / width));
    for (long k = 0; k < count; ++k) {
        const double a = k * width, b = std::min(paired, (k + 1) * width);
        total += gl_panel(rule, a, b, [&](double t1) { return (inner(t1) - inner(-t1)) / t1; });
    }
    // One-sided stretch between N - |x| and N + |x|, on the side of x.
    if (x != 0.0) {
        const double s = x > 0.0 ? 1.0 : -1.0;
        const double span = 2.0 * std::abs(x);
        const auto extra = std::max<long>(1, static_cast<long>(std::ceil(span / width)));
        const double w = span / static_cast<double>(extra);
        for (long k = 0; k < extra; ++k) {
            const double a = paired + k * w, b = paired + (k + 1) * w;
            total += gl_panel(rule, a, b, [&](double u) { return inner(s * u) / u; });
        }
    }
    return std::polar(1.0, x * x) * total;
}

LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys)
{
    require(xs.size() == ys.size() && xs.size() >= 3, "line fit needs at least three points");
    const double m = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    require(sxx > 0.0, "line fit needs distinct abscissae");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.mean = my;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - fit.intercept - fit.slope * xs[i];
        rss += e * e;
    }
    fit.slope_se = std::sqrt(rss / (m - 2.0) / sxx);
    fit.t_stat = fit.slope_se > 0.0 ? fit.slope / fit.slope_se
                                    : (fit.slope == 0.0 ? 0.0 : std::copysign(INFINITY, fit.slope));
    return fit;
}

std::string to_string(DivergenceOperator op)
{
    switch (op) {
    case DivergenceOperator::double_bht: return "bd";
    case DivergenceOperator::v2: return "v2";
    case DivergenceOperator::control: return "control";
    }
    return "?";
}

DivergenceOperator parse_divergence_operator(const std::string& name)
{
    if (name == "bd") return DivergenceOperator::double_bht;
    if (name == "v2") return DivergenceOperator::v2;
    if (name == "control") return DivergenceOperator::control;
    throw InvalidArgument("unknown operator '" + name + "' (expected bd, v2 or control)");
}

bool DivergenceCertificate::flat() const
{
    return std::abs(fit.slope) <= 2.0 * fit.slope_se + 1e-12 * std::abs(fit.mean);
}

std::string DivergenceCertificate::to_csv() const
{
    CsvTable t;
    t.header = {"N", "value", "ratio", "lnN"};
    for (const auto& r : rows) {
        t.add_row({std::to_string(r.n), format_double(r.value), format_double(r.ratio), format_double(r.ln_n)});
    }
    return t.to_string();
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn)
{
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace

DivergenceCertificate divergence_certificate(DivergenceOperator op, const std::vector<int>& n_list, double p, double q,
                                             double r, int samples_per_axis, int threads)
{
    require(p > 0.0 && q > 0.0 && r > 0.0, "exponents must be positive");
    require(std::abs(1.0 / r - 1.0 / p - 1.0 / q) < 1e-12,
            "exponents violate the Hoelder relation 1/r = 1/p + 1/q");
    require(n_list.size() >= 3, "need at least three values of N");
    require(std::is_sorted(n_list.begin(), n_list.end()) &&
                std::adjacent_find(n_list.begin(), n_list.end()) == n_list.end(),
            "N list must be strictly increasing");
    require(n_list.front() > 0, "N must be positive");
    require(samples_per_axis >= 1, "need at least one sample per axis");
    DivergenceCertificate cert;
    cert.op = op;
    cert.p = p;
    cert.q = q;
    cert.r = r;
    const int dim = op == DivergenceOperator::v2 ? 1 : 2;
    for (int n : n_list) {
        const double side = n / 500.0;
        const double cell = side / samples_per_axis;
        std::vector<double> coords;
        for (int i = 0; i < samples_per_axis; ++i) {
            coords.push_back(-0.5 * side + (i + 0.5) * cell);
        }
        const std::size_t count = dim == 2 ? coords.size() * coords.size() : coords.size();
        std::vector<double> mod(count);
        parallel_for(count, threads, [&](std::size_t k) {
            const double x = coords[dim == 2 ? k / coords.size() : k];
            const double y = dim == 2 ? coords[k % coords.size()] : 0.0;
            switch (op) {
            case DivergenceOperator::double_bht: mod[k] = std::abs(chirp_double_bht(n, x, y)); break;
            case DivergenceOperator::v2: mod[k] = std::abs(chirp_v2(n, x)); break;
            case DivergenceOperator::control: mod[k] = std::abs(std::polar(1.0, x * y) * std::polar(1.0, x * y)); break;
            }
        });
        double mean = 0.0, power = 0.0;
        for (double v : mod) {
            mean += v;
            power += std::pow(v, r);
        }
        mean /= static_cast<double>(count);
        const double local = std::pow(power * std::pow(cell, dim), 1.0 / r);
        // |f_N| = 1 on [-N, N]^d, so ||f_N||_p = (2N)^{d/p}; the third V2 input enters through its sup norm 1.
        const double inputs = std::pow(2.0 * n, dim / p) * std::pow(2.0 * n, dim / q);
        cert.rows.push_back({n, mean, local / inputs, std::log(static_cast<double>(n))});
    }
    std::vector<double> xs, ys;
    for (const auto& row : cert.rows) {
        xs.push_back(row.ln_n);
        ys.push_back(row.ratio);
    }
    cert.fit = fit_line(xs, ys);
    return cert;
}

std::string SineGrowth::to_csv() const
{
    CsvTable t;
    t.header = {"N", "value", "ratio", "lnN"};
    for (const auto& r : rows) {
        t.add_row({std::to_string(r.n), format_double(r.value), format_double(r.ratio), format_double(r.ln_n)});
    }
    return t.to_string();
}

SineGrowth sine_growth(const std::vector<int>& n_list, double c2)
{
    require(n_list.size() >= 3, "need at least three values of N");
    require(c2 >= 1.0, "C2 must be at least 1 so that ln N > 0");
    SineGrowth out;
    out.c2 = c2;
    out.c1 = INFINITY;
    std::vector<double> xs, ys;
    for (int n : n_list) {
        require(n > 0, "N must be positive");
        const double s = sine_integral_S(n);
        const double ln = std::log(static_cast<double>(n));
        out.rows.push_back({n, s, ln > 0.0 ? s / ln : INFINITY, ln});
        if (n > c2) {
            out.c1 = std::min(out.c1, s / ln);
        }
        xs.push_back(ln);
        ys.push_back(s);
    }
    out.fit = fit_line(xs, ys);
    return out;
}

} // namespace biparam
