#include "biparam/special.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "biparam/error.hpp"

namespace biparam {

namespace {

// E1(ix) by the modified Lentz continued fraction; returns (Ci, Si) for x > 0.
std::pair<double, double> cisi_fraction(double x)
{
    using C = std::complex<double>;
    const double tiny = 1e-300;
    C b(1.0, x);
    C c(1.0 / tiny, 0.0);
    C d = 1.0 / b;
    C h = d;
    for (int i = 1; i < 100000; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const C del = c * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) {
            break;
        }
    }
    h *= C(std::cos(x), -std::sin(x));
    const C cs = -std::conj(h) + C(0.0, std::numbers::pi / 2.0);
    return {cs.real(), cs.imag()};
}

} // namespace

double sine_integral(double x)
{
    if (x < 0.0) {
        return -sine_integral(-x);
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (x <= kSiCrossover) {
        const long double z = x;
        long double term = z;  // x^{2k+1} / (2k+1)!
        long double sum = z;
        for (int k = 1; k < 200; ++k) {
            term *= -z * z / ((2.0L * k) * (2.0L * k + 1.0L));
            const long double add = term / (2.0L * k + 1.0L);
            sum += add;
            if (std::fabs(add) < 1e-22L * std::fabs(sum)) {
                break;
            }
        }
        return static_cast<double>(sum);
    }
    return cisi_fraction(x).second;
}

double cosine_integral(double x)
{
    if (!(x > 0.0)) {
        throw InvalidArgument("Ci needs a positive argument");
    }
    if (x <= kSiCrossover) {
        const long double z = x;
        long double term = 1.0L;  // x^{2k} / (2k)!
        long double sum = 0.0L;
        for (int k = 1; k < 200; ++k) {
            term *= -z * z / ((2.0L * k - 1.0L) * (2.0L * k));
            const long double add = term / (2.0L * k);
            sum += add;
            if (std::fabs(add) < 1e-22L * (std::fabs(sum) + 1e-30L)) {
                break;
            }
        }
        return static_cast<double>(static_cast<long double>(kEulerGamma) + std::log(z) + sum);
    }
    return cisi_fraction(x).first;
}

namespace {

constexpr std::array<double, 8> kXgk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                     0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                     0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                     0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[static_cast<std::size_t>(j)];
        const double s = f(c - dx) + f(c + dx);
        kronrod += kWgk[static_cast<std::size_t>(j)] * s;
        if (j % 2 == 1) {
            gauss += kWg[static_cast<std::size_t>(j / 2)] * s;
        }
    }
    return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

} // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                    double rel_tol, long max_evaluations)
{
    require(std::isfinite(a) && std::isfinite(b), "integration limits must be finite");
    QuadratureResult out;
    if (a == b) {
        return out;
    }
    // Worst panel first; a multimap keyed on error keeps the order deterministic.
    std::multimap<double, Panel> panels;
    Panel first = gk15(f, a, b);
    out.evaluations = 15;
    double value = first.value, error = first.error;
    panels.emplace(first.error, first);
    while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
        if (out.evaluations + 30 > max_evaluations) {
            throw NumericError("adaptive quadrature did not reach tolerance: error estimate " + std::to_string(error));
        }
        auto worst = std::prev(panels.end());
        const Panel p = worst->second;
        panels.erase(worst);
        const double mid = 0.5 * (p.a + p.b);
        const Panel l = gk15(f, p.a, mid), r = gk15(f, mid, p.b);
        out.evaluations += 30;
        value += l.value + r.value - p.value;
        error += l.error + r.error - p.error;
        panels.emplace(l.error, l);
        panels.emplace(r.error, r);
        if (panels.size() > 200000) {
            throw NumericError("adaptive quadrature exhausted its panel budget");
        }
    }
    // Re-sum for a value free of update drift.
    value = 0.0;
    error = 0.0;
    for (const auto& [e, p] : panels) {
        value += p.value;
        error += e;
    }
    out.value = value;
    out.error = error;
    return out;
}

const GaussLegendre& gauss_legendre(int n)
{
    require(n >= 1 && n <= 64, "Gauss-Legendre order must be in 1..64");
    static std::mutex mutex;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) {
        return it->second;
    }
    GaussLegendre rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p0 = 1.0;
                p1 = x;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

namespace {

// int_T^inf ln(u) sin(u)/u du by repeated integration by parts (asymptotic in 1/T).
double log_sine_tail(double t)
{
    const double lt = std::log(t);
    const double c = std::cos(t), s = std::sin(t);
    // h^{(n)}(T) = (-1)^n n! (ln T - H_n) / T^{n+1}, h(u) = ln u / u.
    double sum = 0.0;
    double fact_over_pow = 1.0 / t;  // n! / T^{n+1}
    double harmonic = 0.0;
    double previous = INFINITY;
    for (int n = 0; n < 400; n += 2) {
        // even derivative n and odd derivative n + 1
        const double h_even = fact_over_pow * (lt - harmonic);  // sign (+) for even n
        const double harmonic_odd = harmonic + 1.0 / (n + 1);
        const double fop_odd = fact_over_pow * (n + 1) / t;
        const double h_odd = -fop_odd * (lt - harmonic_odd);
        const double sign = (n / 2) % 2 == 0 ? 1.0 : -1.0;
        const double term = sign * (h_even * c - h_odd * s);
        if (std::abs(term) > previous) {
            break;  // asymptotic series started to diverge
        }
        sum += term;
        previous = std::abs(term);
        if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) {
            break;
        }
        harmonic = harmonic_odd + 1.0 / (n + 2);
        fact_over_pow = fop_odd * (n + 2) / t;
    }
    return sum;
}

} // namespace

double phi_integral(double t)
{
    require(t >= 0.0 && std::isfinite(t), "Phi needs a finite nonnegative argument");
    if (t == 0.0) {
        return 0.0;
    }
    const auto integrand = [](double u) { return u == 0.0 ? 1.0 : sine_integral(u) / u; };
    if (t <= kPhiCrossover) {
        // Unit-period panels keep the adaptive search local.
        double total = 0.0;
        const double step = 2.0 * std::numbers::pi;
        for (double a = 0.0; a < t; a += step) {
            total += integrate_adaptive(integrand, a, std::min(t, a + step), 1e-14, 1e-14).value;
        }
        return total;
    }
    return sine_integral(t) * std::log(t) + kEulerGamma * std::numbers::pi / 2.0 + log_sine_tail(t);
}

double sine_integral_S(double n)
{
    require(n > 0.0, "S(N) needs N > 0");
    return phi_integral(n * n);
}

double sine_integral_S_direct(double n, double tol)
{
    require(n > 0.0, "S(N) needs N > 0");
    const double period = std::numbers::pi;
    auto inner = [n, tol, period](double x) {
        if (x == 0.0) {
            return n;
        }
        const auto g = [x](double y) {
            const double z = x * y;
            return z == 0.0 ? 1.0 : std::sin(z) / z;
        };
        // Panels of one half-period of sin(x y) in y.
        const double width = period / x;
        double total = 0.0;
        for (double a = 0.0; a < n; a += width) {
            total += integrate_adaptive(g, a, std::min(n, a + width), tol * 1e-3).value;
        }
        return total;
    };
    // The inner integral behaves like (pi/2)/x with ripples of period ~ pi/N in x.
    double total = 0.0;
    const double width = period / n;
    for (double a = 0.0; a < n; a += width) {
        total += integrate_adaptive(inner, a, std::min(n, a + width), tol * 1e-2 * width).value;
    }
    return total;
}

} // namespace biparam
