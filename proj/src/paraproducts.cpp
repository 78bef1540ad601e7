#include "biparam/paraproducts.hpp"

#include <numbers>

namespace biparam {

namespace {

using Profile = std::function<double(double)>;  // of |n|

Eigen::ArrayXd tabulate(int n, const Profile& fn)
{
    Eigen::ArrayXd out(n);
    for (int i = 0; i < n; ++i) {
        out(i) = fn(std::abs(static_cast<double>(frequency_index(i, n))));
    }
    return out;
}

Eigen::ArrayXd delta(int n)
{
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
    out(0) = 1.0;
    return out;
}

} // namespace

Paraproduct1D make_paraproduct(int type_index, int n, double length)
{
    require(type_index >= 0 && type_index <= 3, "paraproduct type index must be 0, 1, 2 or 3");
    validate(GridGeometry{1, n, length});
    Paraproduct1D spec;
    spec.type_index = type_index;
    spec.n = n;
    spec.length = length;
    const int gap = spec.gap;
    const int top = log2_exact(n / 2);
    for (int k = 0; k <= top; ++k) {
        const double s = std::ldexp(1.0, k);
        const auto psi = tabulate(n, [s](double a) { return lp_band(a / s); });
        const auto phi = tabulate(n, [s, gap](double a) { return lp_low(a / std::ldexp(s, -gap)); });
        const auto psi_wide = tabulate(n, [s, gap](double a) {
            return lp_low(a / std::ldexp(s, gap - 1)) - lp_low(a / std::ldexp(s, -gap));
        });
        ParaproductTerm t;
        t.scale = k;
        switch (type_index) {
        case 1:
            t.kinds = {SlotKind::phi, SlotKind::psi, SlotKind::psi};
            t.u = phi;
            t.v = psi;
            t.w = tabulate(n, [s](double a) { return lp_low(a / s / 4.0) - lp_low(8.0 * a / s); });
            break;
        case 2:
            t.kinds = {SlotKind::psi, SlotKind::phi, SlotKind::psi};
            t.u = psi;
            t.v = phi;
            t.w = tabulate(n, [s](double a) { return lp_low(a / s / 4.0) - lp_low(8.0 * a / s); });
            break;
        case 0:
            t.kinds = {SlotKind::psi, SlotKind::psi, SlotKind::psi};
            t.u = psi;
            t.v = psi_wide;
            t.w = tabulate(n, [s](double a) { return lp_low(a / s / 16.0) - lp_low(2.0 * a / s); });
            break;
        default:
            t.kinds = {SlotKind::psi, SlotKind::psi, SlotKind::phi};
            t.u = psi;
            t.v = psi_wide;
            t.w = tabulate(n, [s](double a) { return lp_low(2.0 * a / s); });
            break;
        }
        spec.scales.push_back(k);
        spec.terms.push_back(std::move(t));
    }
    if (type_index == 3) {
        ParaproductTerm dc;
        dc.scale = -1;
        dc.kinds = {SlotKind::delta, SlotKind::delta, SlotKind::delta};
        dc.u = dc.v = dc.w = delta(n);
        spec.terms.push_back(std::move(dc));
    }
    return spec;
}

Paraproduct2D make_paraproduct(int type_first, int type_second, int n, double length)
{
    return Paraproduct2D{{make_paraproduct(type_first, n, length), make_paraproduct(type_second, n, length)}};
}

GridFunction paraproduct(const Paraproduct1D& spec, const GridFunction& f, const GridFunction& g)
{
    const GridGeometry& geo = f.geometry();
    require_same_geometry(geo, g.geometry());
    require(geo.dim == 1, "paraproduct expects 1D grid functions");
    require(geo.n == spec.n && geo.length == spec.length, "paraproduct spec was built for a different grid");
    const Eigen::ArrayXcd fh = f.spectrum().col(0);
    const Eigen::ArrayXcd gh = g.spectrum().col(0);
    Field acc = Field::Zero(geo.n, 1);
    for (const auto& t : spec.terms) {
        const Field a = fft_inverse((fh * t.u).matrix());
        const Field b = fft_inverse((gh * t.v).matrix());
        acc.col(0) += fft_forward(a * b).col(0) * t.w;
    }
    return from_spectrum(geo, acc);
}

GridFunction biparameter_paraproduct(const Paraproduct2D& spec, const GridFunction& f, const GridFunction& g)
{
    const GridGeometry& geo = f.geometry();
    require_same_geometry(geo, g.geometry());
    require(geo.dim == 2, "biparameter_paraproduct expects 2D grid functions");
    for (const auto& axis : spec.axes) {
        require(geo.n == axis.n && geo.length == axis.length, "paraproduct spec was built for a different grid");
    }
    // Separable evaluation: the axis-0 passes depend only on the first-axis term, and the forward
    // axis-0 pass is linear, so it is applied once to the sum over second-axis terms.
    const Field& fh = f.spectrum();
    const Field& gh = g.spectrum();
    Field acc = Field::Zero(geo.n, geo.n);
    for (const auto& s : spec.axes[0].terms) {
        Field fa = fh.colwise() * s.u.cast<cplx>();
        Field ga = gh.colwise() * s.v.cast<cplx>();
        fft_axis(fa, 0, Direction::inverse);
        fft_axis(ga, 0, Direction::inverse);
        Field partial = Field::Zero(geo.n, geo.n);
        for (const auto& t : spec.axes[1].terms) {
            Field a = fa.rowwise() * t.u.cast<cplx>().transpose();
            Field b = ga.rowwise() * t.v.cast<cplx>().transpose();
            fft_axis(a, 1, Direction::inverse);
            fft_axis(b, 1, Direction::inverse);
            a *= b;
            fft_axis(a, 1, Direction::forward);
            partial += a.rowwise() * t.w.cast<cplx>().transpose();
        }
        fft_axis(partial, 0, Direction::forward);
        acc += partial.colwise() * s.w.cast<cplx>();
    }
    return from_spectrum(geo, acc);
}

namespace {

double derivative_factor(int n, double length, double alpha)
{
    return std::pow(std::abs(2.0 * std::numbers::pi * n / length), alpha);
}

} // namespace

GridFunction homogeneous_derivative(const GridFunction& f, double alpha)
{
    require(alpha > 0.0, "derivative order must be positive");
    const auto& g = f.geometry();
    if (g.dim == 2) {
        return homogeneous_derivative(f, alpha, alpha);
    }
    return apply_fourier_multiplier(f, [&](int n0, int) { return derivative_factor(n0, g.length, alpha); });
}

GridFunction homogeneous_derivative(const GridFunction& f, double alpha, double beta)
{
    require(alpha > 0.0 && beta > 0.0, "derivative orders must be positive");
    const auto& g = f.geometry();
    require(g.dim == 2, "two-parameter derivative needs a 2D grid");
    return apply_fourier_multiplier(f, [&](int n0, int n1) {
        return derivative_factor(n0, g.length, alpha) * derivative_factor(n1, g.length, beta);
    });
}

Paraproduct1D commute_derivative(const Paraproduct1D& spec, double alpha, Target target)
{
    require(alpha > 0.0, "derivative order must be positive");
    if (target == Target::automatic) {
        target = spec.type_index == 2 ? Target::first : Target::second;
    }
    Paraproduct1D out = spec;
    out.terms.clear();
    const int slot = target == Target::first ? 0 : 1;
    for (const auto& t : spec.terms) {
        if (t.kinds[0] == SlotKind::delta) {
            continue;
        }
        if (t.kinds[static_cast<std::size_t>(slot)] != SlotKind::psi) {
            throw InvalidArgument("cannot apply a negative derivative to a low-pass (phi-type) slot");
        }
        ParaproductTerm m = t;
        Eigen::ArrayXd& profile = slot == 0 ? m.u : m.v;
        for (int i = 0; i < spec.n; ++i) {
            const int k = frequency_index(i, spec.n);
            if (profile(i) != 0.0) {
                require(k != 0, "psi-type profile does not vanish at frequency 0");
                profile(i) /= derivative_factor(k, spec.length, alpha);
            }
            m.w(i) *= derivative_factor(k, spec.length, alpha);
        }
        out.terms.push_back(std::move(m));
    }
    return out;
}

Paraproduct2D commute_derivative(const Paraproduct2D& spec, double alpha, double beta, Target first, Target second)
{
    return Paraproduct2D{{commute_derivative(spec.axes[0], alpha, first), commute_derivative(spec.axes[1], beta, second)}};
}

Symbol induced_symbol(const Paraproduct1D& spec)
{
    Symbol s;
    s.name = "paraproduct_" + std::to_string(spec.type_index);
    s.arity = 2;
    s.freq_dim = 1;
    auto terms = std::make_shared<const std::vector<ParaproductTerm>>(spec.terms);
    const int n = spec.n;
    const double length = spec.length;
    s.evaluator = [terms, n, length](std::span<const double> xi) -> cplx {
        const auto n1 = static_cast<std::int64_t>(std::llround(xi[0] * length));
        const auto n2 = static_cast<std::int64_t>(std::llround(xi[1] * length));
        const Eigen::Index i1 = array_index(n1, n);
        const Eigen::Index i2 = array_index(n2, n);
        const Eigen::Index i3 = array_index(n1 + n2, n);
        double total = 0.0;
        for (const auto& t : *terms) {
            total += t.u(i1) * t.v(i2) * t.w(i3);
        }
        return total;
    };
    double bound = 0.0;
    for (const auto& t : spec.terms) {
        bound += t.u.abs().maxCoeff() * t.v.abs().maxCoeff() * t.w.abs().maxCoeff();
    }
    s.sup_bound = bound;
    return s;
}

// ---------------------------------------------------------------------------------------------

CsvTable KatoPonceReport::to_csv() const
{
    CsvTable table;
    std::size_t terms = rows.empty() ? 2 : rows.front().rhs.size();
    table.header = {"family_member_id", "lhs"};
    for (std::size_t j = 0; j < terms; ++j) {
        table.header.push_back("rhs_term_" + std::to_string(j + 1));
    }
    table.header.push_back("ratio");
    for (const auto& row : rows) {
        std::vector<std::string> cells{std::to_string(row.member), format_double(row.lhs)};
        for (double v : row.rhs) {
            cells.push_back(format_double(v));
        }
        cells.push_back(format_double(row.ratio));
        table.add_row(std::move(cells));
    }
    return table;
}

namespace {

double norm_of(const GridFunction& f, double p)
{
    return quasi_norm(f, NormSpec::lp(p));
}

} // namespace

KatoPonceReport kato_ponce_report(const std::vector<std::pair<GridFunction, GridFunction>>& family,
                                  const KatoPonceConfig& config)
{
    require(config.alpha > 0.0, "derivative order must be positive");
    require(config.r > 0.0 && std::isfinite(config.r), "target exponent r must lie in (0, inf)");
    const bool two = config.beta.has_value();
    const std::size_t terms = two ? 4 : 2;
    require(config.exponents.size() == 1 || config.exponents.size() == terms,
            "give one exponent pair or one per right-hand term");
    std::vector<KatoPonceExponents> ex(terms, config.exponents.front());
    if (config.exponents.size() == terms) {
        ex = config.exponents;
    }
    for (const auto& e : ex) {
        require(e.p > 1.0 && e.q > 1.0, "exponents p, q must exceed 1");
        const double lhs = 1.0 / config.r;
        const double rhs = (std::isinf(e.p) ? 0.0 : 1.0 / e.p) + (std::isinf(e.q) ? 0.0 : 1.0 / e.q);
        require(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, lhs), "Hoelder relation 1/r = 1/p + 1/q violated");
    }

    KatoPonceReport report;
    int member = 0;
    for (const auto& [f, g] : family) {
        require_same_geometry(f.geometry(), g.geometry());
        require(f.geometry().dim == (two ? 2 : 1), "family dimension does not match the derivative form");
        KatoPonceRow row;
        row.member = member++;
        if (!two) {
            const double a = config.alpha;
            row.lhs = norm_of(homogeneous_derivative(product(f, g), a), config.r);
            row.rhs.push_back(norm_of(homogeneous_derivative(f, a), ex[0].p) * norm_of(g, ex[0].q));
            row.rhs.push_back(norm_of(f, ex[1].p) * norm_of(homogeneous_derivative(g, a), ex[1].q));
        } else {
            const double a = config.alpha;
            const double b = *config.beta;
            // D1^a only / D2^b only, as one-axis multipliers.
            auto d1 = [&](const GridFunction& h) {
                return apply_fourier_multiplier(h, [&](int n0, int) { return derivative_factor(n0, h.geometry().length, a); });
            };
            auto d2 = [&](const GridFunction& h) {
                return apply_fourier_multiplier(h, [&](int, int n1) { return derivative_factor(n1, h.geometry().length, b); });
            };
            row.lhs = norm_of(homogeneous_derivative(product(f, g), a, b), config.r);
            row.rhs.push_back(norm_of(homogeneous_derivative(f, a, b), ex[0].p) * norm_of(g, ex[0].q));
            row.rhs.push_back(norm_of(f, ex[1].p) * norm_of(homogeneous_derivative(g, a, b), ex[1].q));
            row.rhs.push_back(norm_of(d1(f), ex[2].p) * norm_of(d2(g), ex[2].q));
            row.rhs.push_back(norm_of(d1(g), ex[3].p) * norm_of(d2(f), ex[3].q));
        }
        double sum = 0.0;
        for (double v : row.rhs) {
            sum += v;
        }
        row.ratio = (row.lhs == 0.0 && sum == 0.0) ? 0.0 : row.lhs / sum;
        report.max_ratio = std::max(report.max_ratio, row.ratio);
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::vector<std::pair<GridFunction, GridFunction>> kato_ponce_family(const GridGeometry& geometry, double width,
                                                                     const std::vector<double>& lambdas)
{
    validate(geometry);
    require(width > 0.0, "family width must be positive");
    const double l = geometry.length;
    const auto f = make_grid_function(geometry, Generator{"gaussian", {{"width", width * l}}});
    const auto g = make_grid_function(geometry, Generator{"gaussian", {{"width", 0.7 * width * l},
                                                                        {"center0", (0.5 + 0.3 * width) * l},
                                                                        {"center1", (0.5 - 0.2 * width) * l}}});
    std::vector<std::pair<GridFunction, GridFunction>> family;
    for (double lambda : lambdas) {
        require(lambda > 0.0, "dilation factors must be positive");
        family.emplace_back(dilate(f, lambda, INFINITY), dilate(g, lambda, INFINITY));
    }
    return family;
}

} // namespace biparam
