#include "biparam/symbols.hpp"

#include <array>
#include <cfloat>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "biparam/rng.hpp"

namespace biparam {

namespace {

constexpr double pi = std::numbers::pi;

double cm_demo(double xi, double eta)
{
    const double r2 = xi * xi + eta * eta;
    return r2 == 0.0 ? 0.0 : xi * eta / r2;
}

FrequencyFn constant_fn(cplx value)
{
    return [value](std::span<const double>) { return value; };
}

double param(const std::map<std::string, double>& params, const std::string& key, double fallback)
{
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void check_known_params(const std::string& name, const std::map<std::string, double>& params,
                        std::initializer_list<const char*> known)
{
    for (const auto& [key, value] : params) {
        bool ok = false;
        for (const char* k : known) {
            ok = ok || key == k;
        }
        require(ok, "symbol '" + name + "' has no parameter '" + key + "'");
    }
}

} // namespace

Symbol build_symbol(const std::string& name, const std::map<std::string, double>& params)
{
    Symbol s;
    s.name = name;
    if (name == "identity" || name == "zero") {
        check_known_params(name, params, {"arity", "freq_dim"});
        s.arity = static_cast<int>(param(params, "arity", 2));
        s.freq_dim = static_cast<int>(param(params, "freq_dim", 1));
        require(s.arity >= 1 && s.arity <= 4, "symbol arity must be in [1, 4]");
        require(s.freq_dim == 1 || s.freq_dim == 2, "freq_dim must be 1 or 2");
        const cplx value = name == "identity" ? 1.0 : 0.0;
        s.evaluator = constant_fn(value);
        s.separable = {SeparableTerm{value, constant_fn(1.0), {}}};
        s.sup_bound = std::abs(value);
        return s;
    }
    if (name == "one_param_cm_demo") {
        check_known_params(name, params, {});
        s.evaluator = [](std::span<const double> xi) { return cplx{cm_demo(xi[0], xi[1]), 0.0}; };
        s.sup_bound = 0.5;
        return s;
    }
    if (name == "two_param_tensor") {
        check_known_params(name, params, {});
        s.freq_dim = 2;
        s.evaluator = [](std::span<const double> xi) {
            return cplx{cm_demo(xi[0], xi[2]) * cm_demo(xi[1], xi[3]), 0.0};
        };
        s.sup_bound = 0.25;
        return s;
    }
    if (name == "cone_restricted") {
        check_known_params(name, params, {"base"});
        const int base_kind = static_cast<int>(param(params, "base", 1));
        require(base_kind == 0 || base_kind == 1, "cone_restricted: base must be 0 (identity) or 1 (two_param_tensor)");
        const Symbol base = base_kind == 0 ? build_symbol("identity", {{"arity", 2}, {"freq_dim", 2}})
                                           : build_symbol("two_param_tensor");
        const ConeCutoff c1{1, 0, 8};
        const ConeCutoff c2{2, 0, 8};
        s.freq_dim = 2;
        s.evaluator = [base, c1, c2](std::span<const double> xi) {
            return base(xi) * c1(xi[0], xi[2]) * c2(xi[1], xi[3]);
        };
        s.sup_bound = base.sup_bound;
        return s;
    }
    if (name == "sgn_sgn") {
        check_known_params(name, params, {});
        s.freq_dim = 2;
        s.evaluator = [](std::span<const double> xi) { return cplx{sgn(xi[0] - xi[2]) * sgn(xi[1] - xi[3]), 0.0}; };
        return s;
    }
    if (name == "derivative_sum") {
        check_known_params(name, params, {});
        s.evaluator = [](std::span<const double> xi) { return cplx{0.0, 2.0 * pi * (xi[0] + xi[1])}; };
        s.separable = {SeparableTerm{1.0, [](std::span<const double> xi) { return cplx{0.0, 2.0 * pi * xi[0]}; }, {}}};
        s.sup_bound = std::numeric_limits<double>::infinity();
        return s;
    }
    if (name == "sgn_sum") {
        check_known_params(name, params, {});
        s.evaluator = [](std::span<const double> xi) { return cplx{sgn(xi[0] + xi[1]), 0.0}; };
        s.separable = {SeparableTerm{1.0, [](std::span<const double> xi) { return cplx{sgn(xi[0]), 0.0}; }, {}}};
        return s;
    }
    if (name == "bht") {
        check_known_params(name, params, {});
        s.evaluator = [](std::span<const double> xi) { return cplx{sgn(xi[0] - xi[1]), 0.0}; };
        return s;
    }
    if (name == "v2") {
        check_known_params(name, params, {});
        s.arity = 3;
        s.evaluator = [](std::span<const double> xi) { return cplx{sgn(xi[0] + xi[1]) * sgn(xi[1] + xi[2]), 0.0}; };
        return s;
    }
    throw InvalidArgument("unknown symbol '" + name + "'");
}

Symbol sampled_symbol(const GridGeometry& geometry, int arity, Eigen::VectorXcd table, std::string name)
{
    validate(geometry);
    require(arity >= 1 && arity <= 3, "sampled symbol arity must be in [1, 3]");
    const int vars = arity * geometry.dim;
    Eigen::Index expected = 1;
    for (int v = 0; v < vars; ++v) {
        expected *= geometry.n;
    }
    require(table.size() == expected, "sampled symbol table has the wrong size");
    Symbol s;
    s.name = std::move(name);
    s.arity = arity;
    s.freq_dim = geometry.dim;
    s.sup_bound = table.size() ? table.cwiseAbs().maxCoeff() : 0.0;
    const int n = geometry.n;
    const double length = geometry.length;
    auto shared = std::make_shared<const Eigen::VectorXcd>(std::move(table));
    s.evaluator = [shared, n, length, vars](std::span<const double> xi) {
        Eigen::Index flat = 0;
        for (int v = 0; v < vars; ++v) {
            flat = flat * n + array_index(std::llround(xi[v] * length), n);
        }
        return (*shared)(flat);
    };
    return s;
}

Symbol random_symbol(const GridGeometry& geometry, int arity, std::uint64_t seed)
{
    const int vars = arity * geometry.dim;
    Eigen::Index size = 1;
    for (int v = 0; v < vars; ++v) {
        size *= geometry.n;
    }
    Rng rng(seed);
    Eigen::VectorXcd table(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        const double r = std::sqrt(rng.uniform());
        table(i) = std::polar(r, 2.0 * pi * rng.uniform());
    }
    return sampled_symbol(geometry, arity, std::move(table), "random");
}

// ---------------------------------------------------------------------------------------------

double ConeCutoff::spine_angle() const
{
    return plane == 1 ? 0.5 * pi : 0.0;
}

namespace {

double angular_bump(double theta, double centre, double half_width)
{
    double d = std::fmod(std::abs(theta - centre), 2.0 * pi);
    d = std::min(d, 2.0 * pi - d);
    if (d >= half_width) {
        return 0.0;
    }
    const double s = d / half_width;
    return std::exp(-1.0 / (1.0 - s * s));
}

} // namespace

double ConeCutoff::operator()(double a, double b) const
{
    if (a == 0.0 && b == 0.0) {
        return 0.0;
    }
    const double theta = std::atan2(b, a);
    const double spacing = 2.0 * pi / sectors;
    const double half_width = 0.75 * spacing;
    double total = 0.0;
    double own = 0.0;
    for (int i = 0; i < sectors; ++i) {
        const double value = angular_bump(theta, spine_angle() + i * spacing, half_width);
        total += value;
        if (i == index) {
            own = value;
        }
    }
    return own / total;
}

std::vector<ConeCutoff> cone_partition(int plane, int sectors)
{
    require(plane == 1 || plane == 2, "cone plane must be 1 or 2");
    require(sectors >= 3, "cone partition needs at least 3 sectors");
    std::vector<ConeCutoff> out;
    for (int i = 0; i < sectors; ++i) {
        out.push_back(ConeCutoff{plane, i, sectors});
    }
    return out;
}

// ---------------------------------------------------------------------------------------------

bool DecayReport::all_pass() const
{
    return std::all_of(entries.begin(), entries.end(), [](const DecayEntry& e) { return e.pass; });
}

const DecayEntry* DecayReport::find(const std::vector<int>& order) const
{
    for (const auto& e : entries) {
        if (e.order == order) {
            return &e;
        }
    }
    return nullptr;
}

namespace {

void multi_indices(int vars, int total, std::vector<int>& current, int pos, std::vector<std::vector<int>>& out)
{
    if (pos == vars - 1) {
        current[pos] = total;
        out.push_back(current);
        return;
    }
    for (int i = total; i >= 0; --i) {
        current[pos] = i;
        multi_indices(vars, total - i, current, pos + 1, out);
    }
}

double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

// Tensor central difference of the given order at x with step h (second order accurate).
cplx central_difference(const Symbol& m, const std::vector<double>& x, const std::vector<int>& order, double h)
{
    const int vars = static_cast<int>(x.size());
    std::vector<int> active;
    for (int v = 0; v < vars; ++v) {
        if (order[v] > 0) {
            active.push_back(v);
        }
    }
    std::vector<int> j(active.size(), 0);
    std::vector<double> point(x);
    cplx sum = 0.0;
    while (true) {
        double weight = 1.0;
        for (std::size_t a = 0; a < active.size(); ++a) {
            const int v = active[a];
            const int b = order[v];
            point[v] = x[v] + (0.5 * b - j[a]) * h;
            weight *= ((j[a] % 2) ? -1.0 : 1.0) * binomial(b, j[a]);
        }
        sum += weight * m(std::span<const double>(point));
        std::size_t a = 0;
        while (a < active.size()) {
            if (++j[a] <= order[active[a]]) {
                break;
            }
            j[a] = 0;
            ++a;
        }
        if (a == active.size()) {
            break;
        }
    }
    int total = 0;
    for (int b : order) {
        total += b;
    }
    return sum / std::pow(h, total);
}

} // namespace

DecayReport verify_decay(const Symbol& m, DecayMode mode, int max_order, const DecayOptions& options)
{
    require(max_order >= 1 && max_order <= 6, "verify_decay: max_order must be in [1, 6]");
    require(options.spacing > 0.0 && options.step > 0.0 && options.half_width > 0 && options.exclusion_cells > 0,
            "verify_decay: options must be positive");
    const int vars = m.variables();
    if (mode == DecayMode::two_param) {
        require(m.arity == 2 && m.freq_dim == 2, "two_param decay needs a bilinear symbol on 2D frequencies");
    }
    const double exclusion = options.exclusion_cells * options.spacing;
    if (options.step * max_order > 0.25 * exclusion) {
        throw InvalidArgument("verify_decay: finite-difference step " + std::to_string(options.step) +
                              " too coarse for order " + std::to_string(max_order) +
                              " within the exclusion radius " + std::to_string(exclusion));
    }
    // Coarser stride in high dimension keeps the lattice at a few thousand points.
    const int stride = vars > 2 ? std::max(1, options.half_width / 4) : 1;

    std::vector<std::vector<double>> points;
    {
        std::vector<int> idx(vars, -options.half_width);
        while (true) {
            std::vector<double> x(vars);
            for (int v = 0; v < vars; ++v) {
                x[v] = idx[v] * options.spacing;
            }
            bool keep;
            if (mode == DecayMode::one_param) {
                double r2 = 0.0;
                for (double c : x) {
                    r2 += c * c;
                }
                keep = std::sqrt(r2) >= exclusion;
            } else {
                keep = std::hypot(x[0], x[2]) >= exclusion && std::hypot(x[1], x[3]) >= exclusion;
            }
            if (keep) {
                points.push_back(std::move(x));
            }
            int v = 0;
            while (v < vars) {
                idx[v] += stride;
                if (idx[v] <= options.half_width) {
                    break;
                }
                idx[v] = -options.half_width;
                ++v;
            }
            if (v == vars) {
                break;
            }
        }
    }

    DecayReport report;
    report.mode = mode;
    for (int total = 1; total <= max_order; ++total) {
        std::vector<std::vector<int>> orders;
        std::vector<int> current(vars, 0);
        multi_indices(vars, total, current, 0, orders);
        double factorial = 1.0;
        for (int i = 2; i <= total; ++i) {
            factorial *= i;
        }
        for (const auto& order : orders) {
            double worst = 0.0;
            for (const auto& x : points) {
                const cplx coarse = central_difference(m, x, order, options.step);
                const cplx fine = central_difference(m, x, order, 0.5 * options.step);
                const double derivative = std::abs((4.0 * fine - coarse) / 3.0);
                double weight;
                if (mode == DecayMode::one_param) {
                    double r2 = 0.0;
                    for (double c : x) {
                        r2 += c * c;
                    }
                    weight = std::pow(std::sqrt(r2), total);
                } else {
                    weight = std::pow(std::hypot(x[0], x[2]), order[0] + order[2]) *
                             std::pow(std::hypot(x[1], x[3]), order[1] + order[3]);
                }
                worst = std::max(worst, derivative * weight);
            }
            DecayEntry entry;
            entry.order = order;
            entry.constant = worst;
            entry.threshold = options.threshold_scale * std::ldexp(1.0, total) * factorial;
            entry.pass = worst <= entry.threshold;
            report.entries.push_back(std::move(entry));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------------------------

namespace {

double low_cutoff(double u)
{
    return smooth_step((0.5 - std::abs(u)) / 0.25);
}

double high_cutoff(double u)
{
    return smooth_step((u - 0.5) / 0.25) * smooth_step((1.5 - u) / 0.25);
}

// In-place FFT along one axis of a Q^4 array stored row-major.
void fft_axis(Eigen::VectorXcd& data, int q, int axis)
{
    Eigen::FFT<double> fft;
    Eigen::Index stride = 1;
    for (int a = 3; a > axis; --a) {
        stride *= q;
    }
    Eigen::VectorXcd in(q), out(q);
    const Eigen::Index total = data.size();
    for (Eigen::Index base = 0; base < total; ++base) {
        if ((base / stride) % q != 0) {
            continue;
        }
        for (int i = 0; i < q; ++i) {
            in(i) = data(base + i * stride);
        }
        fft.fwd(out, in);
        for (int i = 0; i < q; ++i) {
            data(base + i * stride) = out(i);
        }
    }
}

} // namespace

LocalizedDecayProfile localized_decay_profile(const Symbol& m, int k1, int k2, int weight_exponent, int points)
{
    require(m.arity == 2 && m.freq_dim == 2, "localized_decay_profile needs a two-parameter bilinear symbol");
    require(std::abs(k1) <= 40 && std::abs(k2) <= 40, "localized_decay_profile: scale out of range");
    require(weight_exponent >= 0, "localized_decay_profile: M must be nonnegative");
    require(is_power_of_two(points) && points >= 4, "localized_decay_profile: points must be a power of two >= 4");
    const int q = points;
    const double s1 = std::ldexp(1.0, k1);
    const double s2 = std::ldexp(1.0, k2);
    // Window per variable: low variables on [-1, 1), high variables on [0, 2).
    const std::array<double, 4> origin{-1.0, 0.0, 0.0, -1.0};
    const Eigen::Index total = static_cast<Eigen::Index>(q) * q * q * q;
    Eigen::VectorXcd data(total);
    std::array<double, 4> xi{};
    for (Eigen::Index flat = 0; flat < total; ++flat) {
        Eigen::Index rest = flat;
        std::array<double, 4> u{};
        for (int a = 3; a >= 0; --a) {
            u[a] = origin[a] + 2.0 * static_cast<double>(rest % q) / q;
            rest /= q;
        }
        // u = (u', u'', v', v''): f1 low/high, f2 high/low.
        const double cut = low_cutoff(u[0]) * high_cutoff(u[1]) * high_cutoff(u[2]) * low_cutoff(u[3]);
        if (cut == 0.0) {
            data(flat) = 0.0;
            continue;
        }
        xi = {s1 * u[0], s2 * u[1], s1 * u[2], s2 * u[3]};
        data(flat) = cut * m(std::span<const double>(xi));
    }
    for (int axis = 0; axis < 4; ++axis) {
        fft_axis(data, q, axis);
    }
    data /= static_cast<double>(total);

    LocalizedDecayProfile out;
    out.k1 = k1;
    out.k2 = k2;
    out.weight_exponent = weight_exponent;
    out.points = q;
    out.weighted = Eigen::ArrayXd::Zero(total);
    for (Eigen::Index flat = 0; flat < total; ++flat) {
        Eigen::Index rest = flat;
        std::array<int, 4> n{};
        for (int a = 3; a >= 0; --a) {
            n[a] = frequency_index(rest % q, q);
            rest /= q;
        }
        const double c = std::abs(data(flat));
        const double w = std::pow(1.0 + std::hypot(n[0], n[1]), weight_exponent) *
                         std::pow(1.0 + std::hypot(n[2], n[3]), weight_exponent);
        const double value = c * w;
        if (!std::isfinite(w) || !std::isfinite(value) || (c > 0.0 && c < DBL_MIN)) {
            out.underflow = true;
            continue;
        }
        out.weighted(flat) = value;
        out.constant = std::max(out.constant, value);
        out.peak = std::max(out.peak, c);
    }
    return out;
}

} // namespace biparam
