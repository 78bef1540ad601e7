#include "biparam/grid.hpp"

#include <numbers>

#include <unsupported/Eigen/FFT>

#include "biparam/rng.hpp"

namespace biparam {

bool is_power_of_two(std::int64_t value)
{
    return value > 0 && (value & (value - 1)) == 0;
}

int log2_exact(std::int64_t value)
{
    require(is_power_of_two(value), "value " + std::to_string(value) + " is not a power of two");
    int k = 0;
    while ((std::int64_t{1} << k) < value) {
        ++k;
    }
    return k;
}

void validate(const GridGeometry& geometry)
{
    require(geometry.dim == 1 || geometry.dim == 2, "grid dimension must be 1 or 2");
    require(is_power_of_two(geometry.n) && geometry.n >= 8,
            "samples per axis must be a power of two >= 8 (got " + std::to_string(geometry.n) + ")");
    require(geometry.length > 0.0 && std::isfinite(geometry.length), "domain length must be positive");
}

namespace {

Eigen::FFT<double>& fft_engine()
{
    thread_local Eigen::FFT<double> engine = [] {
        Eigen::FFT<double> e;
        e.SetFlag(Eigen::FFT<double>::Unscaled);
        return e;
    }();
    return engine;
}

// Unnormalised forward DFT (sign -1) or inverse synthesis (sign +1) along every column.
void transform_columns(Field& data, bool forward)
{
    auto& engine = fft_engine();
    const Eigen::Index n = data.rows();
    Eigen::VectorXcd out(n);
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
        cplx* col = data.col(c).data();
        if (forward) {
            engine.fwd(out.data(), col, n);
        } else {
            engine.inv(out.data(), col, n);
        }
        std::copy(out.data(), out.data() + n, col);
    }
}

void transform_rows(Field& data, bool forward)
{
    if (data.cols() == 1) {
        return;
    }
    // contiguous columns are cheaper than strided rows
    Field t = data.transpose();
    transform_columns(t, forward);
    data = t.transpose();
}

} // namespace

Field fft_forward(const Field& samples)
{
    Field data = samples;
    transform_columns(data, true);
    transform_rows(data, true);
    data /= static_cast<double>(data.size());
    return data;
}

void fft_axis(Field& data, int axis, Direction direction)
{
    require(axis == 0 || axis == 1, "axis must be 0 or 1");
    const bool forward = direction == Direction::forward;
    if (axis == 0) {
        transform_columns(data, forward);
        if (forward) {
            data /= static_cast<double>(data.rows());
        }
    } else {
        transform_rows(data, forward);
        if (forward) {
            data /= static_cast<double>(data.cols());
        }
    }
}

Field fft_inverse(const Field& coefficients)
{
    Field data = coefficients;
    transform_columns(data, false);
    transform_rows(data, false);
    return data;
}

GridFunction::GridFunction(GridGeometry geometry, Field values, Representation representation)
    : geometry_(geometry), values_(std::move(values)), representation_(representation),
      cache_(std::make_shared<SpectrumCache>())
{
    validate(geometry_);
    require(values_.rows() == geometry_.rows() && values_.cols() == geometry_.cols(),
            "sample array shape does not match the grid geometry");
}

GridFunction GridFunction::zeros(const GridGeometry& geometry)
{
    return {geometry, Field::Zero(geometry.rows(), geometry.cols())};
}

GridFunction GridFunction::constant(const GridGeometry& geometry, cplx value)
{
    return {geometry, Field::Constant(geometry.rows(), geometry.cols(), value)};
}

const Field& GridFunction::samples() const
{
    require(representation_ == Representation::samples, "grid function holds a spectrum, not samples");
    return values_;
}

const Field& GridFunction::spectrum() const
{
    if (representation_ == Representation::spectrum) {
        return values_;
    }
    std::call_once(cache_->once, [this] { cache_->spectrum = fft_forward(values_); });
    return cache_->spectrum;
}

GridFunction from_spectrum(const GridGeometry& geometry, const Field& coefficients)
{
    return {geometry, fft_inverse(coefficients)};
}

GridFunction fourier_transform(const GridFunction& f, Direction direction)
{
    if (direction == Direction::forward) {
        return {f.geometry(), fft_forward(f.values()), Representation::spectrum};
    }
    return {f.geometry(), fft_inverse(f.values()), Representation::samples};
}

void require_same_geometry(const GridGeometry& a, const GridGeometry& b)
{
    require(a == b, "grid geometry mismatch");
}

// ---------------------------------------------------------------------------------------------

namespace {

double centred(double x, double length) { return x - 0.5 * length; }

} // namespace

GridFunction make_grid_function(const GridGeometry& geometry, const Generator& generator)
{
    validate(geometry);
    const double length = geometry.length;
    const auto rows = geometry.rows();
    const auto cols = geometry.cols();
    const bool two_d = geometry.dim == 2;
    auto coord = [&](Eigen::Index i) { return static_cast<double>(i) * geometry.spacing(); };
    Field values(rows, cols);

    if (generator.name == "constant") {
        values.setConstant(generator.get("value", 1.0));
    } else if (generator.name == "gaussian") {
        const double c0 = generator.get("center0", 0.5 * length);
        const double c1 = generator.get("center1", 0.5 * length);
        const double width = generator.get("width", 0.05 * length);
        const double amplitude = generator.get("amplitude", 1.0);
        require(width > 0.0, "gaussian width must be positive");
        for (Eigen::Index c = 0; c < cols; ++c) {
            for (Eigen::Index r = 0; r < rows; ++r) {
                const double d0 = coord(r) - c0;
                const double d1 = two_d ? coord(c) - c1 : 0.0;
                values(r, c) = amplitude * std::exp(-(d0 * d0 + d1 * d1) / (2.0 * width * width));
            }
        }
    } else if (generator.name == "band_limited_random") {
        const auto seed = static_cast<std::uint64_t>(generator.get("seed", 1.0));
        const int max_freq = static_cast<int>(generator.get("max_freq", geometry.n / 8));
        const bool real = generator.get("real", 0.0) != 0.0;
        require(max_freq >= 0 && max_freq < geometry.n / 2, "band_limited_random: max_freq out of range");
        Rng rng(seed);
        Field coeffs = Field::Zero(rows, cols);
        const int m1 = two_d ? max_freq : 0;
        for (int n0 = -max_freq; n0 <= max_freq; ++n0) {
            for (int n1 = -m1; n1 <= m1; ++n1) {
                const double re = rng.uniform(-1.0, 1.0);
                const double im = rng.uniform(-1.0, 1.0);
                coeffs(array_index(n0, geometry.n), two_d ? array_index(n1, geometry.n) : 0) = {re, im};
            }
        }
        values = fft_inverse(coeffs);
        if (real) {
            values = values.real().cast<cplx>();
        }
    } else if (generator.name == "chirp_xy") {
        require(two_d, "chirp_xy needs a 2D grid");
        const double cutoff = generator.get("cutoff", 0.25 * length);
        for (Eigen::Index c = 0; c < cols; ++c) {
            for (Eigen::Index r = 0; r < rows; ++r) {
                const double x = centred(coord(r), length);
                const double y = centred(coord(c), length);
                const bool inside = std::abs(x) <= cutoff && std::abs(y) <= cutoff;
                values(r, c) = inside ? std::polar(1.0, x * y) : cplx{0.0, 0.0};
            }
        }
    } else if (generator.name == "chirp_x2") {
        const double cutoff = generator.get("cutoff", 0.25 * length);
        const double sign = generator.get("sign", 1.0) >= 0.0 ? 1.0 : -1.0;
        for (Eigen::Index c = 0; c < cols; ++c) {
            for (Eigen::Index r = 0; r < rows; ++r) {
                const double x = centred(coord(r), length);
                values(r, c) = std::abs(x) <= cutoff ? std::polar(1.0, sign * x * x) : cplx{0.0, 0.0};
            }
        }
    } else if (generator.name == "indicator_rect") {
        const double lo0 = generator.get("lo0", 0.0);
        const double hi0 = generator.get("hi0", length);
        const double lo1 = generator.get("lo1", 0.0);
        const double hi1 = generator.get("hi1", length);
        for (Eigen::Index c = 0; c < cols; ++c) {
            for (Eigen::Index r = 0; r < rows; ++r) {
                const bool in0 = coord(r) >= lo0 && coord(r) < hi0;
                const bool in1 = !two_d || (coord(c) >= lo1 && coord(c) < hi1);
                values(r, c) = (in0 && in1) ? 1.0 : 0.0;
            }
        }
    } else {
        throw InvalidArgument("unknown generator '" + generator.name + "'");
    }
    return {geometry, std::move(values)};
}

// ---------------------------------------------------------------------------------------------

GridFunction operator+(const GridFunction& a, const GridFunction& b)
{
    require_same_geometry(a.geometry(), b.geometry());
    return {a.geometry(), a.samples() + b.samples()};
}

GridFunction operator-(const GridFunction& a, const GridFunction& b)
{
    require_same_geometry(a.geometry(), b.geometry());
    return {a.geometry(), a.samples() - b.samples()};
}

GridFunction operator*(cplx scalar, const GridFunction& f)
{
    return {f.geometry(), scalar * f.samples()};
}

GridFunction product(const GridFunction& a, const GridFunction& b)
{
    require_same_geometry(a.geometry(), b.geometry());
    return {a.geometry(), a.samples() * b.samples()};
}

GridFunction abs(const GridFunction& f)
{
    return {f.geometry(), f.samples().abs().cast<cplx>()};
}

GridFunction indicator(const GridGeometry& geometry, const Mask& mask)
{
    require(mask.rows() == geometry.rows() && mask.cols() == geometry.cols(), "mask shape mismatch");
    return {geometry, mask.cast<double>().cast<cplx>()};
}

GridFunction translate(const GridFunction& f, Eigen::Index shift0, Eigen::Index shift1)
{
    const auto& g = f.geometry();
    const Field& s = f.samples();
    Field out(s.rows(), s.cols());
    const auto n = static_cast<Eigen::Index>(g.n);
    auto wrap = [n](Eigen::Index i) { return ((i % n) + n) % n; };
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
        for (Eigen::Index r = 0; r < s.rows(); ++r) {
            const Eigen::Index sc = g.dim == 2 ? wrap(c - shift1) : 0;
            out(r, c) = s(wrap(r - shift0), sc);
        }
    }
    return {g, std::move(out)};
}

namespace {

// Matrix evaluating the trigonometric interpolant at points: E(p, i) = exp(2 pi i n_i x_p / L).
Eigen::MatrixXcd synthesis_matrix(const GridGeometry& g, const Eigen::VectorXd& points)
{
    Eigen::MatrixXcd e(points.size(), g.n);
    for (Eigen::Index p = 0; p < points.size(); ++p) {
        for (Eigen::Index i = 0; i < g.n; ++i) {
            const int k = frequency_index(i, g.n);
            // Nyquist split evenly between +N/2 and -N/2 keeps real data real.
            if (k == g.n / 2) {
                e(p, i) = std::cos(2.0 * std::numbers::pi * k * points(p) / g.length);
            } else {
                e(p, i) = std::polar(1.0, 2.0 * std::numbers::pi * k * points(p) / g.length);
            }
        }
    }
    return e;
}

} // namespace

GridFunction dilate(const GridFunction& f, double lambda, double p)
{
    require(lambda > 0.0, "dilation factor must be positive");
    require(p > 0.0, "dilation normalisation exponent must be positive");
    const auto& g = f.geometry();
    Eigen::VectorXd points(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double x = f.coordinate(i) - 0.5 * g.length;
        points(i) = 0.5 * g.length + x / lambda;
    }
    const Eigen::MatrixXcd e = synthesis_matrix(g, points);
    const Eigen::MatrixXcd coeffs = f.spectrum().matrix();
    Eigen::MatrixXcd out = e * coeffs;
    if (g.dim == 2) {
        out = out * e.transpose();
    }
    const double scale = std::isinf(p) ? 1.0 : std::pow(lambda, -static_cast<double>(g.dim) / p);
    return {g, (scale * out).array()};
}

cplx evaluate_1d(const GridFunction& f, double x)
{
    require(f.geometry().dim == 1, "evaluate_1d needs a 1D grid function");
    Eigen::VectorXd points(1);
    points(0) = x;
    const Eigen::MatrixXcd e = synthesis_matrix(f.geometry(), points);
    return (e * f.spectrum().matrix())(0, 0);
}

cplx interpolate_cubic(const GridFunction& f, double x)
{
    const auto& g = f.geometry();
    require(g.dim == 1, "interpolate_cubic needs a 1D grid function");
    const Field& s = f.samples();
    const double u = x / g.spacing();
    const double base = std::floor(u);
    const double t = u - base;
    const auto n = static_cast<std::int64_t>(g.n);
    auto at = [&](std::int64_t i) { return s((((i % n) + n) % n), 0); };
    const auto i1 = static_cast<std::int64_t>(base);
    const cplx p0 = at(i1 - 1), p1 = at(i1), p2 = at(i1 + 1), p3 = at(i1 + 2);
    // Catmull-Rom; reproduces grid values exactly at t = 0.
    return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
}

// ---------------------------------------------------------------------------------------------

double quasi_norm(const GridFunction& f, NormSpec spec)
{
    const RealField magnitudes = f.samples().abs();
    const double cell = f.geometry().cell_measure();
    if (spec.weak_l1) {
        return weak_l1_norm(magnitudes, cell);
    }
    require(spec.p > 0.0, "quasi-norm exponent must be positive (got p = " + std::to_string(spec.p) + ")");
    return lp_norm(magnitudes, spec.p, cell);
}

double spectral_l2_norm(const GridFunction& f)
{
    return std::sqrt(f.geometry().measure() * f.spectrum().abs2().sum());
}

double mask_measure(const GridGeometry& geometry, const Mask& mask)
{
    return static_cast<double>(mask.count()) * geometry.cell_measure();
}

// ---------------------------------------------------------------------------------------------

double smooth_step(double u)
{
    if (u <= 0.0) {
        return 0.0;
    }
    if (u >= 1.0) {
        return 1.0;
    }
    // Transition sharpness 2 gives the fastest spatial decay of the resulting bumps.
    const double z = 2.0 * (1.0 / u - 1.0 / (1.0 - u));
    if (z > 700.0) {
        return 0.0;
    }
    return 1.0 / (1.0 + std::exp(z));
}

double lp_low(double t)
{
    const double a = std::abs(t);
    if (a <= 1.0) {
        return 1.0;
    }
    if (a >= 2.0) {
        return 0.0;
    }
    return smooth_step(2.0 - a);
}

double lp_band(double t)
{
    return lp_low(t) - lp_low(2.0 * t);
}

LPFamily lp_partition(int n, int k_min, int k_max)
{
    require(is_power_of_two(n) && n >= 8, "lp_partition: N must be a power of two >= 8");
    const int top = log2_exact(n / 2);
    require(k_min <= 0 && k_max >= top,
            "lp_partition: scale range [" + std::to_string(k_min) + ", " + std::to_string(k_max) +
                "] does not cover the Nyquist band (need k_min <= 0 and k_max >= " + std::to_string(top) + ")");
    LPFamily family;
    family.n = n;
    family.k_min = k_min;
    family.k_max = k_max;
    family.low_pass = Eigen::ArrayXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        family.low_pass(i) = lp_low(2.0 * std::abs(frequency_index(i, n)));
    }
    Eigen::ArrayXd total = Eigen::ArrayXd::Zero(n);
    for (int k = k_min; k <= k_max; ++k) {
        Eigen::ArrayXd profile(n);
        const double scale = std::ldexp(1.0, -k);
        for (int i = 0; i < n; ++i) {
            profile(i) = lp_band(std::abs(frequency_index(i, n)) * scale);
        }
        total += profile;
        family.profiles.push_back(std::move(profile));
    }
    double worst = 0.0;
    for (int i = 1; i < n; ++i) {
        worst = std::max(worst, std::abs(total(i) - 1.0));
    }
    family.partition_certificate = worst;
    return family;
}

GridFunction lp_piece(const GridFunction& f, const LPFamily& family, int k)
{
    require(f.geometry().n == family.n, "LP family built for a different grid size");
    const Eigen::ArrayXd& profile = family.profile(k);
    const int n = family.n;
    const bool two_d = f.geometry().dim == 2;
    return apply_fourier_multiplier(f, [&](int n0, int n1) {
        const double a = profile(array_index(n0, n));
        return two_d ? a * profile(array_index(n1, n)) : a;
    });
}

} // namespace biparam
