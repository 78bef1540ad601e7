#pragma once

// Periodic grid functions on [0, L)^d, d = 1 or 2.
//
// Fourier convention: the spectrum of f holds Fourier-series coefficients
//
//     c_n = N^{-d} sum_j f(x_j) exp(-2 pi i n . j / N),     f(x) = sum_n c_n exp(2 pi i n . x / L),
//
// with integer frequencies n in (-N/2, N/2]^d. The physical frequency of index n is n / L,
// and Plancherel reads ||f||_2^2 = L^d sum_n |c_n|^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <functional>
#include <type_traits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "biparam/error.hpp"

namespace biparam {

using cplx = std::complex<double>;

/// Samples of a grid function. Rows follow axis 0 (x'), columns axis 1 (x''); 1D grids have one column.
using Field = Eigen::ArrayXXcd;
using RealField = Eigen::ArrayXXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct GridGeometry {
    int dim = 1;
    int n = 8;            // samples per axis
    double length = 1.0;  // period L

    Eigen::Index rows() const { return n; }
    Eigen::Index cols() const { return dim == 2 ? n : 1; }
    Eigen::Index size() const { return rows() * cols(); }
    double spacing() const { return length / n; }
    double cell_measure() const { return dim == 2 ? spacing() * spacing() : spacing(); }
    double measure() const { return dim == 2 ? length * length : length; }

    bool operator==(const GridGeometry& other) const = default;
};

bool is_power_of_two(std::int64_t value);
int log2_exact(std::int64_t value);

/// Throws InvalidArgument unless dim in {1,2}, n a power of two >= 8 and length > 0.
void validate(const GridGeometry& geometry);

/// Maps an array index in [0, n) to its integer frequency in (-n/2, n/2].
inline int frequency_index(Eigen::Index i, int n)
{
    return i <= n / 2 ? static_cast<int>(i) : static_cast<int>(i) - n;
}

/// Inverse of frequency_index (any integer is reduced modulo n).
inline Eigen::Index array_index(std::int64_t frequency, int n)
{
    const std::int64_t r = frequency % n;
    return static_cast<Eigen::Index>(r < 0 ? r + n : r);
}

/// Wraps an integer frequency into (-n/2, n/2].
inline int wrap_frequency(std::int64_t frequency, int n)
{
    return frequency_index(array_index(frequency, n), n);
}

enum class Representation { samples, spectrum };
enum class Direction { forward, inverse };

/// Forward transform: samples -> coefficients (normalised by 1/N^d).
Field fft_forward(const Field& samples);
/// Inverse transform: coefficients -> samples.
Field fft_inverse(const Field& coefficients);
/// One axis of the transform in place (axis 0 = along columns), with the same normalisation per axis
/// (forward divides by the axis length). fft_forward = both axes forward.
void fft_axis(Field& data, int axis, Direction direction);

class GridFunction {
public:
    GridFunction(GridGeometry geometry, Field values, Representation representation = Representation::samples);

    static GridFunction zeros(const GridGeometry& geometry);
    static GridFunction constant(const GridGeometry& geometry, cplx value);

    const GridGeometry& geometry() const { return geometry_; }
    Representation representation() const { return representation_; }

    /// Raw stored values (samples, or coefficients for a spectral-representation function).
    const Field& values() const { return values_; }
    /// Samples; throws if this object holds a spectrum.
    const Field& samples() const;
    /// Fourier-series coefficients of the samples, computed once and cached.
    const Field& spectrum() const;

    double coordinate(Eigen::Index i) const { return static_cast<double>(i) * geometry_.spacing(); }

private:
    struct SpectrumCache {
        std::once_flag once;
        Field spectrum;
    };

    GridGeometry geometry_;
    Field values_;
    Representation representation_;
    std::shared_ptr<SpectrumCache> cache_;
};

/// Builds a function from spectral coefficients (inverse transform applied).
GridFunction from_spectrum(const GridGeometry& geometry, const Field& coefficients);

GridFunction fourier_transform(const GridFunction& f, Direction direction);

void require_same_geometry(const GridGeometry& a, const GridGeometry& b);

// ---------------------------------------------------------------------------------------------
// Generators

struct Generator {
    std::string name;
    std::map<std::string, double> params;

    double get(const std::string& key, double fallback) const
    {
        const auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
};

/// Generator names: gaussian, band_limited_random, chirp_xy, chirp_x2, indicator_rect, constant.
///
/// gaussian: center0, center1 (default L/2), width, amplitude.
/// band_limited_random: seed, max_freq, real (0/1). Coefficients uniform in the unit square for |n_i| <= max_freq.
/// chirp_xy: cutoff; exp(i x y) on centred coordinates, zero outside |x|,|y| <= cutoff.
/// chirp_x2: cutoff, sign; exp(sign i x^2) on centred coordinates.
/// indicator_rect: lo0, hi0, lo1, hi1 (half-open, default the whole axis).
/// constant: value.
GridFunction make_grid_function(const GridGeometry& geometry, const Generator& generator);

// ---------------------------------------------------------------------------------------------
// Pointwise algebra

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(cplx scalar, const GridFunction& f);
GridFunction product(const GridFunction& a, const GridFunction& b);
GridFunction abs(const GridFunction& f);
GridFunction indicator(const GridGeometry& geometry, const Mask& mask);

/// Circular shift by whole cells: (tau_h f)(x) = f(x - h).
GridFunction translate(const GridFunction& f, Eigen::Index shift0, Eigen::Index shift1 = 0);

/// L^p-normalised dilation f -> lambda^{-d/p} f(x / lambda) about the domain centre, evaluated by
/// trigonometric interpolation (exact for band-limited f whose dilate stays resolved).
GridFunction dilate(const GridFunction& f, double lambda, double p);

/// Trigonometric interpolation of a 1D grid function at an arbitrary point.
cplx evaluate_1d(const GridFunction& f, double x);

/// Periodic cubic (Catmull-Rom) interpolation of a 1D grid function.
cplx interpolate_cubic(const GridFunction& f, double x);

/// Spectral multiplication: out^(n) = multiplier(n) f^(n), with multiplier taking integer frequencies.
template <class Fn>
GridFunction apply_fourier_multiplier(const GridFunction& f, Fn&& multiplier)
{
    const auto& g = f.geometry();
    Field coeffs = f.spectrum();
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
            const int n0 = frequency_index(r, g.n);
            const int n1 = g.dim == 2 ? frequency_index(c, g.n) : 0;
            coeffs(r, c) *= multiplier(n0, n1);
        }
    }
    return from_spectrum(g, coeffs);
}

// ---------------------------------------------------------------------------------------------
// Quasi-norms

/// L^p quasi-norm by Riemann sum; p = infinity gives the max.
template <class Derived>
double lp_norm(const Eigen::ArrayBase<Derived>& magnitudes, double p, double cell)
{
    require(p > 0.0, "quasi-norm exponent must be positive");
    if (magnitudes.size() == 0) {
        return 0.0;
    }
    if (std::isinf(p)) {
        static_assert(std::is_same_v<typename Derived::Scalar, double>, "lp_norm expects real magnitudes");
        return magnitudes.maxCoeff();
    }
    const double s = magnitudes.pow(p).sum() * cell;
    return std::pow(s, 1.0 / p);
}

/// Weak-L^1 quasi-norm of a step function: max_i |g|_(i) * i * cell over magnitudes sorted descending.
template <class Derived>
double weak_l1_norm(const Eigen::ArrayBase<Derived>& magnitudes, double cell)
{
    static_assert(std::is_same_v<typename Derived::Scalar, double>, "weak_l1_norm expects real magnitudes");
    const Eigen::ArrayXXd evaluated = magnitudes;
    std::vector<double> v(evaluated.data(), evaluated.data() + evaluated.size());
    std::sort(v.begin(), v.end(), std::greater<>());
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        best = std::max(best, v[i] * static_cast<double>(i + 1) * cell);
    }
    return best;
}

struct NormSpec {
    double p = 2.0;
    bool weak_l1 = false;

    static NormSpec lp(double exponent) { return {exponent, false}; }
    static NormSpec sup() { return {INFINITY, false}; }
    static NormSpec weak() { return {1.0, true}; }
};

double quasi_norm(const GridFunction& f, NormSpec spec);
inline double quasi_norm(const GridFunction& f, double p) { return quasi_norm(f, NormSpec::lp(p)); }

/// sqrt(L^d sum |c_n|^2); equals quasi_norm(f, 2) by Plancherel.
double spectral_l2_norm(const GridFunction& f);

/// Cell-count measure of a boolean grid.
double mask_measure(const GridGeometry& geometry, const Mask& mask);

// ---------------------------------------------------------------------------------------------
// Littlewood-Paley partition

/// Smooth step: 0 for u <= 0, 1 for u >= 1, C-infinity in between.
double smooth_step(double u);
/// Low-pass profile: 1 on [0,1], 0 on [2, inf), smooth and even.
double lp_low(double t);
/// Annular profile psi(t) = lp_low(t) - lp_low(2t), supported in 1/2 <= |t| <= 2.
double lp_band(double t);

struct LPFamily {
    int n = 0;
    int k_min = 0;
    int k_max = 0;
    /// profiles[k - k_min](i) = psi_hat(|n_i| / 2^k) for array index i.
    std::vector<Eigen::ArrayXd> profiles;
    /// Low-pass companion phi_hat_0: equals 1 at frequency 0 and vanishes at every nonzero integer frequency.
    Eigen::ArrayXd low_pass;
    /// max over nonzero grid frequencies of |sum_k psi_hat_k - 1|.
    double partition_certificate = 0.0;

    const Eigen::ArrayXd& profile(int k) const { return profiles.at(static_cast<std::size_t>(k - k_min)); }
};

/// Dyadic partition of unity on the integer frequencies of an N-point axis.
/// Requires k_min <= 0 and 2^{k_max} >= N/2 so every nonzero frequency is covered.
LPFamily lp_partition(int n, int k_min, int k_max);

/// Applies profile k of the family along each axis of a 1D function (f * psi_k).
GridFunction lp_piece(const GridFunction& f, const LPFamily& family, int k);

} // namespace biparam
