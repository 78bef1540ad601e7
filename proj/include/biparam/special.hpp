#pragma once

// Sine and cosine integrals, Phi(T) = int_0^T Si(u)/u du, and the quadrature rules behind them.

#include <functional>
#include <vector>

namespace biparam {

/// Si(x) = int_0^x sin t / t dt. Power series up to |x| = 20, continued fraction for E1(ix) beyond.
double sine_integral(double x);
/// Ci(x) = gamma + ln x + int_0^x (cos t - 1)/t dt, x > 0.
double cosine_integral(double x);

inline constexpr double kSiCrossover = 20.0;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    long evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature on [a, b]; throws NumericError when the tolerance is not met
/// within max_evaluations.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                    double rel_tol = 0.0, long max_evaluations = 2'000'000);

/// n-point Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int n);

inline constexpr double kPhiCrossover = 1000.0;

/// Phi(T) = int_0^T Si(u)/u du. Adaptive quadrature up to T = 1000, beyond that
/// Phi(T) = Si(T) ln T + gamma pi / 2 + int_T^inf ln(u) sin(u) / u du with the tail expanded asymptotically.
double phi_integral(double t);

/// S(N) = int_0^N int_0^N sin(xy)/(xy) dx dy = Phi(N^2).
double sine_integral_S(double n);

/// Independent oracle: iterated adaptive quadrature of sin(xy)/(xy) over [0, N]^2.
double sine_integral_S_direct(double n, double tol = 1e-9);

} // namespace biparam
