#pragma once

// Bilinear and double bilinear Hilbert transforms, the trilinear V2 form, chirp inputs and
// the log-growth certificate built on them.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "biparam/grid.hpp"

namespace biparam {

/// Symmetric midpoint nodes t = +-(j + 1/2) h, j < m, with Gaussian taper weights h exp(-(t/taper)^2).
/// Odd integrands cancel exactly because both signs of every node are summed together.
struct PVQuadrature {
    double h = 0.0;
    int m = 0;
    double taper = 0.0;     // 0 disables the taper
    bool periodic = true;   // nodes may leave [0, L) and wrap around

    double cutoff() const { return m * h; }
    double node(int j) const { return (j + 0.5) * h; }
    double weight(int j) const;
};

/// Step 2 * spacing (so x +- t stay on the grid), taper `taper_periods` * L, cutoff about `reach_periods` * L.
PVQuadrature make_pv_quadrature(const GridGeometry& geometry, double reach_periods = 19.0, double taper_periods = 3.0);

/// sum_j w_j (F(t_j) - F(-t_j)) / t_j, i.e. PV int F(t) dt / t.
cplx pv_integrate(const PVQuadrature& quad, const std::function<cplx(double)>& numerator);

/// B(f,g)(x) = PV int f(x - t) g(x + t) dt / t. Off-grid points use cubic interpolation.
std::vector<cplx> bht_eval(const GridFunction& f, const GridFunction& g, const std::vector<double>& xs,
                           const PVQuadrature& quad);

/// Frequency-side evaluation: -i pi times the multiplier sgn(xi - eta). Exact for |n| < N/4 inputs.
GridFunction bht_spectral(const GridFunction& f, const GridFunction& g);

/// B_d(f,g) at grid points (row, col) by the tensor PV rule; both axes share the quadrature.
std::vector<cplx> double_bht_eval(const GridFunction& f, const GridFunction& g,
                                  const std::vector<std::pair<Eigen::Index, Eigen::Index>>& points,
                                  const PVQuadrature& quad);

/// Frequency side of B_d: -pi^2 times sgn(xi1 - eta1) sgn(xi2 - eta2).
GridFunction double_bht_spectral(const GridFunction& f, const GridFunction& g);

using PlaneFunction = std::function<cplx(double, double)>;

struct ChirpQuadratureOptions {
    int inner_nodes = 10;          // Gauss-Legendre nodes per inner period pi / t1
    int outer_nodes = 10;
    double resolved = 100.0;       // outer panels of width pi / B up to t1 = resolved / B
    double outer_ratio = 2.0;      // geometric panels beyond
};

/// int int f(x - t1, y - t2) g(x + t1, y + t2) dt1 dt2 / (t1 t2) over |t1| <= a, |t2| <= b, folded onto
/// the positive quadrant. Inner panels follow the chirp phase 2 t1 t2.
cplx double_bht_quadrature(const PlaneFunction& f, const PlaneFunction& g, double x, double y, double a, double b,
                           const ChirpQuadratureOptions& options = {});

/// f_N = g_N = e^{i x y} on [-N, N]^2, zero outside.
cplx chirp_double_bht(double n, double x, double y, const ChirpQuadratureOptions& options = {});
/// Closed form |B_d(f_N, f_N)(x, y)| = 4 Phi(2 (N - |x|)(N - |y|)).
double chirp_double_bht_modulus(double n, double x, double y);

/// V2(f,g,h)(x) = int int f(x - t1) g(x - t1 - t2) h(x - t2) dt1 dt2 / (t1 t2) for
/// f = h = e^{i x^2}, g = e^{-i x^2} cut off to [-N, N]. Inner integral in closed form.
cplx chirp_v2(double n, double x, int panels_per_period = 2, int nodes = 10);

/// PV int_lo^hi e^{i w t} dt / t.
cplx pv_exponential_integral(double w, double lo, double hi);

/// (x - t1)^2 - (x - t1 - t2)^2 + (x - t2)^2 - (x^2 - 2 t1 t2); the product of the three chirps has phase
/// x^2 - 2 t1 t2.
double v2_phase_defect(double x, double t1, double t2);

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_se = 0.0;
    double t_stat = 0.0;
    double mean = 0.0;
};
/// Ordinary least squares y = a + b x with the standard error of b.
LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

enum class DivergenceOperator { double_bht, v2, control };
std::string to_string(DivergenceOperator op);
DivergenceOperator parse_divergence_operator(const std::string& name);

struct GrowthRow {
    int n = 0;
    double value = 0.0;   // mean modulus over the sample points
    double ratio = 0.0;   // local L^r norm over the input norm product
    double ln_n = 0.0;
};

struct DivergenceCertificate {
    DivergenceOperator op = DivergenceOperator::double_bht;
    double p = 2.0, q = 2.0, r = 1.0;
    std::vector<GrowthRow> rows;
    LinearFit fit;

    bool diverges(double t_min = 5.0) const { return fit.slope > 0.0 && fit.t_stat > t_min; }
    /// Slope within two standard errors of zero (with a floor for exactly flat data).
    bool flat() const;
    std::string to_csv() const;
};

/// Evaluates the operator on chirp inputs at midpoint samples of [-N/1000, N/1000]^d and fits
/// ratio = a + b ln N. d = 2 for B_d and the control (plain product f g), d = 1 for V2.
DivergenceCertificate divergence_certificate(DivergenceOperator op, const std::vector<int>& n_list, double p, double q,
                                             double r, int samples_per_axis = 3, int threads = 1);

/// S(N) table with fitted slope against ln N and the growth constants: C2 is the smallest tested N past
/// which S(N) >= C1 ln N holds with C1 = min S(N) / ln N over N > C2.
struct SineGrowth {
    std::vector<GrowthRow> rows;   // value = S(N), ratio = S(N) / ln N
    LinearFit fit;
    double c1 = 0.0;
    double c2 = 0.0;
    std::string to_csv() const;
};
SineGrowth sine_growth(const std::vector<int>& n_list, double c2 = 2.0);

} // namespace biparam
