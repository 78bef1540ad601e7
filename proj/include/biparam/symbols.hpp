#pragma once

// Multiplier symbols m(xi_1, ..., xi_n) and checks of their derivative decay.
//
// Frequencies are physical (index / L). A symbol of arity n with freq_dim d reads a stacked
// vector of n*d values, argument-major: (xi_1', xi_1'', xi_2', xi_2'', ...) for d = 2.

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "biparam/grid.hpp"

namespace biparam {

using FrequencyFn = std::function<cplx(std::span<const double>)>;

/// One term c * out(xi_1 + ... + xi_n) * prod_j in_j(xi_j) of a separable symbol.
/// An empty input function stands for 1.
struct SeparableTerm {
    cplx coefficient{1.0, 0.0};
    FrequencyFn output;
    std::vector<FrequencyFn> inputs;
};

struct Symbol {
    std::string name;
    int arity = 2;
    int freq_dim = 1;
    FrequencyFn evaluator;
    /// Non-empty when the symbol equals the sum of these terms (enables the fast path).
    std::vector<SeparableTerm> separable;
    /// Recorded bound on sup |m|.
    double sup_bound = 1.0;

    int variables() const { return arity * freq_dim; }
    cplx operator()(std::span<const double> xi) const { return evaluator(xi); }
    cplx operator()(std::initializer_list<double> xi) const
    {
        return evaluator(std::span<const double>(xi.begin(), xi.size()));
    }
};

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Names: identity, zero, one_param_cm_demo, two_param_tensor, cone_restricted, sgn_sgn,
/// derivative_sum, sgn_sum, bht, v2.
///
/// one_param_cm_demo: xi eta / (xi^2 + eta^2), 0 at the origin.
/// two_param_tensor: product of two demos in (xi', eta') and (xi'', eta'').
/// cone_restricted: base * C'(xi', eta') * C''(xi'', eta''); param base = 0 (identity) or 1 (two_param_tensor, default).
/// sgn_sgn: sgn(xi_1' - xi_2') sgn(xi_1'' - xi_2'').
/// derivative_sum: 2 pi i (xi + eta). sgn_sum: sgn(xi + eta). bht: sgn(xi - eta).
/// v2: sgn(xi_1 + xi_2) sgn(xi_2 + xi_3) (trilinear).
/// Params common to all: arity (identity/zero only), freq_dim (identity/zero only).
Symbol build_symbol(const std::string& name, const std::map<std::string, double>& params = {});

/// Symbol tabulated on the integer frequency lattice of a grid; table is indexed by the flat
/// array index of (n_1, ..., n_arity) with each n_j an array index on the grid (row-major over args).
Symbol sampled_symbol(const GridGeometry& geometry, int arity, Eigen::VectorXcd table, std::string name = "sampled");

/// Table of random values uniform in the unit disc, deterministic in the seed.
Symbol random_symbol(const GridGeometry& geometry, int arity, std::uint64_t seed);

// ---------------------------------------------------------------------------------------------
// Cone decomposition

/// Smooth angular cutoff in one frequency plane. Planes: 1 = (xi', eta'), 2 = (xi'', eta'').
/// Sector 0 is the cone of the model operator: spine on the eta' axis for plane 1, on the xi'' axis for plane 2.
struct ConeCutoff {
    int plane = 1;
    int index = 0;
    int sectors = 8;

    double spine_angle() const;
    /// Value at (a, b) = (xi, eta) coordinates of the plane; 0 at the origin.
    double operator()(double a, double b) const;
};

std::vector<ConeCutoff> cone_partition(int plane, int sectors = 8);

// ---------------------------------------------------------------------------------------------
// Derivative decay

enum class DecayMode { one_param, two_param };

struct DecayOptions {
    double spacing = 1.0;        // sample lattice spacing
    int half_width = 16;         // lattice points per side of the origin along each variable
    double step = 0.25;          // finite-difference step h (Richardson uses h and h/2)
    int exclusion_cells = 8;     // radius around the singular set, in lattice cells
    double threshold_scale = 10.0;  // pass iff constant <= threshold_scale * 2^|b| * |b|!
};

struct DecayEntry {
    std::vector<int> order;
    double constant = 0.0;
    double threshold = 0.0;
    bool pass = true;
};

struct DecayReport {
    DecayMode mode = DecayMode::one_param;
    std::vector<DecayEntry> entries;

    bool all_pass() const;
    /// Entry for a multi-index, or nullptr.
    const DecayEntry* find(const std::vector<int>& order) const;
};

/// Finite-difference check of |d^b m(g)| |g|^{|b|} (one_param) or of the product-of-distances
/// weights (two_param, freq_dim 2, arity 2) for all multi-indices of total order 1..max_order.
DecayReport verify_decay(const Symbol& m, DecayMode mode, int max_order, const DecayOptions& options = {});

// ---------------------------------------------------------------------------------------------
// Localized decay

struct LocalizedDecayProfile {
    int k1 = 0;
    int k2 = 0;
    int weight_exponent = 0;
    int points = 16;
    /// sup over lattice shifts of |c(n)| prod_j (1 + |n_j|)^M.
    double constant = 0.0;
    /// sup |c(n)|, unweighted.
    double peak = 0.0;
    bool underflow = false;
    /// Weighted magnitudes indexed by the flat FFT index over (n_u', n_u'', n_v', n_v'').
    Eigen::ArrayXd weighted;
};

/// Rescaled Fourier coefficients of m(2^k1 u', 2^k2 u'', 2^k1 v', 2^k2 v'') times the
/// frequency cutoffs of the model operator (low/high in the first plane, high/low in the second),
/// on the period-2 box [-1,1)^4 sampled with `points` per axis.
LocalizedDecayProfile localized_decay_profile(const Symbol& m, int k1, int k2, int weight_exponent, int points = 16);

} // namespace biparam
