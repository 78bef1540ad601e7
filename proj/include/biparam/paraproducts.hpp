#pragma once

// Discrete paraproducts Pi_0..Pi_3 on periodic grids, their tensor products, homogeneous
// derivatives, derivative commutation and the fractional Leibniz harness.
//
// A 1D paraproduct is a finite list of terms (u_k, v_k, w_k) of spectral profiles:
//     Pi(f, g) = sum_k ((f * u_k) (g * v_k)) * w_k.
// With gap G = 3, scales k = 0..log2(N/2) and t = |n| / 2^k:
//     Pi_1 = (phi, psi, w1), Pi_2 = (psi, phi, w1), Pi_0 = (psi, psi~, w0), Pi_3 = (psi, psi~, w3) + DC,
// where psi_k(n) = b(t) - b(2t), phi_k(n) = b(|n| / 2^{k-G}), psi~_k = b(|n| / 2^{k+G-1}) - b(|n| / 2^{k-G}),
// w1 = b(t/4) - b(8t), w0 = b(t/16) - b(2t), w3 = b(2t), and b = lp_low.
// These choices make Pi_0 + Pi_1 + Pi_2 + Pi_3 = f g exactly on the grid, aliasing included.

#include <array>
#include <optional>
#include <vector>

#include "biparam/io.hpp"
#include "biparam/symbols.hpp"

namespace biparam {

/// Slot kinds: phi-type contains frequency 0, psi-type vanishes near 0, delta is the DC projector.
enum class SlotKind { phi, psi, delta };

struct ParaproductTerm {
    int scale = 0;              // k; -1 for the DC term
    std::array<SlotKind, 3> kinds{};
    Eigen::ArrayXd u, v, w;     // indexed by array index on the axis
};

struct Paraproduct1D {
    int type_index = 0;
    int n = 0;
    double length = 1.0;
    int gap = 3;
    std::vector<int> scales;    // scales actually used
    std::vector<ParaproductTerm> terms;
};

struct Paraproduct2D {
    std::array<Paraproduct1D, 2> axes;
};

/// Pi_j on an N-point axis of period L.
Paraproduct1D make_paraproduct(int type_index, int n, double length);
/// Pi_{i,j} = Pi_i (x) Pi_j on an N x N grid.
Paraproduct2D make_paraproduct(int type_first, int type_second, int n, double length);

GridFunction paraproduct(const Paraproduct1D& spec, const GridFunction& f, const GridFunction& g);
GridFunction biparameter_paraproduct(const Paraproduct2D& spec, const GridFunction& f, const GridFunction& g);

/// |2 pi n / L|^alpha on 1D grids, |2 pi n' / L|^alpha |2 pi n'' / L|^beta on 2D grids.
GridFunction homogeneous_derivative(const GridFunction& f, double alpha);
GridFunction homogeneous_derivative(const GridFunction& f, double alpha, double beta);

enum class Target { automatic, first, second };

/// Moves D^alpha inside: target slot profile times |xi|^{-alpha} (on its support), output times |xi|^alpha.
/// automatic picks g for Pi_0, Pi_1, Pi_3 and f for Pi_2. Throws when the target slot is phi-type.
/// The DC term is dropped (D^alpha kills frequency 0).
Paraproduct1D commute_derivative(const Paraproduct1D& spec, double alpha, Target target = Target::automatic);
Paraproduct2D commute_derivative(const Paraproduct2D& spec, double alpha, double beta,
                                 Target first = Target::automatic, Target second = Target::automatic);

/// The multiplier m(xi, eta) = sum_k u_k(xi) v_k(eta) w_k(xi + eta) of a 1D paraproduct.
Symbol induced_symbol(const Paraproduct1D& spec);

// ---------------------------------------------------------------------------------------------
// Fractional Leibniz harness

struct KatoPonceExponents {
    double p = 2.0;
    double q = 2.0;
};

struct KatoPonceConfig {
    double alpha = 1.0;
    std::optional<double> beta;  // set for the two-parameter form
    double r = 1.0;
    /// One pair per right-hand term (2 terms in 1D, 4 in 2D); a single pair is reused.
    std::vector<KatoPonceExponents> exponents{{2.0, 2.0}};
};

struct KatoPonceRow {
    int member = 0;
    double lhs = 0.0;
    std::vector<double> rhs;
    double ratio = 0.0;
};

struct KatoPonceReport {
    std::vector<KatoPonceRow> rows;
    double max_ratio = 0.0;

    CsvTable to_csv() const;
};

KatoPonceReport kato_ponce_report(const std::vector<std::pair<GridFunction, GridFunction>>& family,
                                  const KatoPonceConfig& config);

/// Offset Gaussian pair (widths w and 0.7 w) dilated by each lambda, sup-normalised: member i is
/// (f(x / lambda_i), g(x / lambda_i)). Keep w * max(lambda) well below L so the periodic copies stay negligible.
std::vector<std::pair<GridFunction, GridFunction>> kato_ponce_family(const GridGeometry& geometry, double width,
                                                                     const std::vector<double>& lambdas);

} // namespace biparam
