#pragma once

// Size and energy of 1D tile collections, the stopping-time decomposition and the estimates built on it.

#include <vector>

#include "biparam/io.hpp"
#include "biparam/tiles.hpp"

namespace biparam {

/// Decay exponent of the envelope chi~_I(x) = (1 + dist(x, I) / |I|)^{-M}.
inline constexpr double kEnvelopeDecay = 10.0;

/// chi~_I at every sample point of the grid (periodic distance).
Eigen::ArrayXd envelope(const GridGeometry& geometry, const Tile1D& tile, double decay = kEnvelopeDecay);

struct SizeEnergy {
    double size = 0.0;
    double energy = 0.0;
    double jn_size = 0.0;
};

/// Size, energy and the L^2 (John-Nirenberg) size of a tile subset. Energy is computed exactly:
/// for disjoint dyadic families it equals max over lambda of lambda |union{I_P : e_P >= lambda}|.
SizeEnergy size_energy(const CoefficientTable& table, const std::vector<Tile1D>& tiles);

/// Energy by exhaustive search over all disjoint subfamilies (for at most 16 tiles).
double energy_exhaustive(const CoefficientTable& table, const std::vector<Tile1D>& tiles);

/// Per-tile stopping criterion relative to a tile set: |a_P| / |I_P|^{1/2} (j = 1) or the normalised
/// weak-L^1 norm of the local square function over the set (j = 2, 3).
double size_criterion(const CoefficientTable& table, const std::vector<Tile1D>& tiles, const Tile1D& tile);

struct CzCheck {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Weak-L^1 norm of the local square function of every tile below P against ||f chi~_{I_P}||_1.
CzCheck cz_check(const CoefficientTable& table, const Tile1D& tile);

struct Tree {
    Tile1D top;
    std::vector<Tile1D> members;
};

struct StoppingStep {
    double threshold = 0.0;
    std::vector<Tree> trees;
    std::vector<Tile1D> residual;
};

/// One application of the stopping rule at level n: repeatedly take the remaining tile with the
/// longest interval (ties: smallest (k, l)) whose criterion exceeds 2^{-n-1} energy_ref and move
/// every remaining tile inside it into a tree.
StoppingStep stopping_decompose(const CoefficientTable& table, const std::vector<Tile1D>& tiles, double energy_ref,
                                int n);

struct Stratum {
    int n = 0;
    double size = 0.0;
    double tree_measure = 0.0;  // sum |I_T|
    std::vector<Tree> trees;
    bool cleanup = false;       // zero-criterion leftovers
};

struct StoppingDecomposition {
    double size = 0.0;
    double energy = 0.0;
    std::vector<Stratum> strata;
    /// max over strata of sum |I_T| / 2^n.
    double c_stop = 0.0;

    CsvTable to_csv(double domain) const;
};

/// Iterates the stopping rule from the smallest level allowed by size <= 2^{-n} energy until every tile is placed.
StoppingDecomposition stopping_partition(const CoefficientTable& table, const std::vector<Tile1D>& tiles);

struct UseEstimate {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    std::array<SizeEnergy, 3> parts{};
};

/// sum_P |I_P|^{-1/2} prod |a_j(P)| against prod size_j^{1 - theta_j} energy_j^{theta_j}.
UseEstimate size_energy_estimate(const std::array<const CoefficientTable*, 3>& tables,
                                 const std::vector<Tile1D>& tiles, const std::array<double, 3>& theta);

struct WeakTypeStratum {
    int d = 0;
    std::size_t count = 0;
    std::array<double, 3> sizes{};
    std::array<double, 3> energies{};
    double form = 0.0;       // sum over the stratum of the model form
    double use_bound = 0.0;  // prod size^{2/3} energy^{1/3}
};

struct WeakTypeReport {
    double c_threshold = 0.0;
    Mask u;
    double measure_u = 0.0;
    double measure_e3_prime = 0.0;
    std::vector<WeakTypeStratum> strata;
    double total = 0.0;
    /// max over nonempty strata of size(f3) 2^{4d} / size at d = 0 (relative decay constant).
    double f3_decay_constant = 0.0;

    CsvTable to_csv() const;
};

/// 1D weak-type reduction: U from the maximal functions of f1, f2 at threshold C, f3 = 1_{E3 \ U},
/// tiles grouped by d = max(0, floor(log2(dist(I_P, U^c) / |I_P|))).
WeakTypeReport weak_type_driver(const GridFunction& f1, const GridFunction& f2, const Mask& e3,
                                const std::vector<Tile1D>& tiles, double c);

} // namespace biparam
