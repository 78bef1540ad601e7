#pragma once

// Level-set stratification of bi-tiles and the maximal-rectangle (Journe) diagnostic.

#include <vector>

#include "biparam/io.hpp"
#include "biparam/maximal.hpp"

namespace biparam {

struct StratifyResult {
    /// Stratum indices (n1, n2, n3) per input bi-tile.
    std::vector<std::array<int, 3>> levels;
    /// Smallest 100 |I cap good| - 97 |I| over bi-tiles, in cells; the certificate holds iff > 0.
    long long min_margin = 0;
    bool certificate = true;
    /// |union of I_P over stratum n1 of the first ladder| per n1 (first entry n1 = 1).
    std::vector<double> first_ladder_union;
    std::vector<double> first_ladder_omega;  // |Omega_n1|
    /// max over n1 of |union| / 2^{p n1} for the recorded p.
    double growth_constant = 0.0;
    double growth_exponent = 1.1;

    CsvTable to_csv(const std::vector<BiTile>& tiles) const;
};

/// Three selection ladders Omega_n = {MS(f1) > C 2^{-n}}, {SM(f2) > C 2^{-n}} (n >= 1) and
/// {SS(f3) > C 2^{-n}} (n > -n_start). A bi-tile joins the first stratum whose level set covers at
/// least 1/100 of I_P; tiles never selected join the first stratum of the ladder.
/// Throws InvalidArgument when some I_P already meets a starting level set in 1/100 of its cells
/// ("C too small" or "N_start too small").
StratifyResult stratify_levels(const BiCoefficientTable& t1, const BiCoefficientTable& t2,
                               const BiCoefficientTable& t3, const std::vector<BiTile>& tiles, double c,
                               int n_start);

struct StratifyParameters {
    double c = 0.0;
    int n_start = 0;
};
/// Smallest admissible starting levels: C = margin * max(sup MS(f1), sup SM(f2)) and the least N_start with
/// C 2^{N_start} > sup SS(f3).
StratifyParameters stratify_parameters(const BiCoefficientTable& t1, const BiCoefficientTable& t2,
                                       const BiCoefficientTable& t3, double margin = 1.01);

/// Cell rectangle [r0, r0 + rows) x [c0, c0 + cols).
struct CellRect {
    Eigen::Index r0 = 0, c0 = 0, rows = 0, cols = 0;

    Eigen::Index area() const { return rows * cols; }
    auto operator<=>(const CellRect&) const = default;
};

CellRect cell_rect(const BiTile& tile, int n);

struct JourneRectangle {
    CellRect rect;
    int d = 0;
};

struct JourneResult {
    std::vector<JourneRectangle> maximal;
    std::vector<std::size_t> assignment;   // per bi-tile, index into maximal
    std::vector<double> ratio_by_d;        // sum_{R in R^d} |R| / (2^{eps d} |Omega|)
    double c_j = 0.0;

    CsvTable to_csv(const GridGeometry& geometry) const;
};

/// Maximal dyadic rectangles R with I_P in R in Omega, classified by the largest d whose centred 2^d
/// dilate (covered by whole cells, inside the domain) lies in Omega~.
JourneResult journe_maximal(const GridGeometry& geometry, const std::vector<BiTile>& tiles, const Mask& omega,
                            const Mask& omega_tilde, double epsilon = 0.5);

struct JourneInstance {
    GridGeometry geometry;
    Mask omega, omega_tilde;
    std::vector<BiTile> tiles;
};

/// Omega = union of up to `rectangles` random dyadic rectangles; Omega~ = {strong maximal of 1_Omega > 1/2};
/// tiles = dyadic sub-rectangles of each generator up to `depth` levels finer per axis.
JourneInstance random_journe_instance(int n, std::uint64_t seed, int rectangles = 8, int depth = 3);

} // namespace biparam
