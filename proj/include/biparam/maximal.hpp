#pragma once

// Maximal and square functions on 2D grids: the dyadic bi-parameter maximal function MM, the
// hybrid operators MS, SM, SS built from bi-tile coefficients, the exceptional sets and the
// pointwise majorisation of the model sum by MS * SM * SS.

#include "biparam/tiles.hpp"

namespace biparam {

enum class HybridMode { MM, MS, SM, SS };

const char* to_string(HybridMode mode);

struct HybridOutput {
    HybridMode mode = HybridMode::MM;
    GridGeometry geometry;
    RealField values;                                   // one value per cell, >= 0
    std::shared_ptr<const BiCoefficientTable> source;  // null for MM

    GridFunction as_function() const;
};

/// sup over dyadic rectangles R containing the cell of the average of |f| over R.
HybridOutput mm_maximal(const GridFunction& f);

/// sup over all boxes with power-of-two side lengths (in cells, any offset, periodic) containing the cell.
RealField strong_maximal(const GridGeometry& geometry, const RealField& magnitudes);

/// Centred Hardy-Littlewood maximal function of a 1D function (periodic, odd windows of cells).
RealField hl_maximal(const GridFunction& f);

/// MS (type-1 table), SM (type-2 table) or SS (type-3 table) with L^2-normalised aggregates.
HybridOutput hybrid_square(const BiCoefficientTable& table, HybridMode mode);

/// The same aggregate with every sup replaced by an l^2 sum (SS-style), used as an upper bound for MS.
RealField full_square(const BiCoefficientTable& table);

struct ExceptionalSetOptions {
    double p = 2.0;        // f1 is normalised in L^p
    double q = 2.0;        // f2 is normalised in L^q
    int k_max = -1;        // tile scales (default: largest usable)
};

struct ExceptionalSets {
    double c_threshold = 0.0;
    Mask omega0, omega, omega_tilde, e3_prime;
    double measure_omega0 = 0.0, measure_omega = 0.0, measure_omega_tilde = 0.0, measure_e3_prime = 0.0;
};

/// Throws NumericError when |omega_tilde| >= 1/2, naming the smallest doubling of C that works.
ExceptionalSets exceptional_sets(const GridFunction& f1, const GridFunction& f2, const Mask& e3, double c,
                                 const ExceptionalSetOptions& options = {});

struct MajorizationCertificate {
    RealField lhs;        // sum_P |a b c| |I_P|^{-3/2} 1_{I_P}
    RealField rhs;        // MS(a) SM(b) SS(c)
    double min_slack = 0.0;
    bool holds = true;
    double lhs_integral = 0.0;
    double rhs_integral = 0.0;
};

MajorizationCertificate pointwise_majorization(const BiCoefficientTable& a, const BiCoefficientTable& b,
                                               const BiCoefficientTable& c);

} // namespace biparam
