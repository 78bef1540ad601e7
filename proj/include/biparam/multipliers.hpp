#pragma once

// n-linear Fourier multiplier operators on periodic grids.
//
// T_m(f_1, ..., f_n)^(Xi) = sum over lattice tuples with xi_1 + ... + xi_n = Xi (mod N) of
// m(xi_1, ..., xi_n) f_1^(xi_1) ... f_n^(xi_n). The symbol is evaluated at the unwrapped tuple.

#include <vector>

#include "biparam/symbols.hpp"

namespace biparam {

enum class Strategy { automatic, full_sum, separable_fast };

struct MultilinearOperator {
    Symbol symbol;
    Strategy strategy = Strategy::automatic;
    int threads = 1;

    int arity() const { return symbol.arity; }
    /// Strategy actually used: automatic picks separable_fast when the symbol declares terms.
    Strategy resolved() const;
};

GridFunction apply_multiplier(const MultilinearOperator& op, const std::vector<GridFunction>& args);

/// Riemann sum of T_m(f1, f2) f3 over the domain.
cplx trilinear_form(const MultilinearOperator& op, const GridFunction& f1, const GridFunction& f2,
                    const GridFunction& f3);

/// The same form computed on the frequency side: L^d sum over xi + eta + gamma = 0 (mod N) of
/// m(xi, eta) f1^(xi) f2^(eta) f3^(gamma).
cplx trilinear_form_frequency(const Symbol& m, const GridFunction& f1, const GridFunction& f2,
                              const GridFunction& f3);

} // namespace biparam
