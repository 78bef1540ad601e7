#pragma once

#include <algorithm>
#include <cmath>

#include <vector>

#include "biparam/grid.hpp"
#include "biparam/symbols.hpp"

namespace test {

inline biparam::GridFunction random_fn(const biparam::GridGeometry& g, int seed, int max_freq)
{
    return biparam::make_grid_function(
        g, biparam::Generator{"band_limited_random",
                              {{"seed", static_cast<double>(seed)}, {"max_freq", static_cast<double>(max_freq)}}});
}

inline double max_diff(const biparam::GridFunction& a, const biparam::GridFunction& b)
{
    return (a.samples() - b.samples()).abs().maxCoeff();
}

inline double rel_diff(const biparam::GridFunction& a, const biparam::GridFunction& b)
{
    return max_diff(a, b) / std::max(1e-300, b.samples().abs().maxCoeff());
}

// O(N^{2d}) per output frequency: sum over all (xi, eta) with xi + eta = Xi (mod N).
inline biparam::GridFunction brute_force(const biparam::Symbol& m, const biparam::GridFunction& f,
                                        const biparam::GridFunction& g)
{
    const auto& geo = f.geometry();
    const int n = geo.n;
    biparam::Field out = biparam::Field::Zero(geo.rows(), geo.cols());
    const biparam::Field& a = f.spectrum();
    const biparam::Field& b = g.spectrum();
    for (Eigen::Index r1 = 0; r1 < geo.rows(); ++r1) {
        for (Eigen::Index c1 = 0; c1 < geo.cols(); ++c1) {
            for (Eigen::Index r2 = 0; r2 < geo.rows(); ++r2) {
                for (Eigen::Index c2 = 0; c2 < geo.cols(); ++c2) {
                    const double x0 = biparam::frequency_index(r1, n), x1 = geo.dim == 2 ? biparam::frequency_index(c1, n) : 0;
                    const double y0 = biparam::frequency_index(r2, n), y1 = geo.dim == 2 ? biparam::frequency_index(c2, n) : 0;
                    std::vector<double> xi = geo.dim == 2 ? std::vector<double>{x0, x1, y0, y1}
                                                          : std::vector<double>{x0, y0};
                    for (double& v : xi) {
                        v /= geo.length;
                    }
                    out((r1 + r2) % n, geo.dim == 2 ? (c1 + c2) % n : 0) += m(xi) * a(r1, c1) * b(r2, c2);
                }
            }
        }
    }
    return biparam::from_spectrum(geo, out);
}

} // namespace test
