#include "biparam/maximal.hpp"
#include "biparam/io.hpp"


namespace biparam {

const char* to_string(HybridMode mode)
{
    switch (mode) {
    case HybridMode::MM:
        return "MM";
    case HybridMode::MS:
        return "MS";
    case HybridMode::SM:
        return "SM";
    case HybridMode::SS:
        return "SS";
    }
    return "?";
}

GridFunction HybridOutput::as_function() const
{
    return GridFunction(geometry, values.cast<cplx>());
}

namespace {

// Mean of `m` over each block of (a x b) cells, expanded back to cell resolution.
RealField block_means(const RealField& m, Eigen::Index a, Eigen::Index b)
{
    const Eigen::Index rows = m.rows(), cols = m.cols();
    RealField out(rows, cols);
    for (Eigen::Index r = 0; r < rows; r += a) {
        for (Eigen::Index c = 0; c < cols; c += b) {
            out.block(r, c, a, b).setConstant(m.block(r, c, a, b).mean());
        }
    }
    return out;
}

// Sliding maximum over the periodic window i - w + 1 .. i (w divides n), by block prefix/suffix maxima.
void sliding_max_periodic(const double* in, double* out, Eigen::Index n, Eigen::Index stride, Eigen::Index w,
                          std::vector<double>& pre, std::vector<double>& suf)
{
    pre.resize(static_cast<std::size_t>(n));
    suf.resize(static_cast<std::size_t>(n));
    for (Eigen::Index b = 0; b < n; b += w) {
        pre[b] = in[b * stride];
        for (Eigen::Index i = b + 1; i < b + w; ++i) {
            pre[i] = std::max(pre[i - 1], in[i * stride]);
        }
        suf[b + w - 1] = in[(b + w - 1) * stride];
        for (Eigen::Index i = b + w - 2; i >= b; --i) {
            suf[i] = std::max(suf[i + 1], in[i * stride]);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index s = i - w + 1;
        if (s >= 0 && (i + 1) % w == 0) {
            out[i * stride] = pre[i];
        } else {
            out[i * stride] = std::max(suf[s < 0 ? s + n : s], pre[i]);
        }
    }
}

// Expands a (2^k1 x 2^k2) block to cells.
RealField expand(const Eigen::ArrayXXd& block, Eigen::Index n)
{
    const Eigen::Index a = n / block.rows(), b = n / block.cols();
    RealField out(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            out(r, c) = block(r / a, c / b);
        }
    }
    return out;
}

} // namespace

HybridOutput mm_maximal(const GridFunction& f)
{
    const GridGeometry& g = f.geometry();
    require(g.dim == 2, "MM expects a 2D grid function");
    const RealField m = f.samples().abs();
    RealField best = m;
    for (Eigen::Index a = 1; a <= g.n; a *= 2) {
        for (Eigen::Index b = 1; b <= g.n; b *= 2) {
            if (a == 1 && b == 1) {
                continue;
            }
            best = best.max(block_means(m, a, b));
        }
    }
    return HybridOutput{HybridMode::MM, g, std::move(best), nullptr};
}

RealField strong_maximal(const GridGeometry& geometry, const RealField& magnitudes)
{
    require(geometry.dim == 2, "strong maximal function expects a 2D grid");
    const Eigen::Index n = geometry.n;
    require(magnitudes.rows() == n && magnitudes.cols() == n, "magnitude array does not match the grid");
    // Periodic 2D prefix sums over a doubled domain.
    Eigen::ArrayXXd prefix = Eigen::ArrayXXd::Zero(2 * n + 1, 2 * n + 1);
    for (Eigen::Index r = 0; r < 2 * n; ++r) {
        for (Eigen::Index c = 0; c < 2 * n; ++c) {
            prefix(r + 1, c + 1) = magnitudes(r % n, c % n) + prefix(r, c + 1) + prefix(r + 1, c) - prefix(r, c);
        }
    }
    RealField best = magnitudes;
    RealField means(n, n), tmp(n, n), slid(n, n);
    std::vector<double> pre, suf;
    for (Eigen::Index a = 1; a <= n; a *= 2) {
        for (Eigen::Index b = 1; b <= n; b *= 2) {
            const double area = static_cast<double>(a * b);
            for (Eigen::Index c = 0; c < n; ++c) {
                for (Eigen::Index r = 0; r < n; ++r) {
                    means(r, c) =
                        (prefix(r + a, c + b) - prefix(r, c + b) - prefix(r + a, c) + prefix(r, c)) / area;
                }
            }
            // Box starting at (r0, c0) covers the cell (r, c) iff r0 in [r-a+1, r], c0 in [c-b+1, c].
            for (Eigen::Index c = 0; c < n; ++c) {
                sliding_max_periodic(&means(0, c), &tmp(0, c), n, 1, a, pre, suf);
            }
            for (Eigen::Index r = 0; r < n; ++r) {
                sliding_max_periodic(&tmp(r, 0), &slid(r, 0), n, n, b, pre, suf);
            }
            best = best.max(slid);
        }
    }
    return best;
}

RealField hl_maximal(const GridFunction& f)
{
    const GridGeometry& g = f.geometry();
    require(g.dim == 1, "hl_maximal expects a 1D grid function");
    const Eigen::Index n = g.n;
    const Eigen::ArrayXd m = f.samples().col(0).abs();
    Eigen::ArrayXd prefix = Eigen::ArrayXd::Zero(3 * n + 1);
    for (Eigen::Index i = 0; i < 3 * n; ++i) {
        prefix(i + 1) = prefix(i) + m(i % n);
    }
    RealField out(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = 0.0;
        for (Eigen::Index r = 0; 2 * r + 1 <= n; ++r) {
            const double s = prefix(n + i + r + 1) - prefix(n + i - r);
            best = std::max(best, s / static_cast<double>(2 * r + 1));
        }
        out(i, 0) = best;
    }
    return out;
}

HybridOutput hybrid_square(const BiCoefficientTable& table, HybridMode mode)
{
    const GridGeometry& g = table.geometry;
    const int expected = mode == HybridMode::MS ? 1 : (mode == HybridMode::SM ? 2 : 3);
    require(mode != HybridMode::MM, "MM is computed from a function, not a coefficient table");
    require(table.j == expected, std::string(to_string(mode)) + " needs a type-" + std::to_string(expected) +
                                     " coefficient table, got type " + std::to_string(table.j));
    const double domain = g.length;
    RealField result = RealField::Zero(g.n, g.n);
    for (int k1 = 0; k1 <= table.k_max; ++k1) {
        RealField inner = RealField::Zero(g.n, g.n);
        for (int k2 = 0; k2 <= table.k_max; ++k2) {
            const double measure = std::ldexp(domain, -k1) * std::ldexp(domain, -k2);
            const RealField cells = expand(table.block(k1, k2).cwiseAbs2().array() / measure, g.n);
            if (mode == HybridMode::SM) {
                inner = inner.max(cells);
            } else {
                inner += cells;
            }
        }
        if (mode == HybridMode::MS) {
            result = result.max(inner);
        } else {
            result += inner;
        }
    }
    return HybridOutput{mode, g, result.sqrt(), std::make_shared<const BiCoefficientTable>(table)};
}

RealField full_square(const BiCoefficientTable& table)
{
    const GridGeometry& g = table.geometry;
    RealField result = RealField::Zero(g.n, g.n);
    for (int k1 = 0; k1 <= table.k_max; ++k1) {
        for (int k2 = 0; k2 <= table.k_max; ++k2) {
            const double measure = std::ldexp(g.length, -k1) * std::ldexp(g.length, -k2);
            result += expand(table.block(k1, k2).cwiseAbs2().array() / measure, g.n);
        }
    }
    return result.sqrt();
}

namespace {

struct SetBuild {
    Mask omega0, omega, omega_tilde;
};

SetBuild build_sets(const RealField& ms, const RealField& sm, const RealField& mm1, const RealField& mm2,
                    const GridGeometry& g, double c)
{
    SetBuild s;
    s.omega0 = (ms > c) || (sm > c) || (mm1 > c) || (mm2 > c);
    const GridFunction one0 = indicator(g, s.omega0);
    s.omega = mm_maximal(one0).values > 0.01;
    s.omega = s.omega || s.omega0;
    const GridFunction one = indicator(g, s.omega);
    s.omega_tilde = mm_maximal(one).values > 0.5;
    s.omega_tilde = s.omega_tilde || s.omega;
    return s;
}

} // namespace

ExceptionalSets exceptional_sets(const GridFunction& f1, const GridFunction& f2, const Mask& e3, double c,
                                 const ExceptionalSetOptions& options)
{
    const GridGeometry& g = f1.geometry();
    require_same_geometry(g, f2.geometry());
    require(g.dim == 2, "exceptional sets need 2D functions");
    require(c > 0.0, "threshold C must be positive");
    require(e3.rows() == g.n && e3.cols() == g.n, "E3 mask does not match the grid");
    const double e3_measure = mask_measure(g, e3);
    require(std::abs(e3_measure - 1.0) <= 1e-9, "E3 must have measure 1");
    const double n1 = quasi_norm(f1, options.p);
    const double n2 = quasi_norm(f2, options.q);
    require(n1 == 0.0 || std::abs(n1 - 1.0) <= 1e-9, "f1 must be normalised (norm 0 or 1)");
    require(n2 == 0.0 || std::abs(n2 - 1.0) <= 1e-9, "f2 must be normalised (norm 0 or 1)");

    const RealField ms = hybrid_square(bitile_coefficients(f1, 1, options.k_max), HybridMode::MS).values;
    const RealField sm = hybrid_square(bitile_coefficients(f2, 2, options.k_max), HybridMode::SM).values;
    const RealField mm1 = mm_maximal(f1).values;
    const RealField mm2 = mm_maximal(f2).values;

    SetBuild s = build_sets(ms, sm, mm1, mm2, g, c);
    const double tilde = mask_measure(g, s.omega_tilde);
    if (!(tilde < 0.5)) {
        double adequate = c;
        bool found = false;
        for (int i = 0; i < 64; ++i) {
            adequate *= 2.0;
            if (mask_measure(g, build_sets(ms, sm, mm1, mm2, g, adequate).omega_tilde) < 0.5) {
                found = true;
                break;
            }
        }
        throw NumericError("C = " + format_double(c) + " too small: |Omega~| = " + format_double(tilde) +
                           (found ? "; smallest adequate C by doubling: " + format_double(adequate)
                                  : "; no adequate C found by doubling"));
    }
    ExceptionalSets out;
    out.c_threshold = c;
    out.omega0 = std::move(s.omega0);
    out.omega = std::move(s.omega);
    out.omega_tilde = std::move(s.omega_tilde);
    out.e3_prime = e3 && !out.omega_tilde;
    out.measure_omega0 = mask_measure(g, out.omega0);
    out.measure_omega = mask_measure(g, out.omega);
    out.measure_omega_tilde = tilde;
    out.measure_e3_prime = mask_measure(g, out.e3_prime);
    return out;
}

MajorizationCertificate pointwise_majorization(const BiCoefficientTable& a, const BiCoefficientTable& b,
                                               const BiCoefficientTable& c)
{
    require(a.geometry == b.geometry && a.geometry == c.geometry && a.k_max == b.k_max && a.k_max == c.k_max,
            "coefficient tables index different bi-tile sets");
    const GridGeometry& g = a.geometry;
    MajorizationCertificate cert;
    cert.lhs = RealField::Zero(g.n, g.n);
    for (int k1 = 0; k1 <= a.k_max; ++k1) {
        for (int k2 = 0; k2 <= a.k_max; ++k2) {
            const double measure = std::ldexp(g.length, -k1) * std::ldexp(g.length, -k2);
            const Eigen::ArrayXXd term = a.block(k1, k2).cwiseAbs().array() * b.block(k1, k2).cwiseAbs().array() *
                                         c.block(k1, k2).cwiseAbs().array() / std::pow(measure, 1.5);
            cert.lhs += expand(term, g.n);
        }
    }
    cert.rhs = hybrid_square(a, HybridMode::MS).values * hybrid_square(b, HybridMode::SM).values *
               hybrid_square(c, HybridMode::SS).values;
    const RealField slack = cert.rhs - cert.lhs;
    cert.min_slack = slack.minCoeff();
    // Roundoff allowance only; the inequality itself has constant 1.
    cert.holds = ((cert.lhs - cert.rhs * (1.0 + 1e-12)) <= 1e-300).all();
    cert.lhs_integral = cert.lhs.sum() * g.cell_measure();
    cert.rhs_integral = cert.rhs.sum() * g.cell_measure();
    return cert;
}

} // namespace biparam
