#include "biparam/multipliers.hpp"

#include <thread>

namespace biparam {

Strategy MultilinearOperator::resolved() const
{
    if (strategy == Strategy::automatic) {
        return symbol.separable.empty() ? Strategy::full_sum : Strategy::separable_fast;
    }
    return strategy;
}

namespace {

void check_args(const MultilinearOperator& op, const std::vector<GridFunction>& args)
{
    require(static_cast<int>(args.size()) == op.arity(),
            "arity mismatch: symbol '" + op.symbol.name + "' takes " + std::to_string(op.arity()) + " arguments, got " +
                std::to_string(args.size()));
    require(!args.empty(), "multiplier needs at least one argument");
    for (const auto& a : args) {
        require_same_geometry(args.front().geometry(), a.geometry());
    }
    require(op.symbol.freq_dim == args.front().geometry().dim,
            "symbol frequency dimension does not match the grid dimension");
    require(op.threads >= 1, "thread count must be >= 1");
}

// Integer frequency vector of flat lattice index `flat` (row-major over the d axes).
void lattice_point(Eigen::Index flat, const GridGeometry& g, int* out)
{
    if (g.dim == 1) {
        out[0] = frequency_index(flat, g.n);
    } else {
        out[0] = frequency_index(flat / g.n, g.n);
        out[1] = frequency_index(flat % g.n, g.n);
    }
}

Eigen::Index lattice_flat(const int* n, const GridGeometry& g)
{
    if (g.dim == 1) {
        return array_index(n[0], g.n);
    }
    return array_index(n[0], g.n) * g.n + array_index(n[1], g.n);
}

cplx coefficient(const Field& spectrum, const int* n, const GridGeometry& g)
{
    if (g.dim == 1) {
        return spectrum(array_index(n[0], g.n), 0);
    }
    return spectrum(array_index(n[0], g.n), array_index(n[1], g.n));
}

// Full lattice sum for output frequency Xi: all free arguments enumerated, the last one determined.
cplx full_sum_at(const Symbol& m, const std::vector<const Field*>& spectra, const GridGeometry& g,
                 const int* output)
{
    const int d = g.dim;
    const int arity = m.arity;
    const Eigen::Index cells = g.size();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(arity - 1), 0);
    std::vector<int> freq(static_cast<std::size_t>(arity * d));
    std::vector<double> xi(static_cast<std::size_t>(arity * d));
    cplx total = 0.0;
    while (true) {
        cplx product = 1.0;
        int rest[2] = {output[0], d == 2 ? output[1] : 0};
        for (int j = 0; j < arity - 1; ++j) {
            lattice_point(idx[j], g, &freq[j * d]);
            for (int c = 0; c < d; ++c) {
                rest[c] -= freq[j * d + c];
            }
            product *= coefficient(*spectra[j], &freq[j * d], g);
        }
        // Last argument: the representative of Xi - sum in (-N/2, N/2].
        for (int c = 0; c < d; ++c) {
            freq[(arity - 1) * d + c] = wrap_frequency(rest[c], g.n);
        }
        product *= coefficient(*spectra[arity - 1], &freq[(arity - 1) * d], g);
        if (product != 0.0) {
            for (std::size_t v = 0; v < xi.size(); ++v) {
                xi[v] = freq[v] / g.length;
            }
            total += m(std::span<const double>(xi)) * product;
        }
        int j = 0;
        while (j < arity - 1) {
            if (++idx[j] < cells) {
                break;
            }
            idx[j] = 0;
            ++j;
        }
        if (j == arity - 1) {
            break;
        }
    }
    return total;
}

GridFunction full_sum(const MultilinearOperator& op, const std::vector<GridFunction>& args)
{
    const GridGeometry& g = args.front().geometry();
    std::vector<const Field*> spectra;
    for (const auto& a : args) {
        spectra.push_back(&a.spectrum());
    }
    const Eigen::Index cells = g.size();
    Field out = Field::Zero(g.rows(), g.cols());
    auto work = [&](Eigen::Index begin, Eigen::Index end) {
        int output[2];
        for (Eigen::Index flat = begin; flat < end; ++flat) {
            lattice_point(flat, g, output);
            const cplx value = full_sum_at(op.symbol, spectra, g, output);
            if (g.dim == 1) {
                out(array_index(output[0], g.n), 0) = value;
            } else {
                out(array_index(output[0], g.n), array_index(output[1], g.n)) = value;
            }
        }
    };
    const int threads = static_cast<int>(std::min<Eigen::Index>(op.threads, cells));
    if (threads <= 1) {
        work(0, cells);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(work, cells * t / threads, cells * (t + 1) / threads);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    return from_spectrum(g, out);
}

GridFunction separable_fast(const MultilinearOperator& op, const std::vector<GridFunction>& args)
{
    const GridGeometry& g = args.front().geometry();
    const int d = g.dim;
    Field accumulated = Field::Zero(g.rows(), g.cols());
    std::vector<double> xi(static_cast<std::size_t>(d));
    auto spectral_profile = [&](const FrequencyFn& fn, Field& target) {
        for (Eigen::Index c = 0; c < g.cols(); ++c) {
            for (Eigen::Index r = 0; r < g.rows(); ++r) {
                xi[0] = frequency_index(r, g.n) / g.length;
                if (d == 2) {
                    xi[1] = frequency_index(c, g.n) / g.length;
                }
                target(r, c) *= fn(std::span<const double>(xi));
            }
        }
    };
    for (const auto& term : op.symbol.separable) {
        Field product = Field::Ones(g.rows(), g.cols());
        for (std::size_t j = 0; j < args.size(); ++j) {
            if (j < term.inputs.size() && term.inputs[j]) {
                Field s = args[j].spectrum();
                spectral_profile(term.inputs[j], s);
                product *= fft_inverse(s);
            } else {
                product *= args[j].samples();
            }
        }
        Field spectrum = fft_forward(product);
        if (term.output) {
            spectral_profile(term.output, spectrum);
        }
        accumulated += term.coefficient * spectrum;
    }
    return from_spectrum(g, accumulated);
}

} // namespace

GridFunction apply_multiplier(const MultilinearOperator& op, const std::vector<GridFunction>& args)
{
    check_args(op, args);
    const Strategy strategy = op.resolved();
    if (strategy == Strategy::separable_fast) {
        require(!op.symbol.separable.empty(),
                "symbol '" + op.symbol.name + "' declares no separable structure; use full_sum");
        return separable_fast(op, args);
    }
    return full_sum(op, args);
}

cplx trilinear_form(const MultilinearOperator& op, const GridFunction& f1, const GridFunction& f2,
                    const GridFunction& f3)
{
    require(op.arity() == 2, "trilinear_form needs a bilinear operator");
    require_same_geometry(f1.geometry(), f3.geometry());
    const GridFunction t = apply_multiplier(op, {f1, f2});
    return (t.samples() * f3.samples()).sum() * f1.geometry().cell_measure();
}

cplx trilinear_form_frequency(const Symbol& m, const GridFunction& f1, const GridFunction& f2,
                              const GridFunction& f3)
{
    require(m.arity == 2, "trilinear_form_frequency needs a bilinear symbol");
    const GridGeometry& g = f1.geometry();
    require_same_geometry(g, f2.geometry());
    require_same_geometry(g, f3.geometry());
    require(m.freq_dim == g.dim, "symbol frequency dimension does not match the grid dimension");
    const Field& a = f1.spectrum();
    const Field& b = f2.spectrum();
    const Field& c = f3.spectrum();
    const int d = g.dim;
    const Eigen::Index cells = g.size();
    std::vector<double> xi(static_cast<std::size_t>(2 * d));
    int n1[2] = {0, 0}, n2[2] = {0, 0}, n3[2] = {0, 0};
    cplx total = 0.0;
    for (Eigen::Index i = 0; i < cells; ++i) {
        lattice_point(i, g, n1);
        const cplx a1 = coefficient(a, n1, g);
        if (a1 == 0.0) {
            continue;
        }
        for (Eigen::Index j = 0; j < cells; ++j) {
            lattice_point(j, g, n2);
            for (int k = 0; k < d; ++k) {
                n3[k] = -(n1[k] + n2[k]);
                xi[k] = n1[k] / g.length;
                xi[d + k] = n2[k] / g.length;
            }
            total += m(std::span<const double>(xi)) * a1 * coefficient(b, n2, g) * coefficient(c, n3, g);
        }
    }
    (void)lattice_flat;
    return total * g.measure();
}

} // namespace biparam
