#include "biparam/stratify.hpp"

#include <map>
#include <set>

#include "biparam/rng.hpp"

namespace biparam {

CellRect cell_rect(const BiTile& tile, int n)
{
    return CellRect{tile.first.first_cell(n), tile.second.first_cell(n), tile.first.cell_count(n),
                    tile.second.cell_count(n)};
}

namespace {

// Cell counts of a mask over rectangles via a summed-area table.
class MaskCounter {
public:
    explicit MaskCounter(const Mask& m) : sums_(Eigen::Array<long long, Eigen::Dynamic, Eigen::Dynamic>::Zero(m.rows() + 1, m.cols() + 1))
    {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                sums_(r + 1, c + 1) = (m(r, c) ? 1 : 0) + sums_(r, c + 1) + sums_(r + 1, c) - sums_(r, c);
            }
        }
    }

    long long count(const CellRect& q) const
    {
        return sums_(q.r0 + q.rows, q.c0 + q.cols) - sums_(q.r0, q.c0 + q.cols) - sums_(q.r0 + q.rows, q.c0) +
               sums_(q.r0, q.c0);
    }

private:
    Eigen::Array<long long, Eigen::Dynamic, Eigen::Dynamic> sums_;
};

struct Ladder {
    int start = 0;
    std::vector<Mask> omega;   // omega[i] = Omega_{start + i}
    std::vector<int> level;    // per tile
};

Ladder run_ladder(const RealField& values, double c, int start, const std::vector<CellRect>& rects,
                  const std::string& failure)
{
    Ladder ladder;
    ladder.start = start;
    ladder.level.assign(rects.size(), start + 1);
    std::vector<char> selected(rects.size(), 0);
    const Mask positive = values > 0.0;
    const double min_positive = positive.any() ? (positive.select(values, INFINITY)).minCoeff() : INFINITY;

    ladder.omega.push_back(values > c * std::ldexp(1.0, -start));
    {
        const MaskCounter counter(ladder.omega.back());
        for (const auto& q : rects) {
            require(100 * counter.count(q) < q.area(), failure);
        }
    }
    std::size_t left = rects.size();
    for (int n = start + 1; left > 0; ++n) {
        const double threshold = c * std::ldexp(1.0, -n);
        ladder.omega.push_back(values > threshold);
        const MaskCounter counter(ladder.omega.back());
        for (std::size_t i = 0; i < rects.size(); ++i) {
            if (!selected[i] && 100 * counter.count(rects[i]) >= rects[i].area()) {
                selected[i] = 1;
                ladder.level[i] = n;
                --left;
            }
        }
        if (threshold < min_positive || n > start + 4000) {
            break;  // later level sets no longer change
        }
    }
    return ladder;
}

const Mask& omega_at(const Ladder& ladder, int n)
{
    return ladder.omega.at(static_cast<std::size_t>(n - ladder.start));
}

} // namespace

StratifyResult stratify_levels(const BiCoefficientTable& t1, const BiCoefficientTable& t2,
                               const BiCoefficientTable& t3, const std::vector<BiTile>& tiles, double c,
                               int n_start)
{
    require(c > 0.0, "threshold C must be positive");
    require(n_start >= 0, "N_start must be nonnegative");
    const GridGeometry& g = t1.geometry;
    std::vector<CellRect> rects;
    for (const auto& t : tiles) {
        require(t.first.k <= t1.k_max && t.second.k <= t1.k_max, "bi-tile outside the coefficient tables");
        rects.push_back(cell_rect(t, g.n));
    }
    const RealField ms = hybrid_square(t1, HybridMode::MS).values;
    const RealField sm = hybrid_square(t2, HybridMode::SM).values;
    const RealField ss = hybrid_square(t3, HybridMode::SS).values;
    const Ladder a = run_ladder(ms, c, 0, rects, "C too small: a bi-tile already meets {MS > C} in 1/100 of its area");
    const Ladder b = run_ladder(sm, c, 0, rects, "C too small: a bi-tile already meets {SM > C} in 1/100 of its area");
    const Ladder s = run_ladder(ss, c, -n_start, rects,
                                "N_start too small: a bi-tile already meets {SS > C 2^N} in 1/100 of its area");

    StratifyResult out;
    out.min_margin = std::numeric_limits<long long>::max();
    // Certificate per distinct (n1, n2, n3).
    std::map<std::array<int, 3>, std::unique_ptr<MaskCounter>> good;
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        const std::array<int, 3> lv{a.level[i], b.level[i], s.level[i]};
        out.levels.push_back(lv);
        auto& counter = good[lv];
        if (!counter) {
            const Mask m = !omega_at(a, lv[0] - 1) && !omega_at(b, lv[1] - 1) && !omega_at(s, lv[2] - 1);
            counter = std::make_unique<MaskCounter>(m);
        }
        const long long margin = 100 * counter->count(rects[i]) - 97 * rects[i].area();
        out.min_margin = std::min(out.min_margin, margin);
    }
    if (tiles.empty()) {
        out.min_margin = 0;
    }
    out.certificate = tiles.empty() || out.min_margin > 0;

    // Growth of the union of intervals of each first-ladder stratum.
    int top = 0;
    for (int v : a.level) {
        top = std::max(top, v);
    }
    for (int n1 = 1; n1 <= top; ++n1) {
        Mask cover = Mask::Constant(g.n, g.n, false);
        for (std::size_t i = 0; i < tiles.size(); ++i) {
            if (a.level[i] == n1) {
                cover.block(rects[i].r0, rects[i].c0, rects[i].rows, rects[i].cols).setConstant(true);
            }
        }
        const double measure = mask_measure(g, cover);
        out.first_ladder_union.push_back(measure);
        out.first_ladder_omega.push_back(mask_measure(g, omega_at(a, std::min<int>(n1, a.start + static_cast<int>(a.omega.size()) - 1))));
        out.growth_constant = std::max(out.growth_constant, measure / std::pow(2.0, out.growth_exponent * n1));
    }
    return out;
}

CsvTable StratifyResult::to_csv(const std::vector<BiTile>& tiles) const
{
    CsvTable t;
    t.header = {"k1", "l1", "k2", "l2", "n1", "n2", "n3"};
    for (std::size_t i = 0; i < tiles.size() && i < levels.size(); ++i) {
        const auto& p = tiles[i];
        t.add_row({std::to_string(p.first.k), std::to_string(p.first.l), std::to_string(p.second.k),
                   std::to_string(p.second.l), std::to_string(levels[i][0]), std::to_string(levels[i][1]),
                   std::to_string(levels[i][2])});
    }
    return t;
}

namespace {

bool all_in(const Mask& m, const CellRect& q)
{
    return m.block(q.r0, q.c0, q.rows, q.cols).all();
}

// Parent of a dyadic cell interval [start, start + len) on an axis of n cells.
bool parent(Eigen::Index& start, Eigen::Index& len, Eigen::Index n)
{
    if (2 * len > n) {
        return false;
    }
    len *= 2;
    start = (start / len) * len;
    return true;
}

// Cells covering the centred 2^d dilate of [start, start + len); false if it leaves [0, n).
bool dilate_cells(Eigen::Index start, Eigen::Index len, int d, Eigen::Index n, Eigen::Index& lo, Eigen::Index& count)
{
    const double centre = start + 0.5 * len;
    const double half = std::ldexp(0.5 * len, d);
    const double a = centre - half, b = centre + half;
    if (a < 0.0 || b > static_cast<double>(n)) {
        return false;
    }
    lo = static_cast<Eigen::Index>(std::floor(a));
    count = static_cast<Eigen::Index>(std::ceil(b)) - lo;
    return true;
}

} // namespace

JourneResult journe_maximal(const GridGeometry& geometry, const std::vector<BiTile>& tiles, const Mask& omega,
                            const Mask& omega_tilde, double epsilon)
{
    require(geometry.dim == 2, "journe_maximal needs a 2D grid");
    const Eigen::Index n = geometry.n;
    require(omega.rows() == n && omega.cols() == n && omega_tilde.rows() == n && omega_tilde.cols() == n,
            "masks do not match the grid");
    require((!omega || omega_tilde).all(), "Omega must lie inside Omega~");
    require(epsilon > 0.0, "epsilon must be positive");
    JourneResult out;
    std::map<CellRect, std::size_t> seen;
    for (const auto& t : tiles) {
        CellRect q = cell_rect(t, geometry.n);
        require(all_in(omega, q), "bi-tile rectangle not contained in Omega");
        // Grow along each axis in turn until neither parent stays inside Omega.
        bool grown = true;
        while (grown) {
            grown = false;
            for (int axis = 0; axis < 2; ++axis) {
                while (true) {
                    CellRect next = q;
                    const bool ok = axis == 0 ? parent(next.r0, next.rows, n) : parent(next.c0, next.cols, n);
                    if (!ok || !all_in(omega, next)) {
                        break;
                    }
                    q = next;
                    grown = true;
                }
            }
        }
        auto it = seen.find(q);
        if (it == seen.end()) {
            int d = 0;
            while (true) {
                CellRect big;
                if (!dilate_cells(q.r0, q.rows, d + 1, n, big.r0, big.rows) ||
                    !dilate_cells(q.c0, q.cols, d + 1, n, big.c0, big.cols) || !all_in(omega_tilde, big)) {
                    break;
                }
                ++d;
            }
            it = seen.emplace(q, out.maximal.size()).first;
            out.maximal.push_back({q, d});
        }
        out.assignment.push_back(it->second);
    }
    const double cell = geometry.cell_measure();
    const double omega_measure = mask_measure(geometry, omega);
    for (const auto& r : out.maximal) {
        if (static_cast<int>(out.ratio_by_d.size()) <= r.d) {
            out.ratio_by_d.resize(static_cast<std::size_t>(r.d) + 1, 0.0);
        }
        out.ratio_by_d[static_cast<std::size_t>(r.d)] += static_cast<double>(r.rect.area()) * cell;
    }
    for (std::size_t d = 0; d < out.ratio_by_d.size(); ++d) {
        out.ratio_by_d[d] = omega_measure > 0.0
                                ? out.ratio_by_d[d] / (std::pow(2.0, epsilon * static_cast<double>(d)) * omega_measure)
                                : 0.0;
        out.c_j = std::max(out.c_j, out.ratio_by_d[d]);
    }
    return out;
}

CsvTable JourneResult::to_csv(const GridGeometry& geometry) const
{
    CsvTable t;
    t.header = {"x0", "x1", "y0", "y1", "d"};
    const double h = geometry.spacing();
    for (const auto& r : maximal) {
        t.add_row({format_double(r.rect.r0 * h), format_double((r.rect.r0 + r.rect.rows) * h),
                   format_double(r.rect.c0 * h), format_double((r.rect.c0 + r.rect.cols) * h), std::to_string(r.d)});
    }
    return t;
}

JourneInstance random_journe_instance(int n, std::uint64_t seed, int rectangles, int depth)
{
    JourneInstance inst;
    inst.geometry = GridGeometry{2, n, 1.0};
    validate(inst.geometry);
    require(rectangles >= 1 && depth >= 0, "bad Journe instance parameters");
    Rng rng(seed);
    const int levels = log2_exact(n);
    inst.omega = Mask::Constant(n, n, false);
    const int count = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(rectangles)));
    std::set<BiTile> tiles;
    for (int i = 0; i < count; ++i) {
        // Generators of side 2^{-1} .. 2^{-4} of the domain per axis.
        const int k1 = 1 + static_cast<int>(rng.below(4));
        const int k2 = 1 + static_cast<int>(rng.below(4));
        const int l1 = static_cast<int>(rng.below(static_cast<std::uint64_t>(1) << k1));
        const int l2 = static_cast<int>(rng.below(static_cast<std::uint64_t>(1) << k2));
        const BiTile gen{{k1, l1}, {k2, l2}};
        const CellRect q = cell_rect(gen, n);
        inst.omega.block(q.r0, q.c0, q.rows, q.cols).setConstant(true);
        for (int a = 0; a <= depth && k1 + a <= levels; ++a) {
            for (int b = 0; b <= depth && k2 + b <= levels; ++b) {
                for (int u = 0; u < (1 << a); ++u) {
                    for (int v = 0; v < (1 << b); ++v) {
                        tiles.insert(BiTile{{k1 + a, (l1 << a) + u}, {k2 + b, (l2 << b) + v}});
                    }
                }
            }
        }
    }
    inst.tiles.assign(tiles.begin(), tiles.end());
    RealField ones = RealField::Zero(n, n);
    ones = inst.omega.select(RealField::Ones(n, n), ones);
    inst.omega_tilde = (strong_maximal(inst.geometry, ones) > 0.5 + 1e-12) || inst.omega;
    return inst;
}

StratifyParameters stratify_parameters(const BiCoefficientTable& t1, const BiCoefficientTable& t2,
                                       const BiCoefficientTable& t3, double margin)
{
    require(margin > 1.0, "threshold margin must exceed 1");
    StratifyParameters out;
    const double ms = hybrid_square(t1, HybridMode::MS).values.maxCoeff();
    const double sm = hybrid_square(t2, HybridMode::SM).values.maxCoeff();
    const double ss = hybrid_square(t3, HybridMode::SS).values.maxCoeff();
    out.c = margin * std::max(ms, sm);
    require(out.c > 0.0, "all three tables vanish");
    out.n_start = std::max(0, static_cast<int>(std::ceil(std::log2(margin * ss / out.c))));
    return out;
}

} // namespace biparam
