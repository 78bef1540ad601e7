#include "biparam/stopping.hpp"

#include <map>

#include "biparam/maximal.hpp"

namespace biparam {

Eigen::ArrayXd envelope(const GridGeometry& geometry, const Tile1D& tile, double decay)
{
    require(geometry.dim == 1, "envelope expects a 1D grid");
    const double domain = geometry.length;
    const double width = tile.length(domain);
    const double a = tile.left(domain);
    const double b = a + width;
    Eigen::ArrayXd out(geometry.n);
    for (int i = 0; i < geometry.n; ++i) {
        const double x = i * geometry.spacing();
        double dist = 0.0;
        if (x < a || x >= b) {
            dist = std::min(std::fmod(a - x + domain, domain), std::fmod(x - b + domain, domain));
        }
        out(i) = std::pow(1.0 + dist / width, -decay);
    }
    return out;
}

namespace {

// Membership of tiles by scale, for descendant enumeration.
class TileIndex {
public:
    explicit TileIndex(const std::vector<Tile1D>& tiles)
    {
        for (const auto& t : tiles) {
            insert(t);
        }
    }

    void insert(const Tile1D& t)
    {
        require(t.k >= 0 && t.k < 30 && t.l >= 0 && t.l < (1 << t.k), "tile out of range");
        if (static_cast<int>(present_.size()) <= t.k) {
            present_.resize(static_cast<std::size_t>(t.k) + 1);
        }
        auto& row = present_[static_cast<std::size_t>(t.k)];
        if (row.empty()) {
            row.assign(static_cast<std::size_t>(1) << t.k, 0);
        }
        row[static_cast<std::size_t>(t.l)] = 1;
    }

    void erase(const Tile1D& t) { present_[static_cast<std::size_t>(t.k)][static_cast<std::size_t>(t.l)] = 0; }

    bool contains(const Tile1D& t) const
    {
        return t.k < static_cast<int>(present_.size()) && !present_[static_cast<std::size_t>(t.k)].empty() &&
               present_[static_cast<std::size_t>(t.k)][static_cast<std::size_t>(t.l)] != 0;
    }

    /// Calls fn on every present tile whose interval lies inside I_P (P included).
    template <class Fn>
    void for_each_below(const Tile1D& p, Fn&& fn) const
    {
        for (int k = p.k; k < static_cast<int>(present_.size()); ++k) {
            const auto& row = present_[static_cast<std::size_t>(k)];
            if (row.empty()) {
                continue;
            }
            const int span = 1 << (k - p.k);
            for (int l = p.l * span; l < (p.l + 1) * span; ++l) {
                if (row[static_cast<std::size_t>(l)]) {
                    fn(Tile1D{k, l});
                }
            }
        }
    }

private:
    std::vector<std::vector<char>> present_;
};

void check_tiles(const CoefficientTable& table, const std::vector<Tile1D>& tiles)
{
    for (const auto& t : tiles) {
        require(t.k >= 0 && t.k <= table.k_max && t.l >= 0 && t.l < (1 << t.k),
                "tile outside the coefficient table");
    }
}

// Weak-L^1 norm of the local square function of the indexed tiles below P (not normalised).
double local_square_weak(const CoefficientTable& table, const TileIndex& index, const Tile1D& p)
{
    const GridGeometry& g = table.geometry;
    const Eigen::Index cells = p.cell_count(g.n);
    const Eigen::Index origin = p.first_cell(g.n);
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(cells);
    index.for_each_below(p, [&](const Tile1D& q) {
        const double v = std::norm(table(q)) / q.length(g.length);
        acc.segment(q.first_cell(g.n) - origin, q.cell_count(g.n)) += v;
    });
    return weak_l1_norm(acc.sqrt(), g.spacing());
}

double criterion(const CoefficientTable& table, const TileIndex& index, const Tile1D& p)
{
    const double width = p.length(table.geometry.length);
    if (table.j == 1) {
        return std::abs(table(p)) / std::sqrt(width);
    }
    return local_square_weak(table, index, p) / width;
}

double envelope_average(const CoefficientTable& table, const Tile1D& p)
{
    const GridGeometry& g = table.geometry;
    const Eigen::ArrayXd mag = table.source->samples().col(0).abs();
    return (mag * envelope(g, p)).sum() * g.spacing() / p.length(g.length);
}

// Weak-L^1 norm of a sum of indicators of disjoint intervals with heights e.
double disjoint_weak(std::vector<std::pair<double, double>> height_width)
{
    std::sort(height_width.begin(), height_width.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double measure = 0.0, best = 0.0;
    for (const auto& [h, w] : height_width) {
        measure += w;
        best = std::max(best, h * measure);
    }
    return best;
}

} // namespace

double size_criterion(const CoefficientTable& table, const std::vector<Tile1D>& tiles, const Tile1D& tile)
{
    check_tiles(table, tiles);
    TileIndex index(tiles);
    return criterion(table, index, tile);
}

SizeEnergy size_energy(const CoefficientTable& table, const std::vector<Tile1D>& tiles)
{
    check_tiles(table, tiles);
    SizeEnergy out;
    if (tiles.empty()) {
        return out;
    }
    const GridGeometry& g = table.geometry;
    TileIndex index(tiles);
    for (const auto& p : tiles) {
        out.size = std::max(out.size, criterion(table, index, p));
        double sum = 0.0;
        index.for_each_below(p, [&](const Tile1D& q) { sum += std::norm(table(q)); });
        out.jn_size = std::max(out.jn_size, std::sqrt(sum / p.length(g.length)));
    }
    // Energy: add tiles by decreasing envelope average, tracking the union measure in cells.
    std::vector<std::pair<double, Tile1D>> weighted;
    for (const auto& p : tiles) {
        weighted.emplace_back(envelope_average(table, p), p);
    }
    std::sort(weighted.begin(), weighted.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<char> covered(static_cast<std::size_t>(g.n), 0);
    Eigen::Index count = 0;
    for (const auto& [e, p] : weighted) {
        for (Eigen::Index c = p.first_cell(g.n); c < p.first_cell(g.n) + p.cell_count(g.n); ++c) {
            if (!covered[static_cast<std::size_t>(c)]) {
                covered[static_cast<std::size_t>(c)] = 1;
                ++count;
            }
        }
        out.energy = std::max(out.energy, e * static_cast<double>(count) * g.spacing());
    }
    return out;
}

double energy_exhaustive(const CoefficientTable& table, const std::vector<Tile1D>& tiles)
{
    check_tiles(table, tiles);
    require(tiles.size() <= 16, "exhaustive energy search is limited to 16 tiles");
    const double domain = table.geometry.length;
    std::vector<double> e;
    for (const auto& p : tiles) {
        e.push_back(envelope_average(table, p));
    }
    const std::size_t m = tiles.size();
    double best = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        bool disjoint = true;
        std::vector<std::pair<double, double>> hw;
        for (std::size_t a = 0; a < m && disjoint; ++a) {
            if (!(mask >> a & 1u)) {
                continue;
            }
            for (std::size_t b = a + 1; b < m; ++b) {
                if ((mask >> b & 1u) && (tiles[a].inside(tiles[b]) || tiles[b].inside(tiles[a]))) {
                    disjoint = false;
                    break;
                }
            }
            hw.emplace_back(e[a], tiles[a].length(domain));
        }
        if (disjoint) {
            best = std::max(best, disjoint_weak(std::move(hw)));
        }
    }
    return best;
}

CzCheck cz_check(const CoefficientTable& table, const Tile1D& tile)
{
    require(table.j == 2 || table.j == 3, "cz_check needs a type-2 or type-3 table");
    require(tile.k <= table.k_max, "tile outside the coefficient table");
    const GridGeometry& g = table.geometry;
    TileIndex index(enumerate_tiles(tile.k, table.k_max));
    CzCheck out;
    out.lhs = local_square_weak(table, index, tile);
    out.rhs = (table.source->samples().col(0).abs() * envelope(g, tile)).sum() * g.spacing();
    return out;
}

StoppingStep stopping_decompose(const CoefficientTable& table, const std::vector<Tile1D>& tiles, double energy_ref,
                                int n)
{
    check_tiles(table, tiles);
    StoppingStep step;
    step.threshold = std::ldexp(energy_ref, -n - 1);
    std::vector<Tile1D> order = tiles;
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    TileIndex remaining(order);
    // Longest intervals first; removing a tree only lowers the criteria of its ancestors, which
    // were already rejected, so one ordered pass realises the greedy rule.
    for (const auto& p : order) {
        if (!remaining.contains(p) || !(criterion(table, remaining, p) > step.threshold)) {
            continue;
        }
        Tree tree{p, {}};
        remaining.for_each_below(p, [&](const Tile1D& q) { tree.members.push_back(q); });
        for (const auto& q : tree.members) {
            remaining.erase(q);
        }
        std::sort(tree.members.begin(), tree.members.end());
        step.trees.push_back(std::move(tree));
    }
    for (const auto& p : order) {
        if (remaining.contains(p)) {
            step.residual.push_back(p);
        }
    }
    return step;
}

StoppingDecomposition stopping_partition(const CoefficientTable& table, const std::vector<Tile1D>& tiles)
{
    const SizeEnergy se = size_energy(table, tiles);
    StoppingDecomposition out;
    out.size = se.size;
    out.energy = se.energy;
    if (tiles.empty()) {
        return out;
    }
    const double domain = table.geometry.length;
    std::vector<Tile1D> remaining = tiles;
    std::sort(remaining.begin(), remaining.end());
    remaining.erase(std::unique(remaining.begin(), remaining.end()), remaining.end());
    int n = 0;
    bool started = false;
    if (se.size > 0.0 && se.energy > 0.0) {
        n = static_cast<int>(std::floor(std::log2(se.energy / se.size)));
        started = true;
        for (int guard = 0; guard < 4000 && !remaining.empty(); ++guard, ++n) {
            TileIndex index(remaining);
            bool positive = false;
            for (const auto& p : remaining) {
                if (criterion(table, index, p) > 0.0) {
                    positive = true;
                    break;
                }
            }
            if (!positive) {
                break;
            }
            StoppingStep step = stopping_decompose(table, remaining, se.energy, n);
            if (!step.trees.empty()) {
                Stratum s;
                s.n = n;
                std::vector<Tile1D> members;
                for (const auto& t : step.trees) {
                    s.tree_measure += t.top.length(domain);
                    members.insert(members.end(), t.members.begin(), t.members.end());
                }
                s.size = size_energy(table, members).size;
                s.trees = std::move(step.trees);
                out.strata.push_back(std::move(s));
            }
            remaining = std::move(step.residual);
        }
    }
    if (!remaining.empty()) {
        // Zero-criterion leftovers: one tree per maximal interval.
        Stratum s;
        s.cleanup = true;
        TileIndex index(remaining);
        std::vector<char> taken(remaining.size(), 0);
        for (std::size_t a = 0; a < remaining.size(); ++a) {
            if (taken[a]) {
                continue;
            }
            Tree tree{remaining[a], {}};
            for (std::size_t b = a; b < remaining.size(); ++b) {
                if (!taken[b] && remaining[b].inside(remaining[a])) {
                    taken[b] = 1;
                    tree.members.push_back(remaining[b]);
                }
            }
            s.tree_measure += tree.top.length(domain);
            s.trees.push_back(std::move(tree));
        }
        const int fit = static_cast<int>(std::ceil(std::log2(s.tree_measure)));
        s.n = started ? std::max(n, fit) : fit;
        if (!out.strata.empty()) {
            s.n = std::max(s.n, out.strata.back().n + 1);
        }
        out.strata.push_back(std::move(s));
    }
    for (const auto& s : out.strata) {
        out.c_stop = std::max(out.c_stop, std::ldexp(s.tree_measure, -s.n));
    }
    return out;
}

CsvTable StoppingDecomposition::to_csv(double domain) const
{
    CsvTable t;
    t.header = {"stratum_n", "tree_id", "left", "right", "member_count"};
    for (const auto& s : strata) {
        int id = 0;
        for (const auto& tree : s.trees) {
            const double left = tree.top.left(domain);
            t.add_row({std::to_string(s.n), std::to_string(id++), format_double(left),
                       format_double(left + tree.top.length(domain)), std::to_string(tree.members.size())});
        }
    }
    return t;
}

UseEstimate size_energy_estimate(const std::array<const CoefficientTable*, 3>& tables,
                                 const std::vector<Tile1D>& tiles, const std::array<double, 3>& theta)
{
    double total_theta = 0.0;
    for (int j = 0; j < 3; ++j) {
        require(theta[j] >= 0.0 && theta[j] < 1.0, "theta_j must lie in [0, 1)");
        total_theta += theta[j];
        require(tables[j] != nullptr && tables[j]->j == j + 1, "table j must hold type-j coefficients");
        require(tables[j]->geometry == tables[0]->geometry, "tables live on different grids");
    }
    require(std::abs(total_theta - 1.0) <= 1e-12, "theta_1 + theta_2 + theta_3 must equal 1");
    UseEstimate out;
    if (tiles.empty()) {
        return out;
    }
    const double domain = tables[0]->geometry.length;
    for (const auto& p : tiles) {
        out.lhs += std::abs((*tables[0])(p)) * std::abs((*tables[1])(p)) * std::abs((*tables[2])(p)) /
                   std::sqrt(p.length(domain));
    }
    out.rhs = 1.0;
    for (int j = 0; j < 3; ++j) {
        out.parts[j] = size_energy(*tables[j], tiles);
        out.rhs *= std::pow(out.parts[j].size, 1.0 - theta[j]) * std::pow(out.parts[j].energy, theta[j]);
    }
    out.ratio = out.lhs == 0.0 ? 0.0 : (out.rhs == 0.0 ? INFINITY : out.lhs / out.rhs);
    return out;
}

CsvTable WeakTypeReport::to_csv() const
{
    CsvTable t;
    t.header = {"d", "count", "size1", "size2", "size3", "energy1", "energy2", "energy3", "form", "use_bound"};
    for (const auto& s : strata) {
        t.add_row({std::to_string(s.d), std::to_string(s.count), format_double(s.sizes[0]), format_double(s.sizes[1]),
                   format_double(s.sizes[2]), format_double(s.energies[0]), format_double(s.energies[1]),
                   format_double(s.energies[2]), format_double(s.form), format_double(s.use_bound)});
    }
    return t;
}

WeakTypeReport weak_type_driver(const GridFunction& f1, const GridFunction& f2, const Mask& e3,
                                const std::vector<Tile1D>& tiles, double c)
{
    const GridGeometry& g = f1.geometry();
    require_same_geometry(g, f2.geometry());
    require(g.dim == 1, "weak_type_driver expects 1D functions");
    require(c > 0.0, "threshold C must be positive");
    require(e3.rows() == g.n && e3.cols() == 1, "E3 mask does not match the grid");
    require(std::abs(mask_measure(g, e3) - 1.0) <= 1e-9, "E3 must have measure 1");
    for (const auto* f : {&f1, &f2}) {
        const double norm = quasi_norm(*f, 1.0);
        require(norm == 0.0 || std::abs(norm - 1.0) <= 1e-9, "f1 and f2 must have L^1 norm 1 (or vanish)");
    }
    WeakTypeReport report;
    report.c_threshold = c;
    report.u = (hl_maximal(f1) > c) || (hl_maximal(f2) > c);
    report.measure_u = mask_measure(g, report.u);
    if (!(report.measure_u < 0.5)) {
        throw NumericError("C = " + format_double(c) + " too small: |U| = " + format_double(report.measure_u));
    }
    const Mask e3p = e3 && !report.u;
    report.measure_e3_prime = mask_measure(g, e3p);
    const GridFunction f3 = indicator(g, e3p);

    int k_max = 0;
    for (const auto& t : tiles) {
        k_max = std::max(k_max, t.k);
    }
    const CoefficientTable t1 = tile_coefficients(f1, 1, k_max);
    const CoefficientTable t2 = tile_coefficients(f2, 2, k_max);
    const CoefficientTable t3 = tile_coefficients(f3, 3, k_max);

    // Stratify by distance to the complement of U.
    std::vector<double> outside;
    for (int i = 0; i < g.n; ++i) {
        if (!report.u(i, 0)) {
            outside.push_back(i * g.spacing());
        }
    }
    std::map<int, std::vector<Tile1D>> by_d;
    for (const auto& p : tiles) {
        const double width = p.length(g.length);
        const double a = p.left(g.length);
        double dist = INFINITY;
        for (double x : outside) {
            double d = 0.0;
            if (x < a || x >= a + width) {
                d = std::min(std::fmod(a - x + g.length, g.length), std::fmod(x - a - width + g.length, g.length));
            }
            dist = std::min(dist, d);
        }
        int d = 0;
        if (std::isinf(dist)) {
            d = 64;
        } else if (dist > 0.0) {
            d = std::max(0, static_cast<int>(std::floor(std::log2(dist / width))));
        }
        by_d[d].push_back(p);
    }
    for (auto& [d, set] : by_d) {
        WeakTypeStratum s;
        s.d = d;
        s.count = set.size();
        const std::array<const CoefficientTable*, 3> tabs{&t1, &t2, &t3};
        const UseEstimate use = size_energy_estimate(tabs, set, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        for (int j = 0; j < 3; ++j) {
            s.sizes[j] = use.parts[j].size;
            s.energies[j] = use.parts[j].energy;
        }
        s.form = use.lhs;
        s.use_bound = use.rhs;
        report.total += s.form;
        report.f3_decay_constant = std::max(report.f3_decay_constant, std::ldexp(s.sizes[2], 4 * d));
        report.strata.push_back(s);
    }
    return report;
}

} // namespace biparam
