#include "biparam/tiles.hpp"

#include <numbers>

namespace biparam {

Band band_for_slot(int j)
{
    require(j >= 1 && j <= 3, "tile slot must be 1, 2 or 3");
    return j == 1 ? Band::low : (j == 2 ? Band::up : Band::down);
}

std::pair<Band, Band> bitile_bands(int j)
{
    require(j >= 1 && j <= 3, "bi-tile type must be 1, 2 or 3");
    if (j == 1) {
        return {Band::low, Band::up};
    }
    if (j == 2) {
        return {Band::up, Band::low};
    }
    return {Band::down, Band::down};
}

int max_tile_scale(int n)
{
    int k = 0;
    while (std::ldexp(7.0, k + 1) <= 2.0 * n) {  // 2^{k+1} * 7/4 <= N/2
        ++k;
    }
    return k;
}

namespace {

double bump(double s)
{
    return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0;
}

void band_shape(Band band, double& centre, double& half_width)
{
    switch (band) {
    case Band::low:
        centre = 0.0;
        half_width = 0.25;
        break;
    case Band::up:
        centre = 1.0;
        half_width = 0.25;
        break;
    case Band::down:
        centre = -1.0;
        half_width = 0.75;
        break;
    }
}

// Unit-normalised, unmodulated band profile b(n) / sqrt(L sum b^2).
Eigen::ArrayXd band_profile(int n, double length, int k, Band band)
{
    require(k >= 0 && k <= max_tile_scale(n), "tile scale out of range for this grid");
    double centre = 0.0, half = 0.0;
    band_shape(band, centre, half);
    const double s = std::ldexp(1.0, k);
    Eigen::ArrayXd b(n);
    for (int i = 0; i < n; ++i) {
        b(i) = bump((frequency_index(i, n) - centre * s) / (half * s));
    }
    const double mass = length * b.square().sum();
    require(mass > 0.0, "empty packet band");
    return b / std::sqrt(mass);
}

// conj of the packet spectra of every tile at scale k, as rows: A(l, i).
Eigen::MatrixXcd analysis_matrix(int n, double length, int k, Band band)
{
    const Eigen::ArrayXd b = band_profile(n, length, k, band);
    const int count = 1 << k;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(count, n);
    for (int i = 0; i < n; ++i) {
        if (b(i) == 0.0) {
            continue;
        }
        const double nu = frequency_index(i, n);
        for (int l = 0; l < count; ++l) {
            const double phase = 2.0 * std::numbers::pi * nu * (l + 0.5) / count;
            a(l, i) = b(i) * cplx(std::cos(phase), std::sin(phase));
        }
    }
    return a;
}

} // namespace

Eigen::ArrayXcd packet_spectrum(int n, double length, const Tile1D& tile, Band band)
{
    require(tile.l >= 0 && tile.l < (1 << tile.k), "tile translation out of range");
    const Eigen::ArrayXd b = band_profile(n, length, tile.k, band);
    const double x0 = length * std::ldexp(tile.l + 0.5, -tile.k);
    Eigen::ArrayXcd out(n);
    for (int i = 0; i < n; ++i) {
        const double phase = -2.0 * std::numbers::pi * frequency_index(i, n) * x0 / length;
        out(i) = b(i) * cplx(std::cos(phase), std::sin(phase));
    }
    return out;
}

GridFunction wave_packet(const GridGeometry& geometry, const Tile1D& tile, Band band)
{
    validate(geometry);
    require(geometry.dim == 1, "1D tile on a 2D grid");
    Field spec(geometry.n, 1);
    spec.col(0) = packet_spectrum(geometry.n, geometry.length, tile, band);
    return from_spectrum(geometry, spec);
}

GridFunction wave_packet(const GridGeometry& geometry, const BiTile& tile, int j)
{
    validate(geometry);
    require(geometry.dim == 2, "bi-tile packet needs a 2D grid");
    const auto [b1, b2] = bitile_bands(j);
    const Eigen::VectorXcd a = packet_spectrum(geometry.n, geometry.length, tile.first, b1).matrix();
    const Eigen::VectorXcd b = packet_spectrum(geometry.n, geometry.length, tile.second, b2).matrix();
    return from_spectrum(geometry, (a * b.transpose()).array());
}

std::vector<Tile1D> enumerate_tiles(int k_min, int k_max)
{
    require(k_min >= 0 && k_min <= k_max && k_max < 30, "bad scale range");
    std::vector<Tile1D> out;
    for (int k = k_min; k <= k_max; ++k) {
        for (int l = 0; l < (1 << k); ++l) {
            out.push_back({k, l});
        }
    }
    return out;
}

std::vector<BiTile> enumerate_bitiles(int k_min, int k_max)
{
    const auto axis = enumerate_tiles(k_min, k_max);
    std::vector<BiTile> out;
    out.reserve(axis.size() * axis.size());
    for (const auto& a : axis) {
        for (const auto& b : axis) {
            out.push_back({a, b});
        }
    }
    return out;
}

CoefficientTable tile_coefficients(const GridFunction& f, int j, int k_max)
{
    const GridGeometry& g = f.geometry();
    require(g.dim == 1, "tile_coefficients expects a 1D function");
    if (k_max < 0) {
        k_max = max_tile_scale(g.n);
    }
    require(k_max <= max_tile_scale(g.n), "tile scale out of range for this grid");
    CoefficientTable table;
    table.geometry = g;
    table.j = j;
    table.k_max = k_max;
    table.source = std::make_shared<const GridFunction>(f);
    const Band band = band_for_slot(j);
    const Eigen::VectorXcd fh = f.spectrum().col(0).matrix();
    for (int k = 0; k <= k_max; ++k) {
        const Eigen::MatrixXcd a = analysis_matrix(g.n, g.length, k, band);
        table.by_scale.push_back((g.length * (a * fh)).array());
    }
    return table;
}

BiCoefficientTable bitile_coefficients(const GridFunction& f, int j, int k_max)
{
    const GridGeometry& g = f.geometry();
    require(g.dim == 2, "bitile_coefficients expects a 2D function");
    if (k_max < 0) {
        k_max = max_tile_scale(g.n);
    }
    require(k_max <= max_tile_scale(g.n), "tile scale out of range for this grid");
    const auto [b1, b2] = bitile_bands(j);
    BiCoefficientTable table;
    table.geometry = g;
    table.j = j;
    table.k_max = k_max;
    const Eigen::MatrixXcd fh = f.spectrum().matrix();
    std::vector<Eigen::MatrixXcd> second;
    for (int k = 0; k <= k_max; ++k) {
        second.push_back(analysis_matrix(g.n, g.length, k, b2).transpose());
    }
    const double area = g.length * g.length;
    for (int k1 = 0; k1 <= k_max; ++k1) {
        const Eigen::MatrixXcd left = analysis_matrix(g.n, g.length, k1, b1) * fh;
        for (int k2 = 0; k2 <= k_max; ++k2) {
            table.blocks.push_back(area * (left * second[static_cast<std::size_t>(k2)]));
        }
    }
    return table;
}

BiCoefficientTable restrict_table(const BiCoefficientTable& table, const std::vector<BiTile>& keep)
{
    BiCoefficientTable out = table;
    for (auto& b : out.blocks) {
        b.setZero();
    }
    for (const auto& t : keep) {
        out.block(t.first.k, t.second.k)(t.first.l, t.second.l) = table(t);
    }
    return out;
}

namespace {

void require_same_index(const BiCoefficientTable& a, const BiCoefficientTable& b)
{
    require(a.geometry == b.geometry && a.k_max == b.k_max, "coefficient tables index different bi-tile sets");
}

} // namespace

double model_form(const BiCoefficientTable& a, const BiCoefficientTable& b, const BiCoefficientTable& c,
                  const std::vector<BiTile>& tiles)
{
    require_same_index(a, b);
    require_same_index(a, c);
    const double domain = a.geometry.length;
    double total = 0.0;
    for (const auto& t : tiles) {
        require(t.first.k <= a.k_max && t.second.k <= a.k_max, "bi-tile outside the table");
        total += std::abs(a(t)) * std::abs(b(t)) * std::abs(c(t)) / std::sqrt(t.measure(domain));
    }
    return total;
}

double model_form(const BiCoefficientTable& a, const BiCoefficientTable& b, const BiCoefficientTable& c)
{
    return model_form(a, b, c, enumerate_bitiles(0, a.k_max));
}

double bessel_ratio(const CoefficientTable& table)
{
    const double norm = quasi_norm(*table.source, 2.0);
    if (norm == 0.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& s : table.by_scale) {
        sum += s.abs2().sum();
    }
    return sum / (norm * norm);
}

double bessel_ratio(const BiCoefficientTable& table, const GridFunction& f)
{
    const double norm = quasi_norm(f, 2.0);
    if (norm == 0.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& b : table.blocks) {
        sum += b.cwiseAbs2().sum();
    }
    return sum / (norm * norm);
}

} // namespace biparam
