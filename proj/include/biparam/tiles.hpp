#pragma once

// Dyadic tiles, L^2-normalised wave packets and their coefficient tables.
//
// A 1D tile (k, l) has interval I = L 2^{-k} [l, l+1) and, depending on its band, frequency
// support 2^k [-1/4, 1/4] (low), 2^k [3/4, 5/4] (up) or 2^k [-7/4, -1/4] (down) in index units.
// Slot j = 1, 2, 3 of the one-parameter model uses low, up, down. Bi-tile types use
// (low, up), (up, low) and (down, down).

#include <memory>
#include <vector>

#include "biparam/grid.hpp"

namespace biparam {

enum class Band { low, up, down };

Band band_for_slot(int j);
/// Bands (first axis, second axis) of bi-tile type j.
std::pair<Band, Band> bitile_bands(int j);

struct Tile1D {
    int k = 0;
    int l = 0;

    double length(double domain) const { return std::ldexp(domain, -k); }
    double left(double domain) const { return l * length(domain); }
    /// Cells [first, first + count) of an N-point grid covered by the interval.
    Eigen::Index first_cell(int n) const { return static_cast<Eigen::Index>(l) * (n >> k); }
    Eigen::Index cell_count(int n) const { return n >> k; }
    /// True when this interval lies inside the other one.
    bool inside(const Tile1D& other) const { return k >= other.k && (l >> (k - other.k)) == other.l; }

    auto operator<=>(const Tile1D&) const = default;
};

struct BiTile {
    Tile1D first;
    Tile1D second;

    double measure(double domain) const { return first.length(domain) * second.length(domain); }
    auto operator<=>(const BiTile&) const = default;
};

/// Largest usable scale on an N-point axis: 2^k * 7/4 <= N/2.
int max_tile_scale(int n);

/// Fourier coefficients of the packet of tile (k, l) in a band (length-N array by array index).
Eigen::ArrayXcd packet_spectrum(int n, double length, const Tile1D& tile, Band band);

/// Packet samples on a 1D grid, or the tensor packet on a 2D grid.
GridFunction wave_packet(const GridGeometry& geometry, const Tile1D& tile, Band band);
GridFunction wave_packet(const GridGeometry& geometry, const BiTile& tile, int j);

/// All tiles with scales in [k_min, k_max], ordered by (k, l).
std::vector<Tile1D> enumerate_tiles(int k_min, int k_max);
std::vector<BiTile> enumerate_bitiles(int k_min, int k_max);

// ---------------------------------------------------------------------------------------------
// Coefficient tables

/// <f, Phi_P> for every 1D tile of scales 0..k_max in the band of slot j.
struct CoefficientTable {
    GridGeometry geometry;
    int j = 1;
    int k_max = 0;
    std::vector<Eigen::ArrayXcd> by_scale;   // by_scale[k](l)
    std::shared_ptr<const GridFunction> source;

    cplx operator()(const Tile1D& t) const { return by_scale.at(static_cast<std::size_t>(t.k))(t.l); }
};

CoefficientTable tile_coefficients(const GridFunction& f, int j, int k_max = -1);

/// <F, Phi'_P' (x) Phi''_P''> for every bi-tile of scales 0..k_max per axis, type j.
struct BiCoefficientTable {
    GridGeometry geometry;
    int j = 1;
    int k_max = 0;
    /// blocks[k' * (k_max + 1) + k''](l', l'')
    std::vector<Eigen::MatrixXcd> blocks;

    const Eigen::MatrixXcd& block(int k1, int k2) const
    {
        return blocks.at(static_cast<std::size_t>(k1 * (k_max + 1) + k2));
    }
    Eigen::MatrixXcd& block(int k1, int k2) { return blocks.at(static_cast<std::size_t>(k1 * (k_max + 1) + k2)); }
    cplx operator()(const BiTile& t) const { return block(t.first.k, t.second.k)(t.first.l, t.second.l); }
};

BiCoefficientTable bitile_coefficients(const GridFunction& f, int j, int k_max = -1);

/// Table with the same index set and every coefficient zero except on the given bi-tiles.
BiCoefficientTable restrict_table(const BiCoefficientTable& table, const std::vector<BiTile>& keep);

/// sum_P |I_P|^{-1/2} |a_P| |b_P| |c_P| over a bi-tile set.
double model_form(const BiCoefficientTable& a, const BiCoefficientTable& b, const BiCoefficientTable& c,
                  const std::vector<BiTile>& tiles);
/// Same sum over every bi-tile of the tables.
double model_form(const BiCoefficientTable& a, const BiCoefficientTable& b, const BiCoefficientTable& c);

/// Bessel ratio sum |coeff|^2 / ||f||_2^2 (0 for f = 0).
double bessel_ratio(const CoefficientTable& table);
double bessel_ratio(const BiCoefficientTable& table, const GridFunction& f);

} // namespace biparam
