#pragma once

// BPGF binary grid files and the CSV tables every harness emits.

#include <string>
#include <vector>

#include "biparam/grid.hpp"

namespace biparam {

/// "BPGF", uint32 dim, uint32 N, float64 L (little-endian), then N^dim interleaved re/im doubles, row-major.
void write_bpgf(const std::string& path, const GridFunction& f);
GridFunction read_bpgf(const std::string& path);

/// Shortest round-trip text for a double.
std::string format_double(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    std::string to_string() const;
};

void write_csv(const std::string& path, const CsvTable& table);
/// Parses a plain comma-separated file (no quoting); throws InvalidArgument on ragged rows.
CsvTable read_csv(const std::string& path);

/// index, re, im (flat row-major index).
CsvTable grid_function_csv(const GridFunction& f);

/// Run-length encoding of the true cells of a mask: row, start, length.
CsvTable mask_rle_csv(const Mask& mask);
Mask mask_from_rle(const CsvTable& table, Eigen::Index rows, Eigen::Index cols);

/// Minimal gnuplot script plotting column y against column x of a CSV file.
std::string plot_script(const std::string& csv_path, const std::string& x_column, const std::string& y_column,
                        bool log_x);

} // namespace biparam
