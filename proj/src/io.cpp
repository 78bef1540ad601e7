#include "biparam/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace biparam {

static_assert(std::endian::native == std::endian::little, "BPGF I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::ostream& out, T value)
{
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& path)
{
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) {
        throw InvalidArgument("truncated BPGF file: " + path);
    }
    return value;
}

} // namespace

void write_bpgf(const std::string& path, const GridFunction& f)
{
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), "cannot open " + path + " for writing");
    const auto& g = f.geometry();
    out.write("BPGF", 4);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n));
    put<double>(out, g.length);
    const Field& v = f.values();
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        for (Eigen::Index c = 0; c < v.cols(); ++c) {
            put<double>(out, v(r, c).real());
            put<double>(out, v(r, c).imag());
        }
    }
    require(static_cast<bool>(out), "write failed: " + path);
}

GridFunction read_bpgf(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open " + path);
    char magic[4] = {};
    in.read(magic, 4);
    require(in && std::memcmp(magic, "BPGF", 4) == 0, "bad BPGF magic in " + path);
    GridGeometry g;
    g.dim = static_cast<int>(get<std::uint32_t>(in, path));
    g.n = static_cast<int>(get<std::uint32_t>(in, path));
    g.length = get<double>(in, path);
    validate(g);
    Field v(g.rows(), g.cols());
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        for (Eigen::Index c = 0; c < v.cols(); ++c) {
            const double re = get<double>(in, path);
            const double im = get<double>(in, path);
            v(r, c) = {re, im};
        }
    }
    return {g, std::move(v)};
}

std::string format_double(double value)
{
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return {buffer, result.ptr};
}

void CsvTable::add_row(std::vector<std::string> row)
{
    require(row.size() == header.size(), "CSV row width does not match header");
    rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const
{
    std::ostringstream out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i ? "," : "") << cells[i];
        }
        out << '\n';
    };
    line(header);
    for (const auto& row : rows) {
        line(row);
    }
    return out.str();
}

void write_csv(const std::string& path, const CsvTable& table)
{
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), "cannot open " + path + " for writing");
    out << table.to_string();
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

} // namespace

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open " + path);
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto cells = split(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        require(cells.size() == table.header.size(),
                path + ":" + std::to_string(line_no) + ": expected " + std::to_string(table.header.size()) +
                    " fields, found " + std::to_string(cells.size()));
        table.rows.push_back(std::move(cells));
    }
    require(!table.header.empty(), path + ": empty CSV file");
    return table;
}

CsvTable grid_function_csv(const GridFunction& f)
{
    CsvTable table{{"index", "re", "im"}, {}};
    const Field& v = f.values();
    std::size_t index = 0;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        for (Eigen::Index c = 0; c < v.cols(); ++c) {
            table.rows.push_back({std::to_string(index++), format_double(v(r, c).real()), format_double(v(r, c).imag())});
        }
    }
    return table;
}

CsvTable mask_rle_csv(const Mask& mask)
{
    CsvTable table{{"row", "start", "length"}, {}};
    for (Eigen::Index r = 0; r < mask.rows(); ++r) {
        Eigen::Index c = 0;
        while (c < mask.cols()) {
            if (!mask(r, c)) {
                ++c;
                continue;
            }
            const Eigen::Index start = c;
            while (c < mask.cols() && mask(r, c)) {
                ++c;
            }
            table.rows.push_back({std::to_string(r), std::to_string(start), std::to_string(c - start)});
        }
    }
    return table;
}

Mask mask_from_rle(const CsvTable& table, Eigen::Index rows, Eigen::Index cols)
{
    require(table.header == std::vector<std::string>{"row", "start", "length"}, "not a run-length mask table");
    Mask mask = Mask::Constant(rows, cols, false);
    for (const auto& row : table.rows) {
        const auto r = std::stol(row[0]);
        const auto start = std::stol(row[1]);
        const auto length = std::stol(row[2]);
        require(r >= 0 && r < rows && start >= 0 && length >= 0 && start + length <= cols, "mask run out of range");
        mask.row(r).segment(start, length).setConstant(true);
    }
    return mask;
}

std::string plot_script(const std::string& csv_path, const std::string& x_column, const std::string& y_column,
                        bool log_x)
{
    std::ostringstream out;
    out << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << (log_x ? "set logscale x\n" : "")
        << "set xlabel '" << x_column << "'\n"
        << "set ylabel '" << y_column << "'\n"
        << "plot '" << csv_path << "' using '" << x_column << "':'" << y_column << "' with linespoints\n";
    return out.str();
}

} // namespace biparam
