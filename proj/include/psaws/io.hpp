#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace psaws::io {

/// Headered numeric CSV, "." decimal, UTF-8.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // row-major, rows[r][c]

    std::size_t column_index(const std::string& name) const;  // throws if absent
    std::vector<double> column(const std::string& name) const;
    void add_row(std::initializer_list<double> values);
};

Table read_csv(const std::string& path);
void write_csv(const std::string& path, const Table& table);

struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> values;  // row-major

    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

/// Binary PGM (P5), maxval 255 or 65535, pixel values mapped linearly
/// onto [lo, hi].
Matrix read_pgm(const std::string& path, double lo, double hi);
void write_pgm(const std::string& path, const Matrix& m, double lo, double hi,
               int maxval = 65535);

/// Writes via a temporary file and rename; no partial outputs.
void atomic_write(const std::string& path, const std::string& content);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace psaws::io
