#include "psaws/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace psaws::io {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line,
                       const std::string& what) {
    std::ostringstream os;
    os << path << ":" << line << ": " << what;
    throw std::runtime_error(os.str());
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& s, const std::string& path,
                    std::size_t line) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used])))
            ++used;
        if (used != s.size()) fail(path, line, "trailing junk in field '" + s + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(path, line, "not a number: '" + s + "'");
    } catch (const std::out_of_range&) {
        fail(path, line, "number out of range: '" + s + "'");
    }
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::size_t Table::column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end())
        throw std::runtime_error("missing column: " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(const std::string& name) const {
    const std::size_t c = column_index(name);
    std::vector<double> out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out[r] = rows[r][c];
    return out;
}

void Table::add_row(std::initializer_list<double> values) {
    if (values.size() != columns.size())
        throw std::invalid_argument("row width != column count");
    rows.emplace_back(values);
}

Table read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Table t;
    std::string line;
    if (!std::getline(in, line)) fail(path, 1, "empty file, header expected");
    for (auto& name : split_line(strip_cr(line))) t.columns.push_back(name);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != t.columns.size())
            fail(path, lineno, "expected " + std::to_string(t.columns.size()) +
                                   " fields, got " + std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c)
            row[c] = parse_double(fields[c], path, lineno);
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_csv(const std::string& path, const Table& table) {
    std::ostringstream os;
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        os << (c ? "," : "") << table.columns[c];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << format_double(row[c]);
        os << "\n";
    }
    atomic_write(path, os.str());
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Matrix m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (m.cols == 0)
            m.cols = fields.size();
        else if (fields.size() != m.cols)
            fail(path, lineno, "ragged row: expected " + std::to_string(m.cols) +
                                   " fields, got " + std::to_string(fields.size()));
        for (const auto& f : fields)
            m.values.push_back(parse_double(f, path, lineno));
        ++m.rows;
    }
    if (m.rows == 0) throw std::runtime_error(path + ": empty matrix");
    return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::ostringstream os;
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c)
            os << (c ? "," : "") << format_double(m.at(r, c));
        os << "\n";
    }
    atomic_write(path, os.str());
}

Matrix read_pgm(const std::string& path, double lo, double hi) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5")
        throw std::runtime_error(path + ": not a binary PGM (P5) file");
    auto next_token = [&]() {
        // skip whitespace and '#' comment lines
        std::string tok;
        int ch;
        while ((ch = in.get()) != EOF) {
            if (std::isspace(ch)) continue;
            if (ch == '#') {
                std::string skip;
                std::getline(in, skip);
                continue;
            }
            tok.push_back(static_cast<char>(ch));
            while ((ch = in.get()) != EOF && !std::isspace(ch))
                tok.push_back(static_cast<char>(ch));
            return tok;
        }
        throw std::runtime_error(path + ": truncated PGM header");
    };
    const long w = std::stol(next_token());
    const long h = std::stol(next_token());
    const long maxval = std::stol(next_token());
    if (w <= 0 || h <= 0) throw std::runtime_error(path + ": bad PGM size");
    if (maxval != 255 && maxval != 65535)
        throw std::runtime_error(path + ": PGM maxval must be 255 or 65535");
    Matrix m;
    m.rows = static_cast<std::size_t>(h);
    m.cols = static_cast<std::size_t>(w);
    m.values.resize(m.rows * m.cols);
    const std::size_t bytes = maxval == 255 ? 1 : 2;
    std::vector<unsigned char> buf(m.values.size() * bytes);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size())
        throw std::runtime_error(path + ": truncated PGM pixel data at byte " +
                                 std::to_string(in.gcount()));
    for (std::size_t i = 0; i < m.values.size(); ++i) {
        const unsigned long pix =
            bytes == 1 ? buf[i]
                       : (static_cast<unsigned long>(buf[2 * i]) << 8) |
                             buf[2 * i + 1];
        m.values[i] = lo + static_cast<double>(pix) * (hi - lo) / maxval;
    }
    return m;
}

void write_pgm(const std::string& path, const Matrix& m, double lo, double hi,
               int maxval) {
    if (maxval != 255 && maxval != 65535)
        throw std::invalid_argument("PGM maxval must be 255 or 65535");
    if (!(hi > lo)) throw std::invalid_argument("PGM range must have hi > lo");
    std::ostringstream os;
    os << "P5\n" << m.cols << " " << m.rows << "\n" << maxval << "\n";
    for (double v : m.values) {
        double t = (v - lo) / (hi - lo) * maxval;
        long pix = std::lround(std::clamp(t, 0.0, static_cast<double>(maxval)));
        if (maxval == 255) {
            os.put(static_cast<char>(pix));
        } else {
            os.put(static_cast<char>(pix >> 8));
            os.put(static_cast<char>(pix & 0xff));
        }
    }
    atomic_write(path, os.str());
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace psaws::io
