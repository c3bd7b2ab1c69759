#include "psaws/design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psaws {

Design Design::line(std::size_t n) {
    if (n == 0) throw std::domain_error("design: empty line");
    return Design(1, 1, n);
}

Design Design::grid(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw std::domain_error("design: empty grid");
    return Design(2, rows, cols);
}

double Design::distance2(std::size_t i, std::size_t j) const {
    if (i >= size() || j >= size()) throw std::out_of_range("design: bad index");
    double dr = static_cast<double>(i / cols_) - static_cast<double>(j / cols_);
    double dc = static_cast<double>(i % cols_) - static_cast<double>(j % cols_);
    return dr * dr + dc * dc;
}

double Design::distance(std::size_t i, std::size_t j) const {
    return std::sqrt(distance2(i, j));
}

std::vector<Neighbor> Design::neighborhood(std::size_t i, double h) const {
    if (i >= size()) throw std::out_of_range("design: bad index");
    if (h < 0) throw std::domain_error("design: negative radius");
    std::vector<Neighbor> out;
    long r = static_cast<long>(i / cols_), c = static_cast<long>(i % cols_);
    long m = static_cast<long>(std::floor(h));
    long r0 = std::max<long>(0, r - m), r1 = std::min<long>(rows_ - 1, r + m);
    long c0 = std::max<long>(0, c - m), c1 = std::min<long>(cols_ - 1, c + m);
    double h2 = h * h;
    for (long rr = r0; rr <= r1; ++rr)
        for (long cc = c0; cc <= c1; ++cc) {
            double dr = rr - r, dc = cc - c;
            double d2 = dr * dr + dc * dc;
            if (d2 <= h2)
                out.push_back({static_cast<std::size_t>(rr * cols_ + cc),
                               std::sqrt(d2)});
        }
    return out;  // row-major scan order is ascending j
}

std::vector<bool> Design::interior_mask(double h) const {
    long m = static_cast<long>(std::floor(h));
    std::vector<bool> mask(size(), false);
    for (long r = 0; r < static_cast<long>(rows_); ++r)
        for (long c = 0; c < static_cast<long>(cols_); ++c) {
            bool rin = dim_ == 1 || (r - m >= 0 && r + m < static_cast<long>(rows_));
            bool cin = c - m >= 0 && c + m < static_cast<long>(cols_);
            mask[r * cols_ + c] = rin && cin;
        }
    return mask;
}

KernelSpec KernelSpec::by_name(const std::string& name) {
    if (name == "plateau" || name == "plateau-triangle") return plateau_triangle();
    if (name == "parabola") return parabola();
    if (name == "uniform") return uniform();
    throw std::domain_error("unknown kernel: " + name +
                            " (plateau, parabola, uniform)");
}

double KernelSpec::operator()(double x) const {
    if (x < 0) throw std::domain_error("kernel: negative argument");
    switch (kind) {
        case Kind::PlateauTriangle:
            return x >= support_end ? 0.0 : std::min(1.0, support_end - x);
        case Kind::Parabola: {
            if (x >= support_end) return 0.0;
            double u = x / support_end;
            return 1.0 - u * u;
        }
        case Kind::Uniform:
            // closed support: points at distance exactly h keep weight 1
            return x <= support_end ? 1.0 : 0.0;
    }
    return 0.0;
}

BandwidthSchedule BandwidthSchedule::to_hmax(double h0, double hmax, int dim,
                                             double factor) {
    if (!(h0 > 0)) throw std::domain_error("schedule: h0 must be > 0");
    if (factor == 0.0) factor = std::pow(1.25, 1.0 / dim);
    if (!(factor > 1)) throw std::domain_error("schedule: factor must be > 1");
    int k = 0;
    while (h0 * std::pow(factor, k) < hmax && k < 10000) ++k;
    return {h0, factor, k};
}

double BandwidthSchedule::at(int k) const {
    if (k < 0 || k > kstar) throw std::out_of_range("schedule: step out of range");
    return h0 * std::pow(factor, k);
}

}  // namespace psaws
