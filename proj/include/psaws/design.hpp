#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace psaws {

struct Neighbor {
    std::size_t j;
    double dist;
};

/// 1D sequence or 2D regular grid with unit spacing and the Euclidean
/// metric on grid coordinates. 2D arrays are row-major flattened.
class Design {
public:
    static Design line(std::size_t n);
    static Design grid(std::size_t rows, std::size_t cols);

    int dim() const { return dim_; }
    std::size_t size() const { return rows_ * cols_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double distance(std::size_t i, std::size_t j) const;
    /// Squared distance, exact in floating point on integer grids; ball
    /// membership tests compare this against h*h everywhere so that every
    /// implementation agrees on the boundary.
    double distance2(std::size_t i, std::size_t j) const;

    /// All j with distance(i, j) <= h, ascending j, including i itself.
    std::vector<Neighbor> neighborhood(std::size_t i, double h) const;

    /// Points whose ball of radius h is not clipped by the boundary.
    std::vector<bool> interior_mask(double h) const;

private:
    Design(int dim, std::size_t rows, std::size_t cols)
        : dim_(dim), rows_(rows), cols_(cols) {}
    int dim_;
    std::size_t rows_, cols_;
};

struct KernelSpec {
    enum class Kind { PlateauTriangle, Parabola, Uniform };
    Kind kind = Kind::PlateauTriangle;
    double support_end = 2.0;

    static KernelSpec plateau_triangle() { return {Kind::PlateauTriangle, 2.0}; }
    static KernelSpec parabola() { return {Kind::Parabola, 1.0}; }
    static KernelSpec uniform() { return {Kind::Uniform, 1.0}; }
    static KernelSpec by_name(const std::string& name);

    double operator()(double x) const;
};

struct BandwidthSchedule {
    double h0;
    double factor;
    int kstar;

    /// Default growth factor 1.25^(1/dim), kstar the smallest k with
    /// h^(k) >= hmax.
    static BandwidthSchedule to_hmax(double h0, double hmax, int dim,
                                     double factor = 0.0);

    double at(int k) const;
};

}  // namespace psaws
