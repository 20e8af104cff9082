#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace chetaev::core {

enum class Boundary { periodic, box };

/// Uniform 1D/2D lattice. Immutable after construction; all fields attached to
/// a grid carry a copy of it, and operations compare grids by value.
///
/// Spacing convention: h = extent/points on periodic grids (the right endpoint
/// is the wrap image of the left), h = extent/(points-1) on box grids (both
/// endpoints are nodes).
class Grid {
public:
    static constexpr std::size_t min_points = 8;

    static Grid make_1d(double q_min, double q_max, std::size_t points, Boundary b) {
        Grid g;
        g.dim_ = 1;
        g.boundary_ = b;
        g.set_axis(0, q_min, q_max, points);
        g.points_[1] = 1;
        return g;
    }

    static Grid make_2d(double x_min, double x_max, std::size_t nx,
                        double y_min, double y_max, std::size_t ny, Boundary b) {
        Grid g;
        g.dim_ = 2;
        g.boundary_ = b;
        g.set_axis(0, x_min, x_max, nx);
        g.set_axis(1, y_min, y_max, ny);
        return g;
    }

    int dim() const { return dim_; }
    Boundary boundary() const { return boundary_; }
    bool periodic() const { return boundary_ == Boundary::periodic; }

    std::size_t points(int axis) const { check_axis(axis); return points_[axis]; }
    double q_min(int axis) const { check_axis(axis); return q_min_[axis]; }
    double q_max(int axis) const { check_axis(axis); return q_max_[axis]; }
    double extent(int axis) const { check_axis(axis); return q_max_[axis] - q_min_[axis]; }
    double spacing(int axis) const { check_axis(axis); return h_[axis]; }

    /// Total node count.
    std::size_t size() const { return points_[0] * (dim_ == 2 ? points_[1] : 1); }

    /// Row-major node index, axis 0 outermost.
    std::size_t index(std::size_t ix, std::size_t iy = 0) const {
        return dim_ == 2 ? ix * points_[1] + iy : ix;
    }
    std::size_t ix_of(std::size_t node) const { return dim_ == 2 ? node / points_[1] : node; }
    std::size_t iy_of(std::size_t node) const { return dim_ == 2 ? node % points_[1] : 0; }

    double coord(int axis, std::size_t i) const {
        check_axis(axis);
        return q_min_[axis] + static_cast<double>(i) * h_[axis];
    }
    /// Coordinate of a flat node index along the given axis.
    double node_coord(int axis, std::size_t node) const {
        return coord(axis, axis == 0 ? ix_of(node) : iy_of(node));
    }

    /// Volume element Π h.
    double cell_volume() const { return dim_ == 2 ? h_[0] * h_[1] : h_[0]; }

    /// Quadrature weight of a node: rectangle rule on periodic grids (exact for
    /// trigonometric polynomials), trapezoid on box grids.
    double quad_weight(std::size_t node) const {
        double w = cell_volume();
        if (boundary_ == Boundary::box) {
            const std::size_t ix = ix_of(node);
            if (ix == 0 || ix + 1 == points_[0]) w *= 0.5;
            if (dim_ == 2) {
                const std::size_t iy = iy_of(node);
                if (iy == 0 || iy + 1 == points_[1]) w *= 0.5;
            }
        }
        return w;
    }

    bool operator==(const Grid& o) const {
        if (dim_ != o.dim_ || boundary_ != o.boundary_) return false;
        for (int a = 0; a < dim_; ++a)
            if (points_[a] != o.points_[a] || q_min_[a] != o.q_min_[a] || q_max_[a] != o.q_max_[a])
                return false;
        return true;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    Grid() = default;

    void set_axis(int axis, double lo, double hi, std::size_t n) {
        if (n < min_points)
            throw std::invalid_argument("Grid: points >= 8 required per axis, got " + std::to_string(n));
        if (!(hi > lo))
            throw std::invalid_argument("Grid: q_max must exceed q_min");
        points_[axis] = n;
        q_min_[axis] = lo;
        q_max_[axis] = hi;
        h_[axis] = (hi - lo) / static_cast<double>(boundary_ == Boundary::periodic ? n : n - 1);
    }

    void check_axis(int axis) const {
        if (axis < 0 || axis >= dim_) throw std::out_of_range("Grid: axis out of range");
    }

    int dim_ = 1;
    Boundary boundary_ = Boundary::periodic;
    std::array<std::size_t, 2> points_{0, 1};
    std::array<double, 2> q_min_{0.0, 0.0};
    std::array<double, 2> q_max_{0.0, 0.0};
    std::array<double, 2> h_{0.0, 0.0};
};

} // namespace chetaev::core
