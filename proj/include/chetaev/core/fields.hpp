#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "chetaev/core/grid.hpp"

namespace chetaev::core {

using cplx = std::complex<double>;

/// Relative amplitude threshold below which a node counts as a wavefunction
/// zero: eps_node * max|psi|. 1/A and 1/psi diverge there.
inline constexpr double eps_node = 1e-8;

/// Discretized wavefunction on a grid.
class ComplexField {
public:
    ComplexField(Grid grid, cplx fill = {})
        : grid_(grid), v_(grid.size(), fill) {}
    ComplexField(Grid grid, std::vector<cplx> values, double time = 0.0)
        : grid_(grid), v_(std::move(values)), time_(time) {
        if (v_.size() != grid_.size())
            throw std::invalid_argument("ComplexField: value count != grid node count");
    }

    const Grid& grid() const { return grid_; }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    std::size_t size() const { return v_.size(); }
    cplx& operator[](std::size_t i) { return v_[i]; }
    const cplx& operator[](std::size_t i) const { return v_[i]; }
    std::vector<cplx>& values() { return v_; }
    const std::vector<cplx>& values() const { return v_; }

    bool all_finite() const {
        for (const cplx& z : v_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& z : v_) m = std::max(m, std::abs(z));
        return m;
    }

    /// Squared L2 norm under the grid quadrature.
    double norm_sq() const {
        double s = 0.0;
        for (std::size_t i = 0; i < v_.size(); ++i) s += std::norm(v_[i]) * grid_.quad_weight(i);
        return s;
    }

    bool is_normalized(double tol = 1e-8) const { return std::abs(norm_sq() - 1.0) <= tol; }

    ComplexField& normalize() {
        const double n = std::sqrt(norm_sq());
        if (!(n > 0.0)) throw std::runtime_error("ComplexField: cannot normalize zero field");
        for (cplx& z : v_) z /= n;
        return *this;
    }

private:
    Grid grid_;
    std::vector<cplx> v_;
    double time_ = 0.0;
};

enum class Units { energy, density, dimensionless };

/// Real scalar field with optional validity mask (true = excluded node).
class RealField {
public:
    RealField(Grid grid, Units units = Units::dimensionless, double fill = 0.0)
        : grid_(grid), v_(grid.size(), fill), units_(units) {}
    RealField(Grid grid, std::vector<double> values, Units units = Units::dimensionless)
        : grid_(grid), v_(std::move(values)), units_(units) {
        if (v_.size() != grid_.size())
            throw std::invalid_argument("RealField: value count != grid node count");
    }

    const Grid& grid() const { return grid_; }
    Units units() const { return units_; }

    std::size_t size() const { return v_.size(); }
    double& operator[](std::size_t i) { return v_[i]; }
    const double& operator[](std::size_t i) const { return v_[i]; }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    bool has_mask() const { return !mask_.empty(); }
    bool masked(std::size_t i) const { return has_mask() && mask_[i] != 0; }
    void set_mask(std::vector<std::uint8_t> mask) {
        if (!mask.empty() && mask.size() != v_.size())
            throw std::invalid_argument("RealField: mask size mismatch");
        mask_ = std::move(mask);
    }
    const std::vector<std::uint8_t>& mask() const { return mask_; }

    bool finite_off_mask() const {
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (!masked(i) && !std::isfinite(v_[i])) return false;
        return true;
    }

private:
    Grid grid_;
    std::vector<double> v_;
    Units units_;
    std::vector<std::uint8_t> mask_;
};

/// Polar (Madelung) form of a wavefunction: psi = A exp(i S / hbar).
///
/// S is unwrapped per connected off-mask component, anchored at the
/// component's amplitude maximum with the anchor value in (-pi*hbar, pi*hbar].
/// On periodic grids with winding, S carries the linear winding ramp; the
/// per-axis winding numbers are recorded so derivative code can split S into
/// ramp + periodic remainder.
struct PolarField {
    Grid grid;
    std::vector<double> A;               // amplitude >= 0
    std::vector<double> S;               // action, units of hbar
    std::vector<std::uint8_t> node_mask; // true where |psi| < eps_node * max|psi|
    std::vector<int> component;          // off-mask connected component id, -1 on mask
    std::array<long, 2> winding{0, 0};   // per-axis phase winding (periodic grids)
    double hbar = 1.0;
    double time = 0.0;

    std::size_t size() const { return A.size(); }
    bool masked(std::size_t i) const { return node_mask[i] != 0; }
    double masked_fraction() const {
        std::size_t m = 0;
        for (auto b : node_mask) m += (b != 0);
        return A.empty() ? 0.0 : static_cast<double>(m) / static_cast<double>(A.size());
    }
};

/// Phase-space point of the classical system (dimension given by the system).
struct ClassicalState {
    std::array<double, 2> q{0.0, 0.0};
    std::array<double, 2> p{0.0, 0.0};
    double t = 0.0;
};

/// Tangent vector along a trajectory: xi = dq, eta = dp.
struct VariationalState {
    std::array<double, 2> xi{0.0, 0.0};
    std::array<double, 2> eta{0.0, 0.0};
    double t = 0.0;
};

} // namespace chetaev::core
