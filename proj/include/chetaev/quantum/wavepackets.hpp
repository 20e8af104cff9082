#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "chetaev/core/fields.hpp"
#include "chetaev/core/grid.hpp"
#include "chetaev/core/metric.hpp"

namespace chetaev::quantum {

/// Plane wave on the grid's wavenumber lattice, one mode index per axis:
/// psi = V^{-1/2} exp(i sum_a 2 pi m_a x_a / L_a). Momentum per axis is
/// p_a = hbar 2 pi m_a / L_a.
inline core::ComplexField make_plane_wave(const core::Grid& g, std::array<long, 2> modes) {
    if (!g.periodic()) throw std::invalid_argument("plane wave requires a periodic grid");
    double volume = g.extent(0) * (g.dim() == 2 ? g.extent(1) : 1.0);
    core::ComplexField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double phase = 0.0;
        for (int a = 0; a < g.dim(); ++a)
            phase += 2.0 * std::numbers::pi * static_cast<double>(modes[a]) *
                     (g.node_coord(a, i) - g.q_min(a)) / g.extent(a);
        out[i] = std::polar(1.0 / std::sqrt(volume), phase);
    }
    return out;
}

inline double plane_wave_momentum(const core::Grid& g, long mode, int axis, double hbar) {
    return hbar * 2.0 * std::numbers::pi * static_cast<double>(mode) / g.extent(axis);
}

/// Gaussian packet with position-density variance sigma2 per axis, centered at
/// x0 with mean momentum p0. Normalized on the grid.
inline core::ComplexField make_gaussian(const core::Grid& g, std::array<double, 2> sigma2,
                                        std::array<double, 2> x0 = {0.0, 0.0},
                                        std::array<double, 2> p0 = {0.0, 0.0},
                                        double hbar = 1.0) {
    core::ComplexField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double ex = 0.0, phase = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            if (!(sigma2[a] > 0.0)) throw std::invalid_argument("make_gaussian: sigma2 > 0 required");
            const double dx = g.node_coord(a, i) - x0[a];
            ex += dx * dx / (4.0 * sigma2[a]);
            phase += p0[a] * g.node_coord(a, i) / hbar;
        }
        out[i] = std::polar(std::exp(-ex), phase);
    }
    out.normalize();
    return out;
}

namespace detail {
/// Physicists' Hermite polynomial H_n(y) by recurrence.
inline double hermite(int n, double y) {
    double h0 = 1.0, h1 = 2.0 * y;
    if (n == 0) return h0;
    if (n == 1) return h1;
    for (int k = 1; k < n; ++k) {
        const double h2 = 2.0 * y * h1 - 2.0 * k * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}
} // namespace detail

/// Harmonic-oscillator eigenstate, per-axis quantum numbers in 2D. Sampled
/// from the analytic form and renormalized on the grid.
inline core::ComplexField make_ho_eigenstate(const core::Grid& g, std::array<int, 2> n,
                                             const core::Metric& metric, double omega,
                                             double hbar = 1.0,
                                             std::array<double, 2> center = {0.0, 0.0}) {
    core::ComplexField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double v = 1.0;
        for (int a = 0; a < g.dim(); ++a) {
            if (n[a] < 0) throw std::invalid_argument("make_ho_eigenstate: n >= 0 required");
            const double alpha = metric.mass(a) * omega / hbar;
            const double y = std::sqrt(alpha) * (g.node_coord(a, i) - center[a]);
            // 1/sqrt(2^n n!) in log form to stay finite for larger n
            double log_norm = 0.25 * std::log(alpha / std::numbers::pi);
            for (int k = 1; k <= n[a]; ++k) log_norm -= 0.5 * std::log(2.0 * k);
            v *= std::exp(log_norm) * detail::hermite(n[a], y) * std::exp(-0.5 * y * y);
        }
        out[i] = v;
    }
    out.normalize();
    return out;
}

/// Coherent state of the oscillator at t = 0: the ground-state Gaussian
/// displaced by `a` and at rest. Its center follows a cos(omega t).
inline core::ComplexField make_coherent(const core::Grid& g, double displacement,
                                        const core::Metric& metric, double omega,
                                        double hbar = 1.0) {
    return make_gaussian(g, {hbar / (2.0 * metric.mass(0) * omega), 0.0},
                         {displacement, 0.0}, {0.0, 0.0}, hbar);
}

} // namespace chetaev::quantum
