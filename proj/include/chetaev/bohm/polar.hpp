#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "chetaev/core/fields.hpp"
#include "chetaev/core/grid.hpp"

namespace chetaev::bohm {

using core::ComplexField;
using core::PolarField;

namespace detail {

inline double wrap_pi(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    double y = std::remainder(x, two_pi);
    if (y <= -std::numbers::pi) y += two_pi;
    return y;
}

/// Neighbors of a node along each axis (wrapping on periodic grids).
inline int neighbors(const core::Grid& g, std::size_t node, std::size_t out[4]) {
    int count = 0;
    const std::size_t nx = g.points(0);
    const std::size_t ix = g.ix_of(node);
    auto push_x = [&](std::size_t jx) { out[count++] = g.index(jx, g.iy_of(node)); };
    if (ix > 0) push_x(ix - 1);
    else if (g.periodic()) push_x(nx - 1);
    if (ix + 1 < nx) push_x(ix + 1);
    else if (g.periodic()) push_x(0);
    if (g.dim() == 2) {
        const std::size_t ny = g.points(1);
        const std::size_t iy = g.iy_of(node);
        auto push_y = [&](std::size_t jy) { out[count++] = g.index(ix, jy); };
        if (iy > 0) push_y(iy - 1);
        else if (g.periodic()) push_y(ny - 1);
        if (iy + 1 < ny) push_y(iy + 1);
        else if (g.periodic()) push_y(0);
    }
    return count;
}

/// Phase winding of one full grid line (periodic): loop sum of wrapped
/// increments / 2 pi. Returns 0 if any node on the line is masked.
inline long line_winding(const core::Grid& g, const std::vector<double>& theta,
                         const std::vector<std::uint8_t>& mask, int axis, std::size_t node) {
    const std::size_t n = g.points(axis);
    const std::size_t fixed = (axis == 0) ? g.iy_of(node) : g.ix_of(node);
    auto at = [&](std::size_t j) {
        return axis == 0 ? g.index(j, fixed) : g.index(fixed, j);
    };
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t i0 = at(j), i1 = at((j + 1) % n);
        if (mask[i0] || mask[i1]) return 0L;
        total += wrap_pi(theta[i1] - theta[i0]);
    }
    return std::lround(total / (2.0 * std::numbers::pi));
}

} // namespace detail

/// Polar decomposition psi = A exp(i S / hbar).
///
/// A = |psi|; nodes with |psi| < eps_node * max|psi| are masked. S is the
/// unwrapped phase times hbar: on periodic grids the per-axis winding ramp is
/// split off first (measured on the grid line through the global maximum),
/// the remainder is unwrapped by flood fill that never crosses masked nodes,
/// and the ramp is added back. Each connected off-mask component is anchored
/// at its own amplitude maximum; the global anchor value lies in
/// (-pi hbar, pi hbar].
inline PolarField decompose(const ComplexField& psi, double hbar = 1.0) {
    const auto& g = psi.grid();
    const std::size_t n = psi.size();

    PolarField out;
    out.grid = g;
    out.hbar = hbar;
    out.time = psi.time();
    out.A.resize(n);
    out.S.assign(n, 0.0);
    out.node_mask.assign(n, 0);
    out.component.assign(n, -1);

    double amax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.A[i] = std::abs(psi[i]);
        amax = std::max(amax, out.A[i]);
    }
    if (!(amax > 0.0)) throw std::invalid_argument("decompose: field is identically zero");
    const double eps = core::eps_node * amax;
    std::size_t unmasked = 0;
    for (std::size_t i = 0; i < n; ++i) {
        out.node_mask[i] = out.A[i] < eps ? 1 : 0;
        unmasked += !out.node_mask[i];
    }
    if (unmasked == 0) throw std::invalid_argument("decompose: field entirely below node threshold");

    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i) theta[i] = std::arg(psi[i]);

    // global maximum node (lowest index on ties)
    std::size_t anchor = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (out.A[i] > out.A[anchor]) anchor = i;

    // winding ramp on periodic grids
    std::vector<double> ramp(n, 0.0);
    if (g.periodic()) {
        for (int a = 0; a < g.dim(); ++a)
            out.winding[a] = detail::line_winding(g, theta, out.node_mask, a, anchor);
        if (out.winding[0] != 0 || out.winding[1] != 0) {
            for (std::size_t i = 0; i < n; ++i) {
                double v = 0.0;
                for (int a = 0; a < g.dim(); ++a)
                    v += 2.0 * std::numbers::pi * static_cast<double>(out.winding[a]) *
                         (g.node_coord(a, i) - g.q_min(a)) / g.extent(a);
                ramp[i] = v;
            }
        }
    }

    // de-ramped phase, wrapped
    std::vector<double> phase(n);
    for (std::size_t i = 0; i < n; ++i) phase[i] = detail::wrap_pi(theta[i] - ramp[i]);

    // components in descending amplitude order; BFS unwrap within each
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (out.A[a] != out.A[b]) return out.A[a] > out.A[b];
        return a < b;
    });

    std::vector<double> s_unwrapped(n, 0.0);
    int next_component = 0;
    std::size_t nb[4];
    for (std::size_t seed : order) {
        if (out.node_mask[seed] || out.component[seed] >= 0) continue;
        const int comp = next_component++;
        out.component[seed] = comp;
        s_unwrapped[seed] = phase[seed];
        std::deque<std::size_t> queue{seed};
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            const int cnt = detail::neighbors(g, i, nb);
            for (int k = 0; k < cnt; ++k) {
                const std::size_t j = nb[k];
                if (out.node_mask[j] || out.component[j] >= 0) continue;
                out.component[j] = comp;
                s_unwrapped[j] = s_unwrapped[i] + detail::wrap_pi(phase[j] - phase[i]);
                queue.push_back(j);
            }
        }
    }

    // recombine with the ramp; shift globally so S(anchor) = hbar * arg(psi(anchor)),
    // which lies in (-pi hbar, pi hbar]
    const double anchor_total = s_unwrapped[anchor] + ramp[anchor];
    const double correction =
        2.0 * std::numbers::pi * std::round((anchor_total - theta[anchor]) / (2.0 * std::numbers::pi));
    for (std::size_t i = 0; i < n; ++i) {
        if (out.node_mask[i]) {
            out.S[i] = 0.0;
            continue;
        }
        out.S[i] = hbar * (s_unwrapped[i] + ramp[i] - correction);
    }
    return out;
}

/// Inverse of decompose: A exp(i S / hbar).
inline ComplexField recompose(const PolarField& polar) {
    ComplexField out(polar.grid);
    for (std::size_t i = 0; i < polar.size(); ++i)
        out[i] = std::polar(polar.A[i], polar.S[i] / polar.hbar);
    out.set_time(polar.time);
    return out;
}

} // namespace chetaev::bohm
