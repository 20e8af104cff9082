#pragma once

#include <complex>
#include <vector>

#include "chetaev/core/fields.hpp"
#include "chetaev/core/grid.hpp"
#include "chetaev/core/metric.hpp"
#include "chetaev/core/operators.hpp"

namespace chetaev::quantum::detail {

using core::cplx;

/// 4th-order 5-point second derivative along one box line, closed at the
/// walls by odd reflection through the wall nodes (psi = 0 wall semantics).
/// This is the stencil behind the discrete Hamiltonian; domain-core's general
/// laplacian stays 2nd-order.
template <class T>
void d2_line_order4_wall(const T* in, T* out, std::size_t n, double h) {
    const double c = 1.0 / (12.0 * h * h);
    auto at = [&](long j) -> T {
        if (j < 0) return -in[-j];
        if (j >= static_cast<long>(n)) return -in[2 * (n - 1) - j];
        return in[j];
    };
    for (std::size_t i = 0; i < n; ++i) {
        const long j = static_cast<long>(i);
        out[i] = c * (-at(j - 2) + 16.0 * at(j - 1) - 30.0 * at(j) + 16.0 * at(j + 1) - at(j + 2));
    }
}

/// Metric-weighted kinetic apply on a full grid field:
/// out += -(hbar^2/2) sum_a g_a d2_a psi, spectral on periodic grids,
/// 4th-order wall stencil on box grids.
inline void add_kinetic(const core::ComplexField& psi, const core::Metric& m, double hbar,
                        std::vector<cplx>& out) {
    const auto& g = psi.grid();
    for (int a = 0; a < g.dim(); ++a) {
        std::vector<cplx> work = psi.values();
        if (g.periodic()) {
            core::detail::derivative_axis(g, work, a, 2);
        } else {
            const double h = g.spacing(a);
            std::vector<cplx> line, res;
            core::detail::for_each_line(g, a, [&](std::size_t off, std::size_t stride, std::size_t count) {
                line.resize(count);
                res.resize(count);
                for (std::size_t i = 0; i < count; ++i) line[i] = work[off + i * stride];
                d2_line_order4_wall(line.data(), res.data(), count, h);
                for (std::size_t i = 0; i < count; ++i) work[off + i * stride] = res[i];
            });
        }
        const double coef = -0.5 * hbar * hbar * m.g(a);
        for (std::size_t i = 0; i < work.size(); ++i) out[i] += coef * work[i];
    }
}

} // namespace chetaev::quantum::detail
