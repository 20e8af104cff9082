#pragma once

#include <cmath>
#include <stdexcept>

#include "chetaev/bohm/kernels.hpp"
#include "chetaev/bohm/polar.hpp"
#include "chetaev/core/fields.hpp"
#include "chetaev/core/metric.hpp"

namespace chetaev::bohm {

using core::RealField;

/// Q = -(hbar^2/2) sum_a g_a (d2A/dq_a^2) / A on off-mask nodes.
///
/// The amplitude curvature is taken through the wave,
///   A''_a = [Re(psi* d2psi) + |dpsi|^2 - (Re(psi* dpsi)/A)^2] / A,
/// which matches the direct second derivative of |psi| for smooth fields and
/// stays finite next to amplitude kinks at wavefunction zeros.
inline RealField quantum_potential(const PolarField& polar, const core::Metric& metric) {
    const auto& g = polar.grid;
    core::detail::check_metric(g, metric);
    if (polar.masked_fraction() >= 1.0)
        throw std::invalid_argument("quantum_potential: field entirely masked");

    const auto psi = recompose(polar);
    const auto d = polar_derivatives(psi, polar.hbar);

    RealField out(g, core::Units::energy);
    std::vector<std::uint8_t> mask = polar.node_mask;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (polar.masked(i)) continue;
        const double A2 = d.A2[i];
        const double A = std::sqrt(A2);
        double q = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double re_pdd = (std::conj(psi[i]) * d.d2psi[a][i]).real();
            const double curv = (re_pdd + std::norm(d.dpsi[a][i])) / A - d.ag[a][i] * d.ag[a][i] / A;
            q += metric.g(a) * curv / A;
        }
        out[i] = -0.5 * polar.hbar * polar.hbar * q;
    }
    out.set_mask(std::move(mask));
    return out;
}

/// J = integral of Q |psi|^2 dV in integration-by-parts form,
/// (hbar^2/2) sum_a g_a integral (dA/dq_a)^2 dV, using the stable amplitude
/// gradient dA = Re(psi* dpsi)/A. Equals <Q> and is manifestly >= 0.
inline double perturbation_action(const core::ComplexField& psi, const core::Metric& metric,
                                  double hbar = 1.0) {
    core::detail::check_metric(psi.grid(), metric);
    if (!psi.is_normalized(1e-6))
        throw std::invalid_argument("perturbation_action: psi must be normalized");
    const auto d = polar_derivatives(psi, hbar);
    const auto& g = psi.grid();
    double j = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            acc += d.ag[a][i] * d.ag[a][i] * g.quad_weight(i);
        j += 0.5 * hbar * hbar * metric.g(a) * acc;
    }
    return j;
}

/// v_a = g_a dS/dq_a off-mask (the Bohm guidance velocity).
inline std::array<RealField, 2> bohm_velocity(const PolarField& polar,
                                              const core::Metric& metric) {
    const auto& g = polar.grid;
    core::detail::check_metric(g, metric);
    if (polar.masked_fraction() >= 1.0)
        throw std::invalid_argument("bohm_velocity: field entirely masked");
    const auto psi = recompose(polar);
    const auto d = polar_derivatives(psi, polar.hbar);
    std::array<RealField, 2> out{RealField(g), RealField(g)};
    for (int a = 0; a < g.dim(); ++a) {
        for (std::size_t i = 0; i < g.size(); ++i)
            out[a][i] = polar.masked(i) ? 0.0 : metric.g(a) * d.s[a][i];
        out[a].set_mask(polar.node_mask);
    }
    return out;
}

} // namespace chetaev::bohm
