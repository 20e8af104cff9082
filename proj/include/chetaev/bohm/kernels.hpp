#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "chetaev/core/fields.hpp"
#include "chetaev/core/metric.hpp"
#include "chetaev/core/operators.hpp"

namespace chetaev::bohm {

/// Derivative kernels for the polar variables, computed through the wave
/// itself rather than by differentiating the unwrapped action directly:
///
///   dA/dq   = Re(psi* dpsi) / A
///   dS/dq   = hbar Im(psi* dpsi) / A^2
///   d2S/dq2 = hbar [ Im(psi* d2psi)/A^2 - 2 (dA/A)(dS/dq)/hbar ... ]
///
/// Unwrapped S on a periodic grid is generally not periodic (plane waves wind,
/// spreading packets have seam kinks), so spectral differentiation of S is
/// ill-posed while psi and |psi| stay clean. These kernels are exact in the
/// continuum and spectrally accurate for resolved fields.
struct PolarDerivatives {
    // per axis: amplitude log-gradient r = dA/A, action gradient s = dS/dq,
    // action second derivative s2 = d2S/dq2, amplitude gradient ag = dA/dq
    std::array<std::vector<double>, 2> r, s, s2, ag;
    // per axis: complex derivative fields of psi
    std::array<std::vector<core::cplx>, 2> dpsi, d2psi;
    std::vector<double> A2; // |psi|^2
};

inline PolarDerivatives polar_derivatives(const core::ComplexField& psi, double hbar) {
    const auto& g = psi.grid();
    PolarDerivatives out;
    out.A2.resize(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) out.A2[i] = std::norm(psi[i]);

    for (int a = 0; a < g.dim(); ++a) {
        auto d1 = core::gradient(psi, a);
        auto d2 = core::second_derivative(psi, a);
        auto& r = out.r[a];
        auto& s = out.s[a];
        auto& s2 = out.s2[a];
        auto& ag = out.ag[a];
        r.resize(psi.size());
        s.resize(psi.size());
        s2.resize(psi.size());
        ag.resize(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double A2 = out.A2[i];
            if (!(A2 > 0.0)) {
                r[i] = s[i] = s2[i] = ag[i] = 0.0;
                continue;
            }
            const core::cplx pd = std::conj(psi[i]) * d1[i];
            const core::cplx pdd = std::conj(psi[i]) * d2[i];
            r[i] = pd.real() / A2;
            s[i] = hbar * pd.imag() / A2;
            s2[i] = hbar * pdd.imag() / A2 - 2.0 * r[i] * s[i];
            ag[i] = pd.real() / std::sqrt(A2);
        }
        out.dpsi[a] = std::move(d1.values());
        out.d2psi[a] = std::move(d2.values());
    }
    return out;
}

/// Metric Laplacian of S from the kernels: sum_a g_a d2S/dq_a^2.
inline std::vector<double> action_laplacian(const PolarDerivatives& d, const core::Metric& m,
                                            int dim) {
    std::vector<double> out(d.A2.size(), 0.0);
    for (int a = 0; a < dim; ++a)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += m.g(a) * d.s2[a][i];
    return out;
}

} // namespace chetaev::bohm
