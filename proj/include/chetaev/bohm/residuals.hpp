#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "chetaev/bohm/kernels.hpp"
#include "chetaev/bohm/polar.hpp"
#include "chetaev/bohm/quantum_potential.hpp"
#include "chetaev/core/fields.hpp"
#include "chetaev/core/metric.hpp"
#include "chetaev/core/operators.hpp"
#include "chetaev/quantum/evolve.hpp"
#include "chetaev/quantum/potential.hpp"

namespace chetaev::bohm {

struct ResidualReport {
    std::string name;
    double L2 = 0.0;   // quadrature L2 norm over off-mask nodes, worst stored time
    double Linf = 0.0; // pointwise max over off-mask nodes and stored times
    double masked_fraction = 0.0;
};

/// Decompose every frame of a series and align the per-component 2 pi hbar
/// phase offsets across consecutive slices, so centered time differences of S
/// are meaningful. Components are matched by spatial overlap; the reference
/// node of a component is its strongest node also valid in the previous slice.
inline std::vector<PolarField> decompose_series(const quantum::WaveSeries& series,
                                                double hbar = 1.0) {
    std::vector<PolarField> out;
    out.reserve(series.frames.size());
    for (const auto& f : series.frames) out.push_back(decompose(f, hbar));

    const double two_pi_h = 2.0 * std::numbers::pi * hbar;
    for (std::size_t k = 1; k < out.size(); ++k) {
        const PolarField& prev = out[k - 1];
        PolarField& cur = out[k];
        int n_comp = 0;
        for (int c : cur.component) n_comp = std::max(n_comp, c + 1);
        for (int c = 0; c < n_comp; ++c) {
            std::size_t ref = cur.size();
            double best = -1.0;
            for (std::size_t i = 0; i < cur.size(); ++i) {
                if (cur.component[i] != c || prev.masked(i)) continue;
                const double score = std::min(cur.A[i], prev.A[i]);
                if (score > best) {
                    best = score;
                    ref = i;
                }
            }
            if (ref == cur.size()) continue; // no overlap with the previous slice
            const double delta = cur.S[ref] - prev.S[ref];
            const double offset = two_pi_h * std::round(delta / two_pi_h);
            if (offset != 0.0)
                for (std::size_t i = 0; i < cur.size(); ++i)
                    if (cur.component[i] == c) cur.S[i] -= offset;
        }
    }
    return out;
}

namespace detail {

/// Centered time derivative that tolerates a non-uniform final interval.
inline double centered_dt(double fm, double f0, double fp, double hm, double hp) {
    return (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) /
           (hp * hm * (hp + hm));
}

struct SliceAccumulator {
    double linf = 0.0;
    double l2_worst = 0.0;
    double masked_fraction = 0.0;

    void add_slice(const core::Grid& g, const std::vector<double>& residual,
                   const std::vector<std::uint8_t>& mask) {
        double l2 = 0.0;
        std::size_t masked = 0;
        for (std::size_t i = 0; i < residual.size(); ++i) {
            if (mask[i]) {
                ++masked;
                continue;
            }
            const double r = std::abs(residual[i]);
            linf = std::max(linf, r);
            l2 += r * r * g.quad_weight(i);
        }
        l2_worst = std::max(l2_worst, std::sqrt(l2));
        masked_fraction = std::max(
            masked_fraction, static_cast<double>(masked) / static_cast<double>(residual.size()));
    }

    ResidualReport report(std::string name) const {
        return ResidualReport{std::move(name), l2_worst, linf, masked_fraction};
    }
};

inline void require_three_slices(const quantum::WaveSeries& series) {
    if (series.frames.size() < 3)
        throw std::invalid_argument("residuals: need at least 3 stored slices");
}

inline std::vector<std::uint8_t> union_mask(const PolarField& a, const PolarField& b,
                                            const PolarField& c) {
    std::vector<std::uint8_t> m(a.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = (a.node_mask[i] | b.node_mask[i] | c.node_mask[i]);
    return m;
}

} // namespace detail

/// Both continuity forms evaluated on an evolved series:
///   full    dP/dt + sum_a g_a (dP dS + P d2S)   (divergence expanded)
///   reduced dP/dt + sum_a g_a  dP dS            (the paper's reduced form)
/// The fields `full - reduced` and P * (metric Laplacian of S) agree exactly
/// in floating point; split_identity_gap records the worst deviation.
struct ContinuityReport {
    ResidualReport full;
    ResidualReport reduced;
    double split_identity_gap = 0.0;
};

inline ContinuityReport continuity_residual(const quantum::WaveSeries& series,
                                            const core::Metric& metric, double hbar = 1.0) {
    detail::require_three_slices(series);
    const auto& g = series.frames.front().grid();
    core::detail::check_metric(g, metric);
    auto polar = decompose_series(series, hbar);

    detail::SliceAccumulator acc_full, acc_reduced;
    double gap = 0.0;
    for (std::size_t k = 1; k + 1 < polar.size(); ++k) {
        const auto mask = detail::union_mask(polar[k - 1], polar[k], polar[k + 1]);
        const double hm = polar[k].time - polar[k - 1].time;
        const double hp = polar[k + 1].time - polar[k].time;
        const auto& psi = series.frames[k];
        const auto d = polar_derivatives(psi, hbar);

        std::vector<double> full(g.size(), 0.0), reduced(g.size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (mask[i]) continue;
            const double pm = polar[k - 1].A[i] * polar[k - 1].A[i];
            const double p0 = polar[k].A[i] * polar[k].A[i];
            const double pp = polar[k + 1].A[i] * polar[k + 1].A[i];
            const double dpdt = detail::centered_dt(pm, p0, pp, hm, hp);
            double advect = 0.0, compress = 0.0;
            for (int a = 0; a < g.dim(); ++a) {
                const double dP = 2.0 * (std::conj(psi[i]) * d.dpsi[a][i]).real();
                advect += metric.g(a) * dP * d.s[a][i];
                compress += metric.g(a) * d.s2[a][i];
            }
            reduced[i] = dpdt + advect;
            full[i] = reduced[i] + p0 * compress;
            gap = std::max(gap, std::abs((full[i] - reduced[i]) - p0 * compress));
        }
        acc_full.add_slice(g, full, mask);
        acc_reduced.add_slice(g, reduced, mask);
    }
    return ContinuityReport{acc_full.report("continuity_full"),
                            acc_reduced.report("continuity_reduced"), gap};
}

/// Quantum Hamilton-Jacobi residual dS/dt + (grad S)^2/2m + U + Q in the
/// (A,S) variables, and the (P,S) form with the P derivatives discretized
/// independently from the P = A^2 field. bracket_identity_gap verifies
/// algebraically that the (P,S) bracket collapses to Q.
struct QhjReport {
    ResidualReport as_form;
    ResidualReport p_form;
    double bracket_identity_gap = 0.0;
};

inline QhjReport qhj_residual(const quantum::WaveSeries& series, const quantum::Potential& U,
                              const core::Metric& metric, double hbar = 1.0) {
    detail::require_three_slices(series);
    const auto& g = series.frames.front().grid();
    core::detail::check_metric(g, metric);
    auto polar = decompose_series(series, hbar);

    detail::SliceAccumulator acc_as, acc_p;
    double gap = 0.0;
    for (std::size_t k = 1; k + 1 < polar.size(); ++k) {
        const auto mask = detail::union_mask(polar[k - 1], polar[k], polar[k + 1]);
        const double hm = polar[k].time - polar[k - 1].time;
        const double hp = polar[k + 1].time - polar[k].time;
        const auto& psi = series.frames[k];
        const auto d = polar_derivatives(psi, hbar);
        const auto q_field = quantum_potential(polar[k], metric);
        const auto u_field = U.sample(g, polar[k].time);

        // independent spatial route for the (P,S) form
        core::RealField P(g, core::Units::density);
        for (std::size_t i = 0; i < g.size(); ++i) P[i] = polar[k].A[i] * polar[k].A[i];
        std::array<core::RealField, 2> dP{core::RealField(g), core::RealField(g)};
        std::array<core::RealField, 2> d2P{core::RealField(g), core::RealField(g)};
        for (int a = 0; a < g.dim(); ++a) {
            dP[a] = core::gradient(P, a);
            std::vector<core::cplx> work(P.size());
            for (std::size_t i = 0; i < P.size(); ++i) work[i] = P[i];
            core::detail::derivative_axis(g, work, a, 2);
            for (std::size_t i = 0; i < P.size(); ++i) d2P[a][i] = work[i].real();
        }

        std::vector<double> r_as(g.size(), 0.0), r_p(g.size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (mask[i]) continue;
            const double dsdt = detail::centered_dt(polar[k - 1].S[i], polar[k].S[i],
                                                    polar[k + 1].S[i], hm, hp);
            double kinetic = 0.0;
            for (int a = 0; a < g.dim(); ++a)
                kinetic += 0.5 * metric.g(a) * d.s[a][i] * d.s[a][i];
            r_as[i] = dsdt + kinetic + u_field[i] + q_field[i];

            double bracket = 0.0, bracket_alg = 0.0;
            const double p0 = P[i];
            for (int a = 0; a < g.dim(); ++a) {
                bracket += metric.g(a) * (d2P[a][i] / p0 - 0.5 * dP[a][i] * dP[a][i] / (p0 * p0));
                const double dP_alg = 2.0 * (std::conj(psi[i]) * d.dpsi[a][i]).real();
                const double d2P_alg = 2.0 * ((std::conj(psi[i]) * d.d2psi[a][i]).real() +
                                              std::norm(d.dpsi[a][i]));
                bracket_alg +=
                    metric.g(a) * (d2P_alg / p0 - 0.5 * dP_alg * dP_alg / (p0 * p0));
            }
            r_p[i] = dsdt + kinetic + u_field[i] - 0.25 * hbar * hbar * bracket;
            gap = std::max(gap, std::abs(-0.25 * hbar * hbar * bracket_alg - q_field[i]));
        }
        acc_as.add_slice(g, r_as, mask);
        acc_p.add_slice(g, r_p, mask);
    }
    return QhjReport{acc_as.report("qhj_as_form"), acc_p.report("qhj_p_form"), gap};
}

/// Q recovered from the energy balance Q = -dS/dt - U - T (T the classical
/// kinetic term in S), finite-differencing dS/dt across stored slices at one
/// interior time. eq32_residual reports how far the psi-expansion identity
/// for T (the cross-term corrected form) deviates from T itself.
struct EnergyBalanceQ {
    core::RealField Q;
    double eq32_residual = 0.0;
    std::size_t time_index = 0;
};

inline EnergyBalanceQ q_from_energy_balance(const quantum::WaveSeries& series,
                                            const quantum::Potential& U,
                                            const core::Metric& metric, double hbar = 1.0,
                                            std::size_t k = 0) {
    detail::require_three_slices(series);
    const auto& g = series.frames.front().grid();
    core::detail::check_metric(g, metric);
    if (k == 0) k = series.frames.size() / 2;
    if (k < 1 || k + 1 >= series.frames.size())
        throw std::invalid_argument("q_from_energy_balance: interior time index required");

    auto polar = decompose_series(series, hbar);
    const auto mask = detail::union_mask(polar[k - 1], polar[k], polar[k + 1]);
    const double hm = polar[k].time - polar[k - 1].time;
    const double hp = polar[k + 1].time - polar[k].time;
    const auto& psi = series.frames[k];
    const auto d = polar_derivatives(psi, hbar);
    const auto u_field = U.sample(g, polar[k].time);

    // independent amplitude route for the identity check
    core::RealField amp(g);
    for (std::size_t i = 0; i < g.size(); ++i) amp[i] = polar[k].A[i];
    std::array<core::RealField, 2> dA{core::RealField(g), core::RealField(g)};
    for (int a = 0; a < g.dim(); ++a) dA[a] = core::gradient(amp, a);

    EnergyBalanceQ out{core::RealField(g, core::Units::energy), 0.0, k};
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (mask[i]) continue;
        const double dsdt = detail::centered_dt(polar[k - 1].S[i], polar[k].S[i],
                                                polar[k + 1].S[i], hm, hp);
        double kinetic = 0.0;
        core::cplx rhs{};
        for (int a = 0; a < g.dim(); ++a) {
            kinetic += 0.5 * metric.g(a) * d.s[a][i] * d.s[a][i];
            const core::cplx a_div = d.dpsi[a][i] / psi[i];
            const double r_dir = dA[a][i] / polar[k].A[i];
            rhs += metric.g(a) *
                   (-0.5 * hbar * hbar * a_div * a_div + 0.5 * hbar * hbar * r_dir * r_dir +
                    core::cplx(0.0, hbar) * r_dir * d.s[a][i]);
        }
        out.Q[i] = -dsdt - u_field[i] - kinetic;
        out.eq32_residual = std::max(out.eq32_residual, std::abs(rhs - kinetic));
    }
    out.Q.set_mask(mask);
    return out;
}

/// The Eq.-(16)-type stability condition evaluated directly in psi:
///   E16 = sum_a g_a d/dq_a [ (dpsi/psi) - (dA/A) ]
/// in the expanded pointwise form (second derivatives of psi and A = |psi|,
/// divided after differentiation). Also verifies the algebraic identity
/// E16 = (i/hbar) L with L built from the psi-product phase kernels.
struct Eq16Report {
    core::ComplexField expression;
    ResidualReport magnitude;
    double identity_L2 = 0.0;
    double identity_Linf = 0.0;
};

inline Eq16Report chetaev_condition_psi(const core::ComplexField& psi,
                                        const core::Metric& metric, double hbar = 1.0) {
    const auto& g = psi.grid();
    core::detail::check_metric(g, metric);
    auto polar = decompose(psi, hbar);
    if (polar.masked_fraction() >= 1.0)
        throw std::invalid_argument("chetaev_condition_psi: field entirely masked");
    const auto d = polar_derivatives(psi, hbar);

    core::RealField amp(g);
    for (std::size_t i = 0; i < g.size(); ++i) amp[i] = polar.A[i];
    std::array<core::RealField, 2> dA{core::RealField(g), core::RealField(g)};
    std::array<core::RealField, 2> d2A{core::RealField(g), core::RealField(g)};
    for (int a = 0; a < g.dim(); ++a) {
        dA[a] = core::gradient(amp, a);
        std::vector<core::cplx> work(amp.size());
        for (std::size_t i = 0; i < amp.size(); ++i) work[i] = amp[i];
        core::detail::derivative_axis(g, work, a, 2);
        for (std::size_t i = 0; i < amp.size(); ++i) d2A[a][i] = work[i].real();
    }

    Eq16Report out{core::ComplexField(g), {}, 0.0, 0.0};
    std::vector<double> mag(g.size(), 0.0), gapv(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (polar.masked(i)) continue;
        core::cplx e16{};
        double L = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const core::cplx adiv = d.dpsi[a][i] / psi[i];
            const core::cplx cdiv = d.d2psi[a][i] / psi[i];
            const double b = dA[a][i] / polar.A[i];
            const double dd = d2A[a][i] / polar.A[i];
            e16 += metric.g(a) * (cdiv - adiv * adiv - dd + b * b);
            L += metric.g(a) * d.s2[a][i];
        }
        out.expression[i] = e16;
        mag[i] = std::abs(e16);
        gapv[i] = std::abs(e16 - core::cplx(0.0, 1.0 / hbar) * L);
    }
    out.expression.set_time(psi.time());

    detail::SliceAccumulator acc_mag, acc_gap;
    acc_mag.add_slice(g, mag, polar.node_mask);
    acc_gap.add_slice(g, gapv, polar.node_mask);
    out.magnitude = acc_mag.report("eq16_expression");
    out.identity_L2 = acc_gap.l2_worst;
    out.identity_Linf = acc_gap.linf;
    return out;
}

} // namespace chetaev::bohm
