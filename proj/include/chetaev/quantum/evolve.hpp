#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "chetaev/core/fft.hpp"
#include "chetaev/core/fields.hpp"
#include "chetaev/core/grid.hpp"
#include "chetaev/core/metric.hpp"
#include "chetaev/core/operators.hpp"
#include "chetaev/quantum/potential.hpp"
#include "chetaev/quantum/stencil.hpp"

namespace chetaev::quantum {

using core::ComplexField;
using core::cplx;

enum class Scheme { split_step_spectral, crank_nicolson };

struct EvolverConfig {
    double dt = 1e-2;
    Scheme scheme = Scheme::split_step_spectral;
    double t_final = 1.0;
    std::size_t store_every = 1;
};

/// Stored frames of an evolution run. Frames carry their time stamps; the
/// stored spacing is dt * store_every.
struct WaveSeries {
    std::vector<ComplexField> frames;
    double dt = 0.0;
    std::size_t store_every = 1;

    double store_dt() const { return dt * static_cast<double>(store_every); }
    const ComplexField& front() const { return frames.front(); }
    const ComplexField& back() const { return frames.back(); }
};

/// H psi = -(hbar^2/2) sum g_a d2_a psi + U psi. Spectral kinetic term on
/// periodic grids; 4th-order wall-closed stencil on box grids.
inline ComplexField hamiltonian_apply(const ComplexField& psi, const Potential& U,
                                      const core::Metric& metric, double hbar = 1.0) {
    core::detail::check_metric(psi.grid(), metric);
    std::vector<cplx> acc(psi.size(), cplx{});
    detail::add_kinetic(psi, metric, hbar, acc);
    const auto u = U.sample(psi.grid(), psi.time());
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += u[i] * psi[i];
    ComplexField out(psi.grid(), std::move(acc), psi.time());
    return out;
}

inline double energy_expectation(const ComplexField& psi, const Potential& U,
                                 const core::Metric& metric, double hbar = 1.0) {
    return core::inner_product(psi, hamiltonian_apply(psi, U, metric, hbar)).real();
}

namespace detail {

inline void fft_axis(const core::Grid& g, std::vector<cplx>& data, int axis, bool forward) {
    core::detail::transform_axis(g, data, axis, [&](cplx* line, std::size_t n) {
        if (forward)
            core::detail::fft(line, n);
        else
            core::detail::ifft(line, n);
    });
}

/// One split-step (Strang): half potential phase, full kinetic phase in
/// wavenumber space, half potential phase. U sampled at the midpoint time.
class SplitStepper {
public:
    SplitStepper(const core::Grid& g, const Potential& U, const core::Metric& m, double hbar,
                 double dt)
        : grid_(g), pot_(U), hbar_(hbar), dt_(dt) {
        for (int a = 0; a < g.dim(); ++a) {
            auto& k2 = k2_[a];
            k2.resize(g.points(a));
            for (std::size_t j = 0; j < g.points(a); ++j) {
                const double k = core::detail::wavenumber(j, g.points(a), g.extent(a));
                k2[j] = k * k;
            }
        }
        kin_phase_.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            double e = 0.5 * hbar * hbar * k2_[0][g.ix_of(i)] * m.g(0);
            if (g.dim() == 2) e += 0.5 * hbar * hbar * k2_[1][g.iy_of(i)] * m.g(1);
            kin_phase_[i] = std::polar(1.0, -e * dt / hbar);
        }
        if (!pot_.time_dependent()) u_static_ = pot_.sample(g, 0.0).values();
    }

    void step(std::vector<cplx>& v, double t) {
        apply_half_potential(v, t);
        fft_axis(grid_, v, 0, true);
        if (grid_.dim() == 2) fft_axis(grid_, v, 1, true);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= kin_phase_[i];
        if (grid_.dim() == 2) fft_axis(grid_, v, 1, false);
        fft_axis(grid_, v, 0, false);
        apply_half_potential(v, t);
    }

private:
    void apply_half_potential(std::vector<cplx>& v, double t) {
        const double c = -0.5 * dt_ / hbar_;
        if (!pot_.time_dependent()) {
            for (std::size_t i = 0; i < v.size(); ++i)
                v[i] *= std::polar(1.0, c * u_static_[i]);
        } else {
            const auto u = pot_.sample(grid_, t + 0.5 * dt_).values();
            for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, c * u[i]);
        }
    }

    core::Grid grid_;
    Potential pot_;
    double hbar_, dt_;
    std::array<std::vector<double>, 2> k2_;
    std::vector<cplx> kin_phase_;
    std::vector<double> u_static_;
};

/// Complex Thomas solve for the Cayley step (I + i a H) x = rhs on one line's
/// interior; wall values stay pinned at zero.
inline void cayley_line(std::vector<cplx>& line, double h, double g_axis, double hbar,
                        double alpha, const double* u_line) {
    const std::size_t n = line.size();
    const std::size_t m = n - 2;
    if (m == 0) return;
    const double off = -0.5 * hbar * hbar * g_axis / (h * h);
    const double diag_kin = -2.0 * off;
    static thread_local std::vector<cplx> rhs, c, x;
    rhs.resize(m);
    c.resize(m);
    x.resize(m);
    auto diag = [&](std::size_t k) {
        return diag_kin + (u_line ? u_line[k + 1] : 0.0);
    };
    // rhs = (I - i alpha H) psi on the interior
    for (std::size_t k = 0; k < m; ++k) {
        cplx h_psi = diag(k) * line[k + 1];
        if (k > 0) h_psi += off * line[k];
        if (k + 1 < m) h_psi += off * line[k + 2];
        rhs[k] = line[k + 1] - cplx(0.0, alpha) * h_psi;
    }
    // Thomas forward sweep for (I + i alpha H)
    const cplx ioff = cplx(0.0, alpha) * off;
    cplx beta = 1.0 + cplx(0.0, alpha) * diag(0);
    x[0] = rhs[0] / beta;
    for (std::size_t k = 1; k < m; ++k) {
        c[k] = ioff / beta;
        beta = 1.0 + cplx(0.0, alpha) * diag(k) - ioff * c[k];
        x[k] = (rhs[k] - ioff * x[k - 1]) / beta;
    }
    for (std::size_t k = m - 1; k >= 1; --k) x[k - 1] -= c[k] * x[k];
    for (std::size_t k = 0; k < m; ++k) line[k + 1] = x[k];
    line[0] = 0.0;
    line[n - 1] = 0.0;
}

/// Crank-Nicolson on a box grid: 1D uses the full-H Cayley tridiagonal; 2D
/// uses the symmetric split U/2 * Cx(dt/2) * Cy(dt) * Cx(dt/2) * U/2 with
/// every factor unitary.
class CrankNicolsonStepper {
public:
    CrankNicolsonStepper(const core::Grid& g, const Potential& U, const core::Metric& m,
                         double hbar, double dt)
        : grid_(g), pot_(U), metric_(m), hbar_(hbar), dt_(dt) {
        if (!pot_.time_dependent()) u_static_ = pot_.sample(g, 0.0).values();
    }

    void step(std::vector<cplx>& v, double t) {
        const std::vector<double>& u =
            pot_.time_dependent() ? (u_scratch_ = pot_.sample(grid_, t + 0.5 * dt_).values())
                                  : u_static_;
        if (grid_.dim() == 1) {
            cayley_line_full(v, u);
            return;
        }
        apply_potential_phase(v, u, -0.5 * dt_ / hbar_);
        cayley_axis(v, 0, 0.5 * dt_);
        cayley_axis(v, 1, dt_);
        cayley_axis(v, 0, 0.5 * dt_);
        apply_potential_phase(v, u, -0.5 * dt_ / hbar_);
    }

private:
    void cayley_line_full(std::vector<cplx>& v, const std::vector<double>& u) {
        cayley_line(v, grid_.spacing(0), metric_.g(0), hbar_, 0.5 * dt_ / hbar_, u.data());
    }

    void cayley_axis(std::vector<cplx>& v, int axis, double dt_eff) {
        const double alpha = 0.5 * dt_eff / hbar_;
        std::vector<cplx> line;
        core::detail::for_each_line(grid_, axis,
                                    [&](std::size_t off, std::size_t stride, std::size_t count) {
            line.resize(count);
            for (std::size_t i = 0; i < count; ++i) line[i] = v[off + i * stride];
            cayley_line(line, grid_.spacing(axis), metric_.g(axis), hbar_, alpha, nullptr);
            for (std::size_t i = 0; i < count; ++i) v[off + i * stride] = line[i];
        });
    }

    void apply_potential_phase(std::vector<cplx>& v, const std::vector<double>& u, double c) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, c * u[i]);
    }

    core::Grid grid_;
    Potential pot_;
    core::Metric metric_;
    double hbar_, dt_;
    std::vector<double> u_static_, u_scratch_;
};

inline void zero_walls(const core::Grid& g, std::vector<cplx>& v) {
    const std::size_t nx = g.points(0);
    if (g.dim() == 1) {
        v[0] = 0.0;
        v[nx - 1] = 0.0;
        return;
    }
    const std::size_t ny = g.points(1);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        v[g.index(0, iy)] = 0.0;
        v[g.index(nx - 1, iy)] = 0.0;
    }
    for (std::size_t ix = 0; ix < nx; ++ix) {
        v[g.index(ix, 0)] = 0.0;
        v[g.index(ix, ny - 1)] = 0.0;
    }
}

} // namespace detail

/// Time evolution under i hbar dpsi/dt = H psi. Returns the stored frames
/// (always including t = 0 and the final step). Negative dt is accepted so a
/// run can be reversed; config-file validation enforces dt > 0 for scenarios.
inline WaveSeries evolve(const ComplexField& psi0, const Potential& U, const core::Metric& metric,
                         const EvolverConfig& cfg, double hbar = 1.0) {
    const auto& g = psi0.grid();
    core::detail::check_metric(g, metric);
    if (cfg.dt == 0.0) throw std::invalid_argument("evolve: dt must be nonzero");
    if (cfg.store_every == 0) throw std::invalid_argument("evolve: store_every must be >= 1");
    if (cfg.scheme == Scheme::split_step_spectral && !g.periodic())
        throw std::invalid_argument("evolve: split_step_spectral requires a periodic grid");
    if (cfg.scheme == Scheme::crank_nicolson && g.periodic())
        throw std::invalid_argument("evolve: crank_nicolson requires a box grid");
    if (!psi0.is_normalized(1e-6))
        throw std::invalid_argument("evolve: psi0 must be normalized");

    const double duration = std::abs(cfg.t_final);
    const std::size_t n_steps =
        static_cast<std::size_t>(std::llround(duration / std::abs(cfg.dt)));

    WaveSeries series;
    series.dt = cfg.dt;
    series.store_every = cfg.store_every;

    std::vector<cplx> v = psi0.values();
    double t = psi0.time();
    if (cfg.scheme == Scheme::crank_nicolson) detail::zero_walls(g, v);

    auto store = [&](double time) {
        ComplexField f(g, v, time);
        series.frames.push_back(std::move(f));
    };
    store(t);
    if (n_steps == 0) return series;

    detail::SplitStepper split(g, U, metric, hbar, cfg.dt);
    detail::CrankNicolsonStepper cn(g, U, metric, hbar, cfg.dt);

    for (std::size_t s = 1; s <= n_steps; ++s) {
        if (cfg.scheme == Scheme::split_step_spectral)
            split.step(v, t);
        else
            cn.step(v, t);
        t += cfg.dt;
        for (const cplx& z : v)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw std::runtime_error("evolve: non-finite state at step " + std::to_string(s));
        if (s % cfg.store_every == 0 || s == n_steps) store(t);
    }
    return series;
}

} // namespace chetaev::quantum
