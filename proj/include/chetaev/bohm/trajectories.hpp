#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "chetaev/bohm/polar.hpp"
#include "chetaev/bohm/quantum_potential.hpp"
#include "chetaev/core/fields.hpp"
#include "chetaev/core/metric.hpp"
#include "chetaev/core/operators.hpp"
#include "chetaev/core/spline.hpp"
#include "chetaev/quantum/evolve.hpp"

namespace chetaev::bohm {

enum class SamplingLaw { density, uniform, explicit_list };

struct TrajectoryEnsemble {
    std::size_t n_traj = 0;
    std::uint64_t seed = 0;
    SamplingLaw law = SamplingLaw::density;
    std::vector<double> times;
    // positions[time][trajectory]; coordinates are unwrapped on periodic grids
    std::vector<std::vector<std::array<double, 2>>> positions;
};

namespace detail {

/// Interpolant of one stored velocity field. 1D: C2 cubic spline. 2D: bicubic
/// Hermite patches with node derivatives from the grid operators.
class VelocitySlice {
public:
    VelocitySlice(const core::Grid& g, const std::array<core::RealField, 2>& v) : grid_(g) {
        max_speed_ = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double s2 = 0.0;
            for (int a = 0; a < g.dim(); ++a) s2 += v[a][i] * v[a][i];
            max_speed_ = std::max(max_speed_, std::sqrt(s2));
        }
        if (g.dim() == 1) {
            if (g.periodic())
                spline_ = std::make_unique<core::CubicSpline>(
                    core::CubicSpline::periodic(g.q_min(0), g.spacing(0), v[0].values()));
            else
                spline_ = std::make_unique<core::CubicSpline>(
                    core::CubicSpline::natural(g.q_min(0), g.spacing(0), v[0].values()));
            return;
        }
        for (int a = 0; a < 2; ++a) {
            f_[a] = v[a].values();
            fx_[a] = core::gradient(v[a], 0).values();
            fy_[a] = core::gradient(v[a], 1).values();
            fxy_[a] = core::gradient(core::gradient(v[a], 0), 1).values();
        }
    }

    std::array<double, 2> eval(const std::array<double, 2>& x) const {
        if (grid_.dim() == 1) return {(*spline_[0])(x[0]), 0.0};
        return {eval2d(0, x), eval2d(1, x)};
    }

    double max_speed() const { return max_speed_; }

private:
    static void hermite_basis(double t, double out[4]) {
        out[0] = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        out[1] = t * (1.0 - t) * (1.0 - t);
        out[2] = t * t * (3.0 - 2.0 * t);
        out[3] = t * t * (t - 1.0);
    }

    double eval2d(int comp, const std::array<double, 2>& x) const {
        const auto& g = grid_;
        const std::size_t nx = g.points(0), ny = g.points(1);
        const double hx = g.spacing(0), hy = g.spacing(1);
        double ux = (x[0] - g.q_min(0)) / hx;
        double uy = (x[1] - g.q_min(1)) / hy;
        long ix, iy;
        if (g.periodic()) {
            ux -= std::floor(ux / static_cast<double>(nx)) * static_cast<double>(nx);
            uy -= std::floor(uy / static_cast<double>(ny)) * static_cast<double>(ny);
            ix = static_cast<long>(ux);
            iy = static_cast<long>(uy);
        } else {
            ux = std::clamp(ux, 0.0, static_cast<double>(nx - 1));
            uy = std::clamp(uy, 0.0, static_cast<double>(ny - 1));
            ix = std::min(static_cast<long>(ux), static_cast<long>(nx - 2));
            iy = std::min(static_cast<long>(uy), static_cast<long>(ny - 2));
        }
        const double tx = ux - static_cast<double>(ix);
        const double ty = uy - static_cast<double>(iy);
        auto node = [&](long jx, long jy) {
            if (g.periodic()) {
                jx = (jx % static_cast<long>(nx) + nx) % static_cast<long>(nx);
                jy = (jy % static_cast<long>(ny) + ny) % static_cast<long>(ny);
            }
            return g.index(static_cast<std::size_t>(jx), static_cast<std::size_t>(jy));
        };
        double bx[4], by[4];
        hermite_basis(tx, bx);
        hermite_basis(ty, by);
        const std::size_t c00 = node(ix, iy), c10 = node(ix + 1, iy);
        const std::size_t c01 = node(ix, iy + 1), c11 = node(ix + 1, iy + 1);
        const auto& f = f_[comp];
        const auto& fx = fx_[comp];
        const auto& fy = fy_[comp];
        const auto& fxy = fxy_[comp];
        // tensor Hermite: rows over x-basis {value0, slope0, value1, slope1}
        const double rx[4] = {bx[0], hx * bx[1], bx[2], hx * bx[3]};
        const double ry[4] = {by[0], hy * by[1], by[2], hy * by[3]};
        const double m[4][4] = {
            {f[c00], fy[c00], f[c01], fy[c01]},
            {fx[c00], fxy[c00], fx[c01], fxy[c01]},
            {f[c10], fy[c10], f[c11], fy[c11]},
            {fx[c10], fxy[c10], fx[c11], fxy[c11]},
        };
        double acc = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) acc += rx[i] * m[i][j] * ry[j];
        return acc;
    }

    core::Grid grid_;
    std::unique_ptr<core::CubicSpline> spline_[1 + 1];
    std::array<std::vector<double>, 2> f_, fx_, fy_, fxy_;
    double max_speed_ = 0.0;
};

inline std::uint64_t stream_seed(std::uint64_t seed, std::size_t idx) {
    // per-trajectory stream derived from seed + index (splitmix64 mix)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(idx) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Inverse-CDF sample of a per-node probability table along one axis slice.
inline double sample_cells(const std::vector<double>& pmf, double u, double x0, double h,
                           bool periodic, std::size_t n) {
    double total = 0.0;
    for (double p : pmf) total += p;
    double target = u * total;
    for (std::size_t i = 0; i < n; ++i) {
        const bool edge = !periodic && (i == 0 || i + 1 == n);
        const double width = edge ? 0.5 * h : h;
        if (target <= pmf[i] || i + 1 == n) {
            const double frac = pmf[i] > 0.0 ? target / pmf[i] : 0.5;
            double left = x0 + static_cast<double>(i) * h - (periodic ? 0.5 * h : 0.5 * h);
            if (!periodic && i == 0) left = x0;
            return left + frac * width;
        }
        target -= pmf[i];
    }
    return x0;
}

} // namespace detail

/// Sample initial positions for an ensemble.
inline std::vector<std::array<double, 2>> sample_initial_positions(
    const core::ComplexField& psi0, SamplingLaw law, std::size_t n_traj, std::uint64_t seed,
    const std::vector<std::array<double, 2>>* explicit_positions = nullptr) {
    const auto& g = psi0.grid();
    std::vector<std::array<double, 2>> out;
    if (law == SamplingLaw::explicit_list) {
        if (!explicit_positions)
            throw std::invalid_argument("sample_initial_positions: explicit list missing");
        return *explicit_positions;
    }
    out.resize(n_traj, {0.0, 0.0});
    if (law == SamplingLaw::uniform) {
        for (std::size_t t = 0; t < n_traj; ++t) {
            std::mt19937_64 rng(detail::stream_seed(seed, t));
            std::uniform_real_distribution<double> ud(0.0, 1.0);
            for (int a = 0; a < g.dim(); ++a)
                out[t][a] = g.q_min(a) + ud(rng) * g.extent(a);
        }
        return out;
    }
    // density |psi0|^2: per-node cell probabilities
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = std::norm(psi0[i]) * g.quad_weight(i);
    if (g.dim() == 1) {
        for (std::size_t t = 0; t < n_traj; ++t) {
            std::mt19937_64 rng(detail::stream_seed(seed, t));
            std::uniform_real_distribution<double> ud(0.0, 1.0);
            out[t][0] = detail::sample_cells(w, ud(rng), g.q_min(0), g.spacing(0), g.periodic(),
                                             g.points(0));
        }
        return out;
    }
    const std::size_t nx = g.points(0), ny = g.points(1);
    std::vector<double> marginal(nx, 0.0);
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t iy = 0; iy < ny; ++iy) marginal[ix] += w[g.index(ix, iy)];
    for (std::size_t t = 0; t < n_traj; ++t) {
        std::mt19937_64 rng(detail::stream_seed(seed, t));
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        // pick the x-cell by marginal, then y within that row
        double target = ud(rng);
        double total = 0.0;
        for (double p : marginal) total += p;
        target *= total;
        std::size_t ix = nx - 1;
        for (std::size_t i = 0; i < nx; ++i) {
            if (target <= marginal[i]) {
                ix = i;
                break;
            }
            target -= marginal[i];
        }
        const double fx = marginal[ix] > 0.0 ? target / marginal[ix] : 0.5;
        const bool edge_x = !g.periodic() && (ix == 0 || ix + 1 == nx);
        const double wx = edge_x ? 0.5 * g.spacing(0) : g.spacing(0);
        double left_x = g.coord(0, ix) - (!g.periodic() && ix == 0 ? 0.0 : 0.5 * g.spacing(0));
        out[t][0] = left_x + fx * wx;
        std::vector<double> row(ny);
        for (std::size_t iy = 0; iy < ny; ++iy) row[iy] = w[g.index(ix, iy)];
        out[t][1] = detail::sample_cells(row, ud(rng), g.q_min(1), g.spacing(1), g.periodic(),
                                         g.points(1));
    }
    return out;
}

/// Advect an ensemble through the Bohm velocity field of a stored series:
/// dx/dt = v(x,t), RK4 over each stored interval, velocity linear in time
/// between slices and cubic in space. Deterministic for a fixed seed.
inline TrajectoryEnsemble integrate_trajectories(
    const quantum::WaveSeries& series, const core::Metric& metric, SamplingLaw law,
    std::size_t n_traj, std::uint64_t seed, double hbar = 1.0,
    const std::vector<std::array<double, 2>>* explicit_positions = nullptr) {
    if (series.frames.size() < 2)
        throw std::invalid_argument("integrate_trajectories: need at least 2 stored slices");
    const auto& g = series.frames.front().grid();
    core::detail::check_metric(g, metric);

    std::vector<detail::VelocitySlice> slices;
    slices.reserve(series.frames.size());
    double vmax = 0.0;
    for (const auto& f : series.frames) {
        auto polar = decompose(f, hbar);
        slices.emplace_back(g, bohm_velocity(polar, metric));
        vmax = std::max(vmax, slices.back().max_speed());
    }
    double h_min = g.spacing(0);
    for (int a = 1; a < g.dim(); ++a) h_min = std::min(h_min, g.spacing(a));
    double dt_store = 0.0;
    for (std::size_t k = 1; k < series.frames.size(); ++k)
        dt_store = std::max(dt_store, series.frames[k].time() - series.frames[k - 1].time());
    if (!(dt_store * vmax < 4.0 * h_min))
        throw std::invalid_argument(
            "integrate_trajectories: sampling guard violated (dt_store * max|v| >= 4h)");

    TrajectoryEnsemble ens;
    ens.seed = seed;
    ens.law = law;
    auto x0 = sample_initial_positions(series.frames.front(), law, n_traj, seed,
                                       explicit_positions);
    ens.n_traj = x0.size();
    ens.times.reserve(series.frames.size());
    for (const auto& f : series.frames) ens.times.push_back(f.time());
    ens.positions.reserve(series.frames.size());
    ens.positions.push_back(x0);

    auto check_domain = [&](const std::array<double, 2>& x, std::size_t traj, double t) {
        if (g.periodic()) return;
        for (int a = 0; a < g.dim(); ++a)
            if (x[a] < g.q_min(a) || x[a] > g.q_max(a))
                throw std::runtime_error("integrate_trajectories: trajectory " +
                                         std::to_string(traj) + " left the grid at t = " +
                                         std::to_string(t));
    };

    std::vector<std::array<double, 2>> cur = std::move(x0);
    for (std::size_t k = 1; k < series.frames.size(); ++k) {
        const double t0 = ens.times[k - 1];
        const double dt = ens.times[k] - t0;
        const auto& va = slices[k - 1];
        const auto& vb = slices[k];
        auto vel = [&](const std::array<double, 2>& x, double theta) {
            const auto a = va.eval(x);
            const auto b = vb.eval(x);
            return std::array<double, 2>{(1.0 - theta) * a[0] + theta * b[0],
                                         (1.0 - theta) * a[1] + theta * b[1]};
        };
        for (std::size_t t = 0; t < cur.size(); ++t) {
            auto& x = cur[t];
            const auto k1 = vel(x, 0.0);
            const auto k2 = vel({x[0] + 0.5 * dt * k1[0], x[1] + 0.5 * dt * k1[1]}, 0.5);
            const auto k3 = vel({x[0] + 0.5 * dt * k2[0], x[1] + 0.5 * dt * k2[1]}, 0.5);
            const auto k4 = vel({x[0] + dt * k3[0], x[1] + dt * k3[1]}, 1.0);
            for (int a = 0; a < g.dim(); ++a)
                x[a] += dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
            check_domain(x, t, ens.times[k]);
        }
        ens.positions.push_back(cur);
    }
    return ens;
}

/// L1 distance between the trajectory histogram (bin width 2h) and |psi(t)|^2
/// per stored time. Both distributions are normalized before comparison.
inline std::vector<double> equivariance_check(const TrajectoryEnsemble& ens,
                                              const quantum::WaveSeries& series) {
    if (ens.positions.size() != series.frames.size())
        throw std::invalid_argument("equivariance_check: ensemble/series length mismatch");
    const auto& g = series.frames.front().grid();
    for (std::size_t k = 0; k < ens.times.size(); ++k)
        if (std::abs(ens.times[k] - series.frames[k].time()) > 1e-12)
            throw std::invalid_argument("equivariance_check: ensemble/series time mismatch");

    const std::size_t bx = (g.points(0) + 1) / 2;
    const std::size_t by = g.dim() == 2 ? (g.points(1) + 1) / 2 : 1;
    auto bin_of = [&](const std::array<double, 2>& x) {
        std::size_t b[2] = {0, 0};
        for (int a = 0; a < g.dim(); ++a) {
            double u = (x[a] - g.q_min(a)) / g.extent(a);
            u -= std::floor(u); // wrap; harmless on box where u is already in [0,1]
            const std::size_t n = a == 0 ? bx : by;
            b[a] = std::min(static_cast<std::size_t>(u * static_cast<double>(n)), n - 1);
        }
        return b[0] * by + b[1];
    };
    auto node_bin = [&](std::size_t i) {
        const std::size_t bxi = std::min(g.ix_of(i) / 2, bx - 1);
        const std::size_t byi = g.dim() == 2 ? std::min(g.iy_of(i) / 2, by - 1) : 0;
        return bxi * by + byi;
    };

    std::vector<double> out;
    out.reserve(series.frames.size());
    std::vector<double> model(bx * by), counts(bx * by);
    for (std::size_t k = 0; k < series.frames.size(); ++k) {
        std::fill(model.begin(), model.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0.0);
        const auto& psi = series.frames[k];
        double total = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double w = std::norm(psi[i]) * g.quad_weight(i);
            model[node_bin(i)] += w;
            total += w;
        }
        for (double& m : model) m /= total;
        for (const auto& x : ens.positions[k]) counts[bin_of(x)] += 1.0;
        const double n = static_cast<double>(ens.positions[k].size());
        double l1 = 0.0;
        for (std::size_t b = 0; b < model.size(); ++b) l1 += std::abs(counts[b] / n - model[b]);
        out.push_back(l1);
    }
    return out;
}

} // namespace chetaev::bohm
