#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "chetaev/core/fields.hpp"
#include "chetaev/core/grid.hpp"
#include "chetaev/core/metric.hpp"
#include "chetaev/core/operators.hpp"
#include "chetaev/quantum/potential.hpp"
#include "chetaev/quantum/stencil.hpp"

namespace chetaev::quantum {

/// Discrete bound spectrum: energies ascending, states orthonormal under the
/// grid quadrature, residuals ||H psi - E psi|| per state.
struct Spectrum {
    std::vector<double> energies;
    std::vector<core::ComplexField> states;
    std::vector<double> residuals;
};

namespace detail {

/// Real symmetric Hamiltonian apply on a box grid with psi = 0 walls:
/// interior values evolve, wall entries of `out` are zeroed.
class DirichletHamiltonian {
public:
    DirichletHamiltonian(const core::Grid& g, const Potential& U, const core::Metric& m,
                         double hbar)
        : grid_(g), metric_(m), hbar_(hbar), u_(U.sample(g, 0.0).values()) {}

    const core::Grid& grid() const { return grid_; }

    void apply(const std::vector<double>& in, std::vector<double>& out) const {
        out.assign(in.size(), 0.0);
        std::vector<double> line, res;
        for (int a = 0; a < grid_.dim(); ++a) {
            const double coef = -0.5 * hbar_ * hbar_ * metric_.g(a);
            const double h = grid_.spacing(a);
            core::detail::for_each_line(grid_, a,
                                        [&](std::size_t off, std::size_t stride, std::size_t count) {
                line.resize(count);
                res.resize(count);
                for (std::size_t i = 0; i < count; ++i) line[i] = in[off + i * stride];
                d2_line_order4_wall(line.data(), res.data(), count, h);
                for (std::size_t i = 0; i < count; ++i) out[off + i * stride] += coef * res[i];
            });
        }
        for (std::size_t i = 0; i < in.size(); ++i) out[i] += u_[i] * in[i];
        zero_walls(out);
    }

    void zero_walls(std::vector<double>& v) const {
        const std::size_t nx = grid_.points(0);
        if (grid_.dim() == 1) {
            v[0] = 0.0;
            v[nx - 1] = 0.0;
            return;
        }
        const std::size_t ny = grid_.points(1);
        for (std::size_t iy = 0; iy < ny; ++iy) {
            v[grid_.index(0, iy)] = 0.0;
            v[grid_.index(nx - 1, iy)] = 0.0;
        }
        for (std::size_t ix = 0; ix < nx; ++ix) {
            v[grid_.index(ix, 0)] = 0.0;
            v[grid_.index(ix, ny - 1)] = 0.0;
        }
    }

    std::size_t interior_count() const {
        const std::size_t nx = grid_.points(0);
        if (grid_.dim() == 1) return nx - 2;
        return (nx - 2) * (grid_.points(1) - 2);
    }

private:
    core::Grid grid_;
    core::Metric metric_;
    double hbar_;
    std::vector<double> u_;
};

inline Spectrum finalize_spectrum(const DirichletHamiltonian& op,
                                  std::vector<std::vector<double>> raw_states,
                                  std::vector<double> energies) {
    const auto& g = op.grid();
    Spectrum sp;
    sp.energies = std::move(energies);

    // deterministic orthonormalization in ascending-energy order (modified
    // Gram-Schmidt; degenerate pairs keep the solver's grid-index ordering)
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i] * g.quad_weight(i);
        return s;
    };
    for (std::size_t k = 0; k < raw_states.size(); ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            const double c = dot(raw_states[j], raw_states[k]);
            for (std::size_t i = 0; i < raw_states[k].size(); ++i)
                raw_states[k][i] -= c * raw_states[j][i];
        }
        const double n = std::sqrt(dot(raw_states[k], raw_states[k]));
        if (!(n > 0.0)) throw std::runtime_error("solve_stationary: degenerate null state");
        for (double& x : raw_states[k]) x /= n;
    }

    std::vector<double> hx;
    for (std::size_t k = 0; k < raw_states.size(); ++k) {
        op.apply(raw_states[k], hx);
        double r2 = 0.0;
        for (std::size_t i = 0; i < hx.size(); ++i) {
            const double d = hx[i] - sp.energies[k] * raw_states[k][i];
            r2 += d * d * g.quad_weight(i);
        }
        sp.residuals.push_back(std::sqrt(r2));
        core::ComplexField f(g);
        for (std::size_t i = 0; i < hx.size(); ++i) f[i] = raw_states[k][i];
        sp.states.push_back(std::move(f));
    }
    return sp;
}

inline Spectrum solve_dense_1d(const DirichletHamiltonian& op, const Potential& U,
                               const core::Metric& metric, const core::Grid& g, int n_states,
                               double hbar) {
    const std::size_t m = g.points(0) - 2;
    const double h = g.spacing(0);
    const double kin = -0.5 * hbar * hbar * metric.g(0) / (12.0 * h * h);
    const auto u = U.sample(g, 0.0);

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t k = 0; k < m; ++k) {
        const bool edge = (k == 0 || k == m - 1);
        H(k, k) = kin * (edge ? -29.0 : -30.0) + u[k + 1];
        if (k + 1 < m) H(k, k + 1) = H(k + 1, k) = kin * 16.0;
        if (k + 2 < m) H(k, k + 2) = H(k + 2, k) = kin * (-1.0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw std::runtime_error("solve_stationary: eigensolve failed");

    std::vector<std::vector<double>> states;
    std::vector<double> energies;
    for (int k = 0; k < n_states; ++k) {
        energies.push_back(es.eigenvalues()(k));
        std::vector<double> full(g.size(), 0.0);
        for (std::size_t i = 0; i < m; ++i) full[i + 1] = es.eigenvectors()(i, k);
        states.push_back(std::move(full));
    }
    return finalize_spectrum(op, std::move(states), std::move(energies));
}

/// Lanczos with full reorthogonalization and deflation for the 2D problem
/// (matrix-free). States are extracted one at a time with the Krylov space
/// kept orthogonal to everything already found, so degenerate clusters are
/// resolved copy by copy.
inline Spectrum solve_lanczos(const DirichletHamiltonian& op, int n_states) {
    const auto& g = op.grid();
    const std::size_t n = g.size();
    const std::size_t m = op.interior_count();

    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };

    std::vector<std::vector<double>> found;
    std::vector<double> energies;

    auto orth_against = [&](std::vector<double>& w, const std::vector<std::vector<double>>& basis) {
        for (const auto& vj : basis) {
            const double c = dot(vj, w);
            for (std::size_t i = 0; i < n; ++i) w[i] -= c * vj[i];
        }
    };

    for (int s = 0; s < n_states; ++s) {
        std::size_t K = std::min(m - found.size(), std::size_t{160});
        double best_energy = 0.0;
        std::vector<double> best_vec;
        for (int attempt = 0; attempt < 4; ++attempt) {
            std::vector<std::vector<double>> V;
            std::vector<double> alpha, beta;
            std::mt19937_64 rng(42 + 7919ULL * static_cast<unsigned long long>(s));
            std::uniform_real_distribution<double> ud(-1.0, 1.0);
            std::vector<double> v(n);
            for (double& x : v) x = ud(rng);
            op.zero_walls(v);
            orth_against(v, found);
            double nv = std::sqrt(dot(v, v));
            for (double& x : v) x /= nv;
            V.push_back(v);

            std::vector<double> w(n);
            for (std::size_t k = 0; k < K; ++k) {
                op.apply(V[k], w);
                const double a = dot(V[k], w);
                alpha.push_back(a);
                for (std::size_t i = 0; i < n; ++i) w[i] -= a * V[k][i];
                if (k > 0)
                    for (std::size_t i = 0; i < n; ++i) w[i] -= beta[k - 1] * V[k - 1][i];
                for (int pass = 0; pass < 2; ++pass) {
                    orth_against(w, found);
                    orth_against(w, V);
                }
                const double b = std::sqrt(dot(w, w));
                if (!(b > 1e-13)) break; // Krylov space exhausted
                beta.push_back(b);
                if (k + 1 < K) {
                    std::vector<double> next(n);
                    for (std::size_t i = 0; i < n; ++i) next[i] = w[i] / b;
                    V.push_back(std::move(next));
                }
            }

            const std::size_t kk = alpha.size();
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(kk, kk);
            for (std::size_t i = 0; i < kk; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < kk && i + 1 < V.size()) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            best_energy = es.eigenvalues()(0);
            best_vec.assign(n, 0.0);
            for (std::size_t k = 0; k < V.size(); ++k) {
                const double c = es.eigenvectors()(k, 0);
                for (std::size_t i = 0; i < n; ++i) best_vec[i] += c * V[k][i];
            }
            // true residual of the lowest Ritz pair
            std::vector<double> hx;
            op.apply(best_vec, hx);
            double r2 = 0.0, scale = std::max(1.0, std::abs(best_energy));
            for (std::size_t i = 0; i < n; ++i) {
                const double d = hx[i] - best_energy * best_vec[i];
                r2 += d * d;
            }
            if (std::sqrt(r2) <= 1e-8 * scale || K >= m - found.size()) break;
            K = std::min(m - found.size(), K * 2);
        }
        orth_against(best_vec, found);
        const double nv = std::sqrt(dot(best_vec, best_vec));
        for (double& x : best_vec) x /= nv;
        found.push_back(std::move(best_vec));
        energies.push_back(best_energy);
    }

    // deflation returns ascending energies up to round-off; enforce ordering
    std::vector<std::size_t> order(found.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return energies[a] < energies[b]; });
    std::vector<std::vector<double>> states;
    std::vector<double> sorted_e;
    for (std::size_t i : order) {
        states.push_back(std::move(found[i]));
        sorted_e.push_back(energies[i]);
    }
    return finalize_spectrum(op, std::move(states), std::move(sorted_e));
}

} // namespace detail

/// Lowest n_states eigenpairs of the discrete Hamiltonian on a box grid.
/// 1D: dense symmetric solve of the 4th-order wall-closed stencil.
/// 2D: Lanczos with full reorthogonalization on the matrix-free apply.
inline Spectrum solve_stationary(const Potential& U, const core::Metric& metric,
                                 const core::Grid& g, int n_states, double hbar = 1.0) {
    if (g.periodic()) throw std::invalid_argument("solve_stationary: box grid required");
    if (U.time_dependent())
        throw std::invalid_argument("solve_stationary: potential must be time-independent");
    core::detail::check_metric(g, metric);
    detail::DirichletHamiltonian op(g, U, metric, hbar);
    if (n_states < 1 || static_cast<std::size_t>(n_states) > op.interior_count())
        throw std::invalid_argument("solve_stationary: n_states exceeds interior node count");
    if (g.dim() == 1) return detail::solve_dense_1d(op, U, metric, g, n_states, hbar);
    return detail::solve_lanczos(op, n_states);
}

/// Box-size sensitivity probe: re-solve on a domain twice as large (same
/// spacing) and flag states whose energies drift. A genuine bound state is
/// insensitive to the wall position; scattering-like levels are box artifacts.
struct BoxSensitivity {
    std::vector<double> energy_shift; // |E(2L) - E(L)| per state
    std::vector<bool> box_artifact;
    Spectrum base;
    Spectrum doubled;
};

inline BoxSensitivity box_sensitivity(const Potential& U, const core::Metric& metric,
                                      const core::Grid& g, int n_states, double hbar = 1.0,
                                      double threshold = 1e-4) {
    if (g.dim() != 1) throw std::invalid_argument("box_sensitivity: 1D grids only");
    BoxSensitivity out;
    out.base = solve_stationary(U, metric, g, n_states, hbar);
    const double c = 0.5 * (g.q_min(0) + g.q_max(0));
    const double L = g.extent(0);
    auto big = core::Grid::make_1d(c - L, c + L, 2 * g.points(0) - 1, core::Boundary::box);
    out.doubled = solve_stationary(U, metric, big, n_states, hbar);
    for (int k = 0; k < n_states; ++k) {
        const double shift = std::abs(out.doubled.energies[k] - out.base.energies[k]);
        out.energy_shift.push_back(shift);
        out.box_artifact.push_back(shift > threshold * std::max(1.0, std::abs(out.base.energies[k])));
    }
    return out;
}

} // namespace chetaev::quantum
