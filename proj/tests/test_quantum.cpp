#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "chetaev/core/operators.hpp"
#include "chetaev/quantum/evolve.hpp"
#include "chetaev/quantum/potential.hpp"
#include "chetaev/quantum/spectrum.hpp"
#include "chetaev/quantum/wavepackets.hpp"
#include "test_util.hpp"

using namespace chetaev;
using namespace chetaev::quantum;
using namespace testutil;
using core::Boundary;
using core::Grid;
using core::Metric;

namespace {

double variance_x(const core::ComplexField& psi) {
    double m1 = 0.0, m2 = 0.0;
    const auto& g = psi.grid();
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double p = std::norm(psi[i]) * g.quad_weight(i);
        m1 += g.coord(0, i) * p;
        m2 += g.coord(0, i) * g.coord(0, i) * p;
    }
    return m2 - m1 * m1;
}

/// Test-only oracle: ground pair of the classic 3-point Dirichlet Hamiltonian,
/// the operator Crank-Nicolson actually advances.
std::pair<double, core::ComplexField> ground_pair_3pt(const Grid& g, const Potential& U,
                                                      double mass) {
    const std::size_t m = g.points(0) - 2;
    const double h = g.spacing(0);
    const auto u = U.sample(g);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t k = 0; k < m; ++k) {
        H(k, k) = 1.0 / (mass * h * h) + u[k + 1];
        if (k + 1 < m) H(k, k + 1) = H(k + 1, k) = -0.5 / (mass * h * h);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    core::ComplexField psi(g);
    for (std::size_t i = 0; i < m; ++i) psi[i + 1] = es.eigenvectors()(i, 0);
    psi.normalize();
    return {es.eigenvalues()(0), psi};
}

} // namespace

TEST_CASE("free plane wave evolves with the exact dispersion phase") {
    auto g = Grid::make_1d(0.0, 2.0 * pi, 64, Boundary::periodic);
    auto metric = Metric::isotropic(1, 1.0);
    auto psi0 = make_plane_wave(g, {3, 0});
    const double p = plane_wave_momentum(g, 3, 0, 1.0);
    const double E = p * p / 2.0;

    EvolverConfig cfg{.dt = 0.01, .scheme = Scheme::split_step_spectral, .t_final = 2.0};
    auto series = evolve(psi0, Potential::free(), metric, cfg);

    const double t = series.back().time();
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto expect = psi0[i] * std::polar(1.0, -E * t);
        err = std::max(err, std::abs(series.back()[i] - expect));
    }
    CHECK(err <= 1e-8);
}

TEST_CASE("oscillator ground state is stationary under split-step") {
    auto g = Grid::make_1d(-10.0, 10.0, 256, Boundary::periodic);
    auto metric = Metric::isotropic(1, 1.0);
    auto U = Potential::harmonic(1.0, metric);
    auto psi0 = make_ho_eigenstate(g, {0, 0}, metric, 1.0);

    EvolverConfig cfg{.dt = 2.0 * pi / 2048, .scheme = Scheme::split_step_spectral,
                      .t_final = 2.0 * pi, .store_every = 256};
    auto series = evolve(psi0, U, metric, cfg);

    for (const auto& f : series.frames) {
        double dmax = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            dmax = std::max(dmax, std::abs(std::abs(f[i]) - std::abs(psi0[i])));
        CHECK(dmax <= 1e-6);
    }
    // accumulated global phase ~ -E0 t
    const double t = series.back().time();
    const auto overlap = core::inner_product(psi0, series.back());
    const double phase = std::arg(overlap);
    const double expect = std::remainder(-0.5 * t, 2.0 * pi);
    CHECK(std::remainder(phase - expect, 2.0 * pi) == Catch::Approx(0.0).margin(1e-5));
}

TEST_CASE("free Gaussian spreads along the analytic variance law") {
    auto g = Grid::make_1d(-24.0, 24.0, 512, Boundary::periodic);
    auto metric = Metric::isotropic(1, 1.0);
    const double s0 = 0.5; // sigma0^2
    auto psi0 = make_gaussian(g, {s0, 0.0});

    const double t_max = 3.0 * 2.0 * s0; // 3 * (2 m sigma0^2 / hbar)
    EvolverConfig cfg{.dt = t_max / 600, .scheme = Scheme::split_step_spectral,
                      .t_final = t_max, .store_every = 100};
    auto series = evolve(psi0, Potential::free(), metric, cfg);

    for (const auto& f : series.frames) {
        const double t = f.time();
        const double expect = s0 * (1.0 + std::pow(t / (2.0 * s0), 2));
        CHECK(variance_x(f) == Catch::Approx(expect).epsilon(1e-3));
    }
}

TEST_CASE("hamiltonian_apply reproduces E0 psi for the oscillator ground state") {
    auto metric = Metric::isotropic(1, 1.0);
    auto U = Potential::harmonic(1.0, metric);

    SECTION("box grid, away from the walls") {
        auto g = Grid::make_1d(-10.0, 10.0, 400, Boundary::box);
        auto psi = make_ho_eigenstate(g, {0, 0}, metric, 1.0);
        auto h = hamiltonian_apply(psi, U, metric);
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (std::abs(g.coord(0, i)) > 8.0) continue;
            err = std::max(err, std::abs(h[i] - 0.5 * psi[i]));
        }
        CHECK(err <= 1e-6);
    }
    SECTION("periodic grid, spectral accuracy") {
        auto g = Grid::make_1d(-10.0, 10.0, 256, Boundary::periodic);
        auto psi = make_ho_eigenstate(g, {0, 0}, metric, 1.0);
        auto h = hamiltonian_apply(psi, U, metric);
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            err = std::max(err, std::abs(h[i] - 0.5 * psi[i]));
        CHECK(err <= 1e-9);
    }
}

TEST_CASE("hamiltonian_apply on a plane wave gives the kinetic eigenvalue") {
    auto g = Grid::make_1d(0.0, 4.0, 64, Boundary::periodic);
    auto metric = Metric::isotropic(1, 2.0);
    auto psi = make_plane_wave(g, {2, 0});
    const double p = plane_wave_momentum(g, 2, 0, 1.0);
    auto h = hamiltonian_apply(psi, Potential::free(), metric);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(h[i] - (p * p / 4.0) * psi[i]) <= 1e-10);

    core::ComplexField zero(g);
    auto hz = hamiltonian_apply(zero, Potential::free(), metric);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(hz[i]) == 0.0);
}

TEST_CASE("hamiltonian_apply is linear and symmetric on periodic grids") {
    auto g = Grid::make_1d(0.0, 4.0, 96, Boundary::periodic);
    auto metric = Metric::isotropic(1, 1.0);
    auto U = Potential::tabulated(sample_real_1d(g, [](double x) { return std::sin(pi * x / 2.0); }));
    auto f = random_band_limited(g, 5);
    auto h = random_band_limited(g, 6);

    auto Hf = hamiltonian_apply(f, U, metric);
    auto Hh = hamiltonian_apply(h, U, metric);
    CHECK(std::abs(core::inner_product(f, Hh) - core::inner_product(Hf, h)) <= 1e-10);

    core::ComplexField combo(g);
    const core::cplx a(0.3, 0.7), b(-0.2, 1.1);
    for (std::size_t i = 0; i < g.size(); ++i) combo[i] = a * f[i] + b * h[i];
    auto Hc = hamiltonian_apply(combo, U, metric);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(Hc[i] - (a * Hf[i] + b * Hh[i])) <= 1e-9);
}

TEST_CASE("stationary solve: harmonic oscillator levels on the acceptance grid") {
    auto g = Grid::make_1d(-10.0, 10.0, 400, Boundary::box);
    auto metric = Metric::isotropic(1, 1.0);
    auto sp = solve_stationary(Potential::harmonic(1.0, metric), metric, g, 3);
    REQUIRE(sp.energies.size() == 3);
    CHECK(sp.energies[0] == Catch::Approx(0.5).margin(1e-4));
    CHECK(sp.energies[1] == Catch::Approx(1.5).margin(1e-4));
    CHECK(sp.energies[2] == Catch::Approx(2.5).margin(1e-4));
    for (double r : sp.residuals) CHECK(r <= 1e-8);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double expect = a == b ? 1.0 : 0.0;
            CHECK(std::abs(core::inner_product(sp.states[a], sp.states[b]) - expect) <= 1e-8);
        }
}

TEST_CASE("stationary solve: infinite well levels") {
    auto g = Grid::make_1d(0.0, pi, 160, Boundary::box);
    auto metric = Metric::isotropic(1, 1.0);
    auto sp = solve_stationary(Potential::box_well(), metric, g, 3);
    CHECK(sp.energies[0] == Catch::Approx(0.5).margin(1e-3));
    CHECK(sp.energies[1] == Catch::Approx(2.0).margin(4e-3));
    CHECK(sp.energies[2] == Catch::Approx(4.5).margin(1e-2));
}

TEST_CASE("stationary solve errors") {
    auto metric = Metric::isotropic(1, 1.0);
    auto per = Grid::make_1d(0.0, 1.0, 32, Boundary::periodic);
    CHECK_THROWS_AS(solve_stationary(Potential::box_well(), metric, per, 1), std::invalid_argument);
    auto box = Grid::make_1d(0.0, 1.0, 16, Boundary::box);
    CHECK_THROWS_AS(solve_stationary(Potential::box_well(), metric, box, 40), std::invalid_argument);
    auto td = Potential::harmonic(1.0, metric).with_time_factor([](double t) { return 1.0 + t; });
    CHECK_THROWS_AS(solve_stationary(td, metric, box, 2), std::invalid_argument);
}

TEST_CASE("inverted oscillator has no bound states: energies drift with box size") {
    auto g = Grid::make_1d(-6.0, 6.0, 200, Boundary::box);
    auto metric = Metric::isotropic(1, 1.0);
    auto probe = box_sensitivity(Potential::inverted_harmonic(1.0, metric), metric, g, 3);
    for (bool flagged : probe.box_artifact) CHECK(flagged);

    // bound oscillator states do not move when the walls recede
    auto bound = box_sensitivity(Potential::harmonic(1.0, metric), metric, g, 3);
    for (bool flagged : bound.box_artifact) CHECK_FALSE(flagged);
    for (double s : bound.energy_shift) CHECK(s <= 1e-8);
}

TEST_CASE("norm and energy are conserved over long runs") {
    auto metric = Metric::isotropic(1, 1.0);

    SECTION("split-step, 1000 steps") {
        auto g = Grid::make_1d(-8.0, 8.0, 128, Boundary::periodic);
        auto U = Potential::harmonic(1.0, metric);
        auto psi0 = make_coherent(g, 1.0, metric, 1.0);
        EvolverConfig cfg{.dt = 0.002, .scheme = Scheme::split_step_spectral, .t_final = 2.0,
                          .store_every = 1000};
        auto series = evolve(psi0, U, metric, cfg);
        CHECK(std::abs(series.back().norm_sq() - 1.0) <= 1e-8);
        const double e0 = energy_expectation(psi0, U, metric);
        const double e1 = energy_expectation(series.back(), U, metric);
        CHECK(std::abs(e1 - e0) <= 1e-6 * std::abs(e0));
    }
    SECTION("crank-nicolson, 1000 steps") {
        auto g = Grid::make_1d(-8.0, 8.0, 800, Boundary::box);
        auto U = Potential::harmonic(1.0, metric);
        auto psi0 = make_ho_eigenstate(g, {0, 0}, metric, 1.0);
        EvolverConfig cfg{.dt = 0.002, .scheme = Scheme::crank_nicolson, .t_final = 2.0,
                          .store_every = 1000};
        auto series = evolve(psi0, U, metric, cfg);
        CHECK(std::abs(series.back().norm_sq() - 1.0) <= 1e-8);
        const double e0 = energy_expectation(series.front(), U, metric);
        const double e1 = energy_expectation(series.back(), U, metric);
        CHECK(std::abs(e1 - e0) <= 1e-6 * std::abs(e0));
    }
}

TEST_CASE("evolution is time-reversible") {
    auto metric = Metric::isotropic(1, 1.0);

    SECTION("split-step") {
        auto g = Grid::make_1d(-8.0, 8.0, 128, Boundary::periodic);
        auto U = Potential::harmonic(1.0, metric);
        auto psi0 = make_coherent(g, 1.0, metric, 1.0);
        EvolverConfig fwd{.dt = 0.01, .scheme = Scheme::split_step_spectral, .t_final = 1.0,
                          .store_every = 100};
        auto mid = evolve(psi0, U, metric, fwd).back();
        EvolverConfig bwd = fwd;
        bwd.dt = -fwd.dt;
        auto back = evolve(mid, U, metric, bwd).back();
        CHECK(max_abs_diff(back, psi0) <= 1e-6);
    }
    SECTION("crank-nicolson") {
        auto g = Grid::make_1d(-8.0, 8.0, 256, Boundary::box);
        auto U = Potential::harmonic(1.0, metric);
        auto psi0 = make_ho_eigenstate(g, {0, 0}, metric, 1.0);
        EvolverConfig fwd{.dt = 0.01, .scheme = Scheme::crank_nicolson, .t_final = 1.0,
                          .store_every = 100};
        auto mid = evolve(psi0, U, metric, fwd).back();
        EvolverConfig bwd = fwd;
        bwd.dt = -fwd.dt;
        auto back = evolve(mid, U, metric, bwd).back();
        CHECK(max_abs_diff(back, psi0) <= 1e-6);
    }
}

TEST_CASE("both schemes are second order in dt") {
    auto metric = Metric::isotropic(1, 1.0);

    SECTION("split-step stationary phase error") {
        auto g = Grid::make_1d(-10.0, 10.0, 128, Boundary::periodic);
        auto U = Potential::harmonic(1.0, metric);
        auto psi0 = make_ho_eigenstate(g, {0, 0}, metric, 1.0);
        auto phase_err = [&](double dt) {
            EvolverConfig cfg{.dt = dt, .scheme = Scheme::split_step_spectral, .t_final = 1.0,
                              .store_every = 100000};
            auto f = evolve(psi0, U, metric, cfg).back();
            double m = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
                m = std::max(m, std::abs(f[i] - psi0[i] * std::polar(1.0, -0.5 * f.time())));
            return m;
        };
        const double e1 = phase_err(0.02), e2 = phase_err(0.01);
        CHECK(e1 / e2 == Catch::Approx(4.0).margin(0.8));
    }
    SECTION("crank-nicolson stationary phase error against its own discrete pair") {
        auto g = Grid::make_1d(-10.0, 10.0, 200, Boundary::box);
        auto U = Potential::harmonic(1.0, metric);
        auto pair = ground_pair_3pt(g, U, 1.0);
        const double E3 = pair.first;
        const auto& psi3 = pair.second;
        auto phase_err = [&](double dt) {
            EvolverConfig cfg{.dt = dt, .scheme = Scheme::crank_nicolson, .t_final = 1.0,
                              .store_every = 100000};
            auto f = evolve(psi3, U, metric, cfg).back();
            double m = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
                m = std::max(m, std::abs(f[i] - psi3[i] * std::polar(1.0, -E3 * f.time())));
            return m;
        };
        const double e1 = phase_err(0.02), e2 = phase_err(0.01);
        CHECK(e1 / e2 == Catch::Approx(4.0).margin(0.8));
    }
}

TEST_CASE("time-dependent potential keeps second-order self-convergence") {
    auto g = Grid::make_1d(-8.0, 8.0, 128, Boundary::periodic);
    auto metric = Metric::isotropic(1, 1.0);
    auto U = Potential::harmonic(1.0, metric)
                 .with_time_factor([](double t) { return 1.0 + 0.5 * std::sin(2.0 * t); });
    auto psi0 = make_coherent(g, 0.5, metric, 1.0);
    auto run = [&](double dt) {
        EvolverConfig cfg{.dt = dt, .scheme = Scheme::split_step_spectral, .t_final = 1.0,
                          .store_every = 100000};
        return evolve(psi0, U, metric, cfg).back();
    };
    auto a = run(0.02), b = run(0.01), c = run(0.005);
    const double d1 = max_abs_diff(a, b), d2 = max_abs_diff(b, c);
    CHECK(d1 / d2 == Catch::Approx(4.0).margin(0.8));
}

TEST_CASE("evolver rejects incompatible scheme/grid and bad states") {
    auto metric = Metric::isotropic(1, 1.0);
    auto per = Grid::make_1d(0.0, 1.0, 32, Boundary::periodic);
    auto box = Grid::make_1d(0.0, 1.0, 32, Boundary::box);
    auto psi_per = make_plane_wave(per, {1, 0});
    EvolverConfig cn{.dt = 0.01, .scheme = Scheme::crank_nicolson, .t_final = 0.1};
    CHECK_THROWS_AS(evolve(psi_per, Potential::free(), metric, cn), std::invalid_argument);
    EvolverConfig ss{.dt = 0.01, .scheme = Scheme::split_step_spectral, .t_final = 0.1};
    core::ComplexField raw(box, core::cplx(1.0, 0.0));
    CHECK_THROWS_AS(evolve(raw, Potential::free(), metric, ss), std::invalid_argument);
    core::ComplexField unnormalized(per, core::cplx(5.0, 0.0));
    CHECK_THROWS_AS(evolve(unnormalized, Potential::free(), metric, ss), std::invalid_argument);
}

TEST_CASE("t_final = 0 returns only the initial frame") {
    auto g = Grid::make_1d(-8.0, 8.0, 64, Boundary::periodic);
    auto metric = Metric::isotropic(1, 1.0);
    auto psi0 = make_gaussian(g, {1.0, 0.0});
    EvolverConfig cfg{.dt = 0.01, .scheme = Scheme::split_step_spectral, .t_final = 0.0};
    auto series = evolve(psi0, Potential::free(), metric, cfg);
    REQUIRE(series.frames.size() == 1);
    CHECK(max_abs_diff(series.front(), psi0) == 0.0);
}

TEST_CASE("2d: plane wave evolution and oscillator spectrum") {
    auto metric2 = Metric::from_masses({1.0, 1.0});

    SECTION("free 2d plane wave is exact") {
        auto g = Grid::make_2d(0.0, 2.0 * pi, 32, 0.0, 2.0 * pi, 32, Boundary::periodic);
        auto psi0 = make_plane_wave(g, {1, 2});
        const double E = 0.5 * (1.0 + 4.0); // modes 1,2 on L = 2 pi
        EvolverConfig cfg{.dt = 0.01, .scheme = Scheme::split_step_spectral, .t_final = 0.5};
        auto f = evolve(psi0, Potential::free(), metric2, cfg).back();
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            err = std::max(err, std::abs(f[i] - psi0[i] * std::polar(1.0, -E * f.time())));
        CHECK(err <= 1e-8);
    }
    SECTION("2d oscillator levels 1, 2, 2 via Lanczos") {
        auto g = Grid::make_2d(-7.0, 7.0, 64, -7.0, 7.0, 64, Boundary::box);
        auto sp = solve_stationary(Potential::harmonic(1.0, metric2), metric2, g, 3);
        CHECK(sp.energies[0] == Catch::Approx(1.0).margin(1e-3));
        CHECK(sp.energies[1] == Catch::Approx(2.0).margin(1e-3));
        CHECK(sp.energies[2] == Catch::Approx(2.0).margin(1e-3));
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                CHECK(std::abs(core::inner_product(sp.states[a], sp.states[b])) <= 1e-8);
    }
    SECTION("2d crank-nicolson conserves the norm") {
        auto g = Grid::make_2d(-6.0, 6.0, 48, -6.0, 6.0, 48, Boundary::box);
        auto psi0 = make_gaussian(g, {0.5, 0.5});
        EvolverConfig cfg{.dt = 0.005, .scheme = Scheme::crank_nicolson, .t_final = 0.5,
                          .store_every = 100};
        auto f = evolve(psi0, Potential::harmonic(1.0, metric2), metric2, cfg).back();
        CHECK(std::abs(f.norm_sq() - 1.0) <= 1e-8);
    }
}

TEST_CASE("oscillator eigenstate factory matches the analytic spectrum") {
    auto g = Grid::make_1d(-10.0, 10.0, 256, Boundary::periodic);
    auto metric = Metric::isotropic(1, 1.0);
    auto U = Potential::harmonic(1.0, metric);
    for (int n = 0; n <= 4; ++n) {
        auto psi = make_ho_eigenstate(g, {n, 0}, metric, 1.0);
        CHECK(psi.is_normalized(1e-10));
        CHECK(energy_expectation(psi, U, metric) == Catch::Approx(n + 0.5).margin(1e-8));
    }
}
