#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "chetaev/core/fields.hpp"
#include "chetaev/core/grid.hpp"
#include "chetaev/core/metric.hpp"
#include "chetaev/core/operators.hpp"
#include "chetaev/core/spline.hpp"
#include "test_util.hpp"

using namespace chetaev::core;
using namespace testutil;

TEST_CASE("grid spacing conventions and invariants") {
    auto per = Grid::make_1d(0.0, 2.0 * pi, 128, Boundary::periodic);
    CHECK(per.spacing(0) == Catch::Approx(2.0 * pi / 128));
    auto box = Grid::make_1d(0.0, 1.0, 101, Boundary::box);
    CHECK(box.spacing(0) == Catch::Approx(0.01));

    CHECK_THROWS_AS(Grid::make_1d(0.0, 1.0, 4, Boundary::box), std::invalid_argument);
    CHECK_THROWS_AS(Grid::make_1d(1.0, 0.0, 64, Boundary::box), std::invalid_argument);

    // box quadrature weights: trapezoid halves the edges
    CHECK(box.quad_weight(0) == Catch::Approx(0.005));
    CHECK(box.quad_weight(50) == Catch::Approx(0.01));

    auto g2 = Grid::make_2d(0.0, 1.0, 16, -1.0, 1.0, 32, Boundary::periodic);
    CHECK(g2.size() == 16 * 32);
    CHECK(g2.index(3, 5) == 3 * 32 + 5);
    CHECK(g2.node_coord(1, g2.index(3, 5)) == Catch::Approx(-1.0 + 5 * g2.spacing(1)));
}

TEST_CASE("gradient: sin on periodic grid is spectrally exact") {
    auto g = Grid::make_1d(0.0, 2.0 * pi, 128, Boundary::periodic);
    auto f = sample_1d(g, [](double x) { return cplx(std::sin(x), 0.0); });
    auto expect = sample_1d(g, [](double x) { return cplx(std::cos(x), 0.0); });
    CHECK(max_abs_diff(gradient(f, 0), expect) <= 1e-10);
}

TEST_CASE("gradient: constant field maps to zero") {
    auto g = Grid::make_1d(-3.0, 3.0, 64, Boundary::box);
    auto f = sample_1d(g, [](double) { return cplx(2.5, -1.0); });
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(std::abs(gradient(f, 0)[i]) <= 1e-12);
}

TEST_CASE("gradient: box-grid Richardson ratio for x^2 is ~4") {
    // interior error is O(h^2); halving h divides it by ~4
    auto interior_err = [](std::size_t n) {
        auto g = Grid::make_1d(0.0, 1.0, n, Boundary::box);
        auto f = sample_1d(g, [](double x) { return cplx(x * x * x, 0.0); });
        auto d = gradient(f, 0);
        double m = 0.0;
        for (std::size_t i = 1; i + 1 < g.size(); ++i)
            m = std::max(m, std::abs(d[i] - cplx(3.0 * g.coord(0, i) * g.coord(0, i), 0.0)));
        return m;
    };
    // x^2 has zero central-difference error; probe with x^3
    const double e1 = interior_err(65);
    const double e2 = interior_err(129);
    CHECK(e1 / e2 == Catch::Approx(4.0).margin(0.3));
}

TEST_CASE("gradient rejects out-of-range axis") {
    auto g = Grid::make_1d(0.0, 1.0, 16, Boundary::box);
    ComplexField f(g);
    CHECK_THROWS_AS(gradient(f, 1), std::out_of_range);
}

TEST_CASE("laplacian: sin with unit mass gives -sin") {
    auto g = Grid::make_1d(0.0, 2.0 * pi, 128, Boundary::periodic);
    auto m = Metric::isotropic(1, 1.0);
    auto f = sample_1d(g, [](double x) { return cplx(std::sin(x), 0.0); });
    auto expect = sample_1d(g, [](double x) { return cplx(-std::sin(x), 0.0); });
    CHECK(max_abs_diff(laplacian(f, m), expect) <= 1e-10);
}

TEST_CASE("laplacian: linear field vanishes on box interior") {
    auto g = Grid::make_1d(0.0, 1.0, 32, Boundary::box);
    auto m = Metric::isotropic(1, 1.0);
    auto f = sample_1d(g, [](double x) { return cplx(2.0 * x - 1.0, 0.0); });
    auto lap = laplacian(f, m);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(std::abs(lap[i]) <= 1e-10);
}

TEST_CASE("laplacian: mass 2 halves the metric factor") {
    // f = x^2: sum g d2f = (1/2) * 2 = 1
    auto g = Grid::make_1d(0.0, 1.0, 32, Boundary::box);
    auto m = Metric::isotropic(1, 2.0);
    auto f = sample_1d(g, [](double x) { return cplx(x * x, 0.0); });
    auto lap = laplacian(f, m);
    for (std::size_t i = 1; i + 1 < g.size(); ++i)
        CHECK(lap[i].real() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("2d laplacian applies per-axis masses") {
    auto g = Grid::make_2d(0.0, 2.0 * pi, 32, 0.0, 2.0 * pi, 32, Boundary::periodic);
    auto m = Metric::from_masses({1.0, 2.0});
    ComplexField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.node_coord(0, i), y = g.node_coord(1, i);
        f[i] = std::sin(x) * std::sin(y);
    }
    auto lap = laplacian(f, m);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.node_coord(0, i), y = g.node_coord(1, i);
        CHECK(lap[i].real() == Catch::Approx(-1.5 * std::sin(x) * std::sin(y)).margin(1e-10));
    }
}

TEST_CASE("inner product: normalized Gaussian, orthogonal eigenstates, zero field") {
    auto g = Grid::make_1d(-10.0, 10.0, 256, Boundary::periodic);
    auto psi = gaussian_packet(g, 0.5);
    CHECK(std::abs(inner_product(psi, psi) - 1.0) <= 1e-8);

    auto n0 = ho_ground(g);
    auto n1 = ho_first_excited(g);
    CHECK(std::abs(inner_product(n0, n1)) <= 1e-8);

    ComplexField zero(g);
    CHECK(std::abs(inner_product(psi, zero)) == 0.0);

    auto other = Grid::make_1d(-10.0, 10.0, 128, Boundary::periodic);
    ComplexField mismatched(other);
    CHECK_THROWS_AS(inner_product(psi, mismatched), std::invalid_argument);
}

TEST_CASE("differentiation is linear on random fields") {
    auto g = Grid::make_1d(0.0, 4.0, 96, Boundary::periodic);
    auto f1 = random_band_limited(g, 11);
    auto f2 = random_band_limited(g, 23);
    const cplx a(0.7, -0.3), b(-1.2, 0.4);
    ComplexField combo(g);
    for (std::size_t i = 0; i < g.size(); ++i) combo[i] = a * f1[i] + b * f2[i];
    auto d_combo = gradient(combo, 0);
    auto d1 = gradient(f1, 0);
    auto d2 = gradient(f2, 0);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(d_combo[i] - (a * d1[i] + b * d2[i])) <= 1e-10);
}

TEST_CASE("summation by parts on periodic grids") {
    auto g = Grid::make_1d(0.0, 4.0, 96, Boundary::periodic);
    for (unsigned seed : {1u, 2u, 3u}) {
        auto f = random_band_limited(g, seed);
        auto h = random_band_limited(g, seed + 100);
        const cplx lhs = inner_product(gradient(f, 0), h);
        const cplx rhs = -inner_product(f, gradient(h, 0));
        CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
}

TEST_CASE("field norm and normalization bookkeeping") {
    auto g = Grid::make_1d(-8.0, 8.0, 128, Boundary::periodic);
    auto psi = gaussian_packet(g, 1.0);
    CHECK(psi.is_normalized());
    for (auto& z : psi.values()) z *= 3.0;
    CHECK_FALSE(psi.is_normalized());
    psi.normalize();
    CHECK(psi.is_normalized(1e-12));
}

TEST_CASE("cubic spline reproduces smooth samples and derivatives") {
    const std::size_t n = 64;
    const double h = 2.0 * pi / n;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(i * h);
    auto sp = CubicSpline::periodic(0.0, h, y);
    double emax = 0.0, dmax = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double x = 2.0 * pi * i / 500.0 + 0.013;
        emax = std::max(emax, std::abs(sp(x) - std::sin(x)));
        dmax = std::max(dmax, std::abs(sp.derivative(x) - std::cos(x)));
    }
    CHECK(emax <= 5e-6);
    CHECK(dmax <= 5e-4);

    // natural spline on the interior of a smooth function
    std::vector<double> yb(n);
    for (std::size_t i = 0; i < n; ++i) yb[i] = std::exp(-0.5 * std::pow(i * h - pi, 2));
    auto spb = CubicSpline::natural(0.0, h, yb);
    for (int i = 100; i < 400; ++i) {
        const double x = 2.0 * pi * i / 500.0;
        CHECK(spb(x) == Catch::Approx(std::exp(-0.5 * std::pow(x - pi, 2))).margin(1e-5));
    }
}
