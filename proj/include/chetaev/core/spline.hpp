#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace chetaev::core {

/// C2 cubic spline on a uniform 1D grid. Natural end conditions on box data,
/// cyclic end conditions on periodic data (last sample is one spacing short of
/// the period image, matching Grid's periodic convention).
class CubicSpline {
public:
    static CubicSpline natural(double x0, double h, std::vector<double> y) {
        CubicSpline s(x0, h, std::move(y), false);
        s.solve_natural();
        return s;
    }

    static CubicSpline periodic(double x0, double h, std::vector<double> y) {
        CubicSpline s(x0, h, std::move(y), true);
        s.solve_periodic();
        return s;
    }

    double operator()(double x) const { return eval(x, false); }
    double derivative(double x) const { return eval(x, true); }

private:
    CubicSpline(double x0, double h, std::vector<double> y, bool periodic)
        : x0_(x0), h_(h), y_(std::move(y)), periodic_(periodic) {
        if (y_.size() < 4) throw std::invalid_argument("CubicSpline: need >= 4 samples");
        m_.assign(y_.size(), 0.0);
    }

    // Tridiagonal solve for natural conditions: M_0 = M_{n-1} = 0.
    void solve_natural() {
        const std::size_t n = y_.size();
        const double invh2 = 1.0 / (h_ * h_);
        std::vector<double> c(n, 0.0), d(n, 0.0);
        // interior unknowns i = 1..n-2: M_{i-1} + 4 M_i + M_{i+1} = rhs_i
        for (std::size_t i = 1; i + 1 < n; ++i)
            d[i] = 6.0 * (y_[i - 1] - 2.0 * y_[i] + y_[i + 1]) * invh2;
        double beta = 4.0;
        m_[1] = d[1] / beta;
        for (std::size_t i = 2; i + 1 < n; ++i) {
            c[i] = 1.0 / beta;
            beta = 4.0 - c[i];
            m_[i] = (d[i] - m_[i - 1]) / beta;
        }
        for (std::size_t i = n - 3; i >= 1; --i) m_[i] -= c[i + 1] * m_[i + 1];
    }

    // Cyclic tridiagonal via Sherman-Morrison.
    void solve_periodic() {
        const std::size_t n = y_.size();
        const double invh2 = 1.0 / (h_ * h_);
        auto wrap = [n](std::size_t i) { return i % n; };
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i)
            d[i] = 6.0 * (y_[wrap(i + n - 1)] - 2.0 * y_[i] + y_[wrap(i + 1)]) * invh2;

        const double gamma = -4.0;
        std::vector<double> b(n, 4.0);
        b[0] -= gamma;
        b[n - 1] -= 1.0 / gamma;
        std::vector<double> u(n, 0.0);
        u[0] = gamma;
        u[n - 1] = 1.0;

        auto thomas = [&](const std::vector<double>& rhs, std::vector<double>& x) {
            std::vector<double> cp(n, 0.0);
            double beta = b[0];
            x[0] = rhs[0] / beta;
            for (std::size_t i = 1; i < n; ++i) {
                cp[i] = 1.0 / beta;
                beta = b[i] - cp[i];
                x[i] = (rhs[i] - x[i - 1]) / beta;
            }
            for (std::size_t i = n - 1; i >= 1; --i) x[i - 1] -= cp[i] * x[i];
        };

        std::vector<double> yv(n), z(n);
        thomas(d, yv);
        thomas(u, z);
        const double vy = yv[0] - yv[n - 1] / 4.0;
        const double vz = z[0] - z[n - 1] / 4.0;
        const double factor = vy / (1.0 + vz);
        for (std::size_t i = 0; i < n; ++i) m_[i] = yv[i] - factor * z[i];
    }

    double eval(double x, bool deriv) const {
        const std::size_t n = y_.size();
        double u = (x - x0_) / h_;
        std::size_t i;
        double yi, yi1, mi, mi1;
        if (periodic_) {
            const double nn = static_cast<double>(n);
            u = u - std::floor(u / nn) * nn; // into [0, n)
            i = static_cast<std::size_t>(u);
            if (i >= n) i = n - 1;
            yi = y_[i];
            yi1 = y_[(i + 1) % n];
            mi = m_[i];
            mi1 = m_[(i + 1) % n];
        } else {
            if (u < 0.0) u = 0.0;
            if (u > static_cast<double>(n - 1)) u = static_cast<double>(n - 1);
            i = static_cast<std::size_t>(u);
            if (i >= n - 1) i = n - 2;
            yi = y_[i];
            yi1 = y_[i + 1];
            mi = m_[i];
            mi1 = m_[i + 1];
        }
        const double t = u - static_cast<double>(i);
        const double s = 1.0 - t;
        const double h2_6 = h_ * h_ / 6.0;
        if (!deriv)
            return yi * s + yi1 * t + h2_6 * (mi * (s * s * s - s) + mi1 * (t * t * t - t));
        return (yi1 - yi) / h_ +
               (h_ / 6.0) * (mi * (1.0 - 3.0 * s * s) + mi1 * (3.0 * t * t - 1.0));
    }

    double x0_, h_;
    std::vector<double> y_;
    std::vector<double> m_; // second derivatives at the nodes
    bool periodic_;
};

} // namespace chetaev::core
