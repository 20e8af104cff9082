#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>

#include "chetaev/core/fields.hpp"
#include "chetaev/core/grid.hpp"
#include "chetaev/core/metric.hpp"
#include "chetaev/core/spline.hpp"

namespace chetaev::quantum {

enum class PotentialKind { free, harmonic, inverted_harmonic, box_well, linear, tabulated };

/// Potential catalog shared by the quantum and classical halves.
///
/// Catalog kinds carry analytic gradient and Hessian evaluators; tabulated
/// potentials fall back to spline interpolation (1D tables). An optional time
/// factor multiplies the static profile, U(q,t) = f(t) * U0(q).
class Potential {
public:
    using Vec2 = std::array<double, 2>;

    static Potential free() { return Potential(PotentialKind::free, 1); }

    static Potential harmonic(double omega, const core::Metric& metric) {
        if (!(omega > 0.0)) throw std::invalid_argument("Potential: harmonic requires omega > 0");
        Potential p(PotentialKind::harmonic, metric.dim());
        p.omega_ = omega;
        for (int a = 0; a < metric.dim(); ++a) p.mass_[a] = metric.mass(a);
        return p;
    }

    static Potential inverted_harmonic(double omega, const core::Metric& metric) {
        Potential p = harmonic(omega, metric);
        p.kind_ = PotentialKind::inverted_harmonic;
        return p;
    }

    /// Free interior; confinement comes from the box grid's psi = 0 walls.
    static Potential box_well() { return Potential(PotentialKind::box_well, 1); }

    /// U = -sum_a F_a q_a (constant force F).
    static Potential linear(Vec2 force, int dim = 1) {
        Potential p(PotentialKind::linear, dim);
        p.force_ = force;
        return p;
    }

    static Potential tabulated(core::RealField samples) {
        if (samples.grid().dim() != 1)
            throw std::invalid_argument("Potential: tabulated tables are 1D");
        Potential p(PotentialKind::tabulated, 1);
        const auto& g = samples.grid();
        auto sp = g.periodic()
                      ? core::CubicSpline::periodic(g.q_min(0), g.spacing(0), samples.values())
                      : core::CubicSpline::natural(g.q_min(0), g.spacing(0), samples.values());
        p.table_ = std::make_shared<core::CubicSpline>(std::move(sp));
        p.table_h_ = g.spacing(0);
        return p;
    }

    Potential& with_time_factor(std::function<double(double)> f) {
        time_factor_ = std::move(f);
        return *this;
    }

    PotentialKind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool time_dependent() const { return static_cast<bool>(time_factor_); }
    double omega() const { return omega_; }

    double value(const Vec2& q, double t = 0.0) const {
        return factor(t) * static_value(q);
    }

    Vec2 grad(const Vec2& q, double t = 0.0) const {
        const double f = factor(t);
        Vec2 out{0.0, 0.0};
        switch (kind_) {
        case PotentialKind::free:
        case PotentialKind::box_well:
            break;
        case PotentialKind::harmonic:
            for (int a = 0; a < dim_; ++a) out[a] = f * mass_[a] * omega_ * omega_ * q[a];
            break;
        case PotentialKind::inverted_harmonic:
            for (int a = 0; a < dim_; ++a) out[a] = -f * mass_[a] * omega_ * omega_ * q[a];
            break;
        case PotentialKind::linear:
            for (int a = 0; a < dim_; ++a) out[a] = -f * force_[a];
            break;
        case PotentialKind::tabulated:
            out[0] = f * table_->derivative(q[0]);
            break;
        }
        return out;
    }

    std::array<Vec2, 2> hess(const Vec2& q, double t = 0.0) const {
        const double f = factor(t);
        std::array<Vec2, 2> out{Vec2{0.0, 0.0}, Vec2{0.0, 0.0}};
        switch (kind_) {
        case PotentialKind::free:
        case PotentialKind::box_well:
        case PotentialKind::linear:
            break;
        case PotentialKind::harmonic:
            for (int a = 0; a < dim_; ++a) out[a][a] = f * mass_[a] * omega_ * omega_;
            break;
        case PotentialKind::inverted_harmonic:
            for (int a = 0; a < dim_; ++a) out[a][a] = -f * mass_[a] * omega_ * omega_;
            break;
        case PotentialKind::tabulated: {
            // central difference of the spline derivative at table resolution
            const double d = table_h_;
            out[0][0] = f * (table_->derivative(q[0] + d) - table_->derivative(q[0] - d)) / (2.0 * d);
            break;
        }
        }
        return out;
    }

    /// Evaluate on every node of a grid.
    core::RealField sample(const core::Grid& g, double t = 0.0) const {
        core::RealField out(g, core::Units::energy);
        for (std::size_t i = 0; i < g.size(); ++i) {
            Vec2 q{g.node_coord(0, i), g.dim() == 2 ? g.node_coord(1, i) : 0.0};
            out[i] = value(q, t);
            if (!std::isfinite(out[i]))
                throw std::runtime_error("Potential: non-finite value on grid");
        }
        return out;
    }

private:
    Potential(PotentialKind k, int dim) : kind_(k), dim_(dim) {}

    double factor(double t) const { return time_factor_ ? time_factor_(t) : 1.0; }

    double static_value(const Vec2& q) const {
        switch (kind_) {
        case PotentialKind::free:
        case PotentialKind::box_well:
            return 0.0;
        case PotentialKind::harmonic: {
            double u = 0.0;
            for (int a = 0; a < dim_; ++a) u += 0.5 * mass_[a] * omega_ * omega_ * q[a] * q[a];
            return u;
        }
        case PotentialKind::inverted_harmonic: {
            double u = 0.0;
            for (int a = 0; a < dim_; ++a) u -= 0.5 * mass_[a] * omega_ * omega_ * q[a] * q[a];
            return u;
        }
        case PotentialKind::linear: {
            double u = 0.0;
            for (int a = 0; a < dim_; ++a) u -= force_[a] * q[a];
            return u;
        }
        case PotentialKind::tabulated:
            return (*table_)(q[0]);
        }
        return 0.0;
    }

    PotentialKind kind_;
    int dim_;
    double omega_ = 0.0;
    Vec2 mass_{1.0, 1.0};
    Vec2 force_{0.0, 0.0};
    std::shared_ptr<core::CubicSpline> table_;
    double table_h_ = 0.0;
    std::function<double(double)> time_factor_;
};

} // namespace chetaev::quantum
