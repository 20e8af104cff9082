#pragma once

#include <array>
#include <stdexcept>

namespace chetaev::core {

/// Constant diagonal kinetic metric: g_ii = 1/m_i, off-diagonal zero.
/// H = (1/2) sum_i g_ii p_i^2 + U.
class Metric {
public:
    /// Isotropic metric for n axes with a single mass.
    static Metric isotropic(int n, double mass) {
        if (n < 1 || n > 2) throw std::invalid_argument("Metric: dimension must be 1 or 2");
        check_mass(mass);
        Metric m;
        m.n_ = n;
        m.g_.fill(1.0 / mass);
        return m;
    }

    static Metric from_masses(std::initializer_list<double> masses) {
        const int n = static_cast<int>(masses.size());
        if (n < 1 || n > 2) throw std::invalid_argument("Metric: dimension must be 1 or 2");
        Metric m;
        m.n_ = n;
        int a = 0;
        for (double mass : masses) {
            check_mass(mass);
            m.g_[a++] = 1.0 / mass;
        }
        if (n == 1) m.g_[1] = m.g_[0];
        return m;
    }

    int dim() const { return n_; }
    double g(int axis) const { check_axis(axis); return g_[axis]; }
    double mass(int axis) const { check_axis(axis); return 1.0 / g_[axis]; }

    bool operator==(const Metric& o) const {
        if (n_ != o.n_) return false;
        for (int a = 0; a < n_; ++a)
            if (g_[a] != o.g_[a]) return false;
        return true;
    }

private:
    Metric() = default;

    static void check_mass(double mass) {
        if (!(mass > 0.0)) throw std::invalid_argument("Metric: masses must be strictly positive");
    }
    void check_axis(int axis) const {
        if (axis < 0 || axis >= n_) throw std::out_of_range("Metric: axis out of range");
    }

    int n_ = 1;
    std::array<double, 2> g_{1.0, 1.0};
};

} // namespace chetaev::core
