#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "chetaev/core/fft.hpp"
#include "chetaev/core/fields.hpp"
#include "chetaev/core/grid.hpp"
#include "chetaev/core/metric.hpp"

namespace chetaev::core {

namespace detail {

/// Signed wavenumber of FFT mode j for n samples over period L.
inline double wavenumber(std::size_t j, std::size_t n, double L) {
    const double two_pi = 2.0 * std::numbers::pi;
    const long half = static_cast<long>(n) / 2;
    long m = static_cast<long>(j);
    if (m > half || (m == half && n % 2 == 0)) m -= static_cast<long>(n);
    return two_pi * static_cast<double>(m) / L;
}

/// In-place spectral derivative of one periodic line. The Nyquist mode is
/// zeroed for odd orders (it has no well-defined sign) and kept for even ones.
inline void spectral_derivative_line(cplx* line, std::size_t n, double L, int order) {
    fft(line, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double k = wavenumber(j, n, L);
        cplx factor;
        if (order == 1) {
            factor = cplx(0.0, k);
            if (n % 2 == 0 && j == n / 2) factor = 0.0;
        } else {
            factor = cplx(-k * k, 0.0);
        }
        line[j] *= factor;
    }
    ifft(line, n);
}

/// 2nd-order finite differences on one box line; one-sided at the edges.
inline void fd_gradient_line(const cplx* in, cplx* out, std::size_t n, double h) {
    const double inv2h = 0.5 / h;
    out[0] = (-3.0 * in[0] + 4.0 * in[1] - in[2]) * inv2h;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (in[i + 1] - in[i - 1]) * inv2h;
    out[n - 1] = (3.0 * in[n - 1] - 4.0 * in[n - 2] + in[n - 3]) * inv2h;
}

inline void fd_second_derivative_line(const cplx* in, cplx* out, std::size_t n, double h) {
    const double invh2 = 1.0 / (h * h);
    out[0] = (2.0 * in[0] - 5.0 * in[1] + 4.0 * in[2] - in[3]) * invh2;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (in[i + 1] - 2.0 * in[i] + in[i - 1]) * invh2;
    out[n - 1] = (2.0 * in[n - 1] - 5.0 * in[n - 2] + 4.0 * in[n - 3] - in[n - 4]) * invh2;
}

/// Iterate the lines of `axis`: calls fn(offset, stride, count) per line.
template <class F>
void for_each_line(const Grid& g, int axis, F&& fn) {
    if (g.dim() == 1) {
        fn(std::size_t{0}, std::size_t{1}, g.points(0));
        return;
    }
    const std::size_t nx = g.points(0), ny = g.points(1);
    if (axis == 0) {
        for (std::size_t iy = 0; iy < ny; ++iy) fn(iy, ny, nx);
    } else {
        for (std::size_t ix = 0; ix < nx; ++ix) fn(ix * ny, std::size_t{1}, ny);
    }
}

/// Apply a line transform along `axis` of a complex array (gather/scatter).
template <class LineOp>
void transform_axis(const Grid& g, std::vector<cplx>& data, int axis, LineOp&& op) {
    std::vector<cplx> line;
    for_each_line(g, axis, [&](std::size_t off, std::size_t stride, std::size_t count) {
        line.resize(count);
        for (std::size_t i = 0; i < count; ++i) line[i] = data[off + i * stride];
        op(line.data(), count);
        for (std::size_t i = 0; i < count; ++i) data[off + i * stride] = line[i];
    });
}

inline void derivative_axis(const Grid& g, std::vector<cplx>& data, int axis, int order) {
    const double L = g.extent(axis);
    const double h = g.spacing(axis);
    if (g.periodic()) {
        transform_axis(g, data, axis, [&](cplx* line, std::size_t n) {
            spectral_derivative_line(line, n, L, order);
        });
    } else {
        std::vector<cplx> out;
        transform_axis(g, data, axis, [&](cplx* line, std::size_t n) {
            out.resize(n);
            if (order == 1)
                fd_gradient_line(line, out.data(), n, h);
            else
                fd_second_derivative_line(line, out.data(), n, h);
            for (std::size_t i = 0; i < n; ++i) line[i] = out[i];
        });
    }
}

inline void check_axis(const Grid& g, int axis) {
    if (axis < 0 || axis >= g.dim()) throw std::out_of_range("axis out of range");
}

inline void check_metric(const Grid& g, const Metric& m) {
    if (m.dim() != g.dim()) throw std::invalid_argument("metric dimension != grid dimension");
}

} // namespace detail

/// Discrete d/dq_axis: spectral on periodic grids, 2nd-order central
/// differences on box grids (one-sided at the edges).
inline ComplexField gradient(const ComplexField& f, int axis) {
    detail::check_axis(f.grid(), axis);
    ComplexField out(f.grid(), f.values(), f.time());
    detail::derivative_axis(f.grid(), out.values(), axis, 1);
    return out;
}

inline RealField gradient(const RealField& f, int axis) {
    detail::check_axis(f.grid(), axis);
    std::vector<cplx> work(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) work[i] = f[i];
    detail::derivative_axis(f.grid(), work, axis, 1);
    RealField out(f.grid(), f.units());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = work[i].real();
    return out;
}

/// Second derivative along one axis (same schemes as gradient).
inline ComplexField second_derivative(const ComplexField& f, int axis) {
    detail::check_axis(f.grid(), axis);
    ComplexField out(f.grid(), f.values(), f.time());
    detail::derivative_axis(f.grid(), out.values(), axis, 2);
    return out;
}

/// Metric Laplacian: sum_i g_ii d^2/dq_i^2.
inline ComplexField laplacian(const ComplexField& f, const Metric& m) {
    detail::check_metric(f.grid(), m);
    ComplexField out(f.grid(), cplx{});
    out.set_time(f.time());
    for (int a = 0; a < f.grid().dim(); ++a) {
        std::vector<cplx> work = f.values();
        detail::derivative_axis(f.grid(), work, a, 2);
        const double g = m.g(a);
        for (std::size_t i = 0; i < work.size(); ++i) out[i] += g * work[i];
    }
    return out;
}

inline RealField laplacian(const RealField& f, const Metric& m) {
    detail::check_metric(f.grid(), m);
    std::vector<cplx> acc(f.size(), cplx{});
    for (int a = 0; a < f.grid().dim(); ++a) {
        std::vector<cplx> work(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) work[i] = f[i];
        detail::derivative_axis(f.grid(), work, a, 2);
        const double g = m.g(a);
        for (std::size_t i = 0; i < work.size(); ++i) acc[i] += g * work[i];
    }
    RealField out(f.grid(), f.units());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = acc[i].real();
    return out;
}

/// <f, g> = integral of conj(f) g over the grid volume element.
inline cplx inner_product(const ComplexField& f, const ComplexField& g) {
    if (f.grid() != g.grid()) throw std::invalid_argument("inner_product: grid mismatch");
    cplx s{};
    for (std::size_t i = 0; i < f.size(); ++i)
        s += std::conj(f[i]) * g[i] * f.grid().quad_weight(i);
    return s;
}

/// Quadrature of a real field.
inline double integrate(const RealField& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * f.grid().quad_weight(i);
    return s;
}

} // namespace chetaev::core
