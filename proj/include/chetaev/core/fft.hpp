#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace chetaev::core::detail {

/// Minimal FFTW plan cache. Plan creation is serialized (FFTW requirement);
/// execution via fftw_execute_dft is thread-safe. Plans use FFTW_ESTIMATE so
/// the chosen algorithm is deterministic for a given size.
class FftCache {
public:
    static FftCache& instance() {
        static FftCache c;
        return c;
    }

    void transform(std::complex<double>* data, std::size_t n, int sign) {
        fftw_plan p = plan_for(n, sign);
        auto* d = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(p, d, d);
    }

private:
    FftCache() = default;
    ~FftCache() {
        for (auto& [key, p] : plans_) fftw_destroy_plan(p);
    }
    FftCache(const FftCache&) = delete;

    fftw_plan plan_for(std::size_t n, int sign) {
        std::scoped_lock lock(mu_);
        const auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        scratch_.assign(n, {});
        auto* d = reinterpret_cast<fftw_complex*>(scratch_.data());
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), d, d, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

    std::mutex mu_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
    std::vector<std::complex<double>> scratch_;
};

inline void fft(std::complex<double>* data, std::size_t n) {
    FftCache::instance().transform(data, n, FFTW_FORWARD);
}

inline void ifft(std::complex<double>* data, std::size_t n) {
    FftCache::instance().transform(data, n, FFTW_BACKWARD);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) data[i] *= inv;
}

} // namespace chetaev::core::detail
