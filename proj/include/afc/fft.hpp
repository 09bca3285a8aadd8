#pragma once

#include <complex>
#include <map>
#include <numbers>
#include <vector>

#include "afc/errors.hpp"

namespace afc {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

namespace detail {

// Twiddle table for a given size, cached per thread. table[j] = exp(-2*pi*i*j/n), j < n/2.
inline const std::vector<cplx>& twiddles(std::size_t n) {
    thread_local std::map<std::size_t, std::vector<cplx>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cplx> w(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
        double a = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        w[j] = {std::cos(a), std::sin(a)};
    }
    return cache.emplace(n, std::move(w)).first->second;
}

} // namespace detail

// In-place radix-2 FFT: x[j] <- sum_i x[i] * exp(sign * 2*pi*i*ij/n). No normalization.
inline void fft_core(std::vector<cplx>& x, int sign) {
    const std::size_t n = x.size();
    if (n == 1) return;
    if (!is_pow2(n)) throw config_error("fft: size must be a power of two, got " + std::to_string(n));

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    const auto& w = detail::twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx tw = w[j * stride];
                if (sign > 0) tw = std::conj(tw);
                cplx u = x[i + j];
                cplx v = x[i + j + len / 2] * tw;
                x[i + j] = u + v;
                x[i + j + len / 2] = u - v;
            }
        }
    }
}

} // namespace afc
