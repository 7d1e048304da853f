#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace gridinfo {
namespace detail {

// Iterative radix-2 Cooley-Tukey. No global state, safe to call from any
// thread. Sizes here top out around 2^21, where double precision FFT round-off
// (~1e-13 relative) is far below the library's quadrature tolerances.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (auto& z : a) z /= static_cast<double>(n);
}

}  // namespace detail

// Linear convolution of two real sequences, length a+b-1.
inline std::vector<double> linear_convolve(const std::vector<double>& a,
                                           const std::vector<double>& b) {
    const std::size_t out_n = a.size() + b.size() - 1;
    std::size_t n = 1;
    while (n < out_n) n <<= 1;
    std::vector<std::complex<double>> fa(n), fb(n);
    for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
    detail::fft_inplace(fa, false);
    detail::fft_inplace(fb, false);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    detail::fft_inplace(fa, true);
    std::vector<double> out(out_n);
    for (std::size_t i = 0; i < out_n; ++i) out[i] = fa[i].real();
    return out;
}

}  // namespace gridinfo
