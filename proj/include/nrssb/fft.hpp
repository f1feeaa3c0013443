#pragma once

#include <cstddef>
#include <numbers>
#include <span>

#include "nrssb/common.hpp"

namespace nrssb {

/// In-place iterative radix-2 FFT for power-of-two sizes.
/// Forward transform is unscaled: X[k] = sum_n x[n] e^{-j 2 pi k n / N}.
/// Inverse is unscaled as well; callers pick the scaling convention.
inline void fft_inplace(std::span<cplx> data, bool inverse) {
    const size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft: size must be a power of two");

    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const cplx wn(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const cplx u = data[i + k];
                const cplx v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wn;
            }
        }
    }
}

inline cvec fft(cvec data) {
    fft_inplace(data, false);
    return data;
}

inline cvec ifft(cvec data) {
    fft_inplace(data, true);
    return data;
}

} // namespace nrssb
