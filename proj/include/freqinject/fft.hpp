#pragma once

// One-dimensional complex DFT for arbitrary lengths: iterative radix-2 for
// powers of two, Bluestein's chirp-z reduction otherwise. Forward is unscaled;
// the inverse carries the 1/n factor.

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace freqinject {

using Complex = std::complex<double>;

namespace fft_detail {

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

constexpr std::size_t next_power_of_two(std::size_t n) noexcept {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// exp(sign * 2*pi*i * k / n), evaluated with k reduced mod n.
inline Complex unit_root(std::size_t k, std::size_t n, int sign) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k % n) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

/// Twiddles exp(sign*2*pi*i*k/n) for k < n/2, cached per thread.
inline const std::vector<Complex>& radix2_twiddles(std::size_t n, int sign) {
    thread_local std::map<std::pair<std::size_t, int>, std::vector<Complex>> cache;
    auto [it, fresh] = cache.try_emplace({n, sign});
    if (fresh) {
        it->second.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) it->second[k] = unit_root(k, n, sign);
    }
    return it->second;
}

inline void radix2_inplace(std::span<Complex> data, int sign) {
    const std::size_t n = data.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    const std::vector<Complex>& twiddle = radix2_twiddles(n, sign);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t step = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const Complex t = twiddle[k * step] * data[start + k + half];
                data[start + k + half] = data[start + k] - t;
                data[start + k] += t;
            }
        }
    }
}

struct BluesteinPlan {
    std::size_t m = 0;
    std::vector<Complex> chirp;      // c_k, k < n
    std::vector<Complex> chirp_fft;  // forward transform of the conjugate chirp filter
};

inline const BluesteinPlan& bluestein_plan(std::size_t n, int sign) {
    thread_local std::map<std::pair<std::size_t, int>, std::unique_ptr<BluesteinPlan>> cache;
    auto& slot = cache[{n, sign}];
    if (!slot) {
        auto plan = std::make_unique<BluesteinPlan>();
        plan->m = next_power_of_two(2 * n - 1);
        plan->chirp.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            // k^2 mod 2n keeps the angle argument small.
            const std::size_t k2 = (k * k) % (2 * n);
            const double angle = sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
            plan->chirp[k] = {std::cos(angle), std::sin(angle)};
        }
        plan->chirp_fft.assign(plan->m, Complex{});
        plan->chirp_fft[0] = std::conj(plan->chirp[0]);
        for (std::size_t k = 1; k < n; ++k) {
            plan->chirp_fft[k] = plan->chirp_fft[plan->m - k] = std::conj(plan->chirp[k]);
        }
        radix2_inplace(plan->chirp_fft, -1);
        slot = std::move(plan);
    }
    return *slot;
}

/// Chirp-z: with c_k = exp(sign*i*pi*k^2/n), X[k] = c_k * sum_j (x_j c_j) conj(c_{k-j}),
/// evaluated as a cyclic convolution of power-of-two length.
inline void bluestein_inplace(std::span<Complex> data, int sign) {
    const std::size_t n = data.size();
    const BluesteinPlan& plan = bluestein_plan(n, sign);
    const std::size_t m = plan.m;
    std::vector<Complex> a(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = data[k] * plan.chirp[k];

    radix2_inplace(a, -1);
    for (std::size_t i = 0; i < m; ++i) a[i] *= plan.chirp_fft[i];
    radix2_inplace(a, +1);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) data[k] = a[k] * scale * plan.chirp[k];
}

/// In-place DFT with kernel exp(sign * 2*pi*i*jk/n), unscaled.
inline void transform(std::span<Complex> data, int sign) {
    const std::size_t n = data.size();
    if (n <= 1) return;
    if (is_power_of_two(n)) {
        radix2_inplace(data, sign);
    } else {
        bluestein_inplace(data, sign);
    }
}

}  // namespace fft_detail

inline void fft_inplace(std::span<Complex> data) { fft_detail::transform(data, -1); }

inline void ifft_inplace(std::span<Complex> data) {
    fft_detail::transform(data, +1);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (Complex& v : data) v *= scale;
}

}  // namespace freqinject
