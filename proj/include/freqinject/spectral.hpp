#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "freqinject/error.hpp"
#include "freqinject/fft.hpp"
#include "freqinject/image.hpp"

namespace freqinject {

/// 2D complex coefficients, natural layout (DC at (0,0)).
using Spectrum = Plane<Complex>;

namespace spectral_detail {

/// Transforms every row then every column of `data` in place.
inline void transform_2d(Spectrum& data, bool inverse) {
    const std::size_t w = data.width();
    const std::size_t h = data.height();
    std::vector<Complex> line;
    if (w > 1) {
        line.resize(w);
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) line[x] = data(y, x);
            inverse ? ifft_inplace(line) : fft_inplace(line);
            for (std::size_t x = 0; x < w; ++x) data(y, x) = line[x];
        }
    }
    if (h > 1) {
        line.resize(h);
        for (std::size_t x = 0; x < w; ++x) {
            for (std::size_t y = 0; y < h; ++y) line[y] = data(y, x);
            inverse ? ifft_inplace(line) : fft_inplace(line);
            for (std::size_t y = 0; y < h; ++y) data(y, x) = line[y];
        }
    }
}

}  // namespace spectral_detail

/// Unnormalized forward DFT: F[u,v] = sum_{y,x} p[y,x] exp(-2*pi*i*(u*y/H + v*x/W)).
inline Spectrum fft2(const GrayImage& plane) {
    Spectrum out(plane.width(), plane.height());
    for (std::size_t i = 0; i < plane.size(); ++i) out[i] = plane[i];
    spectral_detail::transform_2d(out, false);
    return out;
}

inline Spectrum fft2(Spectrum spec) {
    spectral_detail::transform_2d(spec, false);
    return spec;
}

/// Inverse DFT with 1/(HW) scaling, complex result.
inline Spectrum ifft2_complex(Spectrum spec) {
    spectral_detail::transform_2d(spec, true);
    return spec;
}

struct InverseResult {
    GrayImage real;
    double max_imag_residue = 0.0;
};

/// Inverse DFT keeping the real part and reporting the largest |imaginary| seen.
inline InverseResult ifft2_with_residue(const Spectrum& spec) {
    const Spectrum full = ifft2_complex(spec);
    InverseResult result{GrayImage(spec.width(), spec.height()), 0.0};
    for (std::size_t i = 0; i < full.size(); ++i) {
        result.real[i] = full[i].real();
        result.max_imag_residue = std::max(result.max_imag_residue, std::abs(full[i].imag()));
    }
    return result;
}

inline GrayImage ifft2(const Spectrum& spec) { return ifft2_with_residue(spec).real; }

struct PolarSpectrum {
    GrayImage magnitude;
    GrayImage phase;  // (-pi, pi]
};

inline PolarSpectrum decompose(const Spectrum& spec) {
    PolarSpectrum out{GrayImage(spec.width(), spec.height()), GrayImage(spec.width(), spec.height())};
    for (std::size_t i = 0; i < spec.size(); ++i) {
        out.magnitude[i] = std::abs(spec[i]);
        // atan2 returns [-pi, pi]; -pi only arises for a signed-zero imaginary part.
        double phi = std::arg(spec[i]);
        if (phi == -std::numbers::pi) phi = std::numbers::pi;
        out.phase[i] = phi;
    }
    return out;
}

inline Spectrum recompose(const GrayImage& magnitude, const GrayImage& phase) {
    if (!magnitude.same_shape(phase)) throw DimensionMismatch("magnitude and phase differ in size");
    Spectrum out(magnitude.width(), magnitude.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = Complex(magnitude[i] * std::cos(phase[i]), magnitude[i] * std::sin(phase[i]));
    }
    return out;
}

inline GrayImage magnitude(const Spectrum& spec) {
    GrayImage out(spec.width(), spec.height());
    for (std::size_t i = 0; i < spec.size(); ++i) out[i] = std::abs(spec[i]);
    return out;
}

inline GrayImage power_spectrum(const Spectrum& spec) {
    GrayImage out(spec.width(), spec.height());
    for (std::size_t i = 0; i < spec.size(); ++i) out[i] = std::norm(spec[i]);
    return out;
}

/// Moves DC from (0,0) to (H/2, W/2) (integer division).
template <typename T>
Plane<T> fftshift(const Plane<T>& plane) {
    const std::size_t w = plane.width();
    const std::size_t h = plane.height();
    Plane<T> out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        const std::size_t ty = (y + h / 2) % h;
        for (std::size_t x = 0; x < w; ++x) out(ty, (x + w / 2) % w) = plane(y, x);
    }
    return out;
}

/// Exact inverse of fftshift for every size, odd included.
template <typename T>
Plane<T> ifftshift(const Plane<T>& plane) {
    const std::size_t w = plane.width();
    const std::size_t h = plane.height();
    Plane<T> out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        const std::size_t ty = (y + h - h / 2) % h;
        for (std::size_t x = 0; x < w; ++x) out(ty, (x + w - w / 2) % w) = plane(y, x);
    }
    return out;
}

/// Signed frequency index of natural-layout bin k in an n-point transform, in [-n/2, n/2).
constexpr long signed_frequency(std::size_t k, std::size_t n) noexcept {
    const auto sk = static_cast<long>(k);
    const auto sn = static_cast<long>(n);
    return sk >= sn - sn / 2 ? sk - sn : sk;
}

/// True when natural-layout bin (u, v) lies within `radius` (Chebyshev, wrapped) of DC.
constexpr bool near_dc(std::size_t u, std::size_t v, std::size_t height, std::size_t width, long radius = 1) noexcept {
    const long du = signed_frequency(u, height);
    const long dv = signed_frequency(v, width);
    return (du < 0 ? -du : du) <= radius && (dv < 0 ? -dv : dv) <= radius;
}

/// Display helper: fftshift(log(1 + |F|)).
inline GrayImage shifted_log_magnitude(const Spectrum& spec) {
    GrayImage out = magnitude(spec);
    for (double& v : out) v = std::log1p(v);
    return fftshift(out);
}

/// Linear rescale to [0,1]; a constant plane maps to zeros.
inline GrayImage normalize_min_max(GrayImage plane) {
    const auto [lo_it, hi_it] = std::minmax_element(plane.begin(), plane.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    for (double& v : plane) v = range > 0.0 ? (v - lo) / range : 0.0;
    return plane;
}

struct Bin {
    std::size_t row = 0;
    std::size_t col = 0;
    friend bool operator==(const Bin&, const Bin&) = default;
    friend auto operator<=>(const Bin&, const Bin&) = default;
};

/// Largest `count` bins of a centered (fftshifted) plane outside the
/// (2r+1)x(2r+1) block around the center. Ties resolve by row-major index.
inline std::vector<Bin> top_peaks_shifted(const GrayImage& shifted, std::size_t count, long exclude_radius = 1) {
    const auto cy = static_cast<long>(shifted.height() / 2);
    const auto cx = static_cast<long>(shifted.width() / 2);
    std::vector<std::size_t> candidates;
    for (std::size_t y = 0; y < shifted.height(); ++y) {
        for (std::size_t x = 0; x < shifted.width(); ++x) {
            if (std::labs(static_cast<long>(y) - cy) <= exclude_radius &&
                std::labs(static_cast<long>(x) - cx) <= exclude_radius) {
                continue;
            }
            candidates.push_back(y * shifted.width() + x);
        }
    }
    count = std::min(count, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(count), candidates.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (shifted[a] != shifted[b]) return shifted[a] > shifted[b];
                          return a < b;
                      });
    std::vector<Bin> peaks;
    for (std::size_t i = 0; i < count; ++i) {
        peaks.push_back({candidates[i] / shifted.width(), candidates[i] % shifted.width()});
    }
    return peaks;
}

/// max / mean over a centered plane outside the DC block; 0 when that region is empty or all zero.
inline double peak_to_mean_shifted(const GrayImage& shifted, long exclude_radius = 1) {
    const auto cy = static_cast<long>(shifted.height() / 2);
    const auto cx = static_cast<long>(shifted.width() / 2);
    double peak = 0.0;
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t y = 0; y < shifted.height(); ++y) {
        for (std::size_t x = 0; x < shifted.width(); ++x) {
            if (std::labs(static_cast<long>(y) - cy) <= exclude_radius &&
                std::labs(static_cast<long>(x) - cx) <= exclude_radius) {
                continue;
            }
            peak = std::max(peak, shifted(y, x));
            sum += shifted(y, x);
            ++n;
        }
    }
    if (n == 0 || sum <= 0.0) return 0.0;
    return peak / (sum / static_cast<double>(n));
}

}  // namespace freqinject
