#pragma once

// Corpus fingerprints: residual = gray - median3x3(gray), z-normalized; the
// fingerprint is the mean power spectrum of residuals over the corpus.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "freqinject/error.hpp"
#include "freqinject/image.hpp"
#include "freqinject/image_io.hpp"
#include "freqinject/parallel.hpp"
#include "freqinject/spectral.hpp"

namespace freqinject {

inline constexpr std::string_view kMedianDenoiser = "median3x3";
inline constexpr double kResidualStdFloor = 1e-8;
inline constexpr std::size_t kDefaultFingerprintSize = 256;

struct Fingerprint {
    GrayImage plane;  // natural layout
    std::size_t count = 0;
    std::string denoiser_id{kMedianDenoiser};
};

/// 3x3 median with periodic (wrap-around) borders, matching the DFT's periodicity.
inline GrayImage median3x3(const GrayImage& img) {
    const std::size_t w = img.width();
    const std::size_t h = img.height();
    GrayImage out(w, h);
    std::array<double, 9> window{};
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            std::size_t k = 0;
            for (std::size_t dy = 0; dy < 3; ++dy) {
                const std::size_t yy = (y + h + dy - 1) % h;
                for (std::size_t dx = 0; dx < 3; ++dx) window[k++] = img(yy, (x + w + dx - 1) % w);
            }
            std::nth_element(window.begin(), window.begin() + 4, window.end());
            out(y, x) = window[4];
        }
    }
    return out;
}

/// Median residual, z-normalized (population std). All zero when the raw
/// residual's std is below kResidualStdFloor.
inline GrayImage residual(const GrayImage& gray) {
    GrayImage r = gray;
    const GrayImage med = median3x3(gray);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= med[i];
    const double m = mean(r);
    double var = 0.0;
    for (double v : r) var += (v - m) * (v - m);
    const double sd = std::sqrt(var / static_cast<double>(r.size()));
    if (sd < kResidualStdFloor) return GrayImage(r.width(), r.height(), 0.0);
    for (double& v : r) v = (v - m) / sd;
    return r;
}

inline GrayImage residual(const RgbImage& img) { return residual(to_grayscale(img)); }

/// Power spectrum of the residual of `img` resampled to size x size.
inline GrayImage residual_power_spectrum(const RgbImage& img, std::size_t size) {
    return power_spectrum(fft2(residual(resize(to_grayscale(img), size, size))));
}

/// Running sum of spectra. merge() lets independent partial sums combine in a fixed order.
class FingerprintAccumulator {
public:
    explicit FingerprintAccumulator(std::size_t size) : sum_(size, size, 0.0) {}

    void add(const GrayImage& spectrum) { add_sum(spectrum, 1); }

    /// Adds a precomputed sum of `n` spectra.
    void add_sum(const GrayImage& sum, std::size_t n) {
        if (!sum.same_shape(sum_)) throw DimensionMismatch("spectrum size differs from accumulator");
        for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += sum[i];
        count_ += n;
    }

    void merge(const FingerprintAccumulator& other) {
        if (!other.sum_.same_shape(sum_)) throw DimensionMismatch("accumulator sizes differ");
        for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += other.sum_[i];
        count_ += other.count_;
    }

    std::size_t count() const noexcept { return count_; }

    Fingerprint result() const {
        if (count_ == 0) throw DataError("empty corpus");
        Fingerprint fp{sum_, count_};
        for (double& v : fp.plane) v /= static_cast<double>(count_);
        return fp;
    }

private:
    GrayImage sum_;
    std::size_t count_ = 0;
};

namespace fingerprint_detail {

/// Pairwise (tree) sum of spectra[lo, hi) in index order.
inline GrayImage pairwise_sum(std::vector<GrayImage>& spectra, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return std::move(spectra[lo]);
    const std::size_t mid = lo + (hi - lo) / 2;
    GrayImage left = pairwise_sum(spectra, lo, mid);
    const GrayImage right = pairwise_sum(spectra, mid, hi);
    for (std::size_t i = 0; i < left.size(); ++i) left[i] += right[i];
    return left;
}

inline constexpr std::size_t kChunk = 64;

}  // namespace fingerprint_detail

/// Fingerprint over `count` images produced on demand by `load(i)`. Images are
/// processed in fixed chunks with a pairwise reduction inside each chunk, so the
/// result does not depend on the thread count.
inline Fingerprint extract_fingerprint(std::size_t count, const std::function<RgbImage(std::size_t)>& load,
                                       std::size_t size = kDefaultFingerprintSize, std::size_t threads = 1) {
    if (count == 0) throw DataError("empty corpus");
    if (size == 0) throw InvalidArgument("fingerprint size must be positive");
    FingerprintAccumulator total(size);
    for (std::size_t start = 0; start < count; start += fingerprint_detail::kChunk) {
        const std::size_t n = std::min(fingerprint_detail::kChunk, count - start);
        std::vector<GrayImage> spectra(n);
        parallel_for(n, threads, [&](std::size_t i) { spectra[i] = residual_power_spectrum(load(start + i), size); });
        total.add_sum(fingerprint_detail::pairwise_sum(spectra, 0, n), n);
    }
    return total.result();
}

inline Fingerprint extract_fingerprint(std::span<const RgbImage> images, std::size_t size = kDefaultFingerprintSize,
                                       std::size_t threads = 1) {
    return extract_fingerprint(
        images.size(), [&](std::size_t i) { return images[i]; }, size, threads);
}

inline Fingerprint extract_fingerprint_from_dir(const std::filesystem::path& dir,
                                                std::size_t size = kDefaultFingerprintSize, std::size_t threads = 1) {
    const auto files = list_images(dir);
    if (files.empty()) throw DataError("no images in '" + dir.string() + "'");
    return extract_fingerprint(
        files.size(), [&](std::size_t i) { return load_image(files[i]); }, size, threads);
}

/// Off-DC peak-to-mean ratio of the centered fingerprint (3x3 DC block excluded).
inline double peak_to_mean(const Fingerprint& fp) { return peak_to_mean_shifted(fftshift(fp.plane)); }

/// Pearson correlation of log(1 + plane) over all bins except DC.
inline double fingerprint_similarity(const Fingerprint& a, const Fingerprint& b) {
    if (!a.plane.same_shape(b.plane)) throw DimensionMismatch("fingerprints differ in size");
    const std::size_t n = a.plane.size();
    if (n < 3) throw InvalidArgument("fingerprint too small for correlation");
    const auto constant = [](const GrayImage& p) {
        return std::all_of(p.begin() + 1, p.end(), [&](double v) { return v == p[1]; });
    };
    if (constant(a.plane) || constant(b.plane)) throw InvalidArgument("zero-variance fingerprint");
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        ma += std::log1p(a.plane[i]);
        mb += std::log1p(b.plane[i]);
    }
    ma /= static_cast<double>(n - 1);
    mb /= static_cast<double>(n - 1);
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double da = std::log1p(a.plane[i]) - ma;
        const double db = std::log1p(b.plane[i]) - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) throw InvalidArgument("zero-variance fingerprint");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

/// Display plane: fftshift, log(1+x), clipped at the 99.5th percentile, scaled to [0,1].
inline GrayImage fingerprint_visualization(const Fingerprint& fp) {
    GrayImage shifted = fftshift(fp.plane);
    for (double& v : shifted) v = std::log1p(v);
    std::vector<double> sorted(shifted.begin(), shifted.end());
    const auto rank = static_cast<std::size_t>(std::floor(0.995 * static_cast<double>(sorted.size() - 1)));
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank), sorted.end());
    const double clip = sorted[rank];
    const double lo = *std::min_element(shifted.begin(), shifted.end());
    const double range = clip - lo;
    for (double& v : shifted) v = range > 0.0 ? std::clamp((v - lo) / range, 0.0, 1.0) : 0.0;
    return shifted;
}

// ---- raw file: "FNGR", u32 width, u32 height, u32 count, then f64 row-major, all little-endian.

namespace fingerprint_detail {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    std::uint8_t bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    out.insert(out.end(), std::begin(bytes), std::end(bytes));
}

template <typename T>
T get_le(const std::vector<std::uint8_t>& in, std::size_t pos) {
    std::uint8_t bytes[sizeof(T)];
    std::memcpy(bytes, in.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace fingerprint_detail

inline constexpr std::size_t kFingerprintHeaderBytes = 16;

inline std::vector<std::uint8_t> encode_fingerprint(const Fingerprint& fp) {
    std::vector<std::uint8_t> out{'F', 'N', 'G', 'R'};
    fingerprint_detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(fp.plane.width()));
    fingerprint_detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(fp.plane.height()));
    fingerprint_detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(fp.count));
    for (double v : fp.plane) fingerprint_detail::put_le<double>(out, v);
    return out;
}

inline Fingerprint decode_fingerprint(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kFingerprintHeaderBytes || std::memcmp(bytes.data(), "FNGR", 4) != 0) {
        throw FormatError("not a fingerprint file");
    }
    const auto w = fingerprint_detail::get_le<std::uint32_t>(bytes, 4);
    const auto h = fingerprint_detail::get_le<std::uint32_t>(bytes, 8);
    const auto count = fingerprint_detail::get_le<std::uint32_t>(bytes, 12);
    if (w == 0 || h == 0) throw FormatError("zero-dimension fingerprint");
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (bytes.size() != kFingerprintHeaderBytes + n * 8) throw FormatError("fingerprint payload size mismatch");
    Fingerprint fp{GrayImage(w, h), count};
    for (std::size_t i = 0; i < n; ++i) {
        fp.plane[i] = fingerprint_detail::get_le<double>(bytes, kFingerprintHeaderBytes + 8 * i);
    }
    return fp;
}

inline void save_fingerprint(const Fingerprint& fp, const std::filesystem::path& path) {
    io_detail::write_file(path, encode_fingerprint(fp));
}

inline Fingerprint load_fingerprint(const std::filesystem::path& path) {
    return decode_fingerprint(io_detail::read_file(path));
}

}  // namespace freqinject
