#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "freqinject/error.hpp"

namespace freqinject {

/// Dense row-major 2D array. Index (row, col) == (y, x).
template <typename T>
class Plane {
public:
    using value_type = T;

    Plane() = default;

    Plane(std::size_t width, std::size_t height, T fill = T{})
        : width_(width), height_(height), data_(width * height, fill) {
        if (width == 0 || height == 0) {
            throw InvalidArgument("plane dimensions must be at least 1x1");
        }
    }

    Plane(std::size_t width, std::size_t height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (width == 0 || height == 0) {
            throw InvalidArgument("plane dimensions must be at least 1x1");
        }
        if (data_.size() != width * height) {
            throw DimensionMismatch("plane data size does not match dimensions");
        }
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
    const T& operator()(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    bool same_shape(const Plane& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    template <typename U>
    bool same_shape(const Plane<U>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Plane&, const Plane&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<T> data_;
};

/// Single-channel real plane: residuals, patterns, magnitudes, fingerprints.
using GrayImage = Plane<double>;

enum Channel : std::size_t { kRed = 0, kGreen = 1, kBlue = 2 };

/// Three-channel image with values in [0, 1].
class RgbImage {
public:
    RgbImage() = default;

    RgbImage(std::size_t width, std::size_t height, double fill = 0.0)
        : planes_{GrayImage(width, height, fill), GrayImage(width, height, fill),
                  GrayImage(width, height, fill)} {}

    RgbImage(GrayImage red, GrayImage green, GrayImage blue)
        : planes_{std::move(red), std::move(green), std::move(blue)} {
        if (!planes_[0].same_shape(planes_[1]) || !planes_[0].same_shape(planes_[2])) {
            throw DimensionMismatch("rgb planes differ in size");
        }
    }

    /// Gray replicated into all three channels.
    static RgbImage from_gray(const GrayImage& gray) { return RgbImage(gray, gray, gray); }

    std::size_t width() const noexcept { return planes_[0].width(); }
    std::size_t height() const noexcept { return planes_[0].height(); }
    bool empty() const noexcept { return planes_[0].empty(); }

    GrayImage& plane(std::size_t c) { return planes_[c]; }
    const GrayImage& plane(std::size_t c) const { return planes_[c]; }

    double& operator()(std::size_t c, std::size_t row, std::size_t col) { return planes_[c](row, col); }
    double operator()(std::size_t c, std::size_t row, std::size_t col) const { return planes_[c](row, col); }

    bool same_shape(const RgbImage& other) const noexcept { return planes_[0].same_shape(other.planes_[0]); }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    std::array<GrayImage, 3> planes_;
};

inline bool all_finite(const GrayImage& img) {
    return std::all_of(img.begin(), img.end(), [](double v) { return std::isfinite(v); });
}

inline bool all_finite(const RgbImage& img) {
    return all_finite(img.plane(0)) && all_finite(img.plane(1)) && all_finite(img.plane(2));
}

/// True when every sample lies in [0, 1].
inline bool in_unit_range(const RgbImage& img) {
    for (std::size_t c = 0; c < 3; ++c) {
        for (double v : img.plane(c)) {
            if (!(v >= 0.0 && v <= 1.0)) return false;
        }
    }
    return true;
}

inline GrayImage clamp_unit(GrayImage img) {
    for (double& v : img) v = std::clamp(v, 0.0, 1.0);
    return img;
}

inline RgbImage clamp_unit(RgbImage img) {
    for (std::size_t c = 0; c < 3; ++c) img.plane(c) = clamp_unit(std::move(img.plane(c)));
    return img;
}

// BT.601 luma.
inline constexpr double kLumaRed = 0.299;
inline constexpr double kLumaGreen = 0.587;
inline constexpr double kLumaBlue = 0.114;

inline GrayImage to_grayscale(const RgbImage& img) {
    GrayImage out(img.width(), img.height());
    const auto& r = img.plane(kRed);
    const auto& g = img.plane(kGreen);
    const auto& b = img.plane(kBlue);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = kLumaRed * r[i] + kLumaGreen * g[i] + kLumaBlue * b[i];
    }
    return out;
}

/// Bilinear resampling with pixel-center alignment and edge clamping.
/// Returns an exact copy when the size already matches.
inline GrayImage resize(const GrayImage& img, std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) throw InvalidArgument("resize target must be at least 1x1");
    if (img.width() == width && img.height() == height) return img;

    const double sx = static_cast<double>(img.width()) / static_cast<double>(width);
    const double sy = static_cast<double>(img.height()) / static_cast<double>(height);
    const auto max_x = static_cast<double>(img.width() - 1);
    const auto max_y = static_cast<double>(img.height() - 1);

    GrayImage out(width, height);
    for (std::size_t y = 0; y < height; ++y) {
        const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, max_y);
        const auto y0 = static_cast<std::size_t>(fy);
        const std::size_t y1 = std::min(y0 + 1, img.height() - 1);
        const double wy = fy - static_cast<double>(y0);
        for (std::size_t x = 0; x < width; ++x) {
            const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, max_x);
            const auto x0 = static_cast<std::size_t>(fx);
            const std::size_t x1 = std::min(x0 + 1, img.width() - 1);
            const double wx = fx - static_cast<double>(x0);
            const double top = img(y0, x0) * (1.0 - wx) + img(y0, x1) * wx;
            const double bottom = img(y1, x0) * (1.0 - wx) + img(y1, x1) * wx;
            out(y, x) = top * (1.0 - wy) + bottom * wy;
        }
    }
    return out;
}

inline RgbImage resize(const RgbImage& img, std::size_t width, std::size_t height) {
    if (img.width() == width && img.height() == height) return img;
    return RgbImage(resize(img.plane(0), width, height), resize(img.plane(1), width, height),
                    resize(img.plane(2), width, height));
}

inline double mean(const GrayImage& img) {
    double sum = 0.0;
    for (double v : img) sum += v;
    return sum / static_cast<double>(img.size());
}

}  // namespace freqinject
