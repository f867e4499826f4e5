#pragma once

// Frequency-magnitude injection. Per channel c:
//   F_c = fft2(I_c),  (M_c, phi_c) = polar(F_c)
//   M_P = |fft2(P)| with DC zeroed, scaled to the image's off-DC magnitude level
//   I_P,c = Re ifft2((M_c + M_P) * exp(i phi_c))
// The pattern phase is discarded; the same M_P goes into every channel.

#include <array>
#include <cmath>

#include "freqinject/error.hpp"
#include "freqinject/image.hpp"
#include "freqinject/patterns.hpp"
#include "freqinject/spectral.hpp"

namespace freqinject {

struct InjectionResult {
    RgbImage injected;                    // clamp(pre_clamp, 0, 1)
    std::array<GrayImage, 3> pre_clamp;   // real inverse transforms before clamping
    PatternSpec spec;
    double max_imag_residue = 0.0;
    GrayImage added_magnitude;            // the scaled M_P, natural layout
};

/// Mean over every bin except DC; 0 for a 1x1 plane.
inline double off_dc_mean(const GrayImage& magnitude) {
    if (magnitude.size() < 2) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 1; i < magnitude.size(); ++i) sum += magnitude[i];
    return sum / static_cast<double>(magnitude.size() - 1);
}

/// `strength` is relative: the added magnitude's off-DC mean equals strength times
/// the image's off-DC mean magnitude (averaged over channels).
inline InjectionResult inject(const RgbImage& image, const PatternImage& pattern, double strength) {
    if (!std::isfinite(strength) || strength < 0.0) throw InvalidArgument("strength must be finite and >= 0");
    if (!all_finite(image)) throw InvalidArgument("image contains non-finite values");
    if (!all_finite(pattern.pixels)) throw InvalidArgument("pattern contains non-finite values");

    const std::size_t w = image.width();
    const std::size_t h = image.height();
    const GrayImage p = resize(pattern.pixels, w, h);

    GrayImage added = magnitude(fft2(p));
    added[0] = 0.0;

    std::array<PolarSpectrum, 3> channels;
    double image_level = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        channels[c] = decompose(fft2(image.plane(c)));
        image_level += off_dc_mean(channels[c].magnitude) / 3.0;
    }
    const double pattern_level = off_dc_mean(added);
    const double scale = pattern_level > 0.0 ? strength * image_level / pattern_level : 0.0;
    for (double& v : added) v *= scale;

    InjectionResult result;
    result.spec = pattern.spec;
    result.spec.strength = strength;
    std::array<GrayImage, 3> clamped;
    for (std::size_t c = 0; c < 3; ++c) {
        GrayImage combined = channels[c].magnitude;
        for (std::size_t i = 0; i < combined.size(); ++i) combined[i] += added[i];
        InverseResult inv = ifft2_with_residue(recompose(combined, channels[c].phase));
        result.max_imag_residue = std::max(result.max_imag_residue, inv.max_imag_residue);
        clamped[c] = clamp_unit(inv.real);
        result.pre_clamp[c] = std::move(inv.real);
    }
    result.injected = RgbImage(std::move(clamped[0]), std::move(clamped[1]), std::move(clamped[2]));
    result.added_magnitude = std::move(added);
    return result;
}

/// Generates the pattern at the image size from `spec` and injects it with spec.strength.
inline InjectionResult inject(const RgbImage& image, const PatternSpec& spec) {
    return inject(image, generate(spec, image.width(), image.height()), spec.strength);
}

/// fftshift(|fft2(gray(injected))| - |fft2(gray(original))|).
inline GrayImage injection_delta_spectrum(const InjectionResult& result, const RgbImage& original) {
    if (!result.injected.same_shape(original)) throw DimensionMismatch("injected and original differ in size");
    GrayImage after = magnitude(fft2(to_grayscale(result.injected)));
    const GrayImage before = magnitude(fft2(to_grayscale(original)));
    for (std::size_t i = 0; i < after.size(); ++i) after[i] -= before[i];
    return fftshift(after);
}

}  // namespace freqinject
