#pragma once

// Structured pattern synthesis. Three families:
//   Geometric      grid, checkerboard, circles, ovals, stripes
//   Aura           rings, dots
//   FrequencySpike Hermitian impulse pairs placed in the spectrum
//
// All randomness comes from CounterRng(seed, stream). Stream layout:
//   0        family choice (random_spec)
//   1        shape choice (random_spec)
//   16 + k   parameter draw, attempt k (k < kMaxPatternAttempts)

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "freqinject/error.hpp"
#include "freqinject/image.hpp"
#include "freqinject/rng.hpp"
#include "freqinject/spectral.hpp"

namespace freqinject {

using Json = nlohmann::ordered_json;

enum class PatternFamily { Geometric, Aura, FrequencySpike };

enum class PatternShape { None, Grid, Checkerboard, Circles, Ovals, Stripes, Rings, Dots };

inline constexpr std::uint64_t kFamilyStream = 0;
inline constexpr std::uint64_t kShapeStream = 1;
inline constexpr std::uint64_t kParamStreamBase = 16;
inline constexpr int kMaxPatternAttempts = 8;
inline constexpr double kDefaultStrength = 0.5;

struct PatternSpec {
    PatternFamily family = PatternFamily::Geometric;
    PatternShape shape = PatternShape::Grid;
    std::uint64_t seed = 0;
    double strength = kDefaultStrength;
    Json params = Json::object();  // filled by generation
};

struct PatternImage {
    GrayImage pixels;
    PatternSpec spec;
};

// ---- names ------------------------------------------------------------------

inline std::string_view family_name(PatternFamily f) {
    switch (f) {
        case PatternFamily::Geometric: return "geometric";
        case PatternFamily::Aura: return "aura";
        case PatternFamily::FrequencySpike: return "spike";
    }
    return "?";
}

inline PatternFamily parse_family(std::string_view name) {
    if (name == "geometric" || name == "g") return PatternFamily::Geometric;
    if (name == "aura" || name == "a") return PatternFamily::Aura;
    if (name == "spike" || name == "s" || name == "spikes") return PatternFamily::FrequencySpike;
    throw InvalidArgument("unknown pattern family '" + std::string(name) + "'");
}

inline std::string_view shape_name(PatternShape s) {
    switch (s) {
        case PatternShape::None: return "";
        case PatternShape::Grid: return "grid";
        case PatternShape::Checkerboard: return "checkerboard";
        case PatternShape::Circles: return "circles";
        case PatternShape::Ovals: return "ovals";
        case PatternShape::Stripes: return "stripes";
        case PatternShape::Rings: return "rings";
        case PatternShape::Dots: return "dots";
    }
    return "?";
}

inline PatternShape parse_shape(std::string_view name) {
    for (auto s : {PatternShape::Grid, PatternShape::Checkerboard, PatternShape::Circles, PatternShape::Ovals,
                   PatternShape::Stripes, PatternShape::Rings, PatternShape::Dots}) {
        if (shape_name(s) == name) return s;
    }
    if (name.empty() || name == "none") return PatternShape::None;
    throw InvalidArgument("unknown pattern shape '" + std::string(name) + "'");
}

inline std::span<const PatternShape> shapes_of(PatternFamily f) {
    static constexpr std::array kGeometric{PatternShape::Grid, PatternShape::Checkerboard, PatternShape::Circles,
                                           PatternShape::Ovals, PatternShape::Stripes};
    static constexpr std::array kAura{PatternShape::Rings, PatternShape::Dots};
    static constexpr std::array kSpike{PatternShape::None};
    switch (f) {
        case PatternFamily::Geometric: return kGeometric;
        case PatternFamily::Aura: return kAura;
        case PatternFamily::FrequencySpike: return kSpike;
    }
    return {};
}

inline bool shape_belongs(PatternFamily f, PatternShape s) {
    const auto shapes = shapes_of(f);
    return std::find(shapes.begin(), shapes.end(), s) != shapes.end();
}

// ---- typed parameters ---------------------------------------------------------

struct GridParams {
    double period_x = 8.0;
    double period_y = 8.0;
    double offset_x = 0.0;
    double offset_y = 0.0;
    double intensity = 1.0;
};

struct CheckerboardParams {
    double tile = 4.0;
    double offset_x = 0.0;
    double offset_y = 0.0;
    double intensity = 1.0;
};

struct StripeParams {
    double period = 8.0;
    double angle = 0.0;  // 0: intensity varies along x (vertical stripes)
    double offset = 0.0;
    double intensity = 1.0;
};

struct Ellipse {
    double cx = 0.0;
    double cy = 0.0;
    double rx = 1.0;
    double ry = 1.0;
    double angle = 0.0;
};

struct OutlineParams {
    std::vector<Ellipse> shapes;
    double thickness = 1.5;
    double intensity = 1.0;
};

struct GaussianDot {
    double cx = 0.0;
    double cy = 0.0;
    double sigma = 1.0;
    double amplitude = 1.0;
};

struct DotParams {
    std::vector<GaussianDot> dots;
};

struct Ring {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 4.0;
    double width = 1.0;
    double amplitude = 1.0;
};

struct RingParams {
    std::vector<Ring> rings;
};

/// One impulse at natural-layout bin (u=row, v=col); its conjugate is placed automatically.
struct Spike {
    std::size_t u = 0;
    std::size_t v = 0;
    double amplitude = 1.0;
};

struct SpikeParams {
    std::vector<Spike> spikes;
};

inline Json to_json(const GridParams& p) {
    return {{"period_x", p.period_x}, {"period_y", p.period_y}, {"offset_x", p.offset_x},
            {"offset_y", p.offset_y}, {"intensity", p.intensity}};
}

inline Json to_json(const CheckerboardParams& p) {
    return {{"tile", p.tile}, {"offset_x", p.offset_x}, {"offset_y", p.offset_y}, {"intensity", p.intensity}};
}

inline Json to_json(const StripeParams& p) {
    return {{"period", p.period}, {"angle", p.angle}, {"offset", p.offset}, {"intensity", p.intensity}};
}

inline Json to_json(const OutlineParams& p) {
    Json shapes = Json::array();
    for (const auto& e : p.shapes) {
        shapes.push_back({{"cx", e.cx}, {"cy", e.cy}, {"rx", e.rx}, {"ry", e.ry}, {"angle", e.angle}});
    }
    return {{"count", p.shapes.size()}, {"thickness", p.thickness}, {"intensity", p.intensity}, {"shapes", shapes}};
}

inline Json to_json(const DotParams& p) {
    Json dots = Json::array();
    for (const auto& d : p.dots) {
        dots.push_back({{"cx", d.cx}, {"cy", d.cy}, {"sigma", d.sigma}, {"amplitude", d.amplitude}});
    }
    return {{"count", p.dots.size()}, {"dots", dots}};
}

inline Json to_json(const RingParams& p) {
    Json rings = Json::array();
    for (const auto& r : p.rings) {
        rings.push_back(
            {{"cx", r.cx}, {"cy", r.cy}, {"radius", r.radius}, {"width", r.width}, {"amplitude", r.amplitude}});
    }
    return {{"count", p.rings.size()}, {"rings", rings}};
}

inline Json to_json(const SpikeParams& p) {
    Json spikes = Json::array();
    for (const auto& s : p.spikes) spikes.push_back({{"u", s.u}, {"v", s.v}, {"amplitude", s.amplitude}});
    return {{"count", p.spikes.size()}, {"spikes", spikes}};
}

// ---- rendering ----------------------------------------------------------------

namespace pattern_detail {

/// 1 on the first half of each period, 0 on the second.
inline double square_wave(double t) { return t - std::floor(t) < 0.5 ? 1.0 : 0.0; }

inline double floor_mod2(double t) {
    const double f = std::floor(t);
    return std::fabs(f - 2.0 * std::floor(f / 2.0));
}

}  // namespace pattern_detail

inline GrayImage render(const GridParams& p, std::size_t w, std::size_t h) {
    GrayImage out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        const double wy = pattern_detail::square_wave((static_cast<double>(y) + p.offset_y) / p.period_y);
        for (std::size_t x = 0; x < w; ++x) {
            const double wx = pattern_detail::square_wave((static_cast<double>(x) + p.offset_x) / p.period_x);
            out(y, x) = p.intensity * 0.5 * (wx + wy);
        }
    }
    return out;
}

inline GrayImage render(const CheckerboardParams& p, std::size_t w, std::size_t h) {
    GrayImage out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        const double ty = std::floor((static_cast<double>(y) + p.offset_y) / p.tile);
        for (std::size_t x = 0; x < w; ++x) {
            const double tx = std::floor((static_cast<double>(x) + p.offset_x) / p.tile);
            out(y, x) = p.intensity * pattern_detail::floor_mod2(tx + ty);
        }
    }
    return out;
}

inline GrayImage render(const StripeParams& p, std::size_t w, std::size_t h) {
    GrayImage out(w, h);
    const double c = std::cos(p.angle);
    const double s = std::sin(p.angle);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double t = (static_cast<double>(x) * c + static_cast<double>(y) * s + p.offset) / p.period;
            out(y, x) = p.intensity * pattern_detail::square_wave(t);
        }
    }
    return out;
}

/// Anti-aliased ellipse outlines; overlapping outlines combine by max.
inline GrayImage render(const OutlineParams& p, std::size_t w, std::size_t h) {
    GrayImage out(w, h, 0.0);
    const double half = 0.5 * p.thickness;
    for (const Ellipse& e : p.shapes) {
        const double c = std::cos(e.angle);
        const double s = std::sin(e.angle);
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                const double dx = static_cast<double>(x) - e.cx;
                const double dy = static_cast<double>(y) - e.cy;
                const double lx = (dx * c + dy * s) / e.rx;
                const double ly = (-dx * s + dy * c) / e.ry;
                const double rho = std::hypot(lx, ly);
                double dist;
                if (rho < 1e-12) {
                    dist = std::min(e.rx, e.ry);
                } else {
                    // First-order distance to the level set rho = 1.
                    const double gx = lx / (e.rx * rho);
                    const double gy = ly / (e.ry * rho);
                    dist = std::fabs(rho - 1.0) / std::hypot(gx, gy);
                }
                const double coverage = std::clamp(half + 0.5 - dist, 0.0, 1.0);
                out(y, x) = std::max(out(y, x), p.intensity * coverage);
            }
        }
    }
    return out;
}

inline GrayImage render(const DotParams& p, std::size_t w, std::size_t h) {
    GrayImage out(w, h, 0.0);
    for (const GaussianDot& d : p.dots) {
        const double inv = 1.0 / (2.0 * d.sigma * d.sigma);
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                const double dx = static_cast<double>(x) - d.cx;
                const double dy = static_cast<double>(y) - d.cy;
                out(y, x) += d.amplitude * std::exp(-(dx * dx + dy * dy) * inv);
            }
        }
    }
    return clamp_unit(std::move(out));
}

inline GrayImage render(const RingParams& p, std::size_t w, std::size_t h) {
    GrayImage out(w, h, 0.0);
    for (const Ring& r : p.rings) {
        const double inv = 1.0 / (2.0 * r.width * r.width);
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                const double d = std::hypot(static_cast<double>(x) - r.cx, static_cast<double>(y) - r.cy) - r.radius;
                out(y, x) += r.amplitude * std::exp(-d * d * inv);
            }
        }
    }
    return clamp_unit(std::move(out));
}

/// Frequency template with Hermitian impulse pairs.
inline Spectrum spike_template(const SpikeParams& p, std::size_t w, std::size_t h) {
    Spectrum spec(w, h, Complex(0.0, 0.0));
    for (const Spike& s : p.spikes) {
        if (s.u >= h || s.v >= w) throw InvalidArgument("spike bin outside the raster");
        spec(s.u, s.v) += s.amplitude;
        spec((h - s.u) % h, (w - s.v) % w) += s.amplitude;
    }
    return spec;
}

/// Real part of the inverse template, min-max normalized to [0,1].
inline GrayImage render(const SpikeParams& p, std::size_t w, std::size_t h) {
    return normalize_min_max(ifft2(spike_template(p, w, h)));
}

template <typename P>
struct PatternTraits;

template <>
struct PatternTraits<GridParams> {
    static constexpr PatternFamily family = PatternFamily::Geometric;
    static constexpr PatternShape shape = PatternShape::Grid;
};
template <>
struct PatternTraits<CheckerboardParams> {
    static constexpr PatternFamily family = PatternFamily::Geometric;
    static constexpr PatternShape shape = PatternShape::Checkerboard;
};
template <>
struct PatternTraits<StripeParams> {
    static constexpr PatternFamily family = PatternFamily::Geometric;
    static constexpr PatternShape shape = PatternShape::Stripes;
};
template <>
struct PatternTraits<DotParams> {
    static constexpr PatternFamily family = PatternFamily::Aura;
    static constexpr PatternShape shape = PatternShape::Dots;
};
template <>
struct PatternTraits<RingParams> {
    static constexpr PatternFamily family = PatternFamily::Aura;
    static constexpr PatternShape shape = PatternShape::Rings;
};
template <>
struct PatternTraits<SpikeParams> {
    static constexpr PatternFamily family = PatternFamily::FrequencySpike;
    static constexpr PatternShape shape = PatternShape::None;
};

/// Pattern from explicit parameters (no randomness); seed is recorded as given.
template <typename P>
PatternImage pattern_from(const P& params, std::size_t w, std::size_t h, std::uint64_t seed = 0,
                          double strength = kDefaultStrength) {
    PatternSpec spec{PatternTraits<P>::family, PatternTraits<P>::shape, seed, strength, to_json(params)};
    return {render(params, w, h), std::move(spec)};
}

/// Circles and ovals share OutlineParams, so the shape is explicit.
inline PatternImage pattern_from(const OutlineParams& params, PatternShape shape, std::size_t w, std::size_t h,
                                 std::uint64_t seed = 0, double strength = kDefaultStrength) {
    PatternSpec spec{PatternFamily::Geometric, shape, seed, strength, to_json(params)};
    return {render(params, w, h), std::move(spec)};
}

// ---- sampling -----------------------------------------------------------------

struct PeriodRange {
    double lo;
    double hi;
};

/// Periods (and radii) are drawn from [4, min(w,h)/4]; tiny rasters fall back to [2, min/2].
inline PeriodRange period_range(std::size_t w, std::size_t h) {
    const double side = static_cast<double>(std::min(w, h));
    if (side / 4.0 >= 4.0) return {4.0, side / 4.0};
    return {2.0, std::max(2.0, side / 2.0)};
}

namespace pattern_detail {

inline double intensity(CounterRng& rng) { return rng.uniform(0.3, 1.0); }
inline std::size_t count(CounterRng& rng) { return static_cast<std::size_t>(rng.uniform_int(1, 8)); }

inline GridParams sample_grid(CounterRng& rng, std::size_t w, std::size_t h) {
    const auto range = period_range(w, h);
    GridParams p;
    p.period_x = rng.uniform(range.lo, range.hi);
    p.period_y = rng.uniform(range.lo, range.hi);
    p.offset_x = rng.uniform(0.0, p.period_x);
    p.offset_y = rng.uniform(0.0, p.period_y);
    p.intensity = intensity(rng);
    return p;
}

inline CheckerboardParams sample_checkerboard(CounterRng& rng, std::size_t w, std::size_t h) {
    const auto range = period_range(w, h);
    CheckerboardParams p;
    // A checkerboard period spans two tiles.
    p.tile = rng.uniform(range.lo, range.hi) / 2.0;
    p.offset_x = rng.uniform(0.0, 2.0 * p.tile);
    p.offset_y = rng.uniform(0.0, 2.0 * p.tile);
    p.intensity = intensity(rng);
    return p;
}

inline StripeParams sample_stripes(CounterRng& rng, std::size_t w, std::size_t h) {
    const auto range = period_range(w, h);
    StripeParams p;
    p.period = rng.uniform(range.lo, range.hi);
    p.angle = rng.uniform(0.0, std::numbers::pi);
    p.offset = rng.uniform(0.0, p.period);
    p.intensity = intensity(rng);
    return p;
}

inline OutlineParams sample_outlines(CounterRng& rng, std::size_t w, std::size_t h, bool ovals) {
    const auto range = period_range(w, h);
    OutlineParams p;
    const std::size_t n = count(rng);
    for (std::size_t i = 0; i < n; ++i) {
        Ellipse e;
        e.cx = rng.uniform(0.0, static_cast<double>(w));
        e.cy = rng.uniform(0.0, static_cast<double>(h));
        e.rx = rng.uniform(range.lo, range.hi);
        e.ry = ovals ? rng.uniform(range.lo, range.hi) : e.rx;
        e.angle = ovals ? rng.uniform(0.0, std::numbers::pi) : 0.0;
        p.shapes.push_back(e);
    }
    p.thickness = rng.uniform(1.0, 2.5);
    p.intensity = intensity(rng);
    return p;
}

inline DotParams sample_dots(CounterRng& rng, std::size_t w, std::size_t h) {
    const double side = static_cast<double>(std::min(w, h));
    DotParams p;
    const std::size_t n = count(rng);
    for (std::size_t i = 0; i < n; ++i) {
        GaussianDot d;
        d.cx = rng.uniform(0.0, static_cast<double>(w));
        d.cy = rng.uniform(0.0, static_cast<double>(h));
        d.sigma = rng.uniform(1.0, std::max(1.5, side / 8.0));
        d.amplitude = intensity(rng);
        p.dots.push_back(d);
    }
    return p;
}

inline RingParams sample_rings(CounterRng& rng, std::size_t w, std::size_t h) {
    const auto range = period_range(w, h);
    RingParams p;
    const std::size_t n = count(rng);
    for (std::size_t i = 0; i < n; ++i) {
        Ring r;
        r.cx = rng.uniform(0.0, static_cast<double>(w));
        r.cy = rng.uniform(0.0, static_cast<double>(h));
        r.radius = rng.uniform(range.lo, range.hi);
        r.width = rng.uniform(0.75, 2.5);
        r.amplitude = intensity(rng);
        p.rings.push_back(r);
    }
    return p;
}

inline SpikeParams sample_spikes(CounterRng& rng, std::size_t w, std::size_t h) {
    if (w <= 3 && h <= 3) throw InvalidArgument("raster too small for frequency spikes");
    SpikeParams p;
    const std::size_t n = count(rng);
    for (std::size_t i = 0; i < n; ++i) {
        Spike s;
        do {
            s.u = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(h) - 1));
            s.v = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(w) - 1));
        } while (near_dc(s.u, s.v, h, w, 1));
        s.amplitude = intensity(rng);
        p.spikes.push_back(s);
    }
    return p;
}

}  // namespace pattern_detail

/// Off-DC structure check: the largest centered magnitude outside the 3x3 DC
/// block must reach 1% of the DC magnitude. All-zero patterns fail.
inline bool is_structured(const GrayImage& pattern) {
    const bool any_nonzero = std::any_of(pattern.begin(), pattern.end(), [](double v) { return v != 0.0; });
    if (!any_nonzero) return false;
    const Spectrum spec = fft2(pattern);
    const double dc = std::abs(spec[0]);
    const GrayImage shifted = fftshift(magnitude(spec));
    const auto peaks = top_peaks_shifted(shifted, 1);
    if (peaks.empty()) return dc > 0.0;
    return shifted(peaks[0].row, peaks[0].col) >= 0.01 * dc;
}

/// Draws parameters on stream kParamStreamBase + attempt until the rendered
/// pattern is structured; gives up after kMaxPatternAttempts.
template <typename Sampler>
PatternImage generate_with_retry(const PatternSpec& spec, std::size_t w, std::size_t h, Sampler&& sample) {
    for (int attempt = 0; attempt < kMaxPatternAttempts; ++attempt) {
        CounterRng rng(spec.seed, kParamStreamBase + static_cast<std::uint64_t>(attempt));
        auto [pixels, params] = sample(rng);
        if (is_structured(pixels)) {
            PatternSpec resolved = spec;
            resolved.params = std::move(params);
            resolved.params["attempt"] = attempt;
            return {std::move(pixels), std::move(resolved)};
        }
    }
    throw Error("pattern generation produced only degenerate draws");
}

inline PatternImage generate_geometric(const PatternSpec& spec, std::size_t w, std::size_t h) {
    if (spec.family != PatternFamily::Geometric || !shape_belongs(spec.family, spec.shape)) {
        throw InvalidArgument("generate_geometric needs a geometric spec");
    }
    return generate_with_retry(spec, w, h, [&](CounterRng& rng) -> std::pair<GrayImage, Json> {
        switch (spec.shape) {
            case PatternShape::Grid: {
                const auto p = pattern_detail::sample_grid(rng, w, h);
                return {render(p, w, h), to_json(p)};
            }
            case PatternShape::Checkerboard: {
                const auto p = pattern_detail::sample_checkerboard(rng, w, h);
                return {render(p, w, h), to_json(p)};
            }
            case PatternShape::Stripes: {
                const auto p = pattern_detail::sample_stripes(rng, w, h);
                return {render(p, w, h), to_json(p)};
            }
            default: {
                const auto p = pattern_detail::sample_outlines(rng, w, h, spec.shape == PatternShape::Ovals);
                return {render(p, w, h), to_json(p)};
            }
        }
    });
}

inline PatternImage generate_aura(const PatternSpec& spec, std::size_t w, std::size_t h) {
    if (spec.family != PatternFamily::Aura || !shape_belongs(spec.family, spec.shape)) {
        throw InvalidArgument("generate_aura needs an aura spec");
    }
    return generate_with_retry(spec, w, h, [&](CounterRng& rng) -> std::pair<GrayImage, Json> {
        if (spec.shape == PatternShape::Rings) {
            const auto p = pattern_detail::sample_rings(rng, w, h);
            return {render(p, w, h), to_json(p)};
        }
        const auto p = pattern_detail::sample_dots(rng, w, h);
        return {render(p, w, h), to_json(p)};
    });
}

inline PatternImage generate_spikes(const PatternSpec& spec, std::size_t w, std::size_t h) {
    if (spec.family != PatternFamily::FrequencySpike) throw InvalidArgument("generate_spikes needs a spike spec");
    return generate_with_retry(spec, w, h, [&](CounterRng& rng) -> std::pair<GrayImage, Json> {
        const auto p = pattern_detail::sample_spikes(rng, w, h);
        return {render(p, w, h), to_json(p)};
    });
}

inline PatternImage generate(const PatternSpec& spec, std::size_t w, std::size_t h) {
    switch (spec.family) {
        case PatternFamily::Geometric: return generate_geometric(spec, w, h);
        case PatternFamily::Aura: return generate_aura(spec, w, h);
        case PatternFamily::FrequencySpike: return generate_spikes(spec, w, h);
    }
    throw InvalidArgument("unknown pattern family");
}

using FamilyWeights = std::array<double, 3>;  // geometric, aura, spike

/// Family by normalized weight, then shape uniformly within the family.
/// Parameters are resolved later, at generation, because they depend on the raster size.
inline PatternSpec random_spec(const FamilyWeights& weights, std::uint64_t seed, double strength = kDefaultStrength) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("family weights must be finite and non-negative");
        total += w;
    }
    if (total <= 0.0) throw InvalidArgument("family weights are all zero");

    CounterRng family_rng(seed, kFamilyStream);
    CounterRng shape_rng(seed, kShapeStream);
    PatternSpec spec;
    spec.family = static_cast<PatternFamily>(family_rng.categorical(weights));
    const auto shapes = shapes_of(spec.family);
    spec.shape = shapes[static_cast<std::size_t>(shape_rng.uniform_int(0, static_cast<std::int64_t>(shapes.size()) - 1))];
    spec.seed = seed;
    spec.strength = strength;
    return spec;
}

// ---- JSON -------------------------------------------------------------------

inline Json to_json(const PatternSpec& spec) {
    Json j;
    j["family"] = family_name(spec.family);
    j["shape"] = spec.shape == PatternShape::None ? Json(nullptr) : Json(shape_name(spec.shape));
    j["seed"] = spec.seed;
    j["strength"] = spec.strength;
    j["params"] = spec.params;
    return j;
}

inline PatternSpec pattern_spec_from_json(const Json& j) {
    PatternSpec spec;
    spec.family = parse_family(j.at("family").get<std::string>());
    spec.shape = j.at("shape").is_null() ? PatternShape::None : parse_shape(j.at("shape").get<std::string>());
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.strength = j.at("strength").get<double>();
    spec.params = j.value("params", Json::object());
    if (!shape_belongs(spec.family, spec.shape)) throw FormatError("pattern shape does not match family");
    return spec;
}

}  // namespace freqinject
