#pragma once

// Labeled corpus builder. Every sample's randomness comes from
//   sample_seed = derive_seed(global_seed, index)
// split into counter-RNG streams:
//   0        inject-or-not draw
//   1        pattern seed and strength
//   2 + k    augmentation k (flip, rotate90, contrast, color_jitter, gaussian_noise)

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "freqinject/error.hpp"
#include "freqinject/image.hpp"
#include "freqinject/image_io.hpp"
#include "freqinject/inject.hpp"
#include "freqinject/parallel.hpp"
#include "freqinject/patterns.hpp"
#include "freqinject/rng.hpp"

namespace freqinject {

enum class Augmentation { Flip, Rotate90, Contrast, ColorJitter, GaussianNoise };

inline constexpr std::array<Augmentation, 5> kAugmentationOrder{Augmentation::Flip, Augmentation::Rotate90,
                                                                Augmentation::Contrast, Augmentation::ColorJitter,
                                                                Augmentation::GaussianNoise};

inline std::string augmentation_name(Augmentation a) {
    switch (a) {
        case Augmentation::Flip: return "flip";
        case Augmentation::Rotate90: return "rotate90";
        case Augmentation::Contrast: return "contrast";
        case Augmentation::ColorJitter: return "color_jitter";
        case Augmentation::GaussianNoise: return "gaussian_noise";
    }
    return "?";
}

inline Augmentation parse_augmentation(const std::string& name) {
    for (Augmentation a : kAugmentationOrder) {
        if (augmentation_name(a) == name) return a;
    }
    throw InvalidArgument("unknown augmentation '" + name + "'");
}

inline constexpr std::uint64_t kDecisionStream = 0;
inline constexpr std::uint64_t kPatternDrawStream = 1;
inline constexpr std::uint64_t kAugmentStreamBase = 2;

struct DatasetConfig {
    std::filesystem::path source_dir;
    std::filesystem::path output_dir;
    double inject_probability = 0.5;
    FamilyWeights family_weights{1.0, 1.0, 1.0};
    double strength_lo = 0.3;
    double strength_hi = 1.0;
    std::set<Augmentation> augmentations;
    std::uint64_t global_seed = 0;
    std::size_t working_size = 256;

    void validate() const {
        if (!(inject_probability >= 0.0 && inject_probability <= 1.0)) {
            throw InvalidArgument("inject probability must lie in [0, 1]");
        }
        if (!std::isfinite(strength_lo) || !std::isfinite(strength_hi) || strength_lo < 0.0 || strength_lo > strength_hi) {
            throw InvalidArgument("strength range must satisfy 0 <= lo <= hi");
        }
        if (working_size < 16) throw InvalidArgument("working size must be at least 16");
        double total = 0.0;
        for (double w : family_weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("family weights must be finite and non-negative");
            total += w;
        }
        if (total <= 0.0 && inject_probability > 0.0) throw InvalidArgument("family weights are all zero");
    }

    Json to_json() const {
        Json j;
        j["source_dir"] = source_dir.string();
        j["output_dir"] = output_dir.string();
        j["inject_probability"] = inject_probability;
        j["family_weights"] = family_weights;
        j["strength_range"] = {strength_lo, strength_hi};
        Json augs = Json::array();
        for (Augmentation a : kAugmentationOrder) {
            if (augmentations.contains(a)) augs.push_back(augmentation_name(a));
        }
        j["augmentations"] = augs;
        j["global_seed"] = global_seed;
        j["working_size"] = working_size;
        return j;
    }
};

struct ManifestRecord {
    std::string path;
    int label = 0;  // 0 pristine, 1 fake
    std::uint64_t sample_seed = 0;
    std::optional<PatternSpec> pattern;
    std::vector<std::string> augmentations_applied;
};

inline Json to_json(const ManifestRecord& r) {
    Json j;
    j["path"] = r.path;
    j["label"] = r.label;
    j["sample_seed"] = r.sample_seed;
    j["pattern"] = r.pattern ? to_json(*r.pattern) : Json(nullptr);
    j["augmentations_applied"] = r.augmentations_applied;
    return j;
}

inline ManifestRecord manifest_record_from_json(const Json& j) {
    ManifestRecord r;
    try {
        r.path = j.at("path").get<std::string>();
        r.label = j.at("label").get<int>();
        r.sample_seed = j.at("sample_seed").get<std::uint64_t>();
        if (!j.at("pattern").is_null()) r.pattern = pattern_spec_from_json(j.at("pattern"));
        r.augmentations_applied = j.at("augmentations_applied").get<std::vector<std::string>>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad manifest record: ") + e.what());
    }
    if (r.label != 0 && r.label != 1) throw FormatError("manifest label must be 0 or 1");
    if ((r.label == 1) != r.pattern.has_value()) throw FormatError("manifest label and pattern disagree");
    return r;
}

struct DatasetManifest {
    std::vector<ManifestRecord> records;
    std::size_t failures = 0;
};

inline std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t index) noexcept {
    return mix64(mix64(index + 0x632be59bd9b4e019ULL) ^ global_seed);
}

// ---- augmentations ----------------------------------------------------------

inline RgbImage flip_horizontal(const RgbImage& img) {
    RgbImage out(img.width(), img.height());
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t y = 0; y < img.height(); ++y) {
            for (std::size_t x = 0; x < img.width(); ++x) out(c, y, x) = img(c, y, img.width() - 1 - x);
        }
    }
    return out;
}

/// Counter-clockwise rotation by quarter_turns * 90 degrees.
inline RgbImage rotate90(const RgbImage& img, int quarter_turns) {
    quarter_turns = ((quarter_turns % 4) + 4) % 4;
    RgbImage cur = img;
    for (int t = 0; t < quarter_turns; ++t) {
        const std::size_t w = cur.width();
        const std::size_t h = cur.height();
        RgbImage next(h, w);
        for (std::size_t c = 0; c < 3; ++c) {
            for (std::size_t y = 0; y < h; ++y) {
                for (std::size_t x = 0; x < w; ++x) next(c, w - 1 - x, y) = cur(c, y, x);
            }
        }
        cur = std::move(next);
    }
    return cur;
}

struct AugmentResult {
    RgbImage image;
    std::vector<std::string> tags;
};

/// Each enabled augmentation fires with probability 0.5, in kAugmentationOrder.
inline AugmentResult apply_augmentations(const RgbImage& img, std::uint64_t seed,
                                         const std::set<Augmentation>& enabled) {
    AugmentResult out{img, {}};
    if (enabled.empty()) return out;
    for (std::size_t k = 0; k < kAugmentationOrder.size(); ++k) {
        const Augmentation a = kAugmentationOrder[k];
        if (!enabled.contains(a)) continue;
        CounterRng rng(seed, kAugmentStreamBase + k);
        if (!rng.bernoulli(0.5)) continue;
        RgbImage& im = out.image;
        switch (a) {
            case Augmentation::Flip: im = flip_horizontal(im); break;
            case Augmentation::Rotate90: im = rotate90(im, static_cast<int>(rng.uniform_int(1, 3))); break;
            case Augmentation::Contrast: {
                const double factor = rng.uniform(0.8, 1.2);
                for (std::size_t c = 0; c < 3; ++c) {
                    const double m = mean(im.plane(c));
                    for (double& v : im.plane(c)) v = m + factor * (v - m);
                }
                break;
            }
            case Augmentation::ColorJitter:
                for (std::size_t c = 0; c < 3; ++c) {
                    const double shift = rng.uniform(-0.05, 0.05);
                    for (double& v : im.plane(c)) v += shift;
                }
                break;
            case Augmentation::GaussianNoise: {
                const double sigma = rng.uniform(0.0, 0.02);
                for (std::size_t c = 0; c < 3; ++c) {
                    for (double& v : im.plane(c)) v += sigma * rng.normal();
                }
                break;
            }
        }
        out.tags.push_back(augmentation_name(a));
    }
    out.image = clamp_unit(out.image);
    return out;
}

// ---- per-sample pipeline -------------------------------------------------------

inline bool decide_injection(std::uint64_t sample_seed, double inject_probability) noexcept {
    return CounterRng(sample_seed, kDecisionStream).uniform() < inject_probability;
}

struct Sample {
    RgbImage image;
    ManifestRecord record;  // path left empty
};

/// Resize to the working size, decide injection, inject, augment.
inline Sample process_sample(const RgbImage& source, std::uint64_t index, const DatasetConfig& config) {
    Sample s;
    s.record.sample_seed = derive_seed(config.global_seed, index);
    RgbImage img = resize(source, config.working_size, config.working_size);

    if (decide_injection(s.record.sample_seed, config.inject_probability)) {
        CounterRng draw(s.record.sample_seed, kPatternDrawStream);
        const std::uint64_t pattern_seed = draw.next_u64();
        const double strength = draw.uniform(config.strength_lo, config.strength_hi);
        InjectionResult r = inject(img, random_spec(config.family_weights, pattern_seed, strength));
        img = std::move(r.injected);
        s.record.label = 1;
        s.record.pattern = std::move(r.spec);
    }

    AugmentResult aug = apply_augmentations(img, s.record.sample_seed, config.augmentations);
    s.image = std::move(aug.image);
    s.record.augmentations_applied = std::move(aug.tags);
    return s;
}

inline std::string sample_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "sample_%06zu.png", index);
    return buf;
}

inline constexpr std::string_view kManifestName = "manifest.jsonl";

inline void write_manifest(const std::vector<ManifestRecord>& records, const std::filesystem::path& path) {
    std::string text;
    for (const auto& r : records) {
        text += to_json(r).dump();
        text += '\n';
    }
    io_detail::write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

inline std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
    std::vector<ManifestRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::exception& e) {
            throw FormatError("manifest line " + std::to_string(line_no) + ": " + e.what());
        }
        records.push_back(manifest_record_from_json(j));
    }
    return records;
}

/// Writes sample_NNNNNN.png (index = position in the sorted source listing) and
/// manifest.jsonl into config.output_dir. Unreadable sources are skipped and counted.
inline DatasetManifest build_dataset(const DatasetConfig& config, std::size_t threads = 1) {
    config.validate();
    const auto files = list_images(config.source_dir);
    if (files.empty()) throw DataError("no images in '" + config.source_dir.string() + "'");

    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec || !std::filesystem::is_directory(config.output_dir)) {
        throw IoError("cannot create output directory '" + config.output_dir.string() + "'");
    }

    std::vector<std::optional<ManifestRecord>> slots(files.size());
    parallel_for(files.size(), threads, [&](std::size_t i) {
        RgbImage source;
        try {
            source = load_image(files[i]);
        } catch (const DataError&) {
            return;
        }
        Sample s = process_sample(source, i, config);
        s.record.path = sample_file_name(i);
        save_image(s.image, config.output_dir / s.record.path, 8);
        slots[i] = std::move(s.record);
    });

    DatasetManifest manifest;
    for (auto& slot : slots) {
        if (slot) {
            manifest.records.push_back(std::move(*slot));
        } else {
            ++manifest.failures;
        }
    }
    write_manifest(manifest.records, config.output_dir / kManifestName);
    return manifest;
}

/// Same samples as build_dataset, delivered in index order without touching disk.
/// Returns the number of unreadable sources.
inline std::size_t stream_dataset(const DatasetConfig& config, const std::function<void(std::size_t, Sample&)>& sink,
                                  std::size_t threads = 1) {
    config.validate();
    const auto files = list_images(config.source_dir);
    if (files.empty()) throw DataError("no images in '" + config.source_dir.string() + "'");
    std::size_t failures = 0;
    const std::size_t batch = std::max<std::size_t>(threads, 1) * 4;
    for (std::size_t start = 0; start < files.size(); start += batch) {
        const std::size_t n = std::min(batch, files.size() - start);
        std::vector<std::optional<Sample>> slots(n);
        parallel_for(n, threads, [&](std::size_t i) {
            RgbImage source;
            try {
                source = load_image(files[start + i]);
            } catch (const DataError&) {
                return;
            }
            slots[i] = process_sample(source, start + i, config);
        });
        for (std::size_t i = 0; i < n; ++i) {
            if (!slots[i]) {
                ++failures;
                continue;
            }
            slots[i]->record.path = sample_file_name(start + i);
            sink(start + i, *slots[i]);
        }
    }
    return failures;
}

}  // namespace freqinject
