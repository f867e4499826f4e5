#pragma once

// End-to-end desk-scale run: synthetic pristine images, Geometric-only injection
// for training, Aura and Spike injection for held-out evaluation.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "freqinject/dataset.hpp"
#include "freqinject/detector.hpp"
#include "freqinject/metrics.hpp"
#include "freqinject/parallel.hpp"
#include "freqinject/rng.hpp"
#include "freqinject/spectral.hpp"

namespace freqinject {

/// 1/f^beta colored noise with a few flat shapes on top, values in [0,1].
inline RgbImage synthetic_pristine(std::uint64_t seed, std::size_t size) {
    CounterRng rng(seed, 0);
    const double beta = rng.uniform(1.5, 2.5);
    RgbImage img(size, size);

    // One shared luminance field plus weaker per-channel fields.
    std::array<GrayImage, 4> fields;
    for (std::size_t f = 0; f < fields.size(); ++f) {
        Spectrum spec(size, size);
        for (std::size_t u = 0; u < size; ++u) {
            for (std::size_t v = 0; v < size; ++v) {
                const double fu = static_cast<double>(signed_frequency(u, size));
                const double fv = static_cast<double>(signed_frequency(v, size));
                const double r = std::hypot(fu, fv);
                const double amp = r == 0.0 ? 0.0 : std::pow(r, -beta / 2.0);
                const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
                spec(u, v) = std::polar(amp * std::abs(rng.normal()), phase);
            }
        }
        fields[f] = normalize_min_max(ifft2(spec));
    }
    const double chroma = rng.uniform(0.1, 0.3);
    for (std::size_t c = 0; c < 3; ++c) {
        const double base = rng.uniform(0.3, 0.7);
        for (std::size_t i = 0; i < img.plane(c).size(); ++i) {
            img.plane(c)[i] = base + 0.6 * (fields[0][i] - 0.5) + chroma * (fields[c + 1][i] - 0.5);
        }
    }

    const auto shapes = rng.uniform_int(1, 4);
    const double s = static_cast<double>(size);
    for (std::int64_t k = 0; k < shapes; ++k) {
        const bool disc = rng.bernoulli(0.5);
        const double cx = rng.uniform(0.0, s);
        const double cy = rng.uniform(0.0, s);
        const double rx = rng.uniform(0.05, 0.25) * s;
        const double ry = disc ? rx : rng.uniform(0.05, 0.25) * s;
        std::array<double, 3> color{rng.uniform(), rng.uniform(), rng.uniform()};
        const double alpha = rng.uniform(0.5, 0.9);
        for (std::size_t y = 0; y < size; ++y) {
            for (std::size_t x = 0; x < size; ++x) {
                const double dx = (static_cast<double>(x) + 0.5 - cx) / rx;
                const double dy = (static_cast<double>(y) + 0.5 - cy) / ry;
                const bool inside = disc ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
                if (!inside) continue;
                for (std::size_t c = 0; c < 3; ++c) img(c, y, x) = (1.0 - alpha) * img(c, y, x) + alpha * color[c];
            }
        }
    }

    const double noise = rng.uniform(0.0, 0.01);
    for (std::size_t c = 0; c < 3; ++c) {
        for (double& v : img.plane(c)) v += noise * rng.normal();
    }
    return clamp_unit(img);
}

struct DemoConfig {
    std::uint64_t seed = 42;
    std::size_t n = 400;               // pristine images; half train, half test
    std::size_t image_size = 64;
    double train_inject_probability = 0.5;
    double strength_lo = 0.3;
    double strength_hi = 1.0;
    TrainOptions train{500, 0.1, 42};
    std::size_t train_passes = 4;
    std::set<Augmentation> train_augmentations{kAugmentationOrder.begin(), kAugmentationOrder.end()};
    std::size_t threads = 1;

    Json to_json() const {
        return {{"seed", seed},
                {"n", n},
                {"train_passes", train_passes},
                {"image_size", image_size},
                {"train_inject_probability", train_inject_probability},
                {"strength_range", {strength_lo, strength_hi}},
                {"epochs", train.epochs},
                {"learning_rate", train.learning_rate}};
    }
};

struct DemoReport {
    Json config;
    double final_train_loss = 0.0;
    std::size_t train_fake = 0;
    std::size_t train_total = 0;
    double auc_aura = 0.0;
    double auc_spike = 0.0;
    double specificity = 0.0;
    GroupReport groups;
    std::vector<GroupStats> stats;
    std::vector<PredictionRecord> predictions;

    Json to_json() const {
        Json rows = Json::array();
        for (const auto& r : groups.rows) {
            rows.push_back({{"group", r.group},
                            {"metric", r.metric},
                            {"value", r.value ? Json(*r.value) : Json(nullptr)},
                            {"count", r.count}});
        }
        return {{"config", config},
                {"train", {{"samples", train_total}, {"fake", train_fake}, {"final_loss", final_train_loss}}},
                {"auc", {{"aura", auc_aura}, {"spike", auc_spike}}},
                {"pristine_specificity", specificity},
                {"groups", rows},
                {"mean", groups.mean ? Json(*groups.mean) : Json(nullptr)}};
    }
};

/// Train on pristine vs Geometric-injected, test on pristine, Aura and Spike.
inline DemoReport pipeline_demo(const DemoConfig& config) {
    if (config.n < 40) throw InvalidArgument("demo needs at least 40 images");
    if (config.image_size < 16) throw InvalidArgument("demo image size must be at least 16");
    const std::size_t n_train = config.n / 2;
    const std::size_t n_test = config.n - n_train;
    const std::uint64_t image_seed = mix64(config.seed ^ 0x5851f42d4c957f2dULL);

    std::vector<RgbImage> pristine(config.n);
    parallel_for(config.n, config.threads,
                 [&](std::size_t i) { pristine[i] = synthetic_pristine(derive_seed(image_seed, i), config.image_size); });

    DatasetConfig train_cfg;
    train_cfg.inject_probability = config.train_inject_probability;
    train_cfg.family_weights = {1.0, 0.0, 0.0};
    train_cfg.strength_lo = config.strength_lo;
    train_cfg.strength_hi = config.strength_hi;
    train_cfg.global_seed = mix64(config.seed ^ 0x1);
    train_cfg.working_size = config.image_size;
    train_cfg.augmentations = config.train_augmentations;
    train_cfg.validate();

    // Each pass re-draws injection and augmentation for every training image,
    // like a loader that decides per load over several epochs.
    const std::size_t n_samples = n_train * config.train_passes;
    std::vector<FeatureVector> train_x(n_samples);
    std::vector<int> train_y(n_samples);
    parallel_for(n_samples, config.threads, [&](std::size_t k) {
        const Sample s = process_sample(pristine[k % n_train], k, train_cfg);
        train_x[k] = extract_features(s.image, config.image_size);
        train_y[k] = s.record.label;
    });

    DemoReport report;
    report.config = config.to_json();
    report.train_total = n_samples;
    for (int y : train_y) report.train_fake += static_cast<std::size_t>(y);
    TrainResult trained = train_on_features(train_x, train_y, config.train);
    trained.model.working_size = config.image_size;
    report.final_train_loss = trained.final_loss;

    // Each held-out image appears once as pristine and once per test family.
    const std::array<std::pair<std::string, FamilyWeights>, 2> families{
        std::pair{std::string("aura"), FamilyWeights{0.0, 1.0, 0.0}},
        std::pair{std::string("spike"), FamilyWeights{0.0, 0.0, 1.0}}};
    std::vector<PredictionRecord> pristine_preds(n_test);
    std::array<std::vector<PredictionRecord>, 2> fake_preds{std::vector<PredictionRecord>(n_test),
                                                            std::vector<PredictionRecord>(n_test)};
    parallel_for(n_test, config.threads, [&](std::size_t t) {
        const std::size_t i = n_train + t;
        const std::string name = "test_" + std::to_string(t);
        pristine_preds[t] = {name, predict(trained.model, pristine[i]), 0, "pristine"};
        for (std::size_t f = 0; f < families.size(); ++f) {
            DatasetConfig cfg = train_cfg;
            cfg.inject_probability = 1.0;
            cfg.augmentations.clear();
            cfg.family_weights = families[f].second;
            cfg.global_seed = mix64(config.seed ^ (0x10 + f));
            const Sample s = process_sample(pristine[i], t, cfg);
            fake_preds[f][t] = {name + "_" + families[f].first, predict(trained.model, s.image), 1, families[f].first};
        }
    });

    const auto with_pristine = [&](const std::vector<PredictionRecord>& fakes) {
        std::vector<PredictionRecord> all = pristine_preds;
        all.insert(all.end(), fakes.begin(), fakes.end());
        return all;
    };
    report.auc_aura = roc_auc(with_pristine(fake_preds[0])).auc;
    report.auc_spike = roc_auc(with_pristine(fake_preds[1])).auc;
    report.specificity = specificity(confusion(pristine_preds, kDecisionThreshold));

    report.predictions = pristine_preds;
    for (const auto& fp : fake_preds) report.predictions.insert(report.predictions.end(), fp.begin(), fp.end());
    report.groups = group_report(report.predictions, kDecisionThreshold);
    report.stats = confidence_stats(report.predictions);
    return report;
}

}  // namespace freqinject
