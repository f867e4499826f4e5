#pragma once

// Frequency-feature logistic detector.
// Features: K radial band means of fftshift(log1p(|fft2(residual)|^2)), then
// peak-to-mean, spectral flatness, high/low band ratio and anisotropy of the power spectrum.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "freqinject/dataset.hpp"
#include "freqinject/error.hpp"
#include "freqinject/fingerprint.hpp"
#include "freqinject/image.hpp"
#include "freqinject/parallel.hpp"
#include "freqinject/patterns.hpp"
#include "freqinject/spectral.hpp"

namespace freqinject {

inline constexpr std::size_t kDefaultBands = 32;
inline constexpr std::size_t kSummaryStats = 4;
inline constexpr std::size_t kAngularSectors = 8;
inline constexpr double kStdFloor = 1e-8;

using FeatureVector = std::vector<double>;

namespace detector_detail {

struct PolarBin {
    double radius;
    double angle;  // [0, pi)
};

inline PolarBin polar_bin(std::size_t y, std::size_t x, std::size_t h, std::size_t w) {
    const double dy = static_cast<double>(y) - static_cast<double>(h / 2);
    const double dx = static_cast<double>(x) - static_cast<double>(w / 2);
    double angle = std::atan2(dy, dx);
    if (angle < 0.0) angle += std::numbers::pi;
    if (angle >= std::numbers::pi) angle -= std::numbers::pi;
    return {std::hypot(dy, dx), angle};
}

}  // namespace detector_detail

/// K band means plus 4 statistics. A zero residual gives all zeros.
inline FeatureVector features_from_residual(const GrayImage& res, std::size_t bands = kDefaultBands) {
    if (bands == 0) throw InvalidArgument("band count must be positive");
    FeatureVector f(bands + kSummaryStats, 0.0);
    const bool empty = std::all_of(res.begin(), res.end(), [](double v) { return v == 0.0; });
    if (empty) return f;

    const GrayImage power = fftshift(power_spectrum(fft2(res)));
    const std::size_t h = power.height();
    const std::size_t w = power.width();
    const double rmax = static_cast<double>(std::min(w, h)) / 2.0;

    std::vector<double> band_sum(bands, 0.0);
    std::vector<std::size_t> band_n(bands, 0);
    std::vector<double> sector_sum(kAngularSectors, 0.0);
    std::vector<std::size_t> sector_n(kAngularSectors, 0);
    double low = 0.0;
    double high = 0.0;
    double log_sum = 0.0;
    double lin_sum = 0.0;
    std::size_t off_dc = 0;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double p = power(y, x);
            const auto [r, angle] = detector_detail::polar_bin(y, x, h, w);
            const auto band = std::min(bands - 1, static_cast<std::size_t>(r / rmax * static_cast<double>(bands)));
            band_sum[band] += std::log1p(p);
            ++band_n[band];
            if (r == 0.0) continue;
            ++off_dc;
            lin_sum += p;
            log_sum += std::log(p + 1e-12);
            (r <= rmax / 2.0 ? low : high) += p;
            if (r <= rmax) {
                const auto s = std::min(kAngularSectors - 1,
                                        static_cast<std::size_t>(angle / std::numbers::pi * kAngularSectors));
                sector_sum[s] += p;
                ++sector_n[s];
            }
        }
    }
    for (std::size_t b = 0; b < bands; ++b) {
        f[b] = band_n[b] ? band_sum[b] / static_cast<double>(band_n[b]) : 0.0;
    }

    f[bands] = peak_to_mean_shifted(power);
    if (off_dc > 0 && lin_sum > 0.0) {
        const double n = static_cast<double>(off_dc);
        f[bands + 1] = std::exp(log_sum / n) / (lin_sum / n);
    }
    f[bands + 2] = low > 0.0 ? high / low : 0.0;
    double sector_total = 0.0;
    double sector_max = 0.0;
    std::size_t used = 0;
    for (std::size_t s = 0; s < kAngularSectors; ++s) {
        if (sector_n[s] == 0) continue;
        const double m = sector_sum[s] / static_cast<double>(sector_n[s]);
        sector_total += m;
        sector_max = std::max(sector_max, m);
        ++used;
    }
    if (used > 0 && sector_total > 0.0) f[bands + 3] = sector_max / (sector_total / static_cast<double>(used));
    return f;
}

/// Grayscale, resize to working_size^2, median residual, then features_from_residual.
inline FeatureVector extract_features(const RgbImage& img, std::size_t working_size = kDefaultFingerprintSize,
                                      std::size_t bands = kDefaultBands) {
    if (working_size < 4) throw InvalidArgument("working size too small");
    return features_from_residual(residual(resize(to_grayscale(img), working_size, working_size)), bands);
}

// ---- model ---------------------------------------------------------------------

struct DetectorModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> means;
    std::vector<double> stds;
    std::size_t bands = kDefaultBands;
    std::size_t working_size = kDefaultFingerprintSize;
    Json training_meta = Json::object();

    std::size_t dimension() const noexcept { return weights.size(); }

    void validate() const {
        const std::size_t d = bands + kSummaryStats;
        if (weights.size() != d || means.size() != d || stds.size() != d) {
            throw DimensionMismatch("model vectors do not match band count");
        }
        for (double s : stds) {
            if (!(s >= kStdFloor)) throw FormatError("model std below floor");
        }
    }
};

inline Json to_json(const DetectorModel& m) {
    Json j;
    j["weights"] = m.weights;
    j["bias"] = m.bias;
    j["means"] = m.means;
    j["stds"] = m.stds;
    j["K"] = m.bands;
    j["working_size"] = m.working_size;
    j["training_meta"] = m.training_meta;
    return j;
}

inline DetectorModel detector_model_from_json(const Json& j) {
    DetectorModel m;
    try {
        m.weights = j.at("weights").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
        m.means = j.at("means").get<std::vector<double>>();
        m.stds = j.at("stds").get<std::vector<double>>();
        m.bands = j.at("K").get<std::size_t>();
        m.working_size = j.value("working_size", kDefaultFingerprintSize);
        m.training_meta = j.value("training_meta", Json::object());
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad model file: ") + e.what());
    }
    m.validate();
    return m;
}

inline void save_model(const DetectorModel& m, const std::filesystem::path& path) {
    const std::string text = to_json(m).dump(2) + "\n";
    io_detail::write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

inline DetectorModel load_model(const std::filesystem::path& path) {
    const auto bytes = io_detail::read_file(path);
    Json j;
    try {
        j = Json::parse(bytes.begin(), bytes.end());
    } catch (const Json::exception& e) {
        throw FormatError("model '" + path.string() + "': " + e.what());
    }
    return detector_model_from_json(j);
}

// ---- logistic regression ---------------------------------------------------------

inline double sigmoid(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) noexcept { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> grad_w;
    double grad_b = 0.0;
};

/// Mean binary cross-entropy of sigmoid(X w + b) against y, with its gradient.
inline LossAndGradient bce_loss_and_gradient(std::span<const double> w, double b,
                                             const std::vector<std::vector<double>>& x, std::span<const int> y) {
    if (x.size() != y.size()) throw DimensionMismatch("feature and label counts differ");
    LossAndGradient out{0.0, std::vector<double>(w.size(), 0.0), 0.0};
    if (x.empty()) return out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].size() != w.size()) throw DimensionMismatch("feature dimension differs from weights");
        double z = b;
        for (std::size_t k = 0; k < w.size(); ++k) z += w[k] * x[i][k];
        out.loss += softplus(z) - static_cast<double>(y[i]) * z;
        const double r = sigmoid(z) - static_cast<double>(y[i]);
        for (std::size_t k = 0; k < w.size(); ++k) out.grad_w[k] += r * x[i][k];
        out.grad_b += r;
    }
    const double n = static_cast<double>(x.size());
    out.loss /= n;
    for (double& g : out.grad_w) g /= n;
    out.grad_b /= n;
    return out;
}

struct TrainOptions {
    std::size_t epochs = 500;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
};

struct TrainResult {
    DetectorModel model;
    double final_loss = 0.0;
    std::vector<double> loss_history;  // loss before each step, then the final loss
};

/// Standardizes columns and runs full-batch gradient descent from zero weights.
inline TrainResult train_on_features(const std::vector<FeatureVector>& features, std::span<const int> labels,
                                     const TrainOptions& options, std::size_t bands = kDefaultBands) {
    if (features.size() != labels.size()) throw DimensionMismatch("feature and label counts differ");
    if (features.empty()) throw DataError("no training samples");
    const std::size_t d = features.front().size();
    for (const auto& f : features) {
        if (f.size() != d) throw DimensionMismatch("ragged feature matrix");
    }
    if (d != bands + kSummaryStats) throw DimensionMismatch("feature dimension does not match band count");
    std::size_t positives = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw InvalidArgument("labels must be 0 or 1");
        positives += static_cast<std::size_t>(l);
    }
    if (positives == 0 || positives == labels.size()) {
        throw SingleClassError("training data has a single class (" + std::to_string(positives) + " fake of " +
                               std::to_string(labels.size()) + ")");
    }
    if (!(options.learning_rate > 0.0) || !std::isfinite(options.learning_rate)) {
        throw InvalidArgument("learning rate must be positive");
    }

    const double n = static_cast<double>(features.size());
    DetectorModel model;
    model.bands = bands;
    model.means.assign(d, 0.0);
    model.stds.assign(d, 0.0);
    for (const auto& f : features) {
        for (std::size_t k = 0; k < d; ++k) model.means[k] += f[k];
    }
    for (double& m : model.means) m /= n;
    for (const auto& f : features) {
        for (std::size_t k = 0; k < d; ++k) model.stds[k] += (f[k] - model.means[k]) * (f[k] - model.means[k]);
    }
    for (double& s : model.stds) {
        s = std::sqrt(s / n);
        if (s < kStdFloor) s = 1.0;
    }

    std::vector<std::vector<double>> x(features.size(), std::vector<double>(d));
    for (std::size_t i = 0; i < features.size(); ++i) {
        for (std::size_t k = 0; k < d; ++k) x[i][k] = (features[i][k] - model.means[k]) / model.stds[k];
    }

    model.weights.assign(d, 0.0);
    TrainResult result;
    for (std::size_t epoch = 0; epoch <= options.epochs; ++epoch) {
        const LossAndGradient lg = bce_loss_and_gradient(model.weights, model.bias, x, labels);
        if (!std::isfinite(lg.loss)) {
            throw DivergenceError("training loss became non-finite at epoch " + std::to_string(epoch),
                                  options.learning_rate);
        }
        result.loss_history.push_back(lg.loss);
        if (epoch == options.epochs) break;
        for (std::size_t k = 0; k < d; ++k) model.weights[k] -= options.learning_rate * lg.grad_w[k];
        model.bias -= options.learning_rate * lg.grad_b;
        for (double v : model.weights) {
            if (!std::isfinite(v)) {
                throw DivergenceError("weights became non-finite at epoch " + std::to_string(epoch),
                                      options.learning_rate);
            }
        }
    }
    result.final_loss = result.loss_history.back();
    model.training_meta = {{"epochs", options.epochs},
                           {"learning_rate", options.learning_rate},
                           {"seed", options.seed},
                           {"samples", features.size()},
                           {"fake", positives},
                           {"final_loss", result.final_loss}};
    result.model = std::move(model);
    return result;
}

inline std::vector<FeatureVector> extract_features_batch(std::size_t count,
                                                         const std::function<RgbImage(std::size_t)>& load,
                                                         std::size_t working_size, std::size_t bands,
                                                         std::size_t threads) {
    std::vector<FeatureVector> out(count);
    parallel_for(count, threads, [&](std::size_t i) { out[i] = extract_features(load(i), working_size, bands); });
    return out;
}

/// Trains on manifest records whose paths are relative to `base_dir`.
inline TrainResult train(const std::vector<ManifestRecord>& records, const std::filesystem::path& base_dir,
                         const TrainOptions& options, std::size_t working_size = kDefaultFingerprintSize,
                         std::size_t bands = kDefaultBands, std::size_t threads = 1) {
    if (records.empty()) throw DataError("manifest is empty");
    std::vector<int> labels;
    for (const auto& r : records) labels.push_back(r.label);
    const auto features = extract_features_batch(
        records.size(), [&](std::size_t i) { return load_image(base_dir / records[i].path); }, working_size, bands,
        threads);
    TrainResult result = train_on_features(features, labels, options, bands);
    result.model.working_size = working_size;
    result.model.training_meta["working_size"] = working_size;
    return result;
}

// ---- prediction -------------------------------------------------------------------

inline constexpr double kDecisionThreshold = 0.5;

/// Score in (0,1); clamped away from the endpoints.
inline double predict_features(const DetectorModel& model, std::span<const double> features) {
    if (features.size() != model.weights.size() || model.means.size() != model.weights.size() ||
        model.stds.size() != model.weights.size()) {
        throw DimensionMismatch("feature dimension does not match model");
    }
    double z = model.bias;
    for (std::size_t k = 0; k < features.size(); ++k) {
        z += model.weights[k] * (features[k] - model.means[k]) / model.stds[k];
    }
    return std::clamp(sigmoid(z), 1e-15, 1.0 - 1e-15);
}

inline double predict(const DetectorModel& model, const RgbImage& img) {
    return predict_features(model, extract_features(img, model.working_size, model.bands));
}

inline bool classify_fake(double score) noexcept { return score >= kDecisionThreshold; }

}  // namespace freqinject
