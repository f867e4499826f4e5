#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <tuple>

#include "freqinject/detector.hpp"
#include "test_support.hpp"

using namespace freqinject;

namespace {

struct Problem {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
};

Problem random_problem(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    Problem p;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(d);
        for (double& v : row) v = g(gen);
        p.x.push_back(row);
        p.y.push_back(static_cast<int>(gen() % 2));
    }
    return p;
}

/// Two Gaussian blobs along a random unit direction, centers 5 sigma apart on each side.
Problem blobs(std::size_t n_per_class, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    std::vector<double> dir(d);
    double norm = 0.0;
    for (double& v : dir) {
        v = g(gen);
        norm += v * v;
    }
    for (double& v : dir) v /= std::sqrt(norm);
    Problem p;
    for (int label : {0, 1}) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            std::vector<double> row(d);
            for (std::size_t k = 0; k < d; ++k) row[k] = g(gen) + (label ? 5.0 : -5.0) * dir[k];
            p.x.push_back(row);
            p.y.push_back(label);
        }
    }
    return p;
}

double central_difference(const std::function<double(double)>& f, double at, double eps = 1e-5) {
    return (f(at + eps) - f(at - eps)) / (2 * eps);
}

RgbImage cosine_image(std::size_t n, double fy, double fx) {
    GrayImage g(n, n);
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            g(y, x) = 0.5 + 0.4 * std::cos(2 * std::numbers::pi * (fy * y + fx * x) / static_cast<double>(n));
        }
    }
    return RgbImage::from_gray(g);
}

}  // namespace

TEST(Features, ConstantImageIsAllZero) {
    const FeatureVector f = extract_features(RgbImage(20, 20, 0.3), 32);
    ASSERT_EQ(f.size(), kDefaultBands + 4);
    for (double v : f) EXPECT_EQ(v, 0.0);
}

TEST(Features, DeterministicAndFinite) {
    const RgbImage img = testing_support::random_rgb(40, 30, 1);
    const FeatureVector a = extract_features(img, 32);
    const FeatureVector b = extract_features(img, 32);
    EXPECT_EQ(a, b);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_TRUE(std::isfinite(a[k]));
        if (k < kDefaultBands) EXPECT_GE(a[k], 0.0);
    }
}

TEST(Features, CosineDominatesItsBand) {
    // Period-4 cosines pass the 3x3 median residual unchanged (the median is 0
    // everywhere), so the residual spectrum holds just the cosine pair.
    // Radius 16 falls in band 16; radius 16*sqrt(2) in band 22.
    for (auto [fy, fx, band] : {std::tuple{0.0, 16.0, 16L}, std::tuple{16.0, 16.0, 22L}}) {
        const FeatureVector f = extract_features(cosine_image(64, fy, fx), 64);
        const auto best = std::max_element(f.begin(), f.begin() + kDefaultBands) - f.begin();
        EXPECT_EQ(best, band);
        for (std::size_t b = 0; b < kDefaultBands; ++b) {
            if (static_cast<long>(b) != best) EXPECT_GE(f[static_cast<std::size_t>(best)], 5.0 * f[b]) << "band " << b;
        }
    }
}

TEST(Features, StatisticsOnKnownSpectra) {
    // Residual of a pure cosine concentrates power in the pair of bins at +-20.
    const FeatureVector f = extract_features(cosine_image(64, 0, 20), 64);
    EXPECT_GT(f[kDefaultBands], 100.0);       // peak to mean
    EXPECT_LT(f[kDefaultBands + 1], 0.01);    // flatness
    EXPECT_GT(f[kDefaultBands + 2], 1.0);     // radius 20 is in the high half
    EXPECT_GT(f[kDefaultBands + 3], 4.0);     // one sector holds everything

    // White noise: flat spectrum, modest ratios.
    const FeatureVector noise = extract_features(testing_support::random_rgb(64, 64, 3), 64);
    EXPECT_GT(noise[kDefaultBands + 1], 0.3);
    EXPECT_LT(noise[kDefaultBands + 3], 1.5);
}

TEST(Bce, GradientMatchesFiniteDifferences) {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> g;
    for (int point = 0; point < 10; ++point) {
        const Problem p = random_problem(20, 6, 100 + point);
        std::vector<double> w(6);
        for (double& v : w) v = g(gen);
        const double b = g(gen);
        const LossAndGradient lg = bce_loss_and_gradient(w, b, p.x, p.y);
        for (std::size_t k = 0; k <= w.size(); ++k) {
            const auto loss_at = [&](double v) {
                auto ww = w;
                double bb = b;
                (k < w.size() ? ww[k] : bb) = v;
                return bce_loss_and_gradient(ww, bb, p.x, p.y).loss;
            };
            const double analytic = k < w.size() ? lg.grad_w[k] : lg.grad_b;
            const double numeric = central_difference(loss_at, k < w.size() ? w[k] : b);
            EXPECT_LE(std::abs(analytic - numeric), 1e-5 * std::max(std::abs(analytic), 1e-3)) << "point " << point;
        }
    }
}

TEST(Bce, LossAtZeroIsLog2) {
    const Problem p = random_problem(7, 3, 5);
    EXPECT_NEAR(bce_loss_and_gradient(std::vector<double>(3, 0.0), 0.0, p.x, p.y).loss, std::log(2.0), 1e-15);
}

TEST(Train, SeparableBlobsReachFullAccuracy) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const Problem p = blobs(50, kDefaultBands + 4, seed);
        const TrainResult r = train_on_features(p.x, p.y, {200, 0.1, seed});
        std::size_t correct = 0;
        for (std::size_t i = 0; i < p.x.size(); ++i) {
            correct += classify_fake(predict_features(r.model, p.x[i])) == (p.y[i] == 1);
        }
        EXPECT_EQ(correct, p.x.size());
    }
}

TEST(Train, LossIsNonIncreasing) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        for (double lr : {0.01, 0.05, 0.1}) {
            const Problem p = seed % 2 ? blobs(30, kDefaultBands + 4, seed) : random_problem(60, kDefaultBands + 4, seed);
            const TrainResult r = train_on_features(p.x, p.y, {150, lr, seed});
            for (std::size_t i = 1; i < r.loss_history.size(); ++i) {
                EXPECT_LE(r.loss_history[i], r.loss_history[i - 1] + 1e-15) << "seed " << seed << " lr " << lr;
            }
        }
    }
}

TEST(Train, ZeroEpochsGivesHalf) {
    const Problem p = blobs(10, kDefaultBands + 4, 1);
    const TrainResult r = train_on_features(p.x, p.y, {0, 0.1, 0});
    for (double w : r.model.weights) EXPECT_EQ(w, 0.0);
    EXPECT_EQ(r.model.bias, 0.0);
    for (const auto& row : p.x) EXPECT_EQ(predict_features(r.model, row), 0.5);
}

TEST(Train, Errors) {
    const Problem p = blobs(10, kDefaultBands + 4, 2);
    std::vector<int> ones(p.y.size(), 1);
    EXPECT_THROW(train_on_features(p.x, ones, {}), SingleClassError);
    std::vector<int> zeros(p.y.size(), 0);
    EXPECT_THROW(train_on_features(p.x, zeros, {}), SingleClassError);
    try {
        train_on_features(p.x, p.y, {50, 1e308, 0});
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_EQ(e.learning_rate(), 1e308);
    }
    EXPECT_THROW(train_on_features({{1.0, 2.0}, {3.0, 4.0}}, std::vector<int>{0, 1}, {}), DimensionMismatch);
}

TEST(Train, ConstantColumnGetsUnitStd) {
    Problem p = blobs(10, kDefaultBands + 4, 3);
    for (auto& row : p.x) row[0] = 7.0;
    const TrainResult r = train_on_features(p.x, p.y, {10, 0.1, 0});
    EXPECT_EQ(r.model.stds[0], 1.0);
    EXPECT_NO_THROW(r.model.validate());
}

TEST(Predict, SymmetryAndRange) {
    const Problem p = blobs(20, kDefaultBands + 4, 4);
    const TrainResult r = train_on_features(p.x, p.y, {100, 0.1, 0});
    DetectorModel neg = r.model;
    for (double& w : neg.weights) w = -w;
    neg.bias = -neg.bias;
    for (const auto& row : p.x) {
        const double s = predict_features(r.model, row);
        EXPECT_GT(s, 0.0);
        EXPECT_LT(s, 1.0);
        EXPECT_NEAR(predict_features(neg, row), 1.0 - s, 1e-12);
    }
    EXPECT_THROW(predict_features(r.model, std::vector<double>(3, 0.0)), DimensionMismatch);
}

TEST(Predict, ZeroModelOnImages) {
    DetectorModel m;
    m.working_size = 32;
    m.weights.assign(kDefaultBands + 4, 0.0);
    m.means.assign(kDefaultBands + 4, 0.0);
    m.stds.assign(kDefaultBands + 4, 1.0);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        EXPECT_EQ(predict(m, testing_support::random_rgb(30, 30, seed)), 0.5);
    }
    EXPECT_TRUE(classify_fake(0.5));
    EXPECT_FALSE(classify_fake(std::nextafter(0.5, 0.0)));
}

TEST(Model, JsonRoundTrip) {
    testing_support::TempDir dir("model");
    const Problem p = blobs(10, kDefaultBands + 4, 5);
    TrainResult r = train_on_features(p.x, p.y, {20, 0.1, 99});
    r.model.working_size = 48;
    save_model(r.model, dir / "m.json");
    const DetectorModel back = load_model(dir / "m.json");
    EXPECT_EQ(back.weights, r.model.weights);
    EXPECT_EQ(back.bias, r.model.bias);
    EXPECT_EQ(back.working_size, 48u);
    EXPECT_EQ(back.training_meta["seed"], 99);
    const Json j = to_json(back);
    for (const char* key : {"weights", "bias", "means", "stds", "K", "training_meta"}) EXPECT_TRUE(j.contains(key));

    Json bad = j;
    bad["weights"] = std::vector<double>{1.0};
    EXPECT_THROW(detector_model_from_json(bad), DimensionMismatch);
}
