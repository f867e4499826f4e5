// Acceptance suite. One PASS/FAIL line per criterion.
//
//   acceptance <path-to-freqinject-cli> [--known-fail N,...]
//
// Exit status is 0 when the set of failing criteria equals the --known-fail
// set exactly, so a regression and an unexpected pass both fail the run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "freqinject/dataset.hpp"
#include "freqinject/demo.hpp"
#include "freqinject/detector.hpp"
#include "freqinject/fingerprint.hpp"
#include "freqinject/inject.hpp"
#include "freqinject/metrics.hpp"
#include "freqinject/spectral.hpp"
#include "oracle/mann_whitney.hpp"
#include "oracle/naive_dft.hpp"
#include "test_support.hpp"

using namespace freqinject;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---- 1 ----------------------------------------------------------------------------

Outcome fft_oracle() {
    double fwd = 0.0, inv = 0.0, round = 0.0;
    for (std::size_t h = 1; h <= 16; ++h) {
        for (std::size_t w = 1; w <= 16; ++w) {
            const GrayImage plane = testing_support::random_plane(w, h, h * 100 + w, -1.0, 1.0);
            const Spectrum spec = fft2(plane);
            fwd = std::max(fwd, oracle::max_abs_diff(spec, oracle::naive_forward(plane)));
            Spectrum z(w, h);
            const GrayImage re = testing_support::random_plane(w, h, h * 100 + w + 7, -1.0, 1.0);
            const GrayImage im = testing_support::random_plane(w, h, h * 100 + w + 9, -1.0, 1.0);
            for (std::size_t i = 0; i < z.size(); ++i) z[i] = {re[i], im[i]};
            inv = std::max(inv, oracle::max_abs_diff(ifft2_complex(z), oracle::naive_inverse(z)));
        }
    }
    for (std::size_t h = 1; h <= 64; ++h) {
        for (std::size_t w = 1; w <= 64; ++w) {
            const GrayImage plane = testing_support::random_plane(w, h, 7 * h + 1000 * w);
            round = std::max(round, oracle::max_abs_diff(ifft2(fft2(plane)), plane));
        }
    }
    return {fwd <= 1e-9 && inv <= 1e-9 && round <= 1e-9,
            fmt("forward %.2e, inverse %.2e, roundtrip %.2e", fwd, inv, round)};
}

// ---- 2 ----------------------------------------------------------------------------

/// Direct DFT evaluated one axis at a time; exact twiddles from a table.
Spectrum separable_dft(const GrayImage& plane) {
    const std::size_t w = plane.width(), h = plane.height();
    const auto twiddles = [](std::size_t n) {
        std::vector<Complex> t(n);
        for (std::size_t k = 0; k < n; ++k) t[k] = std::polar(1.0, -2.0 * std::numbers::pi * k / n);
        return t;
    };
    const auto tw = twiddles(w), th = twiddles(h);
    Spectrum rows(w, h), out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t v = 0; v < w; ++v) {
            Complex acc = 0.0;
            for (std::size_t x = 0; x < w; ++x) acc += plane(y, x) * tw[(v * x) % w];
            rows(y, v) = acc;
        }
    }
    for (std::size_t u = 0; u < h; ++u) {
        for (std::size_t v = 0; v < w; ++v) {
            Complex acc = 0.0;
            for (std::size_t y = 0; y < h; ++y) acc += rows(y, v) * th[(u * y) % h];
            out(u, v) = acc;
        }
    }
    return out;
}

double off_dc_mean_of(const GrayImage& m) {
    double s = 0.0;
    for (std::size_t i = 1; i < m.size(); ++i) s += m[i];
    return s / static_cast<double>(m.size() - 1);
}

Outcome injection_algebra() {
    const std::size_t n = 32;
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> strength_dist(0.05, 2.0);
    double identity = 0.0, additivity = 0.0, phase = 0.0;
    for (std::size_t t = 0; t < 100; ++t) {
        const RgbImage img = testing_support::random_rgb(n, n, 10 * t + 1);
        const PatternImage pattern = generate(random_spec({1.0, 1.0, 1.0}, 5000 + t), n, n);
        const double strength = strength_dist(gen);

        const InjectionResult zero = inject(img, pattern, 0.0);
        for (std::size_t c = 0; c < 3; ++c) identity = std::max(identity, oracle::max_abs_diff(zero.pre_clamp[c], img.plane(c)));

        const InjectionResult r = inject(img, pattern, strength);
        std::array<Spectrum, 3> image_spec;
        double level = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            image_spec[c] = separable_dft(img.plane(c));
            level += off_dc_mean_of(magnitude(image_spec[c])) / 3.0;
        }
        GrayImage added = magnitude(separable_dft(pattern.pixels));
        added[0] = 0.0;
        const double pattern_level = off_dc_mean_of(added);
        for (double& v : added) v = pattern_level > 0.0 ? v * strength * level / pattern_level : 0.0;

        for (std::size_t c = 0; c < 3; ++c) {
            const Spectrum out = separable_dft(r.pre_clamp[c]);
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double expected = std::abs(image_spec[c][i]) + added[i];
                additivity = std::max(additivity, std::abs(std::abs(out[i]) - expected));
                if (expected > 1e-6 && std::abs(image_spec[c][i]) > 0.0) {
                    double d = std::abs(std::arg(out[i]) - std::arg(image_spec[c][i]));
                    d = std::min(d, 2.0 * std::numbers::pi - d);
                    phase = std::max(phase, d);
                }
            }
        }
    }
    return {identity <= 1e-9 && additivity <= 1e-6 && phase <= 1e-6,
            fmt("identity %.2e, additivity %.2e, phase %.2e", identity, additivity, phase)};
}

// ---- 3 ----------------------------------------------------------------------------

Outcome fingerprint_recovery() {
    const std::size_t n = 64;
    const PatternImage grid = pattern_from(GridParams{4.0, 4.0, 0.0, 0.0, 1.0}, n, n);
    std::vector<RgbImage> clean, injected;
    for (std::size_t i = 0; i < 64; ++i) {
        std::mt19937_64 gen(300000 + i);
        std::normal_distribution<double> dist(0.5, 0.1);
        RgbImage img(n, n);
        for (std::size_t c = 0; c < 3; ++c) {
            for (double& v : img.plane(c)) v = std::clamp(dist(gen), 0.0, 1.0);
        }
        injected.push_back(inject(img, grid, 1.0).injected);
        clean.push_back(std::move(img));
    }
    const Fingerprint fi = extract_fingerprint(injected, n);
    const Fingerprint fc = extract_fingerprint(clean, n);
    auto expected = top_peaks_shifted(fftshift(magnitude(fft2(grid.pixels))), 4);
    auto found = top_peaks_shifted(fftshift(fi.plane), 4);
    std::sort(expected.begin(), expected.end());
    std::sort(found.begin(), found.end());
    const double ratio = peak_to_mean(fi) / peak_to_mean(fc);
    return {found == expected && ratio >= 3.0,
            fmt("top-4 peaks %s, peak-to-mean %.2fx clean", found == expected ? "match" : "differ", ratio)};
}

// ---- 4 ----------------------------------------------------------------------------

Outcome cross_family() {
    DemoConfig c;
    c.seed = 42;
    c.n = 400;
    c.threads = default_thread_count();
    const DemoReport r = pipeline_demo(c);
    return {r.auc_aura >= 0.90 && r.auc_spike >= 0.90 && r.specificity >= 0.90,
            fmt("AUC aura %.4f, AUC spike %.4f, pristine specificity %.4f (need >= 0.90 each)", r.auc_aura,
                r.auc_spike, r.specificity)};
}

// ---- 5 ----------------------------------------------------------------------------

std::vector<PredictionRecord> make(const std::vector<std::pair<double, int>>& rows) {
    std::vector<PredictionRecord> out;
    for (std::size_t i = 0; i < rows.size(); ++i) out.push_back({"r" + std::to_string(i), rows[i].first, rows[i].second, ""});
    return out;
}

Outcome metrics_correctness() {
    bool ok = true;
    // Hand-tallied at threshold 0.5 (score 0.5 counts as fake).
    struct Crafted {
        std::vector<std::pair<double, int>> rows;
        ConfusionCounts counts;
    };
    const std::vector<Crafted> crafted{
        {{{0.9, 1}, {0.4, 1}, {0.7, 1}, {0.6, 1}, {0.2, 0}, {0.55, 0}}, {.tp = 3, .tn = 1, .fp = 1, .fn = 1}},
        {{{0.5, 1}, {0.5, 0}, {0.49, 1}, {0.49, 0}, {1.0, 1}, {0.0, 0}, {0.3, 0}, {0.8, 0}}, {.tp = 2, .tn = 3, .fp = 2, .fn = 1}},
        {{{0.1, 1}, {0.2, 1}, {0.3, 1}, {0.6, 0}, {0.7, 0}, {0.8, 0}, {0.9, 0}, {0.95, 1}, {0.05, 0}, {0.51, 1},
          {0.52, 1}, {0.0, 0}, {0.45, 0}, {0.99, 1}, {0.5, 1}, {0.49, 0}, {0.2, 0}, {0.75, 1}, {0.35, 0}, {0.65, 1}},
         {.tp = 7, .tn = 6, .fp = 4, .fn = 3}},
    };
    for (const auto& c : crafted) {
        const ConfusionCounts got = confusion(make(c.rows), 0.5);
        ok &= got.tp == c.counts.tp && got.fn == c.counts.fn && got.tn == c.counts.tn && got.fp == c.counts.fp;
        ok &= recall(got) == static_cast<double>(c.counts.tp) / static_cast<double>(c.counts.tp + c.counts.fn);
        ok &= specificity(got) == static_cast<double>(c.counts.tn) / static_cast<double>(c.counts.tn + c.counts.fp);
    }
    const bool crafted_ok = ok;

    const double worked = roc_auc(make({{0.8, 1}, {0.3, 1}, {0.5, 0}, {0.1, 0}})).auc;
    ok &= std::abs(worked - 0.75) <= 1e-12;

    std::mt19937_64 gen(99);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + gen() % 199;
        const bool coarse = trial % 3 == 0;  // many ties
        std::vector<PredictionRecord> recs;
        for (std::size_t i = 0; i < n; ++i) {
            double s = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
            if (coarse) s = std::round(s * 8.0) / 8.0;
            recs.push_back({"", s, static_cast<int>(gen() % 2), ""});
        }
        recs[0].label = 1;
        recs[1].label = 0;
        worst = std::max(worst, std::abs(roc_auc(recs).auc - oracle::mann_whitney_auc(recs)));
    }
    ok &= worst <= 1e-9;
    return {ok, fmt("crafted %s, worked example %.6f, max |AUC - Mann-Whitney| %.2e over 1000", crafted_ok ? "exact" : "WRONG",
                    worked, worst)};
}

// ---- 6 ----------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const std::string& cli) {
    testing_support::TempDir dir("acceptance_det");
    std::filesystem::create_directories(dir / "src");
    for (std::size_t i = 0; i < 40; ++i) {
        save_image(testing_support::random_rgb(48 + i % 5, 40 + i % 7, 700 + i), dir / "src" / fmt("img_%03zu.png", i), 8);
    }
    std::vector<std::string> outs{"t1", "t8"};
    for (std::size_t k = 0; k < 2; ++k) {
        const std::string cmd = cli + " build-dataset --src " + (dir / "src").string() + " --out " +
                                (dir / outs[k]).string() +
                                " --seed 31337 --working-size 48 --p-inject 0.5"
                                " --aug flip,rotate90,contrast,color_jitter,gaussian_noise --threads " +
                                (k ? "8" : "1") + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "build-dataset failed: " + cmd};
    }
    std::size_t files = 0;
    bool identical = true;
    for (const auto& entry : std::filesystem::directory_iterator(dir / "t1")) {
        ++files;
        const auto other = dir / "t8" / entry.path().filename();
        identical &= std::filesystem::exists(other) && slurp(entry.path()) == slurp(other);
    }
    std::size_t other_files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "t8")) ++other_files;
    identical &= files == other_files && files == 41;

    // Fake fraction over 10000 sample seeds at p = 0.5.
    std::size_t fakes = 0;
    const std::size_t n = 10000;
    for (std::size_t i = 0; i < n; ++i) fakes += decide_injection(derive_seed(31337, i), 0.5);
    const double fraction = static_cast<double>(fakes) / n;
    const bool balanced = fraction >= 0.47 && fraction <= 0.53;
    return {identical && balanced, fmt("%zu files %s across 1 and 8 threads, fake fraction %.4f of %zu", files,
                                       identical ? "byte-identical" : "DIFFER", fraction, n)};
}

// ---- 7 ----------------------------------------------------------------------------

Outcome detector_numerics() {
    std::mt19937_64 gen(77);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int point = 0; point < 10; ++point) {
        std::vector<std::vector<double>> x(25, std::vector<double>(5));
        std::vector<int> y(25);
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (double& v : x[i]) v = g(gen);
            y[i] = static_cast<int>(gen() % 2);
        }
        std::vector<double> w(5);
        for (double& v : w) v = g(gen);
        const double b = g(gen);
        const LossAndGradient lg = bce_loss_and_gradient(w, b, x, y);
        for (std::size_t k = 0; k <= w.size(); ++k) {
            const auto loss_at = [&](double delta) {
                auto ww = w;
                double bb = b;
                (k < w.size() ? ww[k] : bb) += delta;
                return bce_loss_and_gradient(ww, bb, x, y).loss;
            };
            const double eps = 1e-5;
            const double numeric = (loss_at(eps) - loss_at(-eps)) / (2 * eps);
            const double analytic = k < w.size() ? lg.grad_w[k] : lg.grad_b;
            worst = std::max(worst, std::abs(analytic - numeric) / std::max(std::abs(analytic), 1e-3));
        }
    }

    // Two blobs ten sigma apart along a random direction.
    const std::size_t d = kDefaultBands + kSummaryStats;
    std::vector<double> dir(d);
    double norm = 0.0;
    for (double& v : dir) norm += (v = g(gen)) * v;
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int label : {0, 1}) {
        for (int i = 0; i < 60; ++i) {
            std::vector<double> row(d);
            for (std::size_t k = 0; k < d; ++k) row[k] = g(gen) + (label ? 5.0 : -5.0) * dir[k] / std::sqrt(norm);
            x.push_back(row);
            y.push_back(label);
        }
    }
    const TrainResult r = train_on_features(x, y, {300, 0.1, 1});
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.size(); ++i) correct += classify_fake(predict_features(r.model, x[i])) == (y[i] == 1);
    const double accuracy = static_cast<double>(correct) / static_cast<double>(x.size());
    return {worst <= 1e-5 && accuracy == 1.0, fmt("max relative gradient error %.2e, separable accuracy %.4f", worst, accuracy)};
}

std::set<int> parse_ids(const std::string& text) {
    std::set<int> ids;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t comma = text.find(',', pos);
        ids.insert(std::stoi(text.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return ids;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <freqinject-cli> [--known-fail N,...]\n");
        return 1;
    }
    const std::string cli = argv[1];
    std::set<int> known_fail;
    for (int i = 2; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--known-fail") known_fail = parse_ids(argv[++i]);
    }

    const std::vector<Criterion> criteria{
        {1, "fft oracle equivalence", 10, fft_oracle},
        {2, "injection algebra", 30, injection_algebra},
        {3, "fingerprint recovery", 60, fingerprint_recovery},
        {4, "cross-family generalization", 300, cross_family},
        {5, "metrics correctness", 20, metrics_correctness},
        {6, "determinism", 120, [&] { return determinism(cli); }},
        {7, "detector numerics", 10, detector_numerics},
    };

    std::set<int> failed;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds <= c.limit_seconds;
        const bool pass = o.pass && in_time;
        if (!pass) failed.insert(c.id);
        std::printf("%s  %d %-28s %s; %.1fs of %.0fs%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), seconds, c.limit_seconds, in_time ? "" : " (over time)");
        std::fflush(stdout);
    }
    std::printf("%zu of %zu criteria pass\n", criteria.size() - failed.size(), criteria.size());
    if (!known_fail.empty()) {
        std::printf("known failures:");
        for (int id : known_fail) std::printf(" %d", id);
        std::printf("\n");
    }
    return failed == known_fail ? 0 : 1;
}
