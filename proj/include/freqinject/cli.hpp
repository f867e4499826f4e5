#pragma once

// Command-line front end. Exit codes: 0 ok, 1 usage, 2 data, 3 internal.
// Every run prints its resolved configuration as one JSON line on stderr.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "freqinject/dataset.hpp"
#include "freqinject/demo.hpp"
#include "freqinject/detector.hpp"
#include "freqinject/error.hpp"
#include "freqinject/fingerprint.hpp"
#include "freqinject/image_io.hpp"
#include "freqinject/inject.hpp"
#include "freqinject/metrics.hpp"
#include "freqinject/patterns.hpp"

namespace freqinject::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        if (!cur.empty()) parts.push_back(cur);
    }
    return parts;
}

/// "g,a,s" or "geometric,spike"; listed families get weight 1.
inline FamilyWeights parse_families(const std::string& text) {
    FamilyWeights w{0.0, 0.0, 0.0};
    const auto parts = split(text, ',');
    if (parts.empty()) throw CLI::ValidationError("--families", "no family given");
    for (const auto& p : parts) {
        try {
            w[static_cast<std::size_t>(parse_family(p))] = 1.0;
        } catch (const Error& e) {
            throw CLI::ValidationError("--families", e.what());
        }
    }
    return w;
}

inline std::pair<double, double> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            const double v = std::stod(text);
            return {v, v};
        }
        return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError("--strength", "expected lo:hi, got '" + text + "'");
    }
}

inline std::set<Augmentation> parse_augmentations(const std::string& text) {
    std::set<Augmentation> out;
    for (const auto& p : split(text, ',')) {
        try {
            out.insert(parse_augmentation(p));
        } catch (const Error& e) {
            throw CLI::ValidationError("--aug", e.what());
        }
    }
    return out;
}

inline void ensure_parent(const std::filesystem::path& path) {
    const auto parent = path.parent_path();
    if (parent.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) throw IoError("cannot create directory '" + parent.string() + "'");
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    ensure_parent(path);
    io_detail::write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

inline std::uint64_t draw_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace detail

/// Options shared by every subcommand.
struct Common {
    std::optional<std::uint64_t> seed;
    std::size_t threads = default_thread_count();

    std::uint64_t resolved_seed(Streams& io) {
        if (!seed) {
            seed = detail::draw_seed();
            io.err << "no --seed given; using seed " << *seed << "\n";
        }
        return *seed;
    }
};

inline void echo_config(Streams& io, const std::string& subcommand, Json config) {
    Json j;
    j["subcommand"] = subcommand;
    for (auto& [k, v] : config.items()) j[k] = v;
    io.err << j.dump() << "\n";
}

// ---- subcommands ------------------------------------------------------------

struct PatternArgs {
    std::string family;
    std::string shape;
    std::size_t size = 256;
    std::size_t width = 0;
    std::size_t height = 0;
    double strength = kDefaultStrength;
    std::string out;
    std::string spec_out;
    int depth = 16;
};

inline PatternSpec resolve_spec(const std::string& family, const std::string& shape, std::uint64_t seed,
                                double strength) {
    if (family.empty()) {
        if (!shape.empty()) throw InvalidArgument("--shape needs --family");
        return random_spec({1.0, 1.0, 1.0}, seed, strength);
    }
    PatternSpec spec;
    spec.family = parse_family(family);
    if (shape.empty()) {
        FamilyWeights w{0.0, 0.0, 0.0};
        w[static_cast<std::size_t>(spec.family)] = 1.0;
        return random_spec(w, seed, strength);
    }
    spec.shape = parse_shape(shape);
    if (!shape_belongs(spec.family, spec.shape)) throw InvalidArgument("shape does not belong to family");
    spec.seed = seed;
    spec.strength = strength;
    return spec;
}

inline int run_pattern(const PatternArgs& a, Common& c, Streams& io) {
    const std::uint64_t seed = c.resolved_seed(io);
    const std::size_t w = a.width ? a.width : a.size;
    const std::size_t h = a.height ? a.height : a.size;
    echo_config(io, "pattern",
                {{"family", a.family}, {"shape", a.shape}, {"seed", seed}, {"width", w}, {"height", h},
                 {"out", a.out}, {"depth", a.depth}});
    if (w == 0 || h == 0) throw InvalidArgument("pattern size must be positive");
    const PatternImage p = generate(resolve_spec(a.family, a.shape, seed, a.strength), w, h);
    detail::ensure_parent(a.out);
    save_gray_image(p.pixels, a.out, a.depth);
    const std::string spec = to_json(p.spec).dump();
    if (!a.spec_out.empty()) detail::write_text(a.spec_out, spec + "\n");
    io.out << spec << "\n";
    return kOk;
}

struct InjectArgs {
    std::string input;
    std::string out;
    std::string pattern_image;
    std::string family;
    std::string shape;
    double strength = kDefaultStrength;
    std::string spec_out;
    std::string delta_out;
    int depth = 8;
};

inline int run_inject(const InjectArgs& a, Common& c, Streams& io) {
    const bool from_file = !a.pattern_image.empty();
    const std::uint64_t seed = from_file ? c.seed.value_or(0) : c.resolved_seed(io);
    echo_config(io, "inject",
                {{"input", a.input}, {"out", a.out}, {"pattern_image", a.pattern_image}, {"family", a.family},
                 {"shape", a.shape}, {"seed", seed}, {"strength", a.strength}, {"depth", a.depth}});
    const RgbImage image = load_image(a.input);
    PatternImage pattern;
    if (from_file) {
        pattern.pixels = to_grayscale(load_image(a.pattern_image));
        pattern.spec.params = {{"source", a.pattern_image}};
    } else {
        pattern = generate(resolve_spec(a.family, a.shape, seed, a.strength), image.width(), image.height());
    }
    const InjectionResult r = inject(image, pattern, a.strength);
    detail::ensure_parent(a.out);
    save_image(r.injected, a.out, a.depth);
    if (!a.delta_out.empty()) {
        detail::ensure_parent(a.delta_out);
        GrayImage delta = injection_delta_spectrum(r, image);
        for (double& v : delta) v = std::copysign(std::log1p(std::abs(v)), v);
        save_gray_image(normalize_min_max(delta), a.delta_out, 16);
    }
    Json summary = to_json(r.spec);
    summary["max_imag_residue"] = r.max_imag_residue;
    if (!a.spec_out.empty()) detail::write_text(a.spec_out, summary.dump() + "\n");
    io.out << summary.dump() << "\n";
    return kOk;
}

struct FingerprintArgs {
    std::string input;
    std::string out_png;
    std::string out_raw;
    std::size_t size = kDefaultFingerprintSize;
};

inline int run_fingerprint(const FingerprintArgs& a, Common& c, Streams& io) {
    echo_config(io, "fingerprint",
                {{"input", a.input}, {"out_png", a.out_png}, {"out_raw", a.out_raw}, {"size", a.size},
                 {"threads", c.threads}, {"denoiser", kMedianDenoiser}});
    if (a.out_png.empty() && a.out_raw.empty()) throw InvalidArgument("give --out-png and/or --out-raw");
    const Fingerprint fp = extract_fingerprint_from_dir(a.input, a.size, c.threads);
    if (!a.out_raw.empty()) {
        detail::ensure_parent(a.out_raw);
        save_fingerprint(fp, a.out_raw);
    }
    if (!a.out_png.empty()) {
        detail::ensure_parent(a.out_png);
        save_gray_image(fingerprint_visualization(fp), a.out_png, 16);
    }
    io.out << "images " << fp.count << "  size " << a.size << "  peak_to_mean " << metrics_detail::fmt(peak_to_mean(fp), 4)
           << "\n";
    return kOk;
}

struct BuildArgs {
    std::string src;
    std::string out;
    double p_inject = 0.5;
    std::string families = "g,a,s";
    std::string strength = "0.3:1.0";
    std::string aug;
    std::size_t working_size = 256;
    bool stream = false;
};

inline int run_build(const BuildArgs& a, Common& c, Streams& io) {
    DatasetConfig cfg;
    cfg.source_dir = a.src;
    cfg.output_dir = a.out;
    cfg.inject_probability = a.p_inject;
    cfg.family_weights = detail::parse_families(a.families);
    std::tie(cfg.strength_lo, cfg.strength_hi) = detail::parse_range(a.strength);
    cfg.augmentations = detail::parse_augmentations(a.aug);
    cfg.working_size = a.working_size;
    cfg.global_seed = c.resolved_seed(io);
    Json echo = cfg.to_json();
    echo["stream"] = a.stream;
    echo["threads"] = c.threads;
    echo_config(io, "build-dataset", echo);
    cfg.validate();

    if (a.stream) {
        const std::size_t failures = stream_dataset(
            cfg, [&](std::size_t, Sample& s) { io.out << to_json(s.record).dump() << "\n"; }, c.threads);
        if (failures) io.err << "skipped " << failures << " unreadable source image(s)\n";
        return kOk;
    }
    if (a.out.empty()) throw InvalidArgument("--out is required unless --stream is given");
    const DatasetManifest m = build_dataset(cfg, c.threads);
    std::size_t fakes = 0;
    for (const auto& r : m.records) fakes += static_cast<std::size_t>(r.label);
    if (m.failures) io.err << "skipped " << m.failures << " unreadable source image(s)\n";
    io.out << "samples " << m.records.size() << "  fake " << fakes << "  pristine " << m.records.size() - fakes
           << "  manifest " << (std::filesystem::path(a.out) / kManifestName).string() << "\n";
    return kOk;
}

struct TrainArgs {
    std::string manifest;
    std::string out_model;
    std::size_t epochs = 500;
    double lr = 0.1;
    std::size_t working_size = 256;
};

inline int run_train(const TrainArgs& a, Common& c, Streams& io) {
    const std::uint64_t seed = c.resolved_seed(io);
    echo_config(io, "train",
                {{"manifest", a.manifest}, {"out_model", a.out_model}, {"epochs", a.epochs}, {"lr", a.lr},
                 {"seed", seed}, {"working_size", a.working_size}, {"K", kDefaultBands}, {"threads", c.threads}});
    const auto records = read_manifest(a.manifest);
    const auto base = std::filesystem::path(a.manifest).parent_path();
    TrainResult r = train(records, base, {a.epochs, a.lr, seed}, a.working_size, kDefaultBands, c.threads);
    r.model.training_meta["manifest"] = a.manifest;
    detail::ensure_parent(a.out_model);
    save_model(r.model, a.out_model);
    io.out << "samples " << records.size() << "  final_loss " << metrics_detail::fmt(r.final_loss) << "\n";
    return kOk;
}

struct PredictArgs {
    std::string model;
    std::string input;
    std::string out_csv;
    std::optional<int> label;
    std::string group;
};

/// Labels come from a manifest.jsonl next to the inputs, else from --label.
inline int run_predict(const PredictArgs& a, Common& c, Streams& io) {
    echo_config(io, "predict",
                {{"model", a.model}, {"input", a.input}, {"out_csv", a.out_csv},
                 {"label", a.label ? Json(*a.label) : Json(nullptr)}, {"group", a.group}, {"threads", c.threads}});
    const DetectorModel model = load_model(a.model);
    const std::filesystem::path input(a.input);

    std::vector<std::filesystem::path> files;
    std::vector<int> labels;
    std::vector<std::string> groups;
    const auto manifest = input / kManifestName;
    if (std::filesystem::is_directory(input) && std::filesystem::exists(manifest) && !a.label) {
        for (const auto& r : read_manifest(manifest)) {
            files.push_back(input / r.path);
            labels.push_back(r.label);
            groups.push_back(std::string(r.pattern ? family_name(r.pattern->family) : kPristineGroup));
        }
    } else {
        if (std::filesystem::is_directory(input)) {
            files = list_images(input);
            if (files.empty()) throw DataError("no images in '" + a.input + "'");
        } else {
            files.push_back(input);
        }
        if (!a.label && !a.out_csv.empty()) {
            throw InvalidArgument("no manifest.jsonl with the inputs; pass --label to write a prediction CSV");
        }
        const int label = a.label.value_or(0);
        const std::string group = !a.group.empty() ? a.group : label ? "fake" : std::string(kPristineGroup);
        labels.assign(files.size(), label);
        groups.assign(files.size(), group);
    }

    std::vector<PredictionRecord> records(files.size());
    parallel_for(files.size(), c.threads, [&](std::size_t i) {
        records[i] = {files[i].lexically_relative(input.has_filename() && std::filesystem::is_directory(input)
                                                      ? input
                                                      : input.parent_path())
                          .generic_string(),
                      predict(model, load_image(files[i])), labels[i], groups[i]};
        if (records[i].path.empty() || records[i].path == ".") records[i].path = files[i].filename().string();
    });
    if (!a.out_csv.empty()) {
        detail::write_text(a.out_csv, predictions_to_csv(records));
    }
    for (const auto& r : records) {
        io.out << r.path << "  " << metrics_detail::fmt(r.score) << "  " << (classify_fake(r.score) ? "fake" : "pristine")
               << "\n";
    }
    return kOk;
}

struct EvaluateArgs {
    std::string pred;
    double threshold = kDecisionThreshold;
    std::string out_report;
    std::string expected_groups;
};

inline int run_evaluate(const EvaluateArgs& a, Common&, Streams& io) {
    echo_config(io, "evaluate",
                {{"pred", a.pred}, {"threshold", a.threshold}, {"out_report", a.out_report},
                 {"groups", a.expected_groups}});
    const auto records = load_predictions(a.pred);
    const GroupReport report = group_report(records, a.threshold, detail::split(a.expected_groups, ','));
    const ConfusionCounts c = confusion(records, a.threshold);
    io.out << group_report_table(report, confidence_stats(records));
    io.out << "tp " << c.tp << "  fn " << c.fn << "  tn " << c.tn << "  fp " << c.fp << "\n";
    const auto metric = [](auto f, const ConfusionCounts& counts) {
        try {
            return metrics_detail::fmt(f(counts));
        } catch (const UndefinedMetric&) {
            return std::string("undefined");
        }
    };
    io.out << "recall " << metric(recall, c) << "  specificity " << metric(specificity, c) << "\n";
    if (c.tp + c.fn > 0 && c.tn + c.fp > 0) io.out << "auc " << metrics_detail::fmt(roc_auc(records).auc) << "\n";
    if (!a.out_report.empty()) detail::write_text(a.out_report, group_report_csv(report));
    return kOk;
}

struct RocArgs {
    std::string pred;
    std::string out_csv;
    std::string out_svg;
    std::string title = "ROC";
};

inline int run_roc(const RocArgs& a, Common&, Streams& io) {
    echo_config(io, "roc", {{"pred", a.pred}, {"out_csv", a.out_csv}, {"out_svg", a.out_svg}});
    const RocResult roc = roc_auc(load_predictions(a.pred));
    if (!a.out_csv.empty()) detail::write_text(a.out_csv, roc_csv(roc));
    if (!a.out_svg.empty()) detail::write_text(a.out_svg, roc_svg(roc, a.title));
    io.out << "auc " << metrics_detail::fmt(roc.auc) << "  points " << roc.curve.size() << "\n";
    return kOk;
}

struct DemoArgs {
    std::size_t n = 400;
    std::size_t size = 64;
    std::size_t epochs = 500;
    double lr = 0.1;
    double p_inject = 0.5;
    std::string out_report;
    std::string out_pred;
};

inline int run_demo(const DemoArgs& a, Common& c, Streams& io) {
    DemoConfig cfg;
    cfg.seed = c.resolved_seed(io);
    cfg.n = a.n;
    cfg.image_size = a.size;
    cfg.train = {a.epochs, a.lr, cfg.seed};
    cfg.train_inject_probability = a.p_inject;
    cfg.threads = c.threads;
    Json echo = cfg.to_json();
    echo["threads"] = c.threads;
    echo_config(io, "demo", echo);
    const DemoReport r = pipeline_demo(cfg);
    io.out << group_report_table(r.groups, r.stats);
    io.out << "auc aura " << metrics_detail::fmt(r.auc_aura) << "  auc spike " << metrics_detail::fmt(r.auc_spike)
           << "  pristine specificity " << metrics_detail::fmt(r.specificity) << "\n";
    if (!a.out_report.empty()) detail::write_text(a.out_report, r.to_json().dump(2) + "\n");
    if (!a.out_pred.empty()) detail::write_text(a.out_pred, predictions_to_csv(r.predictions));
    return kOk;
}

// ---- dispatch ---------------------------------------------------------------------

inline int run(int argc, const char* const* argv, Streams io = {std::cout, std::cerr}) {
    CLI::App app{"Frequency-pattern injection toolkit for synthetic-image detection", "freqinject"};
    app.require_subcommand(1);
    Common common;

    const auto add_common = [&](CLI::App* sub, bool seeded) {
        if (seeded) sub->add_option("--seed", common.seed, "64-bit seed; drawn and printed when absent");
        sub->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
    };

    PatternArgs pattern;
    auto* p = app.add_subcommand("pattern", "render a synthetic pattern image");
    p->add_option("--family", pattern.family, "geometric|aura|spike (default: random)");
    p->add_option("--shape", pattern.shape, "shape within the family (default: random)");
    p->add_option("--size", pattern.size, "square size in pixels")->check(CLI::PositiveNumber);
    p->add_option("--width", pattern.width, "width (overrides --size)");
    p->add_option("--height", pattern.height, "height (overrides --size)");
    p->add_option("--out", pattern.out, "output .png/.pgm")->required();
    p->add_option("--spec-out", pattern.spec_out, "write the resolved spec as JSON");
    p->add_option("--depth", pattern.depth, "bit depth")->check(CLI::IsMember({8, 16}));
    add_common(p, true);

    InjectArgs inj;
    auto* i = app.add_subcommand("inject", "inject a pattern into an image's Fourier magnitude");
    i->add_option("--input", inj.input, "source image")->required()->check(CLI::ExistingFile);
    i->add_option("--out", inj.out, "output image")->required();
    i->add_option("--pattern", inj.pattern_image, "use this pattern image instead of generating one")
        ->check(CLI::ExistingFile);
    i->add_option("--family", inj.family, "geometric|aura|spike (default: random)");
    i->add_option("--shape", inj.shape, "shape within the family");
    i->add_option("--strength", inj.strength, "pattern magnitude relative to the image's")->check(CLI::NonNegativeNumber);
    i->add_option("--spec-out", inj.spec_out, "write the applied spec as JSON");
    i->add_option("--delta-out", inj.delta_out, "write the centered magnitude change as a 16-bit image");
    i->add_option("--depth", inj.depth, "bit depth")->check(CLI::IsMember({8, 16}));
    add_common(i, true);

    FingerprintArgs fp;
    auto* f = app.add_subcommand("fingerprint", "average residual power spectrum of a corpus");
    f->add_option("--input", fp.input, "corpus directory")->required()->check(CLI::ExistingDirectory);
    f->add_option("--out-png", fp.out_png, "16-bit visualization");
    f->add_option("--out-raw", fp.out_raw, "raw float64 fingerprint");
    f->add_option("--size", fp.size, "working size")->check(CLI::PositiveNumber);
    add_common(f, false);

    BuildArgs build;
    auto* b = app.add_subcommand("build-dataset", "label a corpus by random injection");
    b->add_option("--src", build.src, "pristine image directory")->required()->check(CLI::ExistingDirectory);
    b->add_option("--out", build.out, "output directory");
    b->add_option("--p-inject", build.p_inject, "injection probability")->check(CLI::Range(0.0, 1.0));
    b->add_option("--families", build.families, "comma list of g,a,s");
    b->add_option("--strength", build.strength, "strength range lo:hi");
    b->add_option("--aug", build.aug, "comma list of flip,rotate90,contrast,color_jitter,gaussian_noise");
    b->add_option("--working-size", build.working_size, "output size in pixels")->check(CLI::Range(16, 1 << 15));
    b->add_flag("--stream", build.stream, "print manifest records without writing files");
    add_common(b, true);

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "fit the logistic frequency-feature detector");
    t->add_option("--manifest", tr.manifest, "manifest.jsonl")->required()->check(CLI::ExistingFile);
    t->add_option("--out-model", tr.out_model, "model JSON")->required();
    t->add_option("--epochs", tr.epochs, "gradient-descent iterations");
    t->add_option("--lr", tr.lr, "learning rate")->check(CLI::PositiveNumber);
    t->add_option("--working-size", tr.working_size, "feature working size")->check(CLI::Range(4, 1 << 15));
    add_common(t, true);

    PredictArgs pr;
    auto* pd = app.add_subcommand("predict", "score images with a trained model");
    pd->add_option("--model", pr.model, "model JSON")->required()->check(CLI::ExistingFile);
    pd->add_option("--input", pr.input, "image file or directory")->required()->check(CLI::ExistingPath);
    pd->add_option("--out-csv", pr.out_csv, "prediction CSV (path,score,label,group)");
    pd->add_option("--label", pr.label, "label for unlabeled inputs")->check(CLI::IsMember({0, 1}));
    pd->add_option("--group", pr.group, "group tag for unlabeled inputs");
    add_common(pd, false);

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "recall/specificity report from a prediction CSV");
    e->add_option("--pred", ev.pred, "prediction CSV")->required()->check(CLI::ExistingFile);
    e->add_option("--threshold", ev.threshold, "decision threshold")->check(CLI::Range(0.0, 1.0));
    e->add_option("--out-report", ev.out_report, "group report CSV");
    e->add_option("--groups", ev.expected_groups, "comma list of groups that must appear as rows");
    add_common(e, false);

    RocArgs ro;
    auto* r = app.add_subcommand("roc", "ROC curve and AUC from a prediction CSV");
    r->add_option("--pred", ro.pred, "prediction CSV")->required()->check(CLI::ExistingFile);
    r->add_option("--out-csv", ro.out_csv, "curve as fpr,tpr CSV");
    r->add_option("--out-svg", ro.out_svg, "curve as SVG");
    r->add_option("--title", ro.title, "plot title");
    add_common(r, false);

    DemoArgs dm;
    auto* d = app.add_subcommand("demo", "train on Geometric injection, test on Aura and Spike");
    d->add_option("--n", dm.n, "pristine images (half train, half test)")->check(CLI::Range(40, 1 << 20));
    d->add_option("--size", dm.size, "image size")->check(CLI::Range(16, 1024));
    d->add_option("--epochs", dm.epochs, "gradient-descent iterations");
    d->add_option("--lr", dm.lr, "learning rate")->check(CLI::PositiveNumber);
    d->add_option("--p-inject", dm.p_inject, "training injection probability")->check(CLI::Range(0.0, 1.0));
    d->add_option("--out-report", dm.out_report, "report JSON");
    d->add_option("--out-pred", dm.out_pred, "held-out predictions CSV");
    add_common(d, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        io.out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        io.out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& err) {
        io.err << "error: " << err.what() << "\n";
        const auto subs = app.get_subcommands();
        io.err << (subs.empty() ? app.help() : subs.front()->help());
        return kUsage;
    }

    try {
        if (*p) return run_pattern(pattern, common, io);
        if (*i) return run_inject(inj, common, io);
        if (*f) return run_fingerprint(fp, common, io);
        if (*b) return run_build(build, common, io);
        if (*t) return run_train(tr, common, io);
        if (*pd) return run_predict(pr, common, io);
        if (*e) return run_evaluate(ev, common, io);
        if (*r) return run_roc(ro, common, io);
        if (*d) return run_demo(dm, common, io);
    } catch (const CLI::ValidationError& err) {
        io.err << "error: " << err.what() << "\n";
        return kUsage;
    } catch (const DataError& err) {
        io.err << "error: " << err.what() << "\n";
        return kData;
    } catch (const DivergenceError& err) {
        io.err << "error: " << err.what() << " (learning rate " << err.learning_rate() << ")\n";
        return kData;
    } catch (const std::exception& err) {
        io.err << "internal error: " << err.what() << "\n";
        return kInternal;
    }
    return kInternal;
}

}  // namespace freqinject::cli
