#pragma once

// Evaluation: confusion counts at a threshold (score >= t is fake), recall and
// specificity, ROC/AUC with tie groups, per-group report and confidence stats.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "freqinject/error.hpp"
#include "freqinject/image_io.hpp"

namespace freqinject {

struct PredictionRecord {
    std::string path;
    double score = 0.0;
    int label = 0;  // 1 fake, 0 pristine
    std::string group;
};

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + tn + fp + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline void validate_record(const PredictionRecord& r) {
    if (!(r.score >= 0.0 && r.score <= 1.0)) throw InvalidArgument("score outside [0,1] for '" + r.path + "'");
    if (r.label != 0 && r.label != 1) throw InvalidArgument("label must be 0 or 1 for '" + r.path + "'");
}

inline ConfusionCounts confusion(const std::vector<PredictionRecord>& records, double threshold = 0.5) {
    ConfusionCounts c;
    for (const auto& r : records) {
        validate_record(r);
        const bool fake = r.score >= threshold;
        if (r.label == 1) {
            ++(fake ? c.tp : c.fn);
        } else {
            ++(fake ? c.fp : c.tn);
        }
    }
    return c;
}

inline double recall(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0) throw UndefinedMetric("recall undefined: no fake samples");
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

inline double specificity(const ConfusionCounts& c) {
    if (c.tn + c.fp == 0) throw UndefinedMetric("specificity undefined: no pristine samples");
    return static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
}

// ---- ROC --------------------------------------------------------------------------

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocResult {
    std::vector<RocPoint> curve;  // from (0,0) to (1,1)
    double auc = 0.0;
};

/// Thresholds sweep every distinct score from high to low; tied scores move
/// together, giving a diagonal segment that counts ties as one half.
inline RocResult roc_auc(const std::vector<PredictionRecord>& records) {
    std::size_t pos = 0;
    for (const auto& r : records) {
        validate_record(r);
        pos += static_cast<std::size_t>(r.label);
    }
    const std::size_t neg = records.size() - pos;
    if (pos == 0 || neg == 0) throw SingleClassError("ROC needs both fake and pristine records");

    std::vector<const PredictionRecord*> order;
    for (const auto& r : records) order.push_back(&r);
    std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->score > b->score; });

    RocResult out;
    out.curve.push_back({0.0, 0.0});
    std::size_t tp = 0;
    std::size_t fp = 0;
    double area = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = order[i]->score;
        const std::size_t tp0 = tp;
        const std::size_t fp0 = fp;
        for (; i < order.size() && order[i]->score == s; ++i) ++(order[i]->label == 1 ? tp : fp);
        // Trapezoid in count units: (fp - fp0) * (tp + tp0) / 2.
        area += static_cast<double>(fp - fp0) * static_cast<double>(tp + tp0) / 2.0;
        out.curve.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                             static_cast<double>(tp) / static_cast<double>(pos)});
    }
    out.auc = area / (static_cast<double>(pos) * static_cast<double>(neg));
    return out;
}

// ---- per-group tables ------------------------------------------------------------

inline constexpr std::string_view kPristineGroup = "pristine";

struct GroupRow {
    std::string group;
    std::string metric;            // "recall" or "specificity"
    std::optional<double> value;   // empty when undefined
    std::size_t count = 0;
};

struct GroupReport {
    std::vector<GroupRow> rows;   // fake groups by name, then pristine groups by name
    std::optional<double> mean;   // unweighted mean over defined rows
    double threshold = 0.5;
};

/// A group whose records are all pristine reports specificity; otherwise recall.
/// Groups that mix labels are rejected. `expected_groups` that have no records
/// appear as undefined rows.
inline GroupReport group_report(const std::vector<PredictionRecord>& records, double threshold = 0.5,
                                const std::vector<std::string>& expected_groups = {}) {
    std::map<std::string, std::vector<PredictionRecord>> groups;
    for (const auto& g : expected_groups) groups[g];
    for (const auto& r : records) {
        validate_record(r);
        groups[r.group].push_back(r);
    }
    GroupReport report;
    report.threshold = threshold;
    std::vector<GroupRow> fake_rows;
    std::vector<GroupRow> pristine_rows;
    for (const auto& [name, members] : groups) {
        GroupRow row{name, "recall", std::nullopt, members.size()};
        std::size_t fakes = 0;
        for (const auto& m : members) fakes += static_cast<std::size_t>(m.label);
        if (fakes != 0 && fakes != members.size()) {
            throw DataError("group '" + name + "' mixes fake and pristine labels");
        }
        const bool pristine = members.empty() ? name == kPristineGroup : fakes == 0;
        if (pristine) row.metric = "specificity";
        if (!members.empty()) {
            const ConfusionCounts c = confusion(members, threshold);
            row.value = pristine ? specificity(c) : recall(c);
        }
        (pristine ? pristine_rows : fake_rows).push_back(std::move(row));
    }
    report.rows = std::move(fake_rows);
    report.rows.insert(report.rows.end(), pristine_rows.begin(), pristine_rows.end());
    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto& row : report.rows) {
        if (row.value) {
            sum += *row.value;
            ++defined;
        }
    }
    if (defined > 0) report.mean = sum / static_cast<double>(defined);
    return report;
}

struct GroupStats {
    std::string group;
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;  // population
};

inline std::vector<GroupStats> confidence_stats(const std::vector<PredictionRecord>& records) {
    std::map<std::string, std::vector<double>> scores;
    for (const auto& r : records) {
        validate_record(r);
        scores[r.group].push_back(r.score);
    }
    std::vector<GroupStats> out;
    for (const auto& [name, s] : scores) {
        GroupStats g{name, s.size(), 0.0, 0.0};
        for (double v : s) g.mean += v;
        g.mean /= static_cast<double>(s.size());
        for (double v : s) g.std += (v - g.mean) * (v - g.mean);
        g.std = std::sqrt(g.std / static_cast<double>(s.size()));
        out.push_back(g);
    }
    return out;
}

// ---- text formats ----------------------------------------------------------------

namespace metrics_detail {

inline std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    if (quoted) throw FormatError("unterminated quote in CSV line");
    return fields;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    io_detail::write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

}  // namespace metrics_detail

inline constexpr std::string_view kPredictionHeader = "path,score,label,group";

inline std::string predictions_to_csv(const std::vector<PredictionRecord>& records) {
    std::string out{kPredictionHeader};
    out += '\n';
    char score[32];
    for (const auto& r : records) {
        std::snprintf(score, sizeof score, "%.17g", r.score);
        out += metrics_detail::csv_field(r.path) + ',' + score + ',' + std::to_string(r.label) + ',' +
               metrics_detail::csv_field(r.group) + '\n';
    }
    return out;
}

inline std::vector<PredictionRecord> predictions_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty prediction CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kPredictionHeader) throw FormatError("prediction CSV header must be '" + std::string(kPredictionHeader) + "'");
    std::vector<PredictionRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto f = metrics_detail::split_csv_line(line);
        if (f.size() != 4) throw FormatError("line " + std::to_string(line_no) + ": expected 4 fields");
        PredictionRecord r;
        r.path = f[0];
        r.group = f[3];
        try {
            std::size_t used = 0;
            r.score = std::stod(f[1], &used);
            if (used != f[1].size()) throw std::invalid_argument("trailing");
            r.label = std::stoi(f[2], &used);
            if (used != f[2].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw FormatError("line " + std::to_string(line_no) + ": bad score or label");
        }
        try {
            validate_record(r);
        } catch (const InvalidArgument& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
        records.push_back(std::move(r));
    }
    return records;
}

inline void save_predictions(const std::vector<PredictionRecord>& records, const std::filesystem::path& path) {
    metrics_detail::write_text(path, predictions_to_csv(records));
}

inline std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
    const auto bytes = io_detail::read_file(path);
    return predictions_from_csv(std::string(bytes.begin(), bytes.end()));
}

inline std::string group_report_csv(const GroupReport& report) {
    std::string out = "group,metric,value,count\n";
    for (const auto& row : report.rows) {
        out += metrics_detail::csv_field(row.group) + ',' + row.metric + ',' +
               (row.value ? metrics_detail::fmt(*row.value) : "undefined") + ',' + std::to_string(row.count) + '\n';
    }
    out += "mean,mean," + (report.mean ? metrics_detail::fmt(*report.mean) : std::string("undefined")) + ',' +
           std::to_string(report.rows.size()) + '\n';
    return out;
}

inline std::string group_report_table(const GroupReport& report, const std::vector<GroupStats>& stats = {}) {
    std::size_t width = 5;
    for (const auto& row : report.rows) width = std::max(width, row.group.size());
    std::map<std::string, GroupStats> by_group;
    for (const auto& s : stats) by_group[s.group] = s;

    const auto pad = [](std::string s, std::size_t n) {
        s.resize(std::max(n, s.size()), ' ');
        return s;
    };
    std::string out = pad("group", width) + "  " + pad("metric", 11) + "  " + pad("value", 9) + "  count";
    if (!stats.empty()) out += "  conf_mean  conf_std";
    out += '\n';
    for (const auto& row : report.rows) {
        out += pad(row.group, width) + "  " + pad(row.metric, 11) + "  " +
               pad(row.value ? metrics_detail::fmt(*row.value, 4) : "undefined", 9) + "  " +
               pad(std::to_string(row.count), 5);
        if (auto it = by_group.find(row.group); it != by_group.end()) {
            out += "  " + pad(metrics_detail::fmt(it->second.mean, 4), 9) + "  " + metrics_detail::fmt(it->second.std, 4);
        }
        out += '\n';
    }
    out += pad("mean", width) + "  " + pad("", 11) + "  " + (report.mean ? metrics_detail::fmt(*report.mean, 4) : "undefined") +
           '\n';
    return out;
}

inline std::string roc_csv(const RocResult& roc) {
    std::string out = "fpr,tpr\n";
    for (const auto& p : roc.curve) out += metrics_detail::fmt(p.fpr, 9) + ',' + metrics_detail::fmt(p.tpr, 9) + '\n';
    return out;
}

/// Minimal standalone SVG: unit square, diagonal reference, ROC polyline, AUC label.
inline std::string roc_svg(const RocResult& roc, const std::string& title = "ROC") {
    const double size = 400.0;
    const double margin = 50.0;
    const auto px = [&](double fpr) { return metrics_detail::fmt(margin + fpr * size, 2); };
    const auto py = [&](double tpr) { return metrics_detail::fmt(margin + (1.0 - tpr) * size, 2); };
    std::string points;
    for (const auto& p : roc.curve) points += px(p.fpr) + ',' + py(p.tpr) + ' ';
    if (!points.empty()) points.pop_back();
    std::string escaped;
    for (char c : title) {
        if (c == '<') escaped += "&lt;";
        else if (c == '>') escaped += "&gt;";
        else if (c == '&') escaped += "&amp;";
        else escaped += c;
    }
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"500\" viewBox=\"0 0 500 500\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"500\" height=\"500\" fill=\"white\"/>\n";
    svg += "<rect x=\"50\" y=\"50\" width=\"400\" height=\"400\" fill=\"none\" stroke=\"black\"/>\n";
    svg += "<line x1=\"50\" y1=\"450\" x2=\"450\" y2=\"50\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
    svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    svg += "<text x=\"250\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" + escaped +
           " (AUC " + metrics_detail::fmt(roc.auc, 4) + ")</text>\n";
    svg += "<text x=\"250\" y=\"485\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">false positive rate</text>\n";
    svg += "<text x=\"15\" y=\"250\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 15 250)\">true positive rate</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace freqinject
