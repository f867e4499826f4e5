#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "freqinject/metrics.hpp"
#include "oracle/mann_whitney.hpp"
#include "test_support.hpp"

using namespace freqinject;

namespace {

std::vector<PredictionRecord> make(const std::vector<double>& scores, const std::vector<int>& labels,
                                   const std::vector<std::string>& groups = {}) {
    std::vector<PredictionRecord> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out.push_back({"img" + std::to_string(i) + ".png", scores[i], labels[i],
                       groups.empty() ? (labels[i] ? "fake" : "pristine") : groups[i]});
    }
    return out;
}

std::vector<PredictionRecord> random_records(std::mt19937_64& gen, std::size_t n, bool coarse) {
    std::uniform_real_distribution<double> u;
    std::vector<PredictionRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        double s = u(gen);
        if (coarse) s = std::round(s * 10.0) / 10.0;  // forces ties
        out.push_back({"r", s, static_cast<int>(i < 2 ? i : gen() % 2), "g"});
    }
    return out;
}

}  // namespace

TEST(Confusion, HandExamples) {
    EXPECT_EQ(confusion(make({0.9, 0.4}, {1, 1}), 0.5), (ConfusionCounts{1, 0, 0, 1}));
    EXPECT_EQ(confusion(make({0.2, 0.6}, {0, 0}), 0.5), (ConfusionCounts{0, 1, 1, 0}));
    EXPECT_EQ(confusion({}, 0.5), ConfusionCounts{});
    // Ties at the threshold count as fake.
    EXPECT_EQ(confusion(make({0.5, 0.5}, {1, 0}), 0.5), (ConfusionCounts{1, 0, 1, 0}));
}

TEST(Confusion, CraftedSetsMatchHandTallies) {
    // 8 records: fakes 0.95 0.7 0.5 0.3 ; pristine 0.1 0.49 0.51 0.2.
    const auto r = make({0.95, 0.7, 0.5, 0.3, 0.1, 0.49, 0.51, 0.2}, {1, 1, 1, 1, 0, 0, 0, 0});
    const ConfusionCounts c = confusion(r, 0.5);
    EXPECT_EQ(c, (ConfusionCounts{3, 3, 1, 1}));
    EXPECT_EQ(recall(c), 0.75);
    EXPECT_EQ(specificity(c), 0.75);
    EXPECT_EQ(c.total(), r.size());
}

TEST(Confusion, PermutationInvariantAndPartitions) {
    std::mt19937_64 gen(3);
    auto r = random_records(gen, 50, false);
    const ConfusionCounts before = confusion(r);
    std::shuffle(r.begin(), r.end(), gen);
    EXPECT_EQ(confusion(r), before);
    EXPECT_EQ(before.total(), 50u);
}

TEST(Rates, ExactRatiosAndUndefined) {
    EXPECT_EQ(recall({3, 0, 0, 1}), 0.75);
    EXPECT_EQ(specificity({0, 9, 1, 0}), 0.9);
    EXPECT_THROW(recall({0, 5, 1, 0}), UndefinedMetric);
    EXPECT_THROW(specificity({2, 0, 0, 1}), UndefinedMetric);
}

TEST(Roc, WorkedExamples) {
    EXPECT_EQ(roc_auc(make({0.9, 0.8, 0.1, 0.2}, {1, 1, 0, 0})).auc, 1.0);
    const RocResult r = roc_auc(make({0.8, 0.3, 0.5, 0.1}, {1, 1, 0, 0}));
    EXPECT_DOUBLE_EQ(r.auc, 0.75);
    EXPECT_EQ(r.curve.front(), (RocPoint{0.0, 0.0}));
    EXPECT_EQ(r.curve.back(), (RocPoint{1.0, 1.0}));
    EXPECT_EQ(r.curve.size(), 5u);  // origin plus one point per distinct score
}

TEST(Roc, AllTiedIsHalf) {
    const RocResult r = roc_auc(make({0.4, 0.4, 0.4}, {1, 0, 0}));
    EXPECT_DOUBLE_EQ(r.auc, 0.5);
    EXPECT_EQ(r.curve.size(), 2u);
}

TEST(Roc, SingleClassThrows) {
    EXPECT_THROW(roc_auc(make({0.1, 0.2}, {1, 1})), SingleClassError);
    EXPECT_THROW(roc_auc({}), SingleClassError);
}

TEST(Roc, MatchesMannWhitney) {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 300; ++trial) {
        const auto r = random_records(gen, 2 + gen() % 199, trial % 2 == 0);
        EXPECT_NEAR(roc_auc(r).auc, oracle::mann_whitney_auc(r), 1e-9);
    }
}

TEST(Roc, LabelSwapGivesComplement) {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto r = random_records(gen, 40, trial % 2 == 0);
        const double auc = roc_auc(r).auc;
        for (auto& rec : r) rec.label = 1 - rec.label;
        EXPECT_NEAR(roc_auc(r).auc, 1.0 - auc, 1e-12);
    }
}

TEST(Roc, MonotoneTransformInvariant) {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 20; ++trial) {
        auto r = random_records(gen, 60, trial % 2 == 0);
        const RocResult before = roc_auc(r);
        for (auto& rec : r) rec.score = std::pow(rec.score, 3.0) * 0.5 + 0.1;
        const RocResult after = roc_auc(r);
        EXPECT_NEAR(after.auc, before.auc, 1e-12);
        ASSERT_EQ(after.curve.size(), before.curve.size());
        for (std::size_t i = 0; i < after.curve.size(); ++i) {
            EXPECT_NEAR(after.curve[i].fpr, before.curve[i].fpr, 1e-12);
            EXPECT_NEAR(after.curve[i].tpr, before.curve[i].tpr, 1e-12);
        }
    }
}

TEST(Roc, RejectsInvalidRecords) {
    EXPECT_THROW(roc_auc(make({1.2, 0.1}, {1, 0})), InvalidArgument);
    EXPECT_THROW(confusion(make({0.2, 0.1}, {2, 0})), InvalidArgument);
}

TEST(GroupReport, AllCorrect) {
    const auto g = group_report(make({0.9, 0.8, 0.1}, {1, 1, 0}, {"a", "a", "pristine"}));
    ASSERT_EQ(g.rows.size(), 2u);
    EXPECT_EQ(g.rows[0].metric, "recall");
    EXPECT_EQ(*g.rows[0].value, 1.0);
    EXPECT_EQ(g.rows[1].metric, "specificity");
    EXPECT_EQ(*g.mean, 1.0);
}

TEST(GroupReport, UnweightedMean) {
    const auto g = group_report(make({0.9, 0.9, 0.9, 0.1, 0.2, 0.3}, {1, 1, 1, 1, 0, 0},
                                     {"a", "a", "b", "b", "pristine", "pristine"}));
    ASSERT_EQ(g.rows.size(), 3u);
    EXPECT_EQ(*g.rows[0].value, 1.0);
    EXPECT_EQ(*g.rows[1].value, 0.5);
    EXPECT_EQ(*g.rows[2].value, 1.0);
    EXPECT_NEAR(*g.mean, 2.5 / 3.0, 1e-15);
}

TEST(GroupReport, EmptyExpectedGroupIsUndefined) {
    const auto g = group_report(make({0.9, 0.1}, {1, 0}, {"a", "pristine"}), 0.5, {"a", "b", "pristine"});
    ASSERT_EQ(g.rows.size(), 3u);
    EXPECT_EQ(g.rows[1].group, "b");
    EXPECT_FALSE(g.rows[1].value.has_value());
    EXPECT_EQ(*g.mean, 1.0);
    EXPECT_NE(group_report_csv(g).find("b,recall,undefined,0"), std::string::npos);
}

TEST(GroupReport, MixedGroupRejected) {
    EXPECT_THROW(group_report(make({0.9, 0.1}, {1, 0}, {"x", "x"})), DataError);
}

TEST(ConfidenceStats, PopulationMoments) {
    const auto s = confidence_stats(make({0.9, 0.7, 0.3}, {1, 1, 0}, {"a", "a", "b"}));
    ASSERT_EQ(s.size(), 2u);
    EXPECT_NEAR(s[0].mean, 0.8, 1e-15);
    EXPECT_NEAR(s[0].std, 0.1, 1e-15);
    EXPECT_EQ(s[1].mean, 0.3);
    EXPECT_EQ(s[1].std, 0.0);
}

TEST(PredictionCsv, RoundTripWithQuoting) {
    auto r = make({0.25, 1.0 / 3.0}, {1, 0}, {"aura", "pristine"});
    r[0].path = "dir, with comma/\"x\".png";
    const auto back = predictions_from_csv(predictions_to_csv(r));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].path, r[0].path);
    EXPECT_EQ(back[1].score, r[1].score);
    EXPECT_EQ(back[1].group, "pristine");
}

TEST(PredictionCsv, Errors) {
    EXPECT_THROW(predictions_from_csv("a,b,c,d\n"), FormatError);
    EXPECT_THROW(predictions_from_csv("path,score,label,group\nx,0.5,1\n"), FormatError);
    EXPECT_THROW(predictions_from_csv("path,score,label,group\nx,abc,1,g\n"), FormatError);
    EXPECT_THROW(predictions_from_csv("path,score,label,group\nx,1.5,1,g\n"), FormatError);
    EXPECT_THROW(predictions_from_csv(""), FormatError);
}

TEST(RocOutputs, CsvAndSvg) {
    const RocResult r = roc_auc(make({0.8, 0.3, 0.5, 0.1}, {1, 1, 0, 0}));
    const std::string csv = roc_csv(r);
    EXPECT_EQ(csv.substr(0, 8), "fpr,tpr\n");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
    const std::string svg = roc_svg(r, "a<b");
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
    EXPECT_NE(svg.find("AUC 0.7500"), std::string::npos);
}
