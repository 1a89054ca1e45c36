#include <gtest/gtest.h>

#include "antigone/error.hpp"
#include "antigone/fairness.hpp"
#include "oracles.hpp"

using namespace antigone;

namespace {

// Eight rows with every (y, a) cell populated.
const Labels kTargets = {0, 0, 0, 0, 1, 1, 1, 1};
const Labels kSensitive = {0, 1, 1, 0, 1, 0, 1, 1};

Labels pattern(unsigned bits) {
    Labels p(8);
    for (unsigned i = 0; i < 8; ++i) p[i] = (bits >> i) & 1u;
    return p;
}

}  // namespace

TEST(Fairness, AllPredictionPatternsMatchCountingOracle) {
    for (unsigned bits = 0; bits < 256; ++bits) {
        const auto pred = pattern(bits);
        SCOPED_TRACE(bits);
        EXPECT_EQ(dp_gap(pred, kSensitive), oracle::dp_gap(pred, kSensitive));
        EXPECT_EQ(eo_gap(pred, kTargets, kSensitive), oracle::eo_gap(pred, kTargets, kSensitive));
        EXPECT_EQ(wga(pred, kTargets, kSensitive), oracle::wga(pred, kTargets, kSensitive));

        const auto q = pseudo_label_quality(pred, kSensitive, kTargets);
        const auto o = oracle::pseudo_quality(pred, kSensitive, kTargets);
        EXPECT_EQ(q.accuracy, o.accuracy);
        for (Label y : {0, 1}) {
            for (Label a : {0, 1}) {
                const auto& s = q.subgroup[subgroup_index(y, a)];
                EXPECT_EQ(s.precision, o.precision[y][a]);
                EXPECT_EQ(s.recall, o.recall[y][a]);
                EXPECT_EQ(s.f1, o.f1[y][a]);
            }
        }
    }
}

TEST(Fairness, HandComputedInstance) {
    // P(yhat=1 | a=1) = 3/4, P(yhat=1 | a=0) = 1/4.
    const Labels pred = {1, 1, 1, 0, 1, 0, 0, 0};
    const Labels a = {0, 1, 1, 0, 1, 0, 1, 0};
    EXPECT_DOUBLE_EQ(signed_dp_gap(pred, a), 0.5);
    EXPECT_DOUBLE_EQ(dp_gap(pred, a), 0.5);
}

TEST(Fairness, GapsInvariantToSwappingGroups) {
    for (unsigned bits = 0; bits < 256; bits += 7) {
        const auto pred = pattern(bits);
        Labels flipped = kSensitive;
        for (auto& v : flipped) v = 1 - v;
        EXPECT_EQ(dp_gap(pred, kSensitive), dp_gap(pred, flipped));
        EXPECT_EQ(eo_gap(pred, kTargets, kSensitive), eo_gap(pred, kTargets, flipped));
        EXPECT_EQ(signed_dp_gap(pred, kSensitive), -signed_dp_gap(pred, flipped));
    }
}

TEST(Fairness, ReportBoundsAndWgaBelowAverage) {
    for (unsigned bits = 0; bits < 256; ++bits) {
        const auto r = report_from_predictions(pattern(bits), kTargets, kSensitive, SensitiveSource::ground_truth);
        for (double v : {r.avg_accuracy, r.dp_gap, r.eo_gap, r.wga}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
        EXPECT_LE(r.wga, r.avg_accuracy + 1e-15);
        const bool all_equal = r.subgroup_accuracy[0] == r.subgroup_accuracy[1] &&
                               r.subgroup_accuracy[1] == r.subgroup_accuracy[2] &&
                               r.subgroup_accuracy[2] == r.subgroup_accuracy[3];
        EXPECT_EQ(all_equal, std::abs(r.wga - r.avg_accuracy) < 1e-15) << bits;
    }
}

TEST(Fairness, PerfectPredictorHasUnitWga) {
    EXPECT_EQ(wga(kTargets, kTargets, kSensitive), 1.0);
    const auto r = report_from_predictions(kTargets, kTargets, kSensitive, SensitiveSource::pseudo);
    EXPECT_EQ(r.avg_accuracy, 1.0);
    EXPECT_EQ(r.eo_gap, 0.0);
    EXPECT_EQ(r.source, SensitiveSource::pseudo);
}

TEST(Fairness, WorstGroupTiesResolveToLowestIndex) {
    const auto w = worst_group(kTargets, kTargets, kSensitive);
    EXPECT_EQ(w.y, 0);
    EXPECT_EQ(w.a, 0);
}

TEST(Fairness, EmptySubgroupsAreErrors) {
    const Labels y = {0, 0, 1, 1};
    const Labels a = {0, 1, 1, 1};  // (y=1, a=0) missing
    const Labels pred = {0, 0, 1, 1};
    EXPECT_THROW(wga(pred, y, a), DataError);
    EXPECT_THROW(eo_gap(pred, y, a), DataError);
    EXPECT_NO_THROW(dp_gap(pred, a));
    EXPECT_THROW(dp_gap(pred, Labels{1, 1, 1, 1}), DataError);
    try {
        wga(pred, y, a);
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("y=1, a=0"), std::string::npos);
    }
}

TEST(Fairness, MismatchedLengthsAndNonBinaryLabelsAreErrors) {
    EXPECT_THROW(dp_gap(Labels{1, 0}, Labels{1}), DataError);
    EXPECT_THROW(tabulate(Labels{1}, Labels{2}, Labels{0}), DataError);
    EXPECT_THROW(pseudo_label_quality(Labels{1}, Labels{3}, Labels{0}), DataError);
}

TEST(Fairness, QualityOfPerfectAndInvertedLabels) {
    const auto perfect = pseudo_label_quality(kSensitive, kSensitive, kTargets);
    EXPECT_EQ(perfect.accuracy, 1.0);
    for (const auto& s : perfect.subgroup) EXPECT_EQ(s.f1, 1.0);

    Labels inverted = kSensitive;
    for (auto& v : inverted) v = 1 - v;
    const auto q = pseudo_label_quality(inverted, kSensitive, kTargets);
    EXPECT_EQ(q.accuracy, 0.0);
    for (const auto& s : q.subgroup) {
        EXPECT_EQ(s.precision, 0.0);
        EXPECT_EQ(s.f1, 0.0);
    }
}

TEST(Fairness, QualityWithEmptyPseudoGroupHasUndefinedPrecision) {
    const Labels all_ones(8, 1);
    const auto q = pseudo_label_quality(all_ones, kSensitive, kTargets);
    EXPECT_FALSE(q.subgroup[subgroup_index(0, 0)].precision.has_value());
    EXPECT_EQ(q.subgroup[subgroup_index(0, 0)].recall, 0.0);
    EXPECT_EQ(q.subgroup[subgroup_index(0, 0)].f1, 0.0);
}

TEST(Fairness, ReportJsonRoundTrip) {
    const auto r = report_from_predictions(pattern(0xA5), kTargets, kSensitive, SensitiveSource::pseudo);
    const auto j = to_json(r);
    for (const char* key : {"avg_accuracy", "dp_gap", "eo_gap", "wga", "subgroup_accuracy"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(fairness_report_from_json(j), r);
}
