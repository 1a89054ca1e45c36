#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "antigone/error.hpp"
#include "antigone/fairness.hpp"
#include "antigone/jtt.hpp"

using namespace antigone;

namespace {

HyperParams linear_hp(double lr, int epochs, std::uint64_t seed = 1) {
    HyperParams hp;
    hp.learning_rate = lr;
    hp.epochs = epochs;
    hp.batch_size = 32;
    hp.seed = seed;
    return hp;
}

// The spurious coordinate separates y on the majority only, so ERM leans on
// it and fails the minority.
DatasetSplits planted(std::uint64_t seed, std::size_t per_class = 400) {
    const auto spec = SyntheticSpec::spurious_blocks(per_class, 0.1, 1.0, 2.0, 2, seed);
    return split(generate_synthetic(spec), {0.5, 0.25, 0.25}, seed);
}

JttConfig small_config() {
    JttConfig c;
    c.stage1 = {linear_hp(0.1, 4)};
    c.early_stop = {1, 3};
    c.lambdas = {1, 5};
    c.stage2 = {linear_hp(0.1, 4), linear_hp(0.01, 3, 2)};
    c.objective = FairnessObjective::wga;
    c.bins = {{0.5, 0.8}, {0.8, 0.9}, {0.9, 1.0}};
    c.sensitive_source = SensitiveSource::ground_truth;
    return c;
}

FairnessReport report_with(double v) {
    FairnessReport r;
    r.avg_accuracy = 0.9;
    r.dp_gap = v;
    r.eo_gap = v;
    r.wga = v;
    return r;
}

}  // namespace

TEST(Jtt, LambdaOneCollapsesToErm) {
    const auto d = planted(1);
    const auto s1 = linear_hp(0.1, 3);
    const auto s2 = linear_hp(0.05, 4, 9);
    for (int t : {1, 2, 3}) {
        const auto m = jtt_train(d.train, s1, t, 1, s2);
        EXPECT_EQ(m.model, train_erm(d.train, s2).back());
    }
}

TEST(Jtt, NoStageOneErrorsMeansPlainErm) {
    const auto spec = SyntheticSpec::spurious_blocks(100, 0.1, 8.0, 0.5, 2, 3);
    const auto train = generate_synthetic(spec);
    const auto s2 = linear_hp(0.1, 2);
    const auto m = jtt_train(train, linear_hp(0.5, 5), 5, 20, s2);
    ASSERT_TRUE(m.error_ids.empty());
    EXPECT_TRUE(m.plain_erm);
    EXPECT_EQ(m.model, train_erm(train, s2).back());
}

TEST(Jtt, ErrorSetIsEnrichedInMinority) {
    const auto d = planted(2, 1000);
    const auto m = jtt_train(d.train, linear_hp(0.1, 5), 5, 5, linear_hp(0.1, 1));
    ASSERT_FALSE(m.error_ids.empty());
    const auto& a = *d.train.sensitive();
    std::set<std::int64_t> errors(m.error_ids.begin(), m.error_ids.end());
    std::size_t minority_all = 0;
    std::size_t minority_err = 0;
    for (std::size_t i = 0; i < d.train.size(); ++i) {
        minority_all += a[i] == 0;
        if (errors.count(d.train.row_ids()[i])) minority_err += a[i] == 0;
    }
    const double base = static_cast<double>(minority_all) / static_cast<double>(d.train.size());
    const double enriched = static_cast<double>(minority_err) / static_cast<double>(errors.size());
    EXPECT_GT(enriched, 3.0 * base) << enriched << " vs " << base;
}

TEST(Jtt, MisclassifiedIdsMatchBruteForce) {
    const auto d = planted(4);
    const auto model = train_erm(d.train, linear_hp(0.1, 2)).back();
    const auto p = predict_proba(model, d.validation);
    std::vector<std::int64_t> expected;
    for (std::size_t i = 0; i < d.validation.size(); ++i) {
        const Label pred = p(static_cast<Eigen::Index>(i)) >= 0.5 ? 1 : 0;
        if (pred != d.validation.targets()[i]) expected.push_back(d.validation.row_ids()[i]);
    }
    EXPECT_EQ(misclassified_ids(model, d.validation), expected);
}

TEST(Jtt, BinsAreHalfOpen) {
    const std::vector<AccuracyBin> bins = {{0.8, 0.85}, {0.85, 0.9}};
    EXPECT_EQ(bin_of(bins, 0.8), 0u);
    EXPECT_EQ(bin_of(bins, 0.85), 1u);
    EXPECT_FALSE(bin_of(bins, 0.9).has_value());
    EXPECT_FALSE(bin_of(bins, 0.79).has_value());
}

TEST(Jtt, SelectPerBinMatchesBruteForce) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> acc(0, 19);
    std::uniform_int_distribution<int> val(0, 3);
    const std::vector<AccuracyBin> bins = {{0.0, 0.3}, {0.3, 0.6}, {0.6, 0.9}, {0.95, 1.0}};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<CandidateEvaluation> evals(40);
        for (auto& e : evals) {
            e.val_accuracy = acc(rng) / 20.0;
            e.reports = {report_with(val(rng) / 4.0), report_with(val(rng) / 4.0)};
        }
        for (auto objective : {FairnessObjective::wga, FairnessObjective::dp_gap}) {
            for (std::size_t l = 0; l < 2; ++l) {
                const auto got = select_per_bin(evals, bins, objective, l);
                for (std::size_t b = 0; b < bins.size(); ++b) {
                    std::optional<std::size_t> expected;
                    for (std::size_t i = 0; i < evals.size(); ++i) {
                        if (!(evals[i].val_accuracy >= bins[b].lo && evals[i].val_accuracy < bins[b].hi)) continue;
                        const double v = evals[i].reports[l].wga;
                        if (!expected) {
                            expected = i;
                            continue;
                        }
                        const double best = evals[*expected].reports[l].wga;
                        if (objective == FairnessObjective::wga ? v > best : v < best) expected = i;
                    }
                    EXPECT_EQ(got[b], expected) << "bin " << b;
                }
            }
        }
    }
    EXPECT_FALSE(select_per_bin({}, bins, FairnessObjective::wga, 0)[3].has_value());
}

TEST(Jtt, ConfigValidation) {
    EXPECT_NO_THROW(small_config().validate());
    auto c = small_config();
    c.early_stop = {5};
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_config();
    c.lambdas = {0};
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_config();
    c.bins = {{0.8, 0.9}, {0.85, 0.95}};
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_config();
    c.bins = {{0.9, 0.9}};
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_config();
    c.stage2.clear();
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_THROW(objective_from_string("accuracy"), ConfigError);
    EXPECT_THROW(jtt_train(planted(1).train, linear_hp(0.1, 2), 3, 2, linear_hp(0.1, 1)), ConfigError);
}

TEST(Jtt, EvaluationIsGridOrderedAndExecutionIndependent) {
    const auto d = planted(6);
    const auto c = small_config();
    const std::vector<ValidationLabelling> l{{SensitiveSource::ground_truth, *d.validation.sensitive()}};
    const auto serial = evaluate_jtt_candidates(d.train, d.validation, l, c, Execution::serial);
    const auto parallel = evaluate_jtt_candidates(d.train, d.validation, l, c, Execution::parallel);
    // 1 stage-1 point x 2 T x 2 lambda x (4 + 3) stage-2 epochs.
    ASSERT_EQ(serial.size(), 28u);
    ASSERT_EQ(parallel.size(), serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].candidate, parallel[i].candidate);
        EXPECT_EQ(serial[i].val_accuracy, parallel[i].val_accuracy);
        EXPECT_EQ(serial[i].reports, parallel[i].reports);
    }
    EXPECT_EQ(serial[0].candidate, (JttCandidate{0, 1, 1, 0, 1}));
    EXPECT_EQ(serial[4].candidate, (JttCandidate{0, 1, 1, 1, 1}));
    EXPECT_EQ(serial[7].candidate, (JttCandidate{0, 1, 5, 0, 1}));

    // Lambda 1 candidates score exactly like plain ERM.
    const auto erm = evaluate_erm_candidates(d.train, d.validation, l, c.stage2, Execution::serial);
    ASSERT_EQ(erm.size(), 7u);
    for (std::size_t i = 0; i < erm.size(); ++i) {
        EXPECT_EQ(serial[i].val_accuracy, erm[i].val_accuracy);
        EXPECT_EQ(serial[i].reports, erm[i].reports);
    }
}

TEST(Jtt, WinnersMaterializeToTheScoredModels) {
    const auto d = planted(7);
    const auto c = small_config();
    const auto r = grid_search(d.train, d.validation, d.test, c, Execution::parallel);
    std::size_t checked = 0;
    for (const auto& m : r.methods) {
        for (const auto& w : m.bins) {
            if (!w) continue;
            const auto model = materialize(d.train, w->candidate, c.stage1, c.stage2);
            EXPECT_EQ(full_report(model, d.test, SensitiveSource::ground_truth), w->test);
            EXPECT_EQ(full_report(model, d.validation, SensitiveSource::ground_truth), w->validation);
            ++checked;
        }
    }
    EXPECT_GT(checked, 0u);
    EXPECT_EQ(r.methods[0].method, "jtt");
    EXPECT_EQ(r.methods[1].method, "erm");
}

TEST(Jtt, ErmOnPlantedDataHasPoorWorstGroup) {
    const auto d = planted(8, 1000);
    const auto r = erm_sweep(d.train, d.validation, d.test, {linear_hp(0.1, 10)}, {{0.0, 1.0}},
                             FairnessObjective::wga, Execution::serial);
    ASSERT_TRUE(r.erm_reference.has_value());
    EXPECT_LT(r.erm_reference->test.wga, r.erm_reference->test.avg_accuracy - 0.2);
}

TEST(Jtt, ResultJsonRoundTripAndTable) {
    const auto d = planted(9);
    const auto r = grid_search(d.train, d.validation, d.test, small_config(), Execution::parallel);
    const auto j = to_json(r);
    EXPECT_EQ(to_json(tuner_result_from_json(j)), j);
    const auto table = render_table(r);
    std::size_t lines = 0;
    for (char ch : table) lines += ch == '\n';
    // Title, header, one row per (bin, method), the ERM reference.
    EXPECT_EQ(lines, 2 + r.bins.size() * r.methods.size() + 1);
    EXPECT_NE(table.find("[80.0, 90.0)"), std::string::npos);
    EXPECT_THROW(r.method("nope"), DataError);
}

TEST(Jtt, SeedSummaryUsesSampleStandardDeviation) {
    auto make = [](double acc, double w) {
        TunerResult r;
        r.bins = {{0.0, 1.0}};
        MethodResult m;
        m.method = "jtt";
        Winner win;
        win.test.avg_accuracy = acc;
        win.test.wga = w;
        m.bins = {win};
        r.methods = {m};
        return r;
    };
    const auto s = summarize_seeds({make(0.8, 0.5), make(0.9, 0.7), make(1.0, 0.6)});
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].runs, 3u);
    EXPECT_NEAR(s[0].accuracy_mean, 0.9, 1e-12);
    EXPECT_NEAR(s[0].accuracy_std, 0.1, 1e-12);
    EXPECT_NEAR(s[0].objective_mean, 0.6, 1e-12);
    EXPECT_NEAR(s[0].objective_std, 0.1, 1e-12);
}
