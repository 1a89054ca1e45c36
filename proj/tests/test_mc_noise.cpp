#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "antigone/error.hpp"
#include "antigone/mc_noise.hpp"
#include "fixtures.hpp"

using namespace antigone;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

ModelParams fixed_linear(double w0, double w1, double b) {
    auto m = initial_params(HyperParams{}, 2);
    m.layers[0].weight << w0, w1;
    m.layers[0].bias(0) = b;
    return m;
}

}  // namespace

TEST(McNoise, NoiseSpecValidation) {
    NoiseSpec s;
    s.alpha = 0.3;
    s.beta = 0.99;
    EXPECT_NO_THROW(s.validate());
    s.beta = 1.0;
    EXPECT_THROW(s.validate(), ConfigError);
    s.beta = -0.1;
    EXPECT_THROW(s.validate(), ConfigError);
    s.beta = 0.1;
    s.per_class = std::array<NoiseParams, 2>{NoiseParams{0.1, 0.2}, NoiseParams{0.3, 0.4}};
    EXPECT_EQ(s.for_class(1).alpha, 0.3);
    EXPECT_EQ(s.for_class(0).beta, 0.2);
    EXPECT_EQ(s.global().alpha, 0.3);
}

TEST(McNoise, ZeroNoiseAndFullSwapBoundaries) {
    const Matrix maj = Matrix::Constant(5, 2, 1.0);
    const Matrix min = Matrix::Constant(5, 2, -1.0);
    NoiseSpec spec;
    auto g = mix_groups(maj, min, spec, {100, 80});
    EXPECT_EQ(g.noisy_majority, Matrix::Constant(100, 2, 1.0));
    EXPECT_EQ(g.noisy_minority, Matrix::Constant(80, 2, -1.0));

    spec.alpha = 1.0;
    spec.beta = 1.0;
    g = mix_groups(maj, min, spec, {50, 50});
    EXPECT_EQ(g.noisy_majority, Matrix::Constant(50, 2, -1.0));
    EXPECT_EQ(g.noisy_minority, Matrix::Constant(50, 2, 1.0));
    for (auto f : g.majority_from_majority) EXPECT_EQ(f, 0);
}

TEST(McNoise, ContaminationCountsAreBinomial) {
    std::mt19937_64 rng(1);
    const auto maj = fixture::random_matrix(rng, 100, 2);
    const auto min = fixture::random_matrix(rng, 100, 2);
    NoiseSpec spec;
    spec.alpha = 0.2;
    spec.beta = 0.35;
    spec.seed = 42;
    const std::size_t n = 20000;
    const auto g = mix_groups(maj, min, spec, {n, n});
    std::size_t from_minority = 0;
    std::size_t from_majority = 0;
    for (std::size_t i = 0; i < n; ++i) {
        from_minority += g.majority_from_majority[i] == 0;
        from_majority += g.minority_from_majority[i] == 1;
        const auto src = g.majority_source[i];
        const Matrix& origin = g.majority_from_majority[i] ? maj : min;
        EXPECT_EQ(g.noisy_majority.row(static_cast<Eigen::Index>(i)), origin.row(static_cast<Eigen::Index>(src)));
    }
    auto within = [&](std::size_t count, double p) {
        const double sd = std::sqrt(n * p * (1 - p));
        return std::abs(static_cast<double>(count) - n * p) <= 4.0 * sd;
    };
    EXPECT_TRUE(within(from_minority, spec.alpha)) << from_minority;
    EXPECT_TRUE(within(from_majority, spec.beta)) << from_majority;
    EXPECT_EQ(mix_groups(maj, min, spec, {n, n}).noisy_minority, g.noisy_minority);
}

TEST(McNoise, EstimateContaminationByHand) {
    // Class 0: pseudo=1 rows have truth {1,1,0} -> alpha 1/3; pseudo=0 rows truth {0,1} -> beta 1/2.
    const Labels pseudo = {1, 1, 1, 0, 0, 1, 0};
    const Labels truth = {1, 1, 0, 0, 1, 1, 0};
    const Labels y = {0, 0, 0, 0, 0, 1, 1};
    const auto est = estimate_contamination(pseudo, truth, y);
    ASSERT_TRUE(est.per_class[0].has_value());
    EXPECT_DOUBLE_EQ(est.per_class[0]->alpha_hat, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(est.per_class[0]->beta_hat, 0.5);
    EXPECT_DOUBLE_EQ(est.per_class[0]->one_minus_sum, 1.0 - 1.0 / 3.0 - 0.5);
    EXPECT_DOUBLE_EQ(est.per_class[1]->one_minus_sum, 1.0);
    // Class 1 has no pseudo=0 rows.
    EXPECT_THROW(estimate_contamination(Labels{1, 1}, Labels{1, 0}, Labels{1, 1}).per_class[1], DataError);
    EXPECT_THROW(estimate_contamination(pseudo, truth, Labels{0, 0, 0, 0, 0, 2, 1}), DataError);
}

TEST(McNoise, ExactMeansSatisfyIdentityOnGrid) {
    const auto grid = noise_grid(0.1, 0.9);
    ASSERT_EQ(grid.size(), 100u);
    EXPECT_EQ(grid[1].alpha, 0.0);
    EXPECT_NEAR(grid[1].beta, 0.1, 1e-15);
    EXPECT_NEAR(grid[10].alpha, 0.1, 1e-15);
    const Vector m1 = vec({1.0, 0.0, 3.0});
    const Vector m0 = vec({0.0, 1.0, -2.0});
    const double clean = (m1 - m0).norm();
    for (const auto& p : grid) {
        const auto [a, b] = exact_mixture_means(m1, m0, p);
        const double noisy = (a - b).norm();
        const double expected = std::abs(p.one_minus_sum()) * clean;
        EXPECT_LE(std::abs(noisy - expected), 1e-12 * std::max(expected, clean));
        EXPECT_NEAR(exact_noisy_gap(0.7, 0.2, p), p.one_minus_sum() * 0.5, 1e-15);
    }
}

TEST(McNoise, SampledLemmaTracksOneMinusSum) {
    const auto g = gaussian_clean_groups(vec({1, 0}), vec({0, 1}), 1.0, 20000, 0.5, 3);
    const std::vector<NoiseParams> grid = {{0.0, 0.0}, {0.2, 0.3}, {0.5, 0.5}, {0.7, 0.6}};
    const auto rec = verify_edm_lemma(g.majority, g.minority, grid, 20000, 11, Execution::serial);
    for (const auto& r : rec) {
        EXPECT_NEAR(r.ratio, std::abs(1 - r.alpha - r.beta), 0.05) << r.alpha << "," << r.beta;
    }
    const auto par = verify_edm_lemma(g.majority, g.minority, grid, 20000, 11, Execution::parallel);
    for (std::size_t k = 0; k < rec.size(); ++k) EXPECT_EQ(rec[k].edm_noisy, par[k].edm_noisy);
    EXPECT_THROW(verify_edm_lemma(g.majority, g.majority, grid, 10, 1), DataError);
}

TEST(McNoise, ProportionalityOfGaps) {
    const auto g = gaussian_clean_groups(vec({1, 0}), vec({0, 1}), 1.0, 40000, 0.5, 9);
    NoiseSpec spec;
    spec.alpha = 0.2;
    spec.beta = 0.1;
    spec.per_class = std::array<NoiseParams, 2>{NoiseParams{0.0, 0.0}, NoiseParams{0.3, 0.25}};
    spec.seed = 5;
    const auto r = verify_proportionality(fixed_linear(1.0, -1.0, 0.0), g, spec, 40000);
    ASSERT_TRUE(r.ratio_dp && r.ratio_eo);
    EXPECT_NEAR(*r.ratio_dp, 0.7, 0.05);
    EXPECT_NEAR(*r.ratio_eo, 0.45, 0.05);
    EXPECT_GT(r.dp_true, 0.3);

    // A classifier ignoring both features has no gap; the ratio is undefined.
    const auto flat = verify_proportionality(fixed_linear(0.0, 0.0, 1.0), g, spec, 1000);
    EXPECT_FALSE(flat.ratio_dp.has_value());
}

TEST(McNoise, CleanGroupsAreDeterministic) {
    const auto a = gaussian_clean_groups(vec({1, 2}), vec({3, 4}), 2.0, 500, 0.3, 1);
    const auto b = gaussian_clean_groups(vec({1, 2}), vec({3, 4}), 2.0, 500, 0.3, 1);
    EXPECT_EQ(a.majority, b.majority);
    EXPECT_EQ(a.minority_targets, b.minority_targets);
    EXPECT_THROW(gaussian_clean_groups(vec({1}), vec({3, 4}), 1.0, 5, 0.5, 1), ConfigError);
    EXPECT_THROW(gaussian_clean_groups(vec({1}), vec({3}), 0.0, 5, 0.5, 1), ConfigError);
}

TEST(McNoise, SweepParallelEqualsSerialAndCsvShape) {
    const auto g = gaussian_clean_groups(vec({1, 0}), vec({0, 1}), 1.0, 2000, 0.5, 2);
    const auto grid = noise_grid(0.25, 0.75);
    const auto clf = fixed_linear(1.0, -1.0, 0.0);
    const auto s = mc_sweep(g, &clf, grid, 3000, 4, Execution::serial);
    const auto p = mc_sweep(g, &clf, grid, 3000, 4, Execution::parallel);
    EXPECT_EQ(sweep_to_csv(s), sweep_to_csv(p));
    ASSERT_EQ(s.size(), 16u);

    const auto csv = sweep_to_csv(mc_sweep(g, nullptr, grid, 100, 4), "hdr");
    EXPECT_EQ(csv.rfind("# hdr\nalpha,beta,one_minus_sum,edm_true,edm_noisy,ratio,", 0), 0u);
    const auto second = csv.find('\n', csv.find('\n', csv.find('\n') + 1) + 1);
    const auto line = csv.substr(csv.find('\n', csv.find('\n') + 1) + 1, second);
    EXPECT_NE(line.find(",,,,,"), std::string::npos);
}
