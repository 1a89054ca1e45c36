#include "antigone/mc_noise.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "antigone/error.hpp"
#include "antigone/fairness.hpp"
#include "csv.hpp"
#include "parallel.hpp"

namespace antigone {

namespace {

constexpr double kRatioFloor = 1e-6;
constexpr double kEdmFloor = 1e-9;

void check_rate(double v, const char* name) {
    if (!(v >= 0.0 && v < 1.0)) throw ConfigError(std::string("noise: ") + name + " must lie in [0, 1)");
}

std::optional<double> safe_ratio(double num, double den) {
    if (std::abs(den) <= kRatioFloor) return std::nullopt;
    return num / den;
}

Vector column_mean(const Matrix& m) { return m.colwise().mean().transpose(); }

/// Draws `n` rows: from `other` with probability p, else from `own`.
void draw(const Matrix& own, const Matrix& other, double p, std::size_t n, std::mt19937_64& rng,
          Matrix& out, Labels& from_own, std::vector<std::size_t>& source) {
    std::bernoulli_distribution contaminated(p);
    std::uniform_int_distribution<std::size_t> pick_own(0, static_cast<std::size_t>(own.rows()) - 1);
    std::uniform_int_distribution<std::size_t> pick_other(0, static_cast<std::size_t>(other.rows()) - 1);
    out.resize(static_cast<Eigen::Index>(n), own.cols());
    from_own.resize(n);
    source.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool swap = contaminated(rng);
        const auto r = swap ? pick_other(rng) : pick_own(rng);
        out.row(static_cast<Eigen::Index>(i)) = (swap ? other : own).row(static_cast<Eigen::Index>(r));
        from_own[i] = swap ? 0 : 1;
        source[i] = r;
    }
}

}  // namespace

void NoiseSpec::validate() const {
    check_rate(alpha, "alpha");
    check_rate(beta, "beta");
    if (per_class) {
        for (const auto& p : *per_class) {
            check_rate(p.alpha, "alpha_y");
            check_rate(p.beta, "beta_y");
        }
    }
}

NoiseParams NoiseSpec::for_class(Label y) const {
    if (per_class) return (*per_class)[y];
    return global();
}

NoisyGroups mix_groups(const Matrix& majority, const Matrix& minority, const NoiseSpec& spec,
                       std::pair<std::size_t, std::size_t> n_out) {
    if (majority.rows() == 0 || minority.rows() == 0) throw DataError("mix_groups: empty source group");
    if (majority.cols() != minority.cols()) throw DataError("mix_groups: dimension mismatch");
    if (n_out.first < 1 || n_out.second < 1) throw ConfigError("mix_groups: output sizes must be >= 1");
    if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0) || !(spec.beta >= 0.0 && spec.beta <= 1.0)) {
        throw ConfigError("mix_groups: alpha and beta must lie in [0, 1]");
    }
    std::mt19937_64 rng(spec.seed);
    NoisyGroups g;
    draw(majority, minority, spec.alpha, n_out.first, rng, g.noisy_majority, g.majority_from_majority,
         g.majority_source);
    Labels minority_from_own;
    draw(minority, majority, spec.beta, n_out.second, rng, g.noisy_minority, minority_from_own,
         g.minority_source);
    g.minority_from_majority.resize(minority_from_own.size());
    for (std::size_t i = 0; i < minority_from_own.size(); ++i) {
        g.minority_from_majority[i] = minority_from_own[i] ? 0 : 1;
    }
    return g;
}

ContaminationEstimate estimate_contamination(const Labels& pseudo, const Labels& truth, const Labels& targets) {
    if (pseudo.size() != truth.size() || pseudo.size() != targets.size()) {
        throw DataError("estimate_contamination: input lengths differ");
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] > 1 || pseudo[i] > 1 || truth[i] > 1) {
            throw DataError("estimate_contamination: labels must be 0 or 1");
        }
    }
    std::array<std::size_t, 2> rows{};
    std::array<std::size_t, 2> labelled_major{};
    std::array<std::size_t, 2> major_but_minority{};
    std::array<std::size_t, 2> labelled_minor{};
    std::array<std::size_t, 2> minor_but_majority{};
    for (std::size_t i = 0; i < pseudo.size(); ++i) {
        const auto y = targets[i];
        ++rows[y];
        if (pseudo[i] == 1) {
            ++labelled_major[y];
            major_but_minority[y] += truth[i] == 0;
        } else {
            ++labelled_minor[y];
            minor_but_majority[y] += truth[i] == 1;
        }
    }
    ContaminationEstimate est;
    for (std::size_t c = 0; c < 2; ++c) {
        if (rows[c] == 0) continue;
        if (labelled_major[c] == 0 || labelled_minor[c] == 0) {
            throw DataError("estimate_contamination: empty pseudo group in target class " + std::to_string(c));
        }
        ClassContamination cc;
        cc.alpha_hat = static_cast<double>(major_but_minority[c]) / static_cast<double>(labelled_major[c]);
        cc.beta_hat = static_cast<double>(minor_but_majority[c]) / static_cast<double>(labelled_minor[c]);
        cc.one_minus_sum = 1.0 - cc.alpha_hat - cc.beta_hat;
        est.per_class[c] = cc;
    }
    return est;
}

void CleanGroups::validate() const {
    if (majority.rows() == 0 || minority.rows() == 0) throw DataError("clean groups: empty group");
    if (majority.cols() != minority.cols()) throw DataError("clean groups: dimension mismatch");
    if (static_cast<std::size_t>(majority.rows()) != majority_targets.size() ||
        static_cast<std::size_t>(minority.rows()) != minority_targets.size()) {
        throw DataError("clean groups: target count does not match rows");
    }
}

CleanGroups gaussian_clean_groups(const Vector& majority_mean, const Vector& minority_mean, double variance,
                                  std::size_t rows_per_group, double positive_rate, std::uint64_t seed) {
    if (majority_mean.size() != minority_mean.size() || majority_mean.size() == 0) {
        throw ConfigError("clean groups: means must share a positive dimension");
    }
    if (!(variance > 0.0)) throw ConfigError("clean groups: variance must be > 0");
    if (rows_per_group < 1) throw ConfigError("clean groups: rows_per_group must be >= 1");
    if (!(positive_rate >= 0.0 && positive_rate <= 1.0)) {
        throw ConfigError("clean groups: positive_rate must lie in [0, 1]");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution positive(positive_rate);
    const double sd = std::sqrt(variance);
    auto sample = [&](const Vector& mean, Matrix& x, Labels& y) {
        x.resize(static_cast<Eigen::Index>(rows_per_group), mean.size());
        y.resize(rows_per_group);
        for (std::size_t i = 0; i < rows_per_group; ++i) {
            for (Eigen::Index j = 0; j < mean.size(); ++j) {
                x(static_cast<Eigen::Index>(i), j) = mean(j) + sd * normal(rng);
            }
            y[i] = positive(rng) ? 1 : 0;
        }
    };
    CleanGroups g;
    sample(majority_mean, g.majority, g.majority_targets);
    sample(minority_mean, g.minority, g.minority_targets);
    return g;
}

namespace {

Matrix rows_with_target(const Matrix& x, const Labels& y, Label c) {
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == c) keep.push_back(static_cast<Eigen::Index>(i));
    }
    Matrix out(static_cast<Eigen::Index>(keep.size()), x.cols());
    for (std::size_t k = 0; k < keep.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = x.row(keep[k]);
    return out;
}

/// Signed gap (majority rate - minority rate) under clean and noisy grouping.
std::pair<double, double> gap_pair(const ModelParams& classifier, const Matrix& majority, const Matrix& minority,
                                   NoiseParams p, std::size_t n, std::uint64_t seed) {
    const Labels pred_major = predict(classifier, majority);
    const Labels pred_minor = predict(classifier, minority);

    Labels clean_pred(pred_major);
    clean_pred.insert(clean_pred.end(), pred_minor.begin(), pred_minor.end());
    Labels clean_group(pred_major.size(), 1);
    clean_group.insert(clean_group.end(), pred_minor.size(), 0);
    const double clean = signed_dp_gap(clean_pred, clean_group);

    NoiseSpec spec;
    spec.alpha = p.alpha;
    spec.beta = p.beta;
    spec.seed = seed;
    const auto g = mix_groups(majority, minority, spec, {n, n});
    Labels noisy_pred;
    Labels noisy_group;
    noisy_pred.reserve(2 * n);
    noisy_group.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = g.majority_source[i];
        noisy_pred.push_back(g.majority_from_majority[i] ? pred_major[r] : pred_minor[r]);
        noisy_group.push_back(1);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = g.minority_source[i];
        noisy_pred.push_back(g.minority_from_majority[i] ? pred_major[r] : pred_minor[r]);
        noisy_group.push_back(0);
    }
    return {clean, signed_dp_gap(noisy_pred, noisy_group)};
}

}  // namespace

ProportionalityRecord verify_proportionality(const ModelParams& classifier, const CleanGroups& groups,
                                             const NoiseSpec& spec, std::size_t n_samples) {
    groups.validate();
    spec.validate();
    if (n_samples < 1) throw ConfigError("verify_proportionality: n_samples must be >= 1");
    ProportionalityRecord rec;
    std::tie(rec.dp_true, rec.dp_noisy) =
        gap_pair(classifier, groups.majority, groups.minority, spec.global(), n_samples, spec.seed);

    // Among y = 1 rows the positive-prediction rate is the TPR, so the EO gap
    // is the DP gap of the positive class.
    const Matrix pos_major = rows_with_target(groups.majority, groups.majority_targets, 1);
    const Matrix pos_minor = rows_with_target(groups.minority, groups.minority_targets, 1);
    if (pos_major.rows() == 0 || pos_minor.rows() == 0) {
        throw DataError("verify_proportionality: a group has no y=1 rows");
    }
    std::tie(rec.eo_true, rec.eo_noisy) =
        gap_pair(classifier, pos_major, pos_minor, spec.for_class(1), n_samples, spec.seed + 1);
    rec.ratio_dp = safe_ratio(rec.dp_noisy, rec.dp_true);
    rec.ratio_eo = safe_ratio(rec.eo_noisy, rec.eo_true);
    return rec;
}

std::vector<EdmLemmaRecord> verify_edm_lemma(const Matrix& majority, const Matrix& minority,
                                             const std::vector<NoiseParams>& grid, std::size_t n_samples,
                                             std::uint64_t seed, Execution execution) {
    if (majority.rows() == 0 || minority.rows() == 0) throw DataError("verify_edm_lemma: empty group");
    const double edm_true = (column_mean(majority) - column_mean(minority)).norm();
    if (edm_true < kEdmFloor) throw DataError("verify_edm_lemma: clean group means coincide");
    std::vector<EdmLemmaRecord> out(grid.size());
    detail::parallel_for(grid.size(), execution, [&](std::size_t k) {
        NoiseSpec spec;
        spec.alpha = grid[k].alpha;
        spec.beta = grid[k].beta;
        spec.seed = seed + k;
        const auto g = mix_groups(majority, minority, spec, {n_samples, n_samples});
        const double noisy = (column_mean(g.noisy_majority) - column_mean(g.noisy_minority)).norm();
        out[k] = {grid[k].alpha, grid[k].beta, edm_true, noisy, noisy / edm_true};
    });
    return out;
}

std::pair<Vector, Vector> exact_mixture_means(const Vector& majority_mean, const Vector& minority_mean,
                                              NoiseParams p) {
    if (majority_mean.size() != minority_mean.size()) throw DataError("exact_mixture_means: dimension mismatch");
    return {(1.0 - p.alpha) * majority_mean + p.alpha * minority_mean,
            p.beta * majority_mean + (1.0 - p.beta) * minority_mean};
}

double exact_noisy_gap(double majority_rate, double minority_rate, NoiseParams p) {
    const double noisy_major = (1.0 - p.alpha) * majority_rate + p.alpha * minority_rate;
    const double noisy_minor = p.beta * majority_rate + (1.0 - p.beta) * minority_rate;
    return noisy_major - noisy_minor;
}

std::vector<NoiseParams> noise_grid(double step, double max) {
    if (!(step > 0.0)) throw ConfigError("noise grid step must be > 0");
    const auto count = static_cast<int>(std::floor(max / step + 1e-9)) + 1;
    std::vector<NoiseParams> grid;
    for (int i = 0; i < count; ++i) {
        for (int j = 0; j < count; ++j) grid.push_back({i * step, j * step});
    }
    return grid;
}

std::vector<SweepRecord> mc_sweep(const CleanGroups& groups, const ModelParams* classifier,
                                  const std::vector<NoiseParams>& grid, std::size_t n_samples,
                                  std::uint64_t seed, Execution execution) {
    groups.validate();
    const auto edm = verify_edm_lemma(groups.majority, groups.minority, grid, n_samples, seed, execution);
    std::vector<SweepRecord> out(grid.size());
    detail::parallel_for(grid.size(), execution, [&](std::size_t k) {
        out[k].noise = grid[k];
        out[k].edm = edm[k];
        if (classifier) {
            NoiseSpec spec;
            spec.alpha = grid[k].alpha;
            spec.beta = grid[k].beta;
            spec.seed = seed + k;
            out[k].fairness = verify_proportionality(*classifier, groups, spec, n_samples);
        }
    });
    return out;
}

std::string sweep_to_csv(const std::vector<SweepRecord>& records, const std::string& header_comment) {
    std::ostringstream out;
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "alpha,beta,one_minus_sum,edm_true,edm_noisy,ratio,dp_true,dp_noisy,ratio_dp,eo_true,eo_noisy,ratio_eo\n";
    auto num = [](double v) { return detail::format_double(v); };
    auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
    for (const auto& r : records) {
        out << num(r.noise.alpha) << ',' << num(r.noise.beta) << ',' << num(r.noise.one_minus_sum()) << ','
            << num(r.edm.edm_true) << ',' << num(r.edm.edm_noisy) << ',' << num(r.edm.ratio) << ',';
        if (r.fairness) {
            const auto& f = *r.fairness;
            out << num(f.dp_true) << ',' << num(f.dp_noisy) << ',' << opt(f.ratio_dp) << ',' << num(f.eo_true)
                << ',' << num(f.eo_noisy) << ',' << opt(f.ratio_eo);
        } else {
            out << ",,,,,";
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace antigone
