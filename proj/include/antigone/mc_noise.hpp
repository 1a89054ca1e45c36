#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "antigone/learner.hpp"
#include "antigone/types.hpp"

namespace antigone {

/// Contamination rates of the ideal mutually-contaminated noise model:
/// alpha = share of the noisy majority drawn from the true minority,
/// beta = share of the noisy minority drawn from the true majority.
struct NoiseParams {
    double alpha = 0.0;
    double beta = 0.0;

    double one_minus_sum() const { return 1.0 - alpha - beta; }
};

struct NoiseSpec {
    double alpha = 0.0;
    double beta = 0.0;
    /// Target-class dependent rates (alpha_y, beta_y), indexed by y.
    std::optional<std::array<NoiseParams, 2>> per_class;
    std::uint64_t seed = 0;

    /// Rates must lie in [0, 1).
    void validate() const;
    NoiseParams global() const { return {alpha, beta}; }
    NoiseParams for_class(Label y) const;
};

/// Rows drawn with replacement. `*_from_majority[i]` is 1 when row i was
/// drawn from the true majority; `*_source[i]` is its row in that source.
struct NoisyGroups {
    Matrix noisy_majority;
    Labels majority_from_majority;
    std::vector<std::size_t> majority_source;
    Matrix noisy_minority;
    Labels minority_from_majority;
    std::vector<std::size_t> minority_source;
};

/// Samples n_out.first rows for the noisy majority (each from the true
/// minority with probability alpha) and n_out.second for the noisy minority
/// (each from the true majority with probability beta). Accepts alpha and
/// beta anywhere in [0, 1] so boundary cases can be exercised.
NoisyGroups mix_groups(const Matrix& majority, const Matrix& minority, const NoiseSpec& spec,
                       std::pair<std::size_t, std::size_t> n_out);

struct ClassContamination {
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    double one_minus_sum = 0.0;
};

/// Indexed by target class; a class absent from `targets` has no estimate.
struct ContaminationEstimate {
    std::array<std::optional<ClassContamination>, 2> per_class{};
};

/// alpha_hat = P[truth=0 | pseudo=1, y], beta_hat = P[truth=1 | pseudo=0, y].
/// Throws DataError when a present class has an empty pseudo group.
ContaminationEstimate estimate_contamination(const Labels& pseudo, const Labels& truth, const Labels& targets);

/// True majority (a=1) and minority (a=0) rows with their targets.
struct CleanGroups {
    Matrix majority;
    Labels majority_targets;
    Matrix minority;
    Labels minority_targets;

    void validate() const;
};

/// Isotropic Gaussian groups around the two means; targets are independent
/// Bernoulli(positive_rate) draws.
CleanGroups gaussian_clean_groups(const Vector& majority_mean, const Vector& minority_mean, double variance,
                                  std::size_t rows_per_group, double positive_rate, std::uint64_t seed);

struct ProportionalityRecord {
    double dp_true = 0.0;
    double dp_noisy = 0.0;
    double eo_true = 0.0;
    double eo_noisy = 0.0;
    std::optional<double> ratio_dp;
    std::optional<double> ratio_eo;
};

/// Signed DP and EO gaps of `classifier` measured with clean and with
/// MC-noisy group membership, n_samples rows per noisy group. DP uses the
/// global (alpha, beta); EO, restricted to y = 1, uses (alpha_1, beta_1).
ProportionalityRecord verify_proportionality(const ModelParams& classifier, const CleanGroups& groups,
                                             const NoiseSpec& spec, std::size_t n_samples);

struct EdmLemmaRecord {
    double alpha = 0.0;
    double beta = 0.0;
    double edm_true = 0.0;
    double edm_noisy = 0.0;
    double ratio = 0.0;
};

/// Sampled check of ||mu(noisy maj) - mu(noisy min)|| = |1-a-b| ||mu(maj) - mu(min)||.
/// Cell k uses seed + k. Throws DataError if the clean means coincide.
std::vector<EdmLemmaRecord> verify_edm_lemma(const Matrix& majority, const Matrix& minority,
                                             const std::vector<NoiseParams>& grid, std::size_t n_samples,
                                             std::uint64_t seed, Execution execution = Execution::parallel);

// --- population-exact path ---------------------------------------------------

/// Means of the noisy groups implied by the clean means.
std::pair<Vector, Vector> exact_mixture_means(const Vector& majority_mean, const Vector& minority_mean,
                                              NoiseParams p);
/// Noisy signed gap from clean group-conditional positive rates.
double exact_noisy_gap(double majority_rate, double minority_rate, NoiseParams p);

/// The grid {0, step, ..., max}^2 in row-major (alpha outer) order.
std::vector<NoiseParams> noise_grid(double step, double max);

// --- sweep -------------------------------------------------------------------

struct SweepRecord {
    NoiseParams noise;
    EdmLemmaRecord edm;
    std::optional<ProportionalityRecord> fairness;
};

/// EDM lemma plus, when a classifier is given, the proportionality check for
/// every grid cell. Cells run in parallel; cell k uses seed + k.
std::vector<SweepRecord> mc_sweep(const CleanGroups& groups, const ModelParams* classifier,
                                  const std::vector<NoiseParams>& grid, std::size_t n_samples,
                                  std::uint64_t seed, Execution execution = Execution::parallel);

/// Columns: alpha, beta, one_minus_sum, edm_true, edm_noisy, ratio, dp_true,
/// dp_noisy, ratio_dp, eo_true, eo_noisy, ratio_eo (blank when undefined).
std::string sweep_to_csv(const std::vector<SweepRecord>& records, const std::string& header_comment = {});

}  // namespace antigone
