#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "antigone/dataset.hpp"
#include "antigone/fairness.hpp"
#include "antigone/labeller.hpp"
#include "antigone/learner.hpp"

namespace antigone {

enum class FairnessObjective { dp_gap, eo_gap, wga };
std::string to_string(FairnessObjective objective);
FairnessObjective objective_from_string(const std::string& name);

/// Value of the objective in `report`, and whether `a` beats `b` under it
/// (smaller gaps, larger worst-group accuracy).
double objective_value(const FairnessReport& report, FairnessObjective objective);
bool objective_better(double a, double b, FairnessObjective objective);

/// Half-open accuracy interval [lo, hi).
struct AccuracyBin {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double accuracy) const { return accuracy >= lo && accuracy < hi; }
    bool operator==(const AccuracyBin&) const = default;
};

/// Index of the bin containing `accuracy`, if any.
std::optional<std::size_t> bin_of(const std::vector<AccuracyBin>& bins, double accuracy);

struct JttConfig {
    std::vector<HyperParams> stage1;
    std::vector<int> early_stop;  // T values
    std::vector<int> lambdas;
    std::vector<HyperParams> stage2;
    FairnessObjective objective = FairnessObjective::wga;
    std::vector<AccuracyBin> bins;
    SensitiveSource sensitive_source = SensitiveSource::pseudo;

    /// Grids nonempty, bins non-overlapping with lo < hi, every T within
    /// every stage-1 epoch budget, lambdas >= 1.
    void validate() const;
};

/// Row ids the model misclassifies.
std::vector<std::int64_t> misclassified_ids(const ModelParams& model, const TabularDataset& data);

struct JttModel {
    ModelParams model;
    std::vector<std::int64_t> error_ids;
    /// Stage 1 made no training errors, so stage 2 reduces to plain ERM.
    bool plain_erm = false;
};

/// Stage 1: ERM for T epochs, collect training errors. Stage 2: retrain
/// with the errors upsampled lambda times for the full stage-2 budget.
JttModel jtt_train(const TabularDataset& train, const HyperParams& stage1, int early_stop, int lambda,
                   const HyperParams& stage2);

/// Position of one candidate in the tuning grid. ERM candidates have no
/// stage-1 part (stage1_index absent, lambda 1).
struct JttCandidate {
    std::optional<std::size_t> stage1_index;
    int early_stop = 0;
    int lambda = 1;
    std::size_t stage2_index = 0;
    int epoch = 0;

    bool is_erm() const { return !stage1_index.has_value(); }
    bool operator==(const JttCandidate&) const = default;
};

nlohmann::json to_json(const JttCandidate& c);
JttCandidate jtt_candidate_from_json(const nlohmann::json& j);

/// Validation sensitive labels under which candidates are scored.
struct ValidationLabelling {
    SensitiveSource source = SensitiveSource::pseudo;
    Labels sensitive;
};

struct CandidateEvaluation {
    JttCandidate candidate;
    double val_accuracy = 0.0;
    /// One report per labelling, in the order the labellings were given.
    std::vector<FairnessReport> reports;
};

/// Trains every JTT grid point (deduplicating runs that share an error set,
/// lambda and stage-2 point) and scores every stage-2 epoch checkpoint.
/// Output order is grid order regardless of execution.
std::vector<CandidateEvaluation> evaluate_jtt_candidates(const TabularDataset& train,
                                                         const TabularDataset& validation,
                                                         const std::vector<ValidationLabelling>& labellings,
                                                         const JttConfig& config,
                                                         Execution execution = Execution::parallel);

/// Every epoch checkpoint of every grid point, scored.
std::vector<CandidateEvaluation> evaluate_erm_candidates(const TabularDataset& train,
                                                         const TabularDataset& validation,
                                                         const std::vector<ValidationLabelling>& labellings,
                                                         const std::vector<HyperParams>& grid,
                                                         Execution execution = Execution::parallel);

/// Per bin, the evaluation index optimizing the objective under labelling
/// `labelling`; first in grid order on ties.
std::vector<std::optional<std::size_t>> select_per_bin(const std::vector<CandidateEvaluation>& evals,
                                                       const std::vector<AccuracyBin>& bins,
                                                       FairnessObjective objective, std::size_t labelling);

/// Retrains the model a candidate denotes. Deterministic, so it equals the
/// model that was scored.
ModelParams materialize(const TabularDataset& train, const JttCandidate& candidate,
                        const std::vector<HyperParams>& stage1, const std::vector<HyperParams>& stage2);

struct Winner {
    JttCandidate candidate;
    HyperParams stage2_hp;
    std::optional<HyperParams> stage1_hp;
    FairnessReport validation;
    FairnessReport test;
};

struct MethodResult {
    std::string method;  // "antigone_jtt", "ground_truth_jtt", "jtt", "erm"
    SensitiveSource source = SensitiveSource::pseudo;
    /// One slot per accuracy bin; empty when no candidate landed there.
    std::vector<std::optional<Winner>> bins;
};

struct TunerResult {
    FairnessObjective objective = FairnessObjective::wga;
    std::vector<AccuracyBin> bins;
    std::vector<MethodResult> methods;
    /// Plain ERM chosen by validation accuracy alone (no fairness tuning).
    std::optional<Winner> erm_reference;
    std::uint64_t seed = 0;

    const MethodResult& method(const std::string& name) const;
};

/// Bin-constrained JTT search scored with `validation`'s sensitive column,
/// plus the per-bin ERM baseline over the stage-2 grid.
TunerResult grid_search(const TabularDataset& train, const TabularDataset& validation,
                        const TabularDataset& test, const JttConfig& config,
                        Execution execution = Execution::parallel);

/// Per-bin plain ERM under the same selection rule.
TunerResult erm_sweep(const TabularDataset& train, const TabularDataset& validation, const TabularDataset& test,
                      const std::vector<HyperParams>& grid, const std::vector<AccuracyBin>& bins,
                      FairnessObjective objective, Execution execution = Execution::parallel);

/// The comparison table: JTT tuned with pseudo labels, JTT tuned with
/// ground truth, and per-bin ERM (ground truth), from one shared pass over
/// the candidates. `validation` must carry ground-truth sensitive labels.
TunerResult tune_table(const TabularDataset& train, const TabularDataset& validation,
                       const PseudoLabelledValidation& pseudo, const TabularDataset& test,
                       const JttConfig& config, Execution execution = Execution::parallel);

nlohmann::json to_json(const TunerResult& result);
TunerResult tuner_result_from_json(const nlohmann::json& j);

/// Fixed-width table, one row per (bin, method) with
/// (avg accuracy %, objective %) on test data.
std::string render_table(const TunerResult& result);

/// Mean and standard deviation across seeds, per method and bin, of test
/// average accuracy and test objective.
struct SeedSummary {
    std::string method;
    std::size_t bin = 0;
    std::size_t runs = 0;
    double accuracy_mean = 0.0;
    double accuracy_std = 0.0;
    double objective_mean = 0.0;
    double objective_std = 0.0;
};

std::vector<SeedSummary> summarize_seeds(const std::vector<TunerResult>& runs);
nlohmann::json to_json(const std::vector<SeedSummary>& summary);

}  // namespace antigone
