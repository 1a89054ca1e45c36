#pragma once

#include <array>
#include <optional>
#include <string>

#include <json.hpp>

#include "antigone/dataset.hpp"
#include "antigone/learner.hpp"
#include "antigone/types.hpp"

namespace antigone {

/// Subgroup cells are indexed 2 * y + a throughout.
constexpr std::size_t subgroup_index(Label y, Label a) { return 2u * y + a; }
std::string subgroup_name(std::size_t index);  // "y1_a0"

/// Per-(y, a) counts of a prediction vector.
struct SubgroupTable {
    std::array<std::size_t, 4> count{};
    std::array<std::size_t, 4> correct{};
    std::array<std::size_t, 4> predicted_positive{};
};

SubgroupTable tabulate(const Labels& predictions, const Labels& targets, const Labels& sensitive);

/// P[yhat=1 | a=1] - P[yhat=1 | a=0]. Throws DataError for an empty group.
double signed_dp_gap(const Labels& predictions, const Labels& sensitive);
double dp_gap(const Labels& predictions, const Labels& sensitive);

/// TPR(a=1) - TPR(a=0) over rows with y = 1.
double signed_eo_gap(const Labels& predictions, const Labels& targets, const Labels& sensitive);
double eo_gap(const Labels& predictions, const Labels& targets, const Labels& sensitive);

struct WorstGroup {
    double accuracy = 0.0;
    Label y = 0;
    Label a = 0;
};

/// Minimum subgroup accuracy; ties resolve to the lowest subgroup index.
/// Throws DataError naming the first empty subgroup.
WorstGroup worst_group(const Labels& predictions, const Labels& targets, const Labels& sensitive);
double wga(const Labels& predictions, const Labels& targets, const Labels& sensitive);

enum class SensitiveSource { ground_truth, pseudo };
std::string to_string(SensitiveSource source);
SensitiveSource sensitive_source_from_string(const std::string& name);

struct FairnessReport {
    double avg_accuracy = 0.0;
    double dp_gap = 0.0;
    double eo_gap = 0.0;
    double wga = 0.0;
    double signed_dp_gap = 0.0;
    double signed_eo_gap = 0.0;
    std::array<double, 4> subgroup_accuracy{};
    std::array<std::size_t, 4> subgroup_counts{};
    SensitiveSource source = SensitiveSource::ground_truth;

    bool operator==(const FairnessReport&) const = default;
};

/// All metrics from one prediction vector. Every subgroup must be present.
FairnessReport report_from_predictions(const Labels& predictions, const Labels& targets,
                                       const Labels& sensitive, SensitiveSource source);
/// Predicts once and assembles the report against `data`'s sensitive column.
FairnessReport full_report(const ModelParams& model, const TabularDataset& data, SensitiveSource source);

/// Report keys: avg_accuracy, dp_gap, eo_gap, wga, dp_gap_signed,
/// eo_gap_signed, subgroup_accuracy.{y0_a0..y1_a1},
/// subgroup_counts.{y0_a0..y1_a1}, sensitive_source.
nlohmann::json to_json(const FairnessReport& report);
FairnessReport fairness_report_from_json(const nlohmann::json& j);

struct SubgroupQuality {
    std::optional<double> precision;
    std::optional<double> recall;
    double f1 = 0.0;
};

struct PseudoLabelQuality {
    std::array<SubgroupQuality, 4> subgroup{};
    double accuracy = 0.0;
    /// Accuracy restricted to y = 0 and y = 1; absent when the class is.
    std::array<std::optional<double>, 2> accuracy_per_class{};
};

/// Scores pseudo sensitive labels against ground truth, treating each
/// (y, a) cell as a retrieval class within its target class.
PseudoLabelQuality pseudo_label_quality(const Labels& pseudo, const Labels& truth, const Labels& targets);
nlohmann::json to_json(const PseudoLabelQuality& quality);

}  // namespace antigone
