#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "antigone/dataset.hpp"
#include "antigone/learner.hpp"
#include "antigone/types.hpp"

namespace antigone {

/// a_i = 1 iff the model classifies row i correctly.
Labels pseudo_label(const ModelParams& model, const TabularDataset& validation);
Labels pseudo_label_from_predictions(const Labels& predictions, const Labels& targets);

/// ||mean(correct_rows) - mean(incorrect_rows)||_2. Throws DataError if
/// either set is empty.
double edm(const Matrix& correct_rows, const Matrix& incorrect_rows);

/// EDM between rows of `features` labelled 1 and labelled 0, restricted to
/// `positions`. Empty optional when either side is empty.
std::optional<double> edm_by_label(const Matrix& features, std::span<const std::size_t> positions,
                                   const Labels& labels);

/// One trained checkpoint offered as a labeller. Candidates are ordered by
/// grid position, then epoch; ties in EDM resolve to the earlier one.
struct LabellerCandidate {
    std::size_t grid_index = 0;
    ModelParams model;

    int epoch() const { return model.trained_epochs; }
};

/// Expands per-grid-point checkpoint lists into candidates in grid order.
std::vector<LabellerCandidate> enumerate_candidates(const std::vector<std::vector<ModelParams>>& runs);

struct CandidateScore {
    std::size_t grid_index = 0;
    int epoch = 0;
    /// Per target class; absent when the correct or incorrect set is empty.
    std::array<std::optional<double>, 2> edm{};
};

/// EDM of every candidate for both target classes. The parallel path
/// distributes candidates over OpenMP threads; output is identical to the
/// serial path.
std::vector<CandidateScore> score_candidates(const std::vector<LabellerCandidate>& candidates,
                                             const TabularDataset& validation,
                                             Execution execution = Execution::parallel);

struct LabellerChoice {
    std::size_t candidate = 0;  // position in the candidate list
    std::size_t grid_index = 0;
    int epoch = 0;
    HyperParams hp;
    double edm = 0.0;
};

struct PseudoLabelledValidation {
    std::vector<std::int64_t> row_ids;
    Labels pseudo;
    /// Indexed by target class.
    std::array<LabellerChoice, 2> winners{};

    /// `validation` with its sensitive column replaced by the pseudo labels.
    TabularDataset apply_to(const TabularDataset& validation) const;
};

/// Argmax-EDM labeller per target class, merged into one pseudo labelling.
/// Throws SelectionError when every candidate is skipped for a class.
PseudoLabelledValidation select_labeller(const std::vector<LabellerCandidate>& candidates,
                                         const TabularDataset& validation,
                                         Execution execution = Execution::parallel);

/// Reduction step of select_labeller, exposed for testing.
std::array<std::size_t, 2> argmax_edm(const std::vector<CandidateScore>& scores);

/// Baseline without EDM: the final-epoch checkpoint of the grid point with
/// the best validation accuracy labels both classes.
PseudoLabelledValidation select_by_accuracy(const std::vector<LabellerCandidate>& candidates,
                                            const TabularDataset& validation);

nlohmann::json sidecar_json(const PseudoLabelledValidation& plv);
/// Writes the pseudo-labelled validation CSV and its JSON sidecar.
void export_pseudo_labelled(const std::filesystem::path& csv_path, const std::filesystem::path& sidecar_path,
                            const PseudoLabelledValidation& plv, const TabularDataset& validation,
                            const std::string& header_comment = {},
                            const nlohmann::json& extra_sidecar = {});

}  // namespace antigone
