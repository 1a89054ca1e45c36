#include "antigone/labeller.hpp"

#include <fstream>

#include "antigone/error.hpp"
#include "parallel.hpp"

namespace antigone {

Labels pseudo_label_from_predictions(const Labels& predictions, const Labels& targets) {
    if (predictions.size() != targets.size()) throw DataError("pseudo_label: length mismatch");
    Labels a(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) a[i] = predictions[i] == targets[i] ? 1 : 0;
    return a;
}

Labels pseudo_label(const ModelParams& model, const TabularDataset& validation) {
    return pseudo_label_from_predictions(predict(model, validation), validation.targets());
}

double edm(const Matrix& correct_rows, const Matrix& incorrect_rows) {
    if (correct_rows.rows() == 0) throw DataError("edm: correct set is empty");
    if (incorrect_rows.rows() == 0) throw DataError("edm: incorrect set is empty");
    if (correct_rows.cols() != incorrect_rows.cols()) throw DataError("edm: dimension mismatch");
    const Vector diff = correct_rows.colwise().mean().transpose() - incorrect_rows.colwise().mean().transpose();
    return diff.norm();
}

std::optional<double> edm_by_label(const Matrix& features, std::span<const std::size_t> positions,
                                   const Labels& labels) {
    if (labels.size() != static_cast<std::size_t>(features.rows())) {
        throw DataError("edm: label count does not match rows");
    }
    Vector sum1 = Vector::Zero(features.cols());
    Vector sum0 = Vector::Zero(features.cols());
    std::size_t n1 = 0;
    std::size_t n0 = 0;
    for (auto p : positions) {
        const auto row = features.row(static_cast<Eigen::Index>(p)).transpose();
        if (labels[p]) {
            sum1 += row;
            ++n1;
        } else {
            sum0 += row;
            ++n0;
        }
    }
    if (n1 == 0 || n0 == 0) return std::nullopt;
    return (sum1 / static_cast<double>(n1) - sum0 / static_cast<double>(n0)).norm();
}

std::vector<LabellerCandidate> enumerate_candidates(const std::vector<std::vector<ModelParams>>& runs) {
    std::vector<LabellerCandidate> out;
    for (std::size_t g = 0; g < runs.size(); ++g) {
        for (const auto& m : runs[g]) out.push_back({g, m});
    }
    return out;
}

namespace {

std::array<std::vector<std::size_t>, 2> class_positions(const TabularDataset& data) {
    std::array<std::vector<std::size_t>, 2> pos;
    for (std::size_t i = 0; i < data.size(); ++i) pos[data.targets()[i]].push_back(i);
    return pos;
}

CandidateScore score_one(const LabellerCandidate& c, const TabularDataset& validation,
                         const std::array<std::vector<std::size_t>, 2>& by_class) {
    const auto labels = pseudo_label(c.model, validation);
    CandidateScore s;
    s.grid_index = c.grid_index;
    s.epoch = c.epoch();
    for (std::size_t cls = 0; cls < 2; ++cls) {
        s.edm[cls] = edm_by_label(validation.features(), by_class[cls], labels);
    }
    return s;
}

bool earlier(const CandidateScore& a, const CandidateScore& b) {
    if (a.grid_index != b.grid_index) return a.grid_index < b.grid_index;
    return a.epoch < b.epoch;
}

}  // namespace

std::vector<CandidateScore> score_candidates(const std::vector<LabellerCandidate>& candidates,
                                             const TabularDataset& validation, Execution execution) {
    const auto by_class = class_positions(validation);
    std::vector<CandidateScore> scores(candidates.size());
    detail::parallel_for(candidates.size(), execution, [&](std::size_t i) {
        scores[i] = score_one(candidates[i], validation, by_class);
    });
    return scores;
}

std::array<std::size_t, 2> argmax_edm(const std::vector<CandidateScore>& scores) {
    std::array<std::size_t, 2> best{};
    for (std::size_t cls = 0; cls < 2; ++cls) {
        std::optional<std::size_t> winner;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const auto& v = scores[i].edm[cls];
            if (!v) continue;
            if (!winner) {
                winner = i;
                continue;
            }
            const auto& w = scores[*winner];
            if (*v > *w.edm[cls] || (*v == *w.edm[cls] && earlier(scores[i], w))) winner = i;
        }
        if (!winner) {
            throw SelectionError("no labeller candidate has both correct and incorrect rows for target class " +
                                     std::to_string(cls),
                                 static_cast<int>(cls));
        }
        best[cls] = *winner;
    }
    return best;
}

namespace {

PseudoLabelledValidation merge(const std::vector<LabellerCandidate>& candidates,
                               const TabularDataset& validation, std::array<std::size_t, 2> chosen,
                               std::array<double, 2> scores) {
    PseudoLabelledValidation plv;
    plv.row_ids = validation.row_ids();
    plv.pseudo.assign(validation.size(), 0);
    std::array<Labels, 2> labels;
    for (std::size_t cls = 0; cls < 2; ++cls) {
        const auto& c = candidates[chosen[cls]];
        labels[cls] = pseudo_label(c.model, validation);
        plv.winners[cls] = {chosen[cls], c.grid_index, c.epoch(), c.model.source, scores[cls]};
    }
    for (std::size_t i = 0; i < validation.size(); ++i) {
        plv.pseudo[i] = labels[validation.targets()[i]][i];
    }
    return plv;
}

}  // namespace

PseudoLabelledValidation select_labeller(const std::vector<LabellerCandidate>& candidates,
                                         const TabularDataset& validation, Execution execution) {
    if (candidates.empty()) throw ConfigError("select_labeller: no candidates");
    const auto by_class = class_positions(validation);
    for (std::size_t cls = 0; cls < 2; ++cls) {
        if (by_class[cls].empty()) {
            throw DataError("select_labeller: validation has no rows of target class " + std::to_string(cls));
        }
    }
    const auto scores = score_candidates(candidates, validation, execution);
    const auto best = argmax_edm(scores);
    return merge(candidates, validation, best, {*scores[best[0]].edm[0], *scores[best[1]].edm[1]});
}

PseudoLabelledValidation select_by_accuracy(const std::vector<LabellerCandidate>& candidates,
                                            const TabularDataset& validation) {
    if (candidates.empty()) throw ConfigError("select_by_accuracy: no candidates");
    // Final epoch of each grid point.
    std::vector<std::size_t> finals;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (i + 1 == candidates.size() || candidates[i + 1].grid_index != candidates[i].grid_index) {
            finals.push_back(i);
        }
    }
    std::size_t best = finals.front();
    double best_acc = -1.0;
    for (auto i : finals) {
        const double acc = accuracy(predict(candidates[i].model, validation), validation.targets());
        if (acc > best_acc) {
            best_acc = acc;
            best = i;
        }
    }
    const auto labels = pseudo_label(candidates[best].model, validation);
    const auto by_class = class_positions(validation);
    std::array<double, 2> scores{};
    for (std::size_t cls = 0; cls < 2; ++cls) {
        scores[cls] = edm_by_label(validation.features(), by_class[cls], labels).value_or(0.0);
    }
    return merge(candidates, validation, {best, best}, scores);
}

TabularDataset PseudoLabelledValidation::apply_to(const TabularDataset& validation) const {
    if (validation.row_ids() != row_ids) {
        throw DataError("pseudo labels were produced for a different validation set");
    }
    return validation.with_sensitive(pseudo);
}

nlohmann::json sidecar_json(const PseudoLabelledValidation& plv) {
    nlohmann::json winners = nlohmann::json::object();
    for (std::size_t cls = 0; cls < 2; ++cls) {
        const auto& w = plv.winners[cls];
        winners["y" + std::to_string(cls)] = {{"grid_index", w.grid_index},
                                              {"epoch", w.epoch},
                                              {"hparams", to_json(w.hp)},
                                              {"edm", w.edm}};
    }
    return {{"gamma_star", winners}, {"rows", plv.row_ids.size()}};
}

void export_pseudo_labelled(const std::filesystem::path& csv_path, const std::filesystem::path& sidecar_path,
                            const PseudoLabelledValidation& plv, const TabularDataset& validation,
                            const std::string& header_comment, const nlohmann::json& extra_sidecar) {
    write_dataset_csv(csv_path, plv.apply_to(validation), header_comment);
    auto j = sidecar_json(plv);
    if (extra_sidecar.is_object()) {
        for (auto it = extra_sidecar.begin(); it != extra_sidecar.end(); ++it) j[it.key()] = it.value();
    }
    std::ofstream out(sidecar_path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + sidecar_path.string() + "'");
    out << j.dump(2) << '\n';
}

}  // namespace antigone
