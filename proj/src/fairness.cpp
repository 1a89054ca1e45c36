#include "antigone/fairness.hpp"

#include <cmath>

#include "antigone/error.hpp"

namespace antigone {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw DataError(std::string(what) + ": input lengths differ");
}

void check_binary(const Labels& v, const char* what) {
    for (auto x : v) {
        if (x > 1) throw DataError(std::string(what) + ": labels must be 0 or 1");
    }
}

double rate(std::size_t num, std::size_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::string subgroup_name(std::size_t index) {
    return "y" + std::to_string(index / 2) + "_a" + std::to_string(index % 2);
}

SubgroupTable tabulate(const Labels& predictions, const Labels& targets, const Labels& sensitive) {
    check_lengths(predictions.size(), targets.size(), "tabulate");
    check_lengths(predictions.size(), sensitive.size(), "tabulate");
    check_binary(targets, "tabulate");
    check_binary(sensitive, "tabulate");
    SubgroupTable t;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto k = subgroup_index(targets[i], sensitive[i]);
        ++t.count[k];
        t.correct[k] += predictions[i] == targets[i];
        t.predicted_positive[k] += predictions[i] == 1;
    }
    return t;
}

double signed_dp_gap(const Labels& predictions, const Labels& sensitive) {
    check_lengths(predictions.size(), sensitive.size(), "dp_gap");
    check_binary(sensitive, "dp_gap");
    std::array<std::size_t, 2> n{};
    std::array<std::size_t, 2> pos{};
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        ++n[sensitive[i]];
        pos[sensitive[i]] += predictions[i] == 1;
    }
    if (n[0] == 0) throw DataError("dp_gap: sensitive group a=0 is empty");
    if (n[1] == 0) throw DataError("dp_gap: sensitive group a=1 is empty");
    return rate(pos[1], n[1]) - rate(pos[0], n[0]);
}

double dp_gap(const Labels& predictions, const Labels& sensitive) {
    return std::abs(signed_dp_gap(predictions, sensitive));
}

double signed_eo_gap(const Labels& predictions, const Labels& targets, const Labels& sensitive) {
    const auto t = tabulate(predictions, targets, sensitive);
    const auto k0 = subgroup_index(1, 0);
    const auto k1 = subgroup_index(1, 1);
    if (t.count[k0] == 0) throw DataError("eo_gap: positive subgroup (y=1, a=0) is empty");
    if (t.count[k1] == 0) throw DataError("eo_gap: positive subgroup (y=1, a=1) is empty");
    return rate(t.predicted_positive[k1], t.count[k1]) - rate(t.predicted_positive[k0], t.count[k0]);
}

double eo_gap(const Labels& predictions, const Labels& targets, const Labels& sensitive) {
    return std::abs(signed_eo_gap(predictions, targets, sensitive));
}

WorstGroup worst_group(const Labels& predictions, const Labels& targets, const Labels& sensitive) {
    const auto t = tabulate(predictions, targets, sensitive);
    WorstGroup worst{2.0, 0, 0};
    for (std::size_t k = 0; k < 4; ++k) {
        if (t.count[k] == 0) {
            throw DataError("wga: subgroup (y=" + std::to_string(k / 2) + ", a=" +
                            std::to_string(k % 2) + ") is empty");
        }
        const double acc = rate(t.correct[k], t.count[k]);
        if (acc < worst.accuracy) {
            worst = {acc, static_cast<Label>(k / 2), static_cast<Label>(k % 2)};
        }
    }
    return worst;
}

double wga(const Labels& predictions, const Labels& targets, const Labels& sensitive) {
    return worst_group(predictions, targets, sensitive).accuracy;
}

std::string to_string(SensitiveSource source) {
    return source == SensitiveSource::ground_truth ? "ground_truth" : "pseudo";
}

SensitiveSource sensitive_source_from_string(const std::string& name) {
    if (name == "ground_truth") return SensitiveSource::ground_truth;
    if (name == "pseudo") return SensitiveSource::pseudo;
    throw ConfigError("unknown sensitive source '" + name + "' (expected ground_truth or pseudo)");
}

FairnessReport report_from_predictions(const Labels& predictions, const Labels& targets,
                                       const Labels& sensitive, SensitiveSource source) {
    const auto t = tabulate(predictions, targets, sensitive);
    FairnessReport r;
    r.source = source;
    std::size_t correct = 0;
    for (std::size_t k = 0; k < 4; ++k) {
        r.subgroup_counts[k] = t.count[k];
        r.subgroup_accuracy[k] = t.count[k] ? rate(t.correct[k], t.count[k]) : 0.0;
        correct += t.correct[k];
    }
    if (targets.empty()) throw DataError("report: empty input");
    r.avg_accuracy = rate(correct, targets.size());
    r.signed_dp_gap = signed_dp_gap(predictions, sensitive);
    r.dp_gap = std::abs(r.signed_dp_gap);
    r.signed_eo_gap = signed_eo_gap(predictions, targets, sensitive);
    r.eo_gap = std::abs(r.signed_eo_gap);
    r.wga = wga(predictions, targets, sensitive);
    return r;
}

FairnessReport full_report(const ModelParams& model, const TabularDataset& data, SensitiveSource source) {
    return report_from_predictions(predict(model, data), data.targets(), data.sensitive_or_throw(), source);
}

nlohmann::json to_json(const FairnessReport& r) {
    nlohmann::json acc = nlohmann::json::object();
    nlohmann::json counts = nlohmann::json::object();
    for (std::size_t k = 0; k < 4; ++k) {
        acc[subgroup_name(k)] = r.subgroup_accuracy[k];
        counts[subgroup_name(k)] = r.subgroup_counts[k];
    }
    return {{"avg_accuracy", r.avg_accuracy},
            {"dp_gap", r.dp_gap},
            {"eo_gap", r.eo_gap},
            {"wga", r.wga},
            {"dp_gap_signed", r.signed_dp_gap},
            {"eo_gap_signed", r.signed_eo_gap},
            {"subgroup_accuracy", acc},
            {"subgroup_counts", counts},
            {"sensitive_source", to_string(r.source)}};
}

FairnessReport fairness_report_from_json(const nlohmann::json& j) {
    try {
        FairnessReport r;
        r.avg_accuracy = j.at("avg_accuracy").get<double>();
        r.dp_gap = j.at("dp_gap").get<double>();
        r.eo_gap = j.at("eo_gap").get<double>();
        r.wga = j.at("wga").get<double>();
        r.signed_dp_gap = j.value("dp_gap_signed", r.dp_gap);
        r.signed_eo_gap = j.value("eo_gap_signed", r.eo_gap);
        for (std::size_t k = 0; k < 4; ++k) {
            r.subgroup_accuracy[k] = j.at("subgroup_accuracy").at(subgroup_name(k)).get<double>();
            r.subgroup_counts[k] = j.at("subgroup_counts").at(subgroup_name(k)).get<std::size_t>();
        }
        r.source = sensitive_source_from_string(j.value("sensitive_source", std::string("ground_truth")));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("fairness report: ") + e.what());
    }
}

PseudoLabelQuality pseudo_label_quality(const Labels& pseudo, const Labels& truth, const Labels& targets) {
    check_lengths(pseudo.size(), truth.size(), "pseudo_label_quality");
    check_lengths(pseudo.size(), targets.size(), "pseudo_label_quality");
    check_binary(pseudo, "pseudo_label_quality");
    check_binary(truth, "pseudo_label_quality");
    check_binary(targets, "pseudo_label_quality");
    std::array<std::size_t, 4> hit{};
    std::array<std::size_t, 4> predicted{};
    std::array<std::size_t, 4> actual{};
    std::array<std::size_t, 2> class_rows{};
    std::array<std::size_t, 2> class_agree{};
    for (std::size_t i = 0; i < pseudo.size(); ++i) {
        const auto y = targets[i];
        ++predicted[subgroup_index(y, pseudo[i])];
        ++actual[subgroup_index(y, truth[i])];
        if (pseudo[i] == truth[i]) {
            ++hit[subgroup_index(y, truth[i])];
            ++class_agree[y];
        }
        ++class_rows[y];
    }
    PseudoLabelQuality q;
    for (std::size_t k = 0; k < 4; ++k) {
        auto& s = q.subgroup[k];
        if (predicted[k]) s.precision = rate(hit[k], predicted[k]);
        if (actual[k]) s.recall = rate(hit[k], actual[k]);
        if (s.precision && s.recall && *s.precision + *s.recall > 0.0) {
            s.f1 = 2.0 * *s.precision * *s.recall / (*s.precision + *s.recall);
        }
    }
    const auto rows = class_rows[0] + class_rows[1];
    q.accuracy = rows ? rate(class_agree[0] + class_agree[1], rows) : 0.0;
    for (std::size_t c = 0; c < 2; ++c) {
        if (class_rows[c]) q.accuracy_per_class[c] = rate(class_agree[c], class_rows[c]);
    }
    return q;
}

nlohmann::json to_json(const PseudoLabelQuality& q) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
    nlohmann::json sub = nlohmann::json::object();
    for (std::size_t k = 0; k < 4; ++k) {
        sub[subgroup_name(k)] = {{"precision", opt(q.subgroup[k].precision)},
                                 {"recall", opt(q.subgroup[k].recall)},
                                 {"f1", q.subgroup[k].f1}};
    }
    return {{"pseudo_label_accuracy", q.accuracy},
            {"pseudo_label_accuracy_y0", opt(q.accuracy_per_class[0])},
            {"pseudo_label_accuracy_y1", opt(q.accuracy_per_class[1])},
            {"subgroups", sub}};
}

}  // namespace antigone
