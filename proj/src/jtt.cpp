#include "antigone/jtt.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

#include "antigone/error.hpp"
#include "parallel.hpp"

namespace antigone {

std::string to_string(FairnessObjective objective) {
    switch (objective) {
        case FairnessObjective::dp_gap: return "dp_gap";
        case FairnessObjective::eo_gap: return "eo_gap";
        case FairnessObjective::wga: return "wga";
    }
    return "wga";
}

FairnessObjective objective_from_string(const std::string& name) {
    if (name == "dp_gap") return FairnessObjective::dp_gap;
    if (name == "eo_gap") return FairnessObjective::eo_gap;
    if (name == "wga") return FairnessObjective::wga;
    throw ConfigError("unknown fairness objective '" + name + "' (expected dp_gap, eo_gap or wga)");
}

double objective_value(const FairnessReport& report, FairnessObjective objective) {
    switch (objective) {
        case FairnessObjective::dp_gap: return report.dp_gap;
        case FairnessObjective::eo_gap: return report.eo_gap;
        case FairnessObjective::wga: return report.wga;
    }
    return report.wga;
}

bool objective_better(double a, double b, FairnessObjective objective) {
    return objective == FairnessObjective::wga ? a > b : a < b;
}

std::optional<std::size_t> bin_of(const std::vector<AccuracyBin>& bins, double accuracy) {
    for (std::size_t b = 0; b < bins.size(); ++b) {
        if (bins[b].contains(accuracy)) return b;
    }
    return std::nullopt;
}

void JttConfig::validate() const {
    if (stage1.empty()) throw ConfigError("jtt.stage1: grid is empty");
    if (stage2.empty()) throw ConfigError("jtt.stage2: grid is empty");
    if (early_stop.empty()) throw ConfigError("jtt.T: grid is empty");
    if (lambdas.empty()) throw ConfigError("jtt.lambda: grid is empty");
    if (bins.empty()) throw ConfigError("jtt.bins: no accuracy bins");
    for (const auto& hp : stage1) hp.validate();
    for (const auto& hp : stage2) hp.validate();
    for (int t : early_stop) {
        if (t < 1) throw ConfigError("jtt.T: early-stop epochs must be >= 1");
        for (std::size_t s = 0; s < stage1.size(); ++s) {
            if (t > stage1[s].epochs) {
                throw ConfigError("jtt.T: T=" + std::to_string(t) + " exceeds the epoch budget of stage1[" +
                                  std::to_string(s) + "]");
            }
        }
    }
    for (int l : lambdas) {
        if (l < 1) throw ConfigError("jtt.lambda: upsampling factors must be >= 1");
    }
    for (std::size_t i = 0; i < bins.size(); ++i) {
        if (!(bins[i].lo < bins[i].hi)) throw ConfigError("jtt.bins[" + std::to_string(i) + "]: lo must be < hi");
        for (std::size_t j = 0; j < i; ++j) {
            if (bins[i].lo < bins[j].hi && bins[j].lo < bins[i].hi) {
                throw ConfigError("jtt.bins: bins " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
            }
        }
    }
}

std::vector<std::int64_t> misclassified_ids(const ModelParams& model, const TabularDataset& data) {
    const auto pred = predict(model, data);
    std::vector<std::int64_t> ids;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (pred[i] != data.targets()[i]) ids.push_back(data.row_ids()[i]);
    }
    return ids;
}

namespace {

std::vector<std::int64_t> stage1_errors(const TabularDataset& train, HyperParams stage1, int early_stop) {
    if (early_stop < 1 || early_stop > stage1.epochs) {
        throw ConfigError("jtt: early-stop epoch T must lie in [1, stage-1 epochs]");
    }
    // Checkpoint T of a longer run equals the final checkpoint of a T-epoch run.
    stage1.epochs = early_stop;
    const auto checkpoints = train_erm(train, stage1);
    return misclassified_ids(checkpoints.back(), train);
}

}  // namespace

JttModel jtt_train(const TabularDataset& train, const HyperParams& stage1, int early_stop, int lambda,
                   const HyperParams& stage2) {
    if (lambda < 1) throw ConfigError("jtt: lambda must be >= 1");
    JttModel out;
    out.error_ids = stage1_errors(train, stage1, early_stop);
    out.plain_erm = out.error_ids.empty();
    auto checkpoints = train_upsampled(train, out.error_ids, lambda, stage2);
    out.model = std::move(checkpoints.back());
    return out;
}

nlohmann::json to_json(const JttCandidate& c) {
    nlohmann::json j = {{"lambda", c.lambda}, {"stage2_index", c.stage2_index}, {"epoch", c.epoch}};
    if (c.stage1_index) {
        j["stage1_index"] = *c.stage1_index;
        j["T"] = c.early_stop;
    } else {
        j["stage1_index"] = nullptr;
        j["T"] = nullptr;
    }
    return j;
}

JttCandidate jtt_candidate_from_json(const nlohmann::json& j) {
    JttCandidate c;
    if (!j.at("stage1_index").is_null()) {
        c.stage1_index = j.at("stage1_index").get<std::size_t>();
        c.early_stop = j.at("T").get<int>();
    }
    c.lambda = j.at("lambda").get<int>();
    c.stage2_index = j.at("stage2_index").get<std::size_t>();
    c.epoch = j.at("epoch").get<int>();
    return c;
}

namespace {

void check_labellings(const TabularDataset& validation, const std::vector<ValidationLabelling>& labellings) {
    for (const auto& l : labellings) {
        if (l.sensitive.size() != validation.size()) {
            throw DataError("validation " + to_string(l.source) + " labels do not match the validation size");
        }
        const auto t = tabulate(validation.targets(), validation.targets(), l.sensitive);
        for (std::size_t k = 0; k < 4; ++k) {
            if (t.count[k] == 0) {
                throw DataError("validation subgroup " + subgroup_name(k) + " is empty under " +
                                to_string(l.source) + " sensitive labels");
            }
        }
    }
}

struct EpochEval {
    double accuracy = 0.0;
    std::vector<FairnessReport> reports;
};

EpochEval score_checkpoint(const ModelParams& model, const TabularDataset& validation,
                           const std::vector<ValidationLabelling>& labellings) {
    const auto pred = predict(model, validation);
    EpochEval e;
    e.accuracy = accuracy(pred, validation.targets());
    for (const auto& l : labellings) {
        e.reports.push_back(report_from_predictions(pred, validation.targets(), l.sensitive, l.source));
    }
    return e;
}

std::vector<EpochEval> run_and_score(const TabularDataset& train, std::span<const std::size_t> rows,
                                     const HyperParams& hp, const TabularDataset& validation,
                                     const std::vector<ValidationLabelling>& labellings) {
    std::vector<EpochEval> out;
    train_rows(train, rows, hp, [&](const ModelParams& m) { out.push_back(score_checkpoint(m, validation, labellings)); });
    return out;
}

}  // namespace

std::vector<CandidateEvaluation> evaluate_jtt_candidates(const TabularDataset& train,
                                                         const TabularDataset& validation,
                                                         const std::vector<ValidationLabelling>& labellings,
                                                         const JttConfig& config, Execution execution) {
    config.validate();
    check_labellings(validation, labellings);

    // Stage 1: one run per stage-1 point, long enough for the largest T.
    const int max_t = *std::max_element(config.early_stop.begin(), config.early_stop.end());
    std::vector<std::vector<std::vector<std::int64_t>>> errors(config.stage1.size());
    detail::parallel_for(config.stage1.size(), execution, [&](std::size_t s) {
        HyperParams hp = config.stage1[s];
        hp.epochs = max_t;
        const auto checkpoints = train_erm(train, hp);
        for (int t : config.early_stop) {
            errors[s].push_back(misclassified_ids(checkpoints[static_cast<std::size_t>(t - 1)], train));
        }
    });

    // Stage 2: runs that share (error set, lambda, stage-2 point) are identical.
    using Key = std::tuple<std::vector<std::int64_t>, int, std::size_t>;
    std::map<Key, std::size_t> job_of;
    std::vector<Key> jobs;
    struct Slot {
        JttCandidate base;
        std::size_t job;
    };
    std::vector<Slot> slots;
    for (std::size_t s1 = 0; s1 < config.stage1.size(); ++s1) {
        for (std::size_t t = 0; t < config.early_stop.size(); ++t) {
            for (int lambda : config.lambdas) {
                for (std::size_t s2 = 0; s2 < config.stage2.size(); ++s2) {
                    const auto& err = errors[s1][t];
                    const bool trivial = lambda == 1 || err.empty();
                    Key key{trivial ? std::vector<std::int64_t>{} : err, trivial ? 1 : lambda, s2};
                    auto [it, inserted] = job_of.emplace(key, jobs.size());
                    if (inserted) jobs.push_back(key);
                    slots.push_back({{s1, config.early_stop[t], lambda, s2, 0}, it->second});
                }
            }
        }
    }

    std::vector<std::vector<EpochEval>> results(jobs.size());
    detail::parallel_for(jobs.size(), execution, [&](std::size_t j) {
        const auto& [ids, lambda, s2] = jobs[j];
        const auto rows = upsampled_rows(train, ids, lambda);
        results[j] = run_and_score(train, rows, config.stage2[s2], validation, labellings);
    });

    std::vector<CandidateEvaluation> evals;
    for (const auto& slot : slots) {
        const auto& epochs = results[slot.job];
        for (std::size_t e = 0; e < epochs.size(); ++e) {
            CandidateEvaluation ce;
            ce.candidate = slot.base;
            ce.candidate.epoch = static_cast<int>(e + 1);
            ce.val_accuracy = epochs[e].accuracy;
            ce.reports = epochs[e].reports;
            evals.push_back(std::move(ce));
        }
    }
    return evals;
}

std::vector<CandidateEvaluation> evaluate_erm_candidates(const TabularDataset& train,
                                                         const TabularDataset& validation,
                                                         const std::vector<ValidationLabelling>& labellings,
                                                         const std::vector<HyperParams>& grid, Execution execution) {
    if (grid.empty()) throw ConfigError("erm grid is empty");
    for (const auto& hp : grid) hp.validate();
    check_labellings(validation, labellings);
    std::vector<std::size_t> rows(train.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::vector<std::vector<EpochEval>> results(grid.size());
    detail::parallel_for(grid.size(), execution, [&](std::size_t g) {
        results[g] = run_and_score(train, rows, grid[g], validation, labellings);
    });
    std::vector<CandidateEvaluation> evals;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        for (std::size_t e = 0; e < results[g].size(); ++e) {
            CandidateEvaluation ce;
            ce.candidate = {std::nullopt, 0, 1, g, static_cast<int>(e + 1)};
            ce.val_accuracy = results[g][e].accuracy;
            ce.reports = results[g][e].reports;
            evals.push_back(std::move(ce));
        }
    }
    return evals;
}

std::vector<std::optional<std::size_t>> select_per_bin(const std::vector<CandidateEvaluation>& evals,
                                                       const std::vector<AccuracyBin>& bins,
                                                       FairnessObjective objective, std::size_t labelling) {
    std::vector<std::optional<std::size_t>> best(bins.size());
    for (std::size_t i = 0; i < evals.size(); ++i) {
        const auto b = bin_of(bins, evals[i].val_accuracy);
        if (!b) continue;
        if (labelling >= evals[i].reports.size()) throw ConfigError("select_per_bin: labelling out of range");
        const double v = objective_value(evals[i].reports[labelling], objective);
        auto& slot = best[*b];
        if (!slot || objective_better(v, objective_value(evals[*slot].reports[labelling], objective), objective)) {
            slot = i;
        }
    }
    return best;
}

ModelParams materialize(const TabularDataset& train, const JttCandidate& c, const std::vector<HyperParams>& stage1,
                        const std::vector<HyperParams>& stage2) {
    if (c.stage2_index >= stage2.size()) throw ConfigError("candidate refers to a missing stage-2 grid point");
    HyperParams hp = stage2[c.stage2_index];
    if (c.epoch < 1 || c.epoch > hp.epochs) throw ConfigError("candidate epoch outside the stage-2 budget");
    hp.epochs = c.epoch;
    if (c.is_erm()) return train_erm(train, hp).back();
    if (*c.stage1_index >= stage1.size()) throw ConfigError("candidate refers to a missing stage-1 grid point");
    const auto errors = stage1_errors(train, stage1[*c.stage1_index], c.early_stop);
    return train_upsampled(train, errors, c.lambda, hp).back();
}

namespace {

class WinnerBuilder {
public:
    WinnerBuilder(const TabularDataset& train, const TabularDataset& test, const std::vector<HyperParams>& stage1,
                  const std::vector<HyperParams>& stage2)
        : train_(train), test_(test), stage1_(stage1), stage2_(stage2) {}

    Winner build(const CandidateEvaluation& eval, std::size_t labelling) {
        Winner w;
        w.candidate = eval.candidate;
        w.stage2_hp = stage2_[eval.candidate.stage2_index];
        if (eval.candidate.stage1_index) w.stage1_hp = stage1_[*eval.candidate.stage1_index];
        w.validation = eval.reports[labelling];
        w.test = test_report(eval.candidate);
        return w;
    }

private:
    FairnessReport test_report(const JttCandidate& c) {
        for (const auto& [cand, report] : cache_) {
            if (cand == c) return report;
        }
        const auto model = materialize(train_, c, stage1_, stage2_);
        auto report = full_report(model, test_, SensitiveSource::ground_truth);
        cache_.emplace_back(c, report);
        return report;
    }

    const TabularDataset& train_;
    const TabularDataset& test_;
    const std::vector<HyperParams>& stage1_;
    const std::vector<HyperParams>& stage2_;
    std::vector<std::pair<JttCandidate, FairnessReport>> cache_;
};

MethodResult collect(std::string name, SensitiveSource source, const std::vector<CandidateEvaluation>& evals,
                     const std::vector<AccuracyBin>& bins, FairnessObjective objective, std::size_t labelling,
                     WinnerBuilder& builder) {
    MethodResult m;
    m.method = std::move(name);
    m.source = source;
    for (const auto& idx : select_per_bin(evals, bins, objective, labelling)) {
        if (idx) {
            m.bins.emplace_back(builder.build(evals[*idx], labelling));
        } else {
            m.bins.emplace_back(std::nullopt);
        }
    }
    return m;
}

std::optional<Winner> most_accurate(const std::vector<CandidateEvaluation>& evals, std::size_t labelling,
                                    WinnerBuilder& builder) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < evals.size(); ++i) {
        if (!best || evals[i].val_accuracy > evals[*best].val_accuracy) best = i;
    }
    if (!best) return std::nullopt;
    return builder.build(evals[*best], labelling);
}

std::uint64_t seed_of(const std::vector<HyperParams>& grid) { return grid.empty() ? 0 : grid.front().seed; }

}  // namespace

const MethodResult& TunerResult::method(const std::string& name) const {
    for (const auto& m : methods) {
        if (m.method == name) return m;
    }
    throw DataError("tuner result has no method '" + name + "'");
}

TunerResult grid_search(const TabularDataset& train, const TabularDataset& validation, const TabularDataset& test,
                        const JttConfig& config, Execution execution) {
    config.validate();
    const std::vector<ValidationLabelling> labellings{{config.sensitive_source, validation.sensitive_or_throw()}};
    const auto jtt = evaluate_jtt_candidates(train, validation, labellings, config, execution);
    const auto erm = evaluate_erm_candidates(train, validation, labellings, config.stage2, execution);

    WinnerBuilder builder(train, test, config.stage1, config.stage2);
    TunerResult r;
    r.objective = config.objective;
    r.bins = config.bins;
    r.seed = seed_of(config.stage2);
    r.methods.push_back(collect("jtt", config.sensitive_source, jtt, config.bins, config.objective, 0, builder));
    r.methods.push_back(collect("erm", config.sensitive_source, erm, config.bins, config.objective, 0, builder));
    r.erm_reference = most_accurate(erm, 0, builder);
    return r;
}

TunerResult erm_sweep(const TabularDataset& train, const TabularDataset& validation, const TabularDataset& test,
                      const std::vector<HyperParams>& grid, const std::vector<AccuracyBin>& bins,
                      FairnessObjective objective, Execution execution) {
    const std::vector<ValidationLabelling> labellings{{SensitiveSource::ground_truth, validation.sensitive_or_throw()}};
    const auto erm = evaluate_erm_candidates(train, validation, labellings, grid, execution);
    const std::vector<HyperParams> no_stage1;
    WinnerBuilder builder(train, test, no_stage1, grid);
    TunerResult r;
    r.objective = objective;
    r.bins = bins;
    r.seed = seed_of(grid);
    r.methods.push_back(collect("erm", SensitiveSource::ground_truth, erm, bins, objective, 0, builder));
    r.erm_reference = most_accurate(erm, 0, builder);
    return r;
}

TunerResult tune_table(const TabularDataset& train, const TabularDataset& validation,
                       const PseudoLabelledValidation& pseudo, const TabularDataset& test, const JttConfig& config,
                       Execution execution) {
    config.validate();
    if (pseudo.row_ids != validation.row_ids()) {
        throw DataError("pseudo labels were produced for a different validation set");
    }
    const std::vector<ValidationLabelling> labellings{
        {SensitiveSource::pseudo, pseudo.pseudo},
        {SensitiveSource::ground_truth, validation.sensitive_or_throw()}};
    const auto jtt = evaluate_jtt_candidates(train, validation, labellings, config, execution);
    const auto erm = evaluate_erm_candidates(train, validation, {labellings[1]}, config.stage2, execution);

    WinnerBuilder builder(train, test, config.stage1, config.stage2);
    TunerResult r;
    r.objective = config.objective;
    r.bins = config.bins;
    r.seed = seed_of(config.stage2);
    r.methods.push_back(
        collect("antigone_jtt", SensitiveSource::pseudo, jtt, config.bins, config.objective, 0, builder));
    r.methods.push_back(
        collect("ground_truth_jtt", SensitiveSource::ground_truth, jtt, config.bins, config.objective, 1, builder));
    r.methods.push_back(collect("erm", SensitiveSource::ground_truth, erm, config.bins, config.objective, 0, builder));
    r.erm_reference = most_accurate(erm, 0, builder);
    return r;
}

// --- serialization -----------------------------------------------------------------

namespace {

nlohmann::json winner_json(const std::optional<Winner>& w) {
    if (!w) return nullptr;
    return {{"candidate", to_json(w->candidate)},
            {"stage1_hparams", w->stage1_hp ? to_json(*w->stage1_hp) : nlohmann::json()},
            {"stage2_hparams", to_json(w->stage2_hp)},
            {"validation", to_json(w->validation)},
            {"test", to_json(w->test)}};
}

std::optional<Winner> winner_from_json(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    Winner w;
    w.candidate = jtt_candidate_from_json(j.at("candidate"));
    if (!j.at("stage1_hparams").is_null()) w.stage1_hp = hyper_params_from_json(j.at("stage1_hparams"));
    w.stage2_hp = hyper_params_from_json(j.at("stage2_hparams"));
    w.validation = fairness_report_from_json(j.at("validation"));
    w.test = fairness_report_from_json(j.at("test"));
    return w;
}

}  // namespace

nlohmann::json to_json(const TunerResult& r) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : r.bins) bins.push_back({b.lo, b.hi});
    nlohmann::json methods = nlohmann::json::array();
    for (const auto& m : r.methods) {
        nlohmann::json per_bin = nlohmann::json::array();
        for (const auto& w : m.bins) per_bin.push_back(winner_json(w));
        methods.push_back({{"method", m.method}, {"sensitive_source", to_string(m.source)}, {"bins", per_bin}});
    }
    // Flat (avg accuracy, fairness) rows for plotting and quick reading.
    nlohmann::json table = nlohmann::json::array();
    for (std::size_t b = 0; b < r.bins.size(); ++b) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& m : r.methods) {
            const auto& w = m.bins[b];
            rows.push_back({{"method", m.method},
                            {"test_avg_accuracy", w ? nlohmann::json(w->test.avg_accuracy) : nlohmann::json()},
                            {"test_fairness",
                             w ? nlohmann::json(objective_value(w->test, r.objective)) : nlohmann::json()}});
        }
        table.push_back({{"bin", {r.bins[b].lo, r.bins[b].hi}}, {"rows", rows}});
    }
    return {{"format", "antigone-tuner-result"},
            {"objective", to_string(r.objective)},
            {"seed", r.seed},
            {"bins", bins},
            {"methods", methods},
            {"erm_reference", winner_json(r.erm_reference)},
            {"table", table}};
}

TunerResult tuner_result_from_json(const nlohmann::json& j) {
    try {
        TunerResult r;
        r.objective = objective_from_string(j.at("objective").get<std::string>());
        r.seed = j.value("seed", std::uint64_t{0});
        for (const auto& b : j.at("bins")) r.bins.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
        for (const auto& mj : j.at("methods")) {
            MethodResult m;
            m.method = mj.at("method").get<std::string>();
            m.source = sensitive_source_from_string(mj.at("sensitive_source").get<std::string>());
            for (const auto& w : mj.at("bins")) m.bins.push_back(winner_from_json(w));
            if (m.bins.size() != r.bins.size()) throw DataError("method '" + m.method + "' has wrong bin count");
            r.methods.push_back(std::move(m));
        }
        if (j.contains("erm_reference")) r.erm_reference = winner_from_json(j.at("erm_reference"));
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("tuner result: ") + e.what());
    }
}

std::string render_table(const TunerResult& r) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(1);
    const auto obj = to_string(r.objective);
    out << "Test (avg accuracy %, " << obj << " %) per validation accuracy bin; "
        << (r.objective == FairnessObjective::wga ? "higher" : "lower") << " " << obj << " is better\n";
    out << std::left << std::setw(18) << "Val. bin" << std::setw(20) << "Method" << "Result\n";
    auto cell = [&](const std::optional<Winner>& w) {
        std::ostringstream c;
        c << std::fixed << std::setprecision(1);
        if (!w) {
            c << "(empty bin)";
        } else {
            c << '(' << 100.0 * w->test.avg_accuracy << ", " << 100.0 * objective_value(w->test, r.objective) << ')';
        }
        return c.str();
    };
    for (std::size_t b = 0; b < r.bins.size(); ++b) {
        std::ostringstream bin;
        bin << std::fixed << std::setprecision(1) << '[' << 100.0 * r.bins[b].lo << ", " << 100.0 * r.bins[b].hi << ')';
        for (std::size_t m = 0; m < r.methods.size(); ++m) {
            out << std::setw(18) << (m == 0 ? bin.str() : "") << std::setw(20) << r.methods[m].method
                << cell(r.methods[m].bins[b]) << '\n';
        }
    }
    if (r.erm_reference) out << std::setw(18) << "" << std::setw(20) << "erm (max accuracy)" << cell(r.erm_reference) << '\n';
    return out.str();
}

std::vector<SeedSummary> summarize_seeds(const std::vector<TunerResult>& runs) {
    std::vector<SeedSummary> out;
    if (runs.empty()) return out;
    const auto& first = runs.front();
    for (const auto& m : first.methods) {
        for (std::size_t b = 0; b < first.bins.size(); ++b) {
            std::vector<double> acc;
            std::vector<double> obj;
            for (const auto& run : runs) {
                const auto& w = run.method(m.method).bins.at(b);
                if (!w) continue;
                acc.push_back(w->test.avg_accuracy);
                obj.push_back(objective_value(w->test, run.objective));
            }
            SeedSummary s;
            s.method = m.method;
            s.bin = b;
            s.runs = acc.size();
            auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
                if (v.empty()) return;
                double sum = 0.0;
                for (double x : v) sum += x;
                mean = sum / static_cast<double>(v.size());
                if (v.size() < 2) return;
                double ss = 0.0;
                for (double x : v) ss += (x - mean) * (x - mean);
                sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
            };
            stats(acc, s.accuracy_mean, s.accuracy_std);
            stats(obj, s.objective_mean, s.objective_std);
            out.push_back(s);
        }
    }
    return out;
}

nlohmann::json to_json(const std::vector<SeedSummary>& summary) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : summary) {
        j.push_back({{"method", s.method},
                     {"bin", s.bin},
                     {"runs", s.runs},
                     {"test_avg_accuracy_mean", s.accuracy_mean},
                     {"test_avg_accuracy_std", s.accuracy_std},
                     {"test_objective_mean", s.objective_mean},
                     {"test_objective_std", s.objective_std}});
    }
    return j;
}

}  // namespace antigone
