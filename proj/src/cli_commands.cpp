#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

#include "antigone/cli.hpp"
#include "antigone/fairness.hpp"
#include "antigone/labeller.hpp"
#include "parallel.hpp"

namespace antigone::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kHashKey = "config_sha256";

std::string csv_banner(const std::string& hash) { return tool_version() + " " + kHashKey + "=" + hash; }

json generated_by(const std::string& hash) { return {{"tool", tool_version()}, {kHashKey, hash}}; }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArtifactError("cannot read '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Hash a previously written output carries, or empty when none is found.
std::string embedded_hash(const std::string& text) {
    for (const std::string& marker : {std::string(kHashKey) + "=", "\"" + std::string(kHashKey) + "\": \"",
                                     "\"" + std::string(kHashKey) + "\":\""}) {
        const auto at = text.find(marker);
        if (at != std::string::npos) return text.substr(at + marker.size(), 64);
    }
    return {};
}

/// Files of one command, staged in memory and published together.
class OutputSet {
public:
    OutputSet(fs::path root, std::string hash, bool force)
        : root_(std::move(root)), hash_(std::move(hash)), force_(force) {}

    void add(const fs::path& relative, std::string content) { staged_.emplace_back(relative, std::move(content)); }

    std::vector<fs::path> commit() {
        for (const auto& [rel, content] : staged_) {
            const auto target = root_ / rel;
            if (force_ || !fs::exists(target)) continue;
            const auto existing = embedded_hash(read_file(target));
            if (existing != hash_) {
                throw ConfigError("refusing to overwrite '" + target.string() + "' written under config " +
                                  (existing.empty() ? std::string("<unknown>") : existing) +
                                  " (use --force or another --out)");
            }
        }
        std::vector<fs::path> temps;
        std::vector<fs::path> written;
        try {
            for (const auto& [rel, content] : staged_) {
                const auto target = root_ / rel;
                fs::create_directories(target.parent_path());
                auto temp = target;
                temp += ".partial";
                temps.push_back(temp);
                std::ofstream out(temp, std::ios::binary | std::ios::trunc);
                out << content;
                out.close();
                if (!out) throw DataError("cannot write '" + temp.string() + "'");
            }
            for (std::size_t i = 0; i < staged_.size(); ++i) {
                const auto target = root_ / staged_[i].first;
                fs::rename(temps[i], target);
                written.push_back(target);
            }
        } catch (const fs::filesystem_error& e) {
            cleanup(temps);
            throw DataError(std::string("writing outputs: ") + e.what());
        } catch (...) {
            cleanup(temps);
            throw;
        }
        return written;
    }

private:
    static void cleanup(const std::vector<fs::path>& temps) {
        std::error_code ignored;
        for (const auto& t : temps) fs::remove(t, ignored);
    }

    fs::path root_;
    std::string hash_;
    bool force_;
    std::vector<std::pair<fs::path, std::string>> staged_;
};

/// Reads an upstream output, checking it was produced under `hash`.
std::string read_upstream(const ExperimentConfig& config, const fs::path& relative, const char* producer) {
    const auto path = config.output / relative;
    if (!fs::exists(path)) {
        throw ArtifactError("missing '" + path.string() + "'; run '" + producer + "' first");
    }
    auto text = read_file(path);
    const auto found = embedded_hash(text);
    if (found != config.hash()) {
        throw ArtifactError("'" + path.string() + "' was produced under config " +
                            (found.empty() ? std::string("<unknown>") : found) + ", not " + config.hash() +
                            "; rerun '" + producer + "'");
    }
    return text;
}

json parse_json(const std::string& text, const fs::path& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ArtifactError("'" + what.string() + "': " + e.what());
    }
}

TabularDataset read_split(const ExperimentConfig& config, const char* relative) {
    return dataset_from_csv(read_upstream(config, relative, "prepare"));
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string grid_file(std::size_t index) {
    std::ostringstream name;
    name << "checkpoints/grid_" << std::setw(3) << std::setfill('0') << index << ".json";
    return name.str();
}

const AntigoneSection& require_antigone(const ExperimentConfig& c) {
    if (!c.antigone) throw ConfigError("antigone: section is required for this command");
    return *c.antigone;
}

const JttSection& require_jtt(const ExperimentConfig& c) {
    if (!c.jtt) throw ConfigError("jtt: section is required for this command");
    return *c.jtt;
}

std::vector<std::vector<ModelParams>> read_checkpoints(const ExperimentConfig& config) {
    const auto& section = require_antigone(config);
    const auto index = parse_json(read_upstream(config, paths::checkpoint_index, "train-grid"), paths::checkpoint_index);
    const auto& files = index.at("grid");
    if (files.size() != section.grid.size()) throw ArtifactError("checkpoint index does not match the grid");
    std::vector<std::vector<ModelParams>> runs;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const auto rel = files.at(i).at("file").get<std::string>();
        const auto j = parse_json(read_upstream(config, rel, "train-grid"), rel);
        std::vector<ModelParams> run;
        for (const auto& m : j.at("checkpoints")) run.push_back(model_from_json(m));
        if (run.empty()) throw ArtifactError("'" + rel + "' holds no checkpoints");
        runs.push_back(std::move(run));
    }
    return runs;
}

json choice_json(const LabellerChoice& c) {
    return {{"grid_index", c.grid_index}, {"epoch", c.epoch}, {"hparams", to_json(c.hp)}, {"edm", c.edm}};
}

json contamination_json(const ContaminationEstimate& est) {
    json out = json::object();
    for (std::size_t y = 0; y < 2; ++y) {
        const auto& c = est.per_class[y];
        out["y" + std::to_string(y)] =
            c ? json{{"alpha_hat", c->alpha_hat}, {"beta_hat", c->beta_hat}, {"one_minus_sum", c->one_minus_sum}}
              : json();
    }
    return out;
}

JttConfig reseeded(JttConfig config, std::uint64_t seed) {
    for (auto& hp : config.stage1) hp.seed = seed;
    for (auto& hp : config.stage2) hp.seed = seed;
    return config;
}

}  // namespace

std::vector<fs::path> cmd_prepare(const ExperimentConfig& config, const CommandOptions& options) {
    TabularDataset data;
    if (config.csv) {
        data = load_csv(config.csv->path, fit_vocabulary(config.csv->path, config.csv->schema));
    } else if (config.synthetic) {
        data = generate_synthetic(*config.synthetic);
    } else {
        throw ConfigError("dataset: section is required for this command");
    }
    const auto parts = split(data, config.fractions, config.split_seed);
    const auto standardizer = Standardizer::fit(parts.train);
    const auto hash = config.hash();
    const auto banner = csv_banner(hash);

    auto st = standardizer.to_json();
    st["generated_by"] = generated_by(hash);
    OutputSet out(config.output, hash, options.force);
    out.add(paths::train, dataset_to_csv(standardizer.apply(parts.train), banner));
    out.add(paths::validation, dataset_to_csv(standardizer.apply(parts.validation), banner));
    out.add(paths::test, dataset_to_csv(standardizer.apply(parts.test), banner));
    out.add(paths::standardizer, dump(st));
    return out.commit();
}

std::vector<fs::path> cmd_train_grid(const ExperimentConfig& config, const CommandOptions& options) {
    const auto& grid = require_antigone(config).grid;
    const auto train = read_split(config, paths::train);
    std::vector<std::vector<ModelParams>> runs(grid.size());
    detail::parallel_for(grid.size(), options.execution, [&](std::size_t i) { runs[i] = train_erm(train, grid[i]); });

    const auto hash = config.hash();
    OutputSet out(config.output, hash, options.force);
    json index = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        json checkpoints = json::array();
        for (const auto& m : runs[i]) checkpoints.push_back(to_json(m));
        const auto file = grid_file(i);
        const json j = {{"generated_by", generated_by(hash)},
                        {"grid_index", i},
                        {"hparams", to_json(grid[i])},
                        {"checkpoints", std::move(checkpoints)}};
        out.add(file, j.dump() + "\n");
        index.push_back({{"grid_index", i}, {"file", file}, {"hparams", to_json(grid[i])}});
    }
    out.add(paths::checkpoint_index, dump({{"generated_by", generated_by(hash)}, {"grid", index}}));
    return out.commit();
}

std::vector<fs::path> cmd_label(const ExperimentConfig& config, const CommandOptions& options) {
    const auto& section = require_antigone(config);
    const auto validation = read_split(config, paths::validation);
    auto runs = read_checkpoints(config);
    if (section.epochs == CandidateEpochs::final) {
        for (auto& run : runs) run.erase(run.begin(), run.end() - 1);
    }
    const auto candidates = enumerate_candidates(runs);
    const auto plv = select_labeller(candidates, validation, options.execution);
    const auto baseline = select_by_accuracy(candidates, validation);

    const auto hash = config.hash();
    auto sidecar = sidecar_json(plv);
    sidecar["generated_by"] = generated_by(hash);
    sidecar["candidates"] = candidates.size();
    sidecar["candidate_epochs"] = section.epochs == CandidateEpochs::all ? "all" : "final";
    sidecar["final_epoch_baseline"] = {{"labeller", choice_json(baseline.winners[0])}};
    if (validation.has_sensitive()) {
        const auto& truth = *validation.sensitive();
        sidecar["quality"] = to_json(pseudo_label_quality(plv.pseudo, truth, validation.targets()));
        sidecar["contamination"] = contamination_json(estimate_contamination(plv.pseudo, truth, validation.targets()));
        sidecar["final_epoch_baseline"]["quality"] =
            to_json(pseudo_label_quality(baseline.pseudo, truth, validation.targets()));
    }

    OutputSet out(config.output, hash, options.force);
    out.add(paths::pseudo_csv, dataset_to_csv(plv.apply_to(validation), csv_banner(hash)));
    out.add(paths::pseudo_sidecar, dump(sidecar));
    return out.commit();
}

std::vector<fs::path> cmd_mc_sweep(const ExperimentConfig& config, const CommandOptions& options) {
    if (!config.mc_noise) throw ConfigError("mc_noise: section is required for this command");
    const auto& m = *config.mc_noise;
    const auto groups =
        gaussian_clean_groups(m.majority_mean, m.minority_mean, m.variance, m.rows_per_group, m.positive_rate, m.seed);
    const auto records = mc_sweep(groups, m.classifier ? &*m.classifier : nullptr, m.cells, m.n_samples,
                                  m.seed + 1, options.execution);
    const auto hash = config.hash();
    OutputSet out(config.output, hash, options.force);
    out.add(paths::sweep, sweep_to_csv(records, csv_banner(hash)));
    return out.commit();
}

std::vector<fs::path> cmd_tune(const ExperimentConfig& config, const CommandOptions& options) {
    const auto& section = require_jtt(config);
    const auto train = read_split(config, paths::train);
    const auto validation = read_split(config, paths::validation);
    const auto test = read_split(config, paths::test);
    if (!test.has_sensitive()) throw DataError("tune: the test split needs a sensitive column for reporting");

    std::optional<PseudoLabelledValidation> plv;
    if (section.config.sensitive_source == SensitiveSource::pseudo) {
        const auto labelled = dataset_from_csv(read_upstream(config, paths::pseudo_csv, "label"));
        plv = PseudoLabelledValidation{labelled.row_ids(), labelled.sensitive_or_throw(), {}};
    }
    auto run_once = [&](const JttConfig& jtt, std::uint64_t seed) {
        TunerResult r;
        if (plv && validation.has_sensitive()) {
            r = tune_table(train, validation, *plv, test, jtt, options.execution);
        } else if (plv) {
            r = grid_search(train, plv->apply_to(validation), test, jtt, options.execution);
        } else {
            r = grid_search(train, validation, test, jtt, options.execution);
        }
        r.seed = seed;
        return r;
    };

    const auto hash = config.hash();
    OutputSet out(config.output, hash, options.force);
    auto base = to_json(run_once(section.config, config.seed));
    base["generated_by"] = generated_by(hash);
    out.add(paths::tuner_result, dump(base));
    if (!section.seeds.empty()) {
        std::vector<TunerResult> runs;
        json per_seed = json::array();
        for (auto seed : section.seeds) {
            runs.push_back(run_once(reseeded(section.config, seed), seed));
            per_seed.push_back(to_json(runs.back()));
        }
        out.add(paths::tuner_seeds, dump({{"format", "antigone-tuner-seeds"},
                                          {"generated_by", generated_by(hash)},
                                          {"runs", per_seed},
                                          {"summary", to_json(summarize_seeds(runs))}}));
    }
    return out.commit();
}

std::string cmd_report(const std::vector<fs::path>& result_files, ReportFormat format) {
    if (result_files.empty()) throw ConfigError("report: no result files given");
    std::ostringstream out;
    json all = json::array();
    for (const auto& path : result_files) {
        if (!fs::exists(path)) throw ArtifactError("missing result file '" + path.string() + "'");
        const auto j = parse_json(read_file(path), path);
        std::vector<TunerResult> results;
        if (j.value("format", std::string()) == "antigone-tuner-seeds") {
            for (const auto& r : j.at("runs")) results.push_back(tuner_result_from_json(r));
        } else {
            results.push_back(tuner_result_from_json(j));
        }
        if (format == ReportFormat::json) {
            json entry = {{"file", path.string()}};
            if (results.size() == 1) {
                entry["result"] = to_json(results.front());
            } else {
                entry["summary"] = to_json(summarize_seeds(results));
            }
            all.push_back(std::move(entry));
            continue;
        }
        out << "== " << path.string() << '\n';
        if (results.size() == 1) {
            out << render_table(results.front());
            continue;
        }
        out << std::fixed << std::setprecision(1);
        out << "Mean (sd) over " << results.size() << " seeds, test " << to_string(results.front().objective) << '\n';
        for (const auto& s : summarize_seeds(results)) {
            const auto& bin = results.front().bins[s.bin];
            out << '[' << 100.0 * bin.lo << ", " << 100.0 * bin.hi << ")  " << std::left << std::setw(20)
                << s.method << std::right;
            if (s.runs == 0) {
                out << "(empty bin)\n";
                continue;
            }
            out << 100.0 * s.accuracy_mean << " (" << 100.0 * s.accuracy_std << "), " << 100.0 * s.objective_mean
                << " (" << 100.0 * s.objective_std << ")  n=" << s.runs << '\n';
        }
    }
    if (format == ReportFormat::json) return all.dump(2) + "\n";
    return out.str();
}

}  // namespace antigone::cli
