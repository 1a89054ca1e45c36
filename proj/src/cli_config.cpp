#include <cmath>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "antigone/cli.hpp"

namespace antigone::cli {

namespace {

using nlohmann::json;

/// A JSON value together with its dotted path, for error messages.
class Node {
public:
    Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

    const json& value() const { return value_; }
    const std::string& path() const { return path_; }

    bool has(const char* key) const { return value_.is_object() && value_.contains(key); }

    Node at(const char* key) const {
        require_object();
        if (!value_.contains(key)) fail(child_path(key), "is required");
        return {value_.at(key), child_path(key)};
    }

    Node operator[](std::size_t i) const { return {value_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

    std::size_t size() const {
        if (!value_.is_array()) fail(path_, "must be an array");
        return value_.size();
    }

    void require_object() const {
        if (!value_.is_object()) fail(path_, "must be an object");
    }

    /// Rejects keys outside `allowed`, catching typos early.
    void only_keys(std::initializer_list<const char*> allowed) const {
        require_object();
        for (auto it = value_.begin(); it != value_.end(); ++it) {
            bool ok = false;
            for (const char* k : allowed) ok = ok || it.key() == k;
            if (!ok) fail(child_path(it.key().c_str()), "is not a recognized key");
        }
    }

    double number() const {
        if (!value_.is_number()) fail(path_, "must be a number");
        const double v = value_.get<double>();
        if (!std::isfinite(v)) fail(path_, "must be finite");
        return v;
    }

    std::int64_t integer() const {
        if (!value_.is_number_integer()) fail(path_, "must be an integer");
        return value_.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer() const {
        if (value_.is_number_unsigned()) return value_.get<std::uint64_t>();
        const auto v = integer();
        if (v < 0) fail(path_, "must be non-negative");
        return static_cast<std::uint64_t>(v);
    }

    std::size_t positive_size() const {
        const auto v = integer();
        if (v < 1) fail(path_, "must be >= 1");
        return static_cast<std::size_t>(v);
    }

    std::string string() const {
        if (!value_.is_string()) fail(path_, "must be a string");
        return value_.get<std::string>();
    }

    std::vector<double> numbers() const {
        std::vector<double> out;
        for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i].number());
        return out;
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& message) {
        throw ConfigError(path + ": " + message);
    }
    [[noreturn]] void fail(const std::string& message) const { fail(path_, message); }

private:
    std::string child_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& value_;
    std::string path_;
};

/// A scalar or an array of scalars, as a list.
template <class F>
auto list_of(const Node& n, F element) {
    std::vector<decltype(element(n))> out;
    if (n.value().is_array()) {
        if (n.size() == 0) n.fail("must not be empty");
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back(element(n[i]));
    } else {
        out.push_back(element(n));
    }
    return out;
}

Architecture parse_architecture(const Node& n) {
    if (n.value().is_string()) {
        const auto s = n.string();
        if (s == "linear") return Architecture::linear();
        n.fail("unknown architecture '" + s + "' (expected \"linear\" or {\"mlp\": h})");
    }
    n.only_keys({"mlp"});
    return Architecture::mlp(n.at("mlp").positive_size());
}

/// Grid order: learning rate outer, weight decay inner.
std::vector<HyperParams> parse_grid(const Node& n, std::uint64_t default_seed) {
    n.only_keys({"learning_rate", "weight_decay", "epochs", "batch_size", "architecture", "seed"});
    const auto lrs = list_of(n.at("learning_rate"), [](const Node& e) { return e.number(); });
    const auto wds = n.has("weight_decay") ? list_of(n.at("weight_decay"), [](const Node& e) { return e.number(); })
                                           : std::vector<double>{0.0};
    HyperParams base;
    base.epochs = static_cast<int>(n.at("epochs").positive_size());
    base.batch_size = n.has("batch_size") ? n.at("batch_size").positive_size() : 64;
    base.architecture = n.has("architecture") ? parse_architecture(n.at("architecture")) : Architecture::linear();
    base.seed = n.has("seed") ? n.at("seed").unsigned_integer() : default_seed;
    std::vector<HyperParams> grid;
    for (double lr : lrs) {
        for (double wd : wds) {
            HyperParams hp = base;
            hp.learning_rate = lr;
            hp.weight_decay = wd;
            try {
                hp.validate();
            } catch (const ConfigError& e) {
                n.fail(e.what());
            }
            grid.push_back(hp);
        }
    }
    return grid;
}

DatasetSchema parse_schema(const Node& n) {
    try {
        auto schema = schema_from_json(n.value());
        // Empty vocabularies are fitted from the file at prepare time.
        auto probe = schema;
        for (auto& col : probe.features) {
            if (col.kind == ColumnKind::categorical && col.vocab.empty()) col.vocab = {""};
        }
        probe.validate();
        return schema;
    } catch (const ConfigError& e) {
        n.fail(e.what());
    }
}

SplitFractions parse_fractions(const Node& n) {
    if (n.size() != 3) n.fail("must list [train, validation, test]");
    SplitFractions f{n[0].number(), n[1].number(), n[2].number()};
    for (double v : {f.train, f.validation, f.test}) {
        if (v <= 0.0 || v >= 1.0) n.fail("each fraction must lie in (0, 1)");
    }
    if (std::abs(f.train + f.validation + f.test - 1.0) > 1e-9) n.fail("fractions must sum to 1");
    return f;
}

JttSection parse_jtt(const Node& n, std::uint64_t seed, const std::optional<AntigoneSection>& antigone) {
    n.only_keys({"stage1", "stage2", "early_stop", "lambda", "objective", "bins", "sensitive_source", "seeds"});
    JttSection s;
    auto& c = s.config;
    if (n.has("stage1")) {
        c.stage1 = parse_grid(n.at("stage1"), seed);
    } else if (antigone) {
        c.stage1 = antigone->grid;
    } else {
        n.at("stage1");  // reports the missing key
    }
    c.stage2 = n.has("stage2") ? parse_grid(n.at("stage2"), seed) : c.stage1;
    c.early_stop = list_of(n.at("early_stop"), [](const Node& e) { return static_cast<int>(e.positive_size()); });
    c.lambdas = list_of(n.at("lambda"), [](const Node& e) { return static_cast<int>(e.positive_size()); });
    c.objective = n.has("objective") ? objective_from_string(n.at("objective").string()) : FairnessObjective::wga;
    const auto bins = n.at("bins");
    if (bins.size() == 0) bins.fail("must not be empty");
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const auto b = bins[i];
        if (b.size() != 2) b.fail("must be [lo, hi)");
        c.bins.push_back({b[0].number(), b[1].number()});
        if (!(c.bins.back().lo < c.bins.back().hi)) b.fail("requires lo < hi");
    }
    c.sensitive_source = n.has("sensitive_source") ? sensitive_source_from_string(n.at("sensitive_source").string())
                                                   : SensitiveSource::pseudo;
    if (n.has("seeds")) {
        s.seeds = list_of(n.at("seeds"), [](const Node& e) { return e.unsigned_integer(); });
    }
    try {
        c.validate();
    } catch (const ConfigError& e) {
        n.fail(e.what());
    }
    return s;
}

McNoiseSection parse_mc(const Node& n, std::uint64_t seed) {
    n.only_keys({"majority_mean", "minority_mean", "variance", "rows_per_group", "positive_rate", "grid", "cells",
                 "n_samples", "classifier", "seed"});
    McNoiseSection m;
    const auto maj = n.at("majority_mean").numbers();
    const auto min = n.at("minority_mean").numbers();
    if (maj.empty() || maj.size() != min.size()) n.fail("majority_mean and minority_mean need equal, nonzero length");
    m.majority_mean = Eigen::Map<const Vector>(maj.data(), static_cast<Eigen::Index>(maj.size()));
    m.minority_mean = Eigen::Map<const Vector>(min.data(), static_cast<Eigen::Index>(min.size()));
    m.variance = n.has("variance") ? n.at("variance").number() : 1.0;
    if (m.variance <= 0.0) n.at("variance").fail("must be > 0");
    m.rows_per_group = n.at("rows_per_group").positive_size();
    m.positive_rate = n.has("positive_rate") ? n.at("positive_rate").number() : 0.5;
    if (m.positive_rate < 0.0 || m.positive_rate > 1.0) n.at("positive_rate").fail("must lie in [0, 1]");
    if (n.has("grid") == n.has("cells")) n.fail("give exactly one of 'grid' and 'cells'");
    if (n.has("grid")) {
        const auto g = n.at("grid");
        g.only_keys({"step", "max"});
        const double step = g.at("step").number();
        const double max = g.at("max").number();
        if (step <= 0.0 || max < 0.0 || max >= 1.0) g.fail("requires step > 0 and max in [0, 1)");
        m.cells = noise_grid(step, max);
    } else {
        const auto cells = n.at("cells");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto c = cells[i];
            if (c.size() != 2) c.fail("must be [alpha, beta]");
            NoiseParams p{c[0].number(), c[1].number()};
            if (p.alpha < 0.0 || p.alpha >= 1.0 || p.beta < 0.0 || p.beta >= 1.0) c.fail("rates must lie in [0, 1)");
            m.cells.push_back(p);
        }
    }
    m.n_samples = n.at("n_samples").positive_size();
    if (n.has("classifier")) {
        const auto c = n.at("classifier");
        c.only_keys({"weights", "bias"});
        const auto w = c.at("weights").numbers();
        if (w.size() != maj.size()) c.at("weights").fail("length must match the mean dimension");
        Layer layer;
        layer.weight = Eigen::Map<const Matrix>(w.data(), 1, static_cast<Eigen::Index>(w.size()));
        layer.bias = Vector::Constant(1, c.has("bias") ? c.at("bias").number() : 0.0);
        ModelParams model;
        model.layers.push_back(std::move(layer));
        m.classifier = std::move(model);
    }
    m.seed = n.has("seed") ? n.at("seed").unsigned_integer() : seed;
    return m;
}

}  // namespace

std::string tool_version() { return std::string("antigone ") + ANTIGONE_VERSION; }

std::string ExperimentConfig::hash() const {
    const auto text = canonical.dump();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

ExperimentConfig parse_config(const nlohmann::json& input, const Overrides& overrides,
                              const std::filesystem::path& base_dir) {
    json j = input;
    if (!j.is_object()) throw ConfigError("config: must be a JSON object");
    if (overrides.seed) j["seed"] = *overrides.seed;
    if (overrides.output) j["output"] = overrides.output->string();

    const Node root(j, "");
    root.only_keys({"seed", "output", "dataset", "split", "antigone", "jtt", "mc_noise"});
    ExperimentConfig c;
    c.seed = root.at("seed").unsigned_integer();
    c.output = root.at("output").string();

    if (root.has("dataset")) {
        const auto ds = root.at("dataset");
        ds.only_keys({"csv", "synthetic"});
        if (ds.has("csv") == ds.has("synthetic")) ds.fail("give exactly one of 'csv' and 'synthetic'");
        if (ds.has("csv")) {
            const auto csv = ds.at("csv");
            csv.only_keys({"path", "schema"});
            std::filesystem::path p = csv.at("path").string();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            c.csv = CsvSource{p, parse_schema(csv.at("schema"))};
        } else {
            auto spec = root.at("dataset").at("synthetic").value();
            if (!spec.contains("seed")) spec["seed"] = c.seed;
            try {
                c.synthetic = synthetic_spec_from_json(spec);
            } catch (const ConfigError& e) {
                Node::fail("dataset.synthetic", e.what());
            }
        }
    }
    if (root.has("split")) {
        const auto s = root.at("split");
        s.only_keys({"fractions", "seed"});
        c.fractions = parse_fractions(s.at("fractions"));
        c.split_seed = s.has("seed") ? s.at("seed").unsigned_integer() : c.seed;
    } else if (c.csv || c.synthetic) {
        root.at("split");
    }
    if (root.has("antigone")) {
        const auto a = root.at("antigone");
        a.only_keys({"grid", "candidate_epochs"});
        AntigoneSection s;
        s.grid = parse_grid(a.at("grid"), c.seed);
        if (a.has("candidate_epochs")) {
            const auto e = a.at("candidate_epochs").string();
            if (e == "all") {
                s.epochs = CandidateEpochs::all;
            } else if (e == "final") {
                s.epochs = CandidateEpochs::final;
            } else {
                a.at("candidate_epochs").fail("must be \"all\" or \"final\"");
            }
        }
        c.antigone = std::move(s);
    }
    if (root.has("jtt")) c.jtt = parse_jtt(root.at("jtt"), c.seed, c.antigone);
    if (root.has("mc_noise")) c.mc_noise = parse_mc(root.at("mc_noise"), c.seed);

    j.erase("output");
    c.canonical = std::move(j);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    json j;
    try {
        j = json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
    return parse_config(j, overrides, path.parent_path());
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return exit_config;
    if (dynamic_cast<const ArtifactError*>(&e)) return exit_artifact;
    if (dynamic_cast<const SelectionError*>(&e)) return exit_selection;
    if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const TrainingError*>(&e)) return exit_data;
    return exit_internal;
}

}  // namespace antigone::cli
