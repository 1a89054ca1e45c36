#include "antigone/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "antigone/error.hpp"

namespace antigone {

namespace {

constexpr int kModelFormatVersion = 1;

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

bool all_finite(const std::vector<Layer>& layers) {
    for (const auto& l : layers) {
        if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
}

}  // namespace

void HyperParams::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("hyper-params: learning_rate must be > 0");
    }
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
        throw ConfigError("hyper-params: weight_decay must be >= 0");
    }
    if (epochs < 1) throw ConfigError("hyper-params: epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("hyper-params: batch_size must be >= 1");
    if (architecture.kind == ArchKind::mlp && architecture.hidden_units < 1) {
        throw ConfigError("hyper-params: mlp needs at least one hidden unit");
    }
}

nlohmann::json to_json(const HyperParams& hp) {
    nlohmann::json arch;
    if (hp.architecture.kind == ArchKind::linear) {
        arch = "linear";
    } else {
        arch = {{"mlp", hp.architecture.hidden_units}};
    }
    return {{"learning_rate", hp.learning_rate}, {"weight_decay", hp.weight_decay},
            {"epochs", hp.epochs},               {"batch_size", hp.batch_size},
            {"seed", hp.seed},                   {"architecture", arch}};
}

HyperParams hyper_params_from_json(const nlohmann::json& j) {
    HyperParams hp;
    try {
        hp.learning_rate = j.at("learning_rate").get<double>();
        hp.weight_decay = j.value("weight_decay", 0.0);
        hp.epochs = j.at("epochs").get<int>();
        hp.batch_size = j.value("batch_size", std::size_t{64});
        hp.seed = j.value("seed", std::uint64_t{0});
        const auto arch = j.value("architecture", nlohmann::json("linear"));
        if (arch.is_string() && arch.get<std::string>() == "linear") {
            hp.architecture = Architecture::linear();
        } else if (arch.is_object() && arch.contains("mlp")) {
            hp.architecture = Architecture::mlp(arch.at("mlp").get<std::size_t>());
        } else {
            throw ConfigError("hyper-params: architecture must be \"linear\" or {\"mlp\": hidden}");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("hyper-params: ") + e.what());
    }
    hp.validate();
    return hp;
}

std::string describe(const HyperParams& hp) {
    std::ostringstream out;
    out << (hp.architecture.kind == ArchKind::linear
                ? std::string("linear")
                : "mlp(" + std::to_string(hp.architecture.hidden_units) + ")")
        << " lr=" << hp.learning_rate << " wd=" << hp.weight_decay << " epochs=" << hp.epochs
        << " batch=" << hp.batch_size << " seed=" << hp.seed;
    return out.str();
}

std::size_t ModelParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

Vector ModelParams::logits(const Matrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != input_dim()) {
        throw DataError("feature dimension " + std::to_string(x.cols()) +
                        " does not match model input dimension " + std::to_string(input_dim()));
    }
    if (layers.size() == 1) {
        Vector z = x * layers[0].weight.row(0).transpose();
        z.array() += layers[0].bias(0);
        return z;
    }
    Matrix h = x * layers[0].weight.transpose();
    h.rowwise() += layers[0].bias.transpose();
    h = h.cwiseMax(0.0);
    Vector z = h * layers[1].weight.row(0).transpose();
    z.array() += layers[1].bias(0);
    return z;
}

ModelParams initial_params(const HyperParams& hp, std::size_t input_dim) {
    hp.validate();
    if (input_dim == 0) throw DataError("cannot build a model for zero-dimensional input");
    ModelParams m;
    m.source = hp;
    const auto d = static_cast<Eigen::Index>(input_dim);
    if (hp.architecture.kind == ArchKind::linear) {
        m.layers.push_back({Matrix::Zero(1, d), Vector::Zero(1)});
        return m;
    }
    const auto h = static_cast<Eigen::Index>(hp.architecture.hidden_units);
    std::mt19937_64 rng(hp.seed);
    auto uniform_layer = [&](Eigen::Index out, Eigen::Index in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Layer l{Matrix(out, in), Vector(out)};
        for (Eigen::Index r = 0; r < out; ++r) {
            for (Eigen::Index c = 0; c < in; ++c) l.weight(r, c) = dist(rng);
        }
        for (Eigen::Index r = 0; r < out; ++r) l.bias(r) = dist(rng);
        return l;
    };
    m.layers.push_back(uniform_layer(h, d));
    m.layers.push_back(uniform_layer(1, h));
    return m;
}

LossAndGradient loss_and_gradient(const ModelParams& model, const Matrix& x, std::span<const Label> y,
                                  double weight_decay, std::span<const double> row_weights) {
    const auto n = static_cast<Eigen::Index>(y.size());
    if (x.rows() != n) throw DataError("loss_and_gradient: row count mismatch");
    if (!row_weights.empty() && row_weights.size() != y.size()) {
        throw DataError("loss_and_gradient: weight count mismatch");
    }
    if (n == 0) throw DataError("loss_and_gradient: empty batch");
    if (static_cast<std::size_t>(x.cols()) != model.input_dim()) {
        throw DataError("loss_and_gradient: feature dimension mismatch");
    }

    Vector w = Vector::Ones(n);
    if (!row_weights.empty()) {
        w = Eigen::Map<const Vector>(row_weights.data(), n);
    }
    const double total = w.sum();

    LossAndGradient out;
    const bool linear = model.layers.size() == 1;
    Matrix hidden;
    Matrix pre;
    Vector z;
    if (linear) {
        z = x * model.layers[0].weight.row(0).transpose();
        z.array() += model.layers[0].bias(0);
    } else {
        pre = x * model.layers[0].weight.transpose();
        pre.rowwise() += model.layers[0].bias.transpose();
        hidden = pre.cwiseMax(0.0);
        z = hidden * model.layers[1].weight.row(0).transpose();
        z.array() += model.layers[1].bias(0);
    }

    double data_loss = 0.0;
    Vector dz(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double yi = y[static_cast<std::size_t>(i)];
        data_loss += w(i) * (softplus(z(i)) - yi * z(i));
        dz(i) = w(i) * (sigmoid(z(i)) - yi) / total;
    }
    data_loss /= total;

    double reg = 0.0;
    for (const auto& l : model.layers) reg += l.weight.squaredNorm();
    out.loss = data_loss + weight_decay * reg;

    if (linear) {
        Layer g;
        g.weight = dz.transpose() * x;
        g.weight += 2.0 * weight_decay * model.layers[0].weight;
        g.bias = Vector::Constant(1, dz.sum());
        out.gradient.push_back(std::move(g));
        return out;
    }

    Layer g_out;
    g_out.weight = dz.transpose() * hidden;
    g_out.weight += 2.0 * weight_decay * model.layers[1].weight;
    g_out.bias = Vector::Constant(1, dz.sum());

    Matrix d_hidden = dz * model.layers[1].weight.row(0);
    d_hidden.array() *= (pre.array() > 0.0).cast<double>();
    Layer g_in;
    g_in.weight = d_hidden.transpose() * x;
    g_in.weight += 2.0 * weight_decay * model.layers[0].weight;
    g_in.bias = d_hidden.colwise().sum().transpose();

    out.gradient.push_back(std::move(g_in));
    out.gradient.push_back(std::move(g_out));
    return out;
}

double training_loss(const ModelParams& model, const TabularDataset& data, double weight_decay) {
    return loss_and_gradient(model, data.features(), data.targets(), weight_decay).loss;
}

std::vector<double> flatten(const std::vector<Layer>& layers) {
    std::vector<double> out;
    for (const auto& l : layers) {
        out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
        out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
    }
    return out;
}

void unflatten(std::span<const double> values, std::vector<Layer>& layers) {
    std::size_t k = 0;
    for (auto& l : layers) {
        const auto nw = static_cast<std::size_t>(l.weight.size());
        const auto nb = static_cast<std::size_t>(l.bias.size());
        if (k + nw + nb > values.size()) throw DataError("unflatten: too few values");
        std::copy_n(values.begin() + static_cast<long>(k), nw, l.weight.data());
        k += nw;
        std::copy_n(values.begin() + static_cast<long>(k), nb, l.bias.data());
        k += nb;
    }
    if (k != values.size()) throw DataError("unflatten: too many values");
}

void train_rows(const TabularDataset& train, std::span<const std::size_t> rows, const HyperParams& hp,
                const EpochCallback& on_epoch) {
    hp.validate();
    if (rows.empty()) throw DataError("training set is empty");
    for (auto r : rows) {
        if (r >= train.size()) throw DataError("training row position out of range");
    }
    ModelParams model = initial_params(hp, train.dim());
    const auto& features = train.features();
    const auto& targets = train.targets();
    const auto d = features.cols();

    std::vector<std::size_t> order(rows.begin(), rows.end());
    Matrix xb;
    Labels yb;
    for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
        std::copy(rows.begin(), rows.end(), order.begin());
        std::mt19937_64 rng(hp.seed + static_cast<std::uint64_t>(epoch));
        std::shuffle(order.begin(), order.end(), rng);

        long batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += hp.batch_size, ++batch_index) {
            const auto end = std::min(order.size(), start + hp.batch_size);
            const auto b = static_cast<Eigen::Index>(end - start);
            xb.resize(b, d);
            yb.resize(static_cast<std::size_t>(b));
            for (Eigen::Index i = 0; i < b; ++i) {
                const auto r = order[start + static_cast<std::size_t>(i)];
                xb.row(i) = features.row(static_cast<Eigen::Index>(r));
                yb[static_cast<std::size_t>(i)] = targets[r];
            }
            auto lg = loss_and_gradient(model, xb, yb, hp.weight_decay);
            if (!std::isfinite(lg.loss)) throw TrainingError("non-finite loss", epoch, batch_index);
            if (!all_finite(lg.gradient)) throw TrainingError("non-finite gradient", epoch, batch_index);
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                model.layers[l].weight -= hp.learning_rate * lg.gradient[l].weight;
                model.layers[l].bias -= hp.learning_rate * lg.gradient[l].bias;
            }
        }
        model.trained_epochs = epoch;
        on_epoch(model);
    }
}

std::vector<ModelParams> train_erm(const TabularDataset& train, const HyperParams& hp) {
    std::vector<std::size_t> rows(train.size());
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<ModelParams> checkpoints;
    checkpoints.reserve(static_cast<std::size_t>(std::max(hp.epochs, 0)));
    train_rows(train, rows, hp, [&](const ModelParams& m) { checkpoints.push_back(m); });
    return checkpoints;
}

std::vector<std::size_t> upsampled_rows(const TabularDataset& train,
                                        std::span<const std::int64_t> repeat_ids, int lambda) {
    if (lambda < 1) throw ConfigError("upsampling factor lambda must be >= 1");
    std::vector<std::size_t> positions = train.positions_of(repeat_ids);
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());

    std::vector<std::size_t> rows(train.size());
    std::iota(rows.begin(), rows.end(), 0);
    rows.reserve(rows.size() + positions.size() * static_cast<std::size_t>(lambda - 1));
    for (auto p : positions) {
        for (int k = 1; k < lambda; ++k) rows.push_back(p);
    }
    return rows;
}

std::vector<ModelParams> train_upsampled(const TabularDataset& train,
                                         std::span<const std::int64_t> repeat_ids, int lambda,
                                         const HyperParams& hp) {
    const auto rows = upsampled_rows(train, repeat_ids, lambda);
    std::vector<ModelParams> checkpoints;
    checkpoints.reserve(static_cast<std::size_t>(std::max(hp.epochs, 0)));
    train_rows(train, rows, hp, [&](const ModelParams& m) { checkpoints.push_back(m); });
    return checkpoints;
}

Vector predict_proba(const ModelParams& model, const Matrix& x) {
    Vector z = model.logits(x);
    return z.unaryExpr([](double v) { return sigmoid(v); });
}

Vector predict_proba(const ModelParams& model, const TabularDataset& data) {
    return predict_proba(model, data.features());
}

Labels predict(const ModelParams& model, const Matrix& x) {
    const Vector p = predict_proba(model, x);
    Labels out(static_cast<std::size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p(i) >= 0.5 ? 1 : 0;
    return out;
}

Labels predict(const ModelParams& model, const TabularDataset& data) {
    return predict(model, data.features());
}

double accuracy(const Labels& predictions, const Labels& targets) {
    if (predictions.size() != targets.size()) throw DataError("accuracy: length mismatch");
    if (targets.empty()) throw DataError("accuracy: empty input");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) correct += predictions[i] == targets[i];
    return static_cast<double>(correct) / static_cast<double>(targets.size());
}

// --- serialization -------------------------------------------------------------

nlohmann::json to_json(const ModelParams& model) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : model.layers) {
        layers.push_back({{"rows", l.weight.rows()},
                          {"cols", l.weight.cols()},
                          {"weight", std::vector<double>(l.weight.data(), l.weight.data() + l.weight.size())},
                          {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
    }
    return {{"format", "antigone-model"},
            {"version", kModelFormatVersion},
            {"hparams", to_json(model.source)},
            {"trained_epochs", model.trained_epochs},
            {"layers", layers}};
}

ModelParams model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != "antigone-model") {
            throw DataError("not a model checkpoint");
        }
        const auto version = j.at("version").get<int>();
        if (version != kModelFormatVersion) {
            throw DataError("unsupported model format version " + std::to_string(version));
        }
        ModelParams m;
        m.source = hyper_params_from_json(j.at("hparams"));
        m.trained_epochs = j.at("trained_epochs").get<int>();
        for (const auto& lj : j.at("layers")) {
            const auto rows = lj.at("rows").get<Eigen::Index>();
            const auto cols = lj.at("cols").get<Eigen::Index>();
            const auto w = lj.at("weight").get<std::vector<double>>();
            const auto b = lj.at("bias").get<std::vector<double>>();
            if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
                static_cast<Eigen::Index>(b.size()) != rows) {
                throw DataError("model layer has inconsistent shape");
            }
            m.layers.push_back({Eigen::Map<const Matrix>(w.data(), rows, cols),
                                Eigen::Map<const Vector>(b.data(), rows)});
        }
        const auto expected = m.source.architecture.kind == ArchKind::linear ? 1u : 2u;
        if (m.layers.size() != expected) throw DataError("layer count does not match architecture");
        if (m.layers.back().weight.rows() != 1) throw DataError("output layer must have one unit");
        if (expected == 2 &&
            (m.layers[0].weight.rows() != static_cast<Eigen::Index>(m.source.architecture.hidden_units) ||
             m.layers[1].weight.cols() != m.layers[0].weight.rows())) {
            throw DataError("hidden layer shape does not match architecture");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model checkpoint: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const ModelParams& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << to_json(model).dump() << '\n';
}

ModelParams load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model checkpoint '" + path.string() + "': " + e.what());
    }
    return model_from_json(j);
}

}  // namespace antigone
