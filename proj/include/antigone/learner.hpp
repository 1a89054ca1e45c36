#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "antigone/dataset.hpp"
#include "antigone/types.hpp"

namespace antigone {

enum class ArchKind { linear, mlp };

struct Architecture {
    ArchKind kind = ArchKind::linear;
    std::size_t hidden_units = 0;

    static Architecture linear() { return {ArchKind::linear, 0}; }
    static Architecture mlp(std::size_t hidden) { return {ArchKind::mlp, hidden}; }

    bool operator==(const Architecture&) const = default;
};

/// One point of a training grid.
struct HyperParams {
    double learning_rate = 0.1;
    double weight_decay = 0.0;
    int epochs = 1;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
    Architecture architecture;

    void validate() const;
    bool operator==(const HyperParams&) const = default;
};

nlohmann::json to_json(const HyperParams& hp);
HyperParams hyper_params_from_json(const nlohmann::json& j);
std::string describe(const HyperParams& hp);

/// Dense layer computing weight * x + bias; weight is (out x in).
struct Layer {
    Matrix weight;
    Vector bias;

    bool operator==(const Layer& other) const {
        return weight.rows() == other.weight.rows() && weight.cols() == other.weight.cols() &&
               bias.size() == other.bias.size() && weight == other.weight && bias == other.bias;
    }
};

/// Trained parameters. Linear models have a single (1 x d) layer; MLPs a
/// (h x d) rectifier layer followed by a (1 x h) output layer.
struct ModelParams {
    std::vector<Layer> layers;
    int trained_epochs = 0;
    HyperParams source;

    std::size_t input_dim() const { return static_cast<std::size_t>(layers.front().weight.cols()); }
    std::size_t parameter_count() const;

    /// Pre-sigmoid scores for every row of `x`.
    Vector logits(const Matrix& x) const;

    bool operator==(const ModelParams&) const = default;
};

/// Deterministic initial parameters: zeros for linear models, uniform in
/// +-1/sqrt(fan_in) for every MLP weight and bias.
ModelParams initial_params(const HyperParams& hp, std::size_t input_dim);

/// Mean (optionally weighted) binary cross-entropy plus
/// weight_decay * sum of squared weights, biases excluded.
struct LossAndGradient {
    double loss = 0.0;
    std::vector<Layer> gradient;
};

/// `row_weights` may be empty (all ones). The data term is normalised by
/// the total weight.
LossAndGradient loss_and_gradient(const ModelParams& model, const Matrix& x, std::span<const Label> y,
                                  double weight_decay, std::span<const double> row_weights = {});

double training_loss(const ModelParams& model, const TabularDataset& data, double weight_decay);

/// All parameters in a fixed order (layer by layer, weight row-major then bias).
std::vector<double> flatten(const std::vector<Layer>& layers);
void unflatten(std::span<const double> values, std::vector<Layer>& layers);

/// Called after each completed epoch with the checkpoint for that epoch.
using EpochCallback = std::function<void(const ModelParams&)>;

/// Mini-batch gradient descent over `rows` (positions into `train`, may
/// repeat). Epoch k (1-based) shuffles `rows` with seed + k.
void train_rows(const TabularDataset& train, std::span<const std::size_t> rows,
                const HyperParams& hp, const EpochCallback& on_epoch);

/// One checkpoint per epoch; element k-1 holds the model after epoch k.
std::vector<ModelParams> train_erm(const TabularDataset& train, const HyperParams& hp);

/// Positions of the upsampled training set: every original row once, then
/// lambda - 1 extra copies of each repeated row in dataset order.
std::vector<std::size_t> upsampled_rows(const TabularDataset& train,
                                        std::span<const std::int64_t> repeat_ids, int lambda);

std::vector<ModelParams> train_upsampled(const TabularDataset& train,
                                         std::span<const std::int64_t> repeat_ids, int lambda,
                                         const HyperParams& hp);

Vector predict_proba(const ModelParams& model, const Matrix& x);
Vector predict_proba(const ModelParams& model, const TabularDataset& data);
/// 1 iff probability >= 0.5.
Labels predict(const ModelParams& model, const Matrix& x);
Labels predict(const ModelParams& model, const TabularDataset& data);

double accuracy(const Labels& predictions, const Labels& targets);

// --- checkpoint files --------------------------------------------------------

nlohmann::json to_json(const ModelParams& model);
ModelParams model_from_json(const nlohmann::json& j);
void save_model(const std::filesystem::path& path, const ModelParams& model);
ModelParams load_model(const std::filesystem::path& path);

}  // namespace antigone
