#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "antigone/types.hpp"

namespace antigone {

enum class Split { train, validation, test, unassigned };

std::string to_string(Split split);
Split split_from_string(const std::string& name);

/// Feature matrix plus binary targets, optional binary sensitive attributes
/// and stable row ids. Immutable after construction; the constructor
/// enforces shape, uniqueness and 0/1 invariants.
class TabularDataset {
public:
    TabularDataset() = default;
    TabularDataset(Matrix features, Labels targets, std::optional<Labels> sensitive,
                   std::vector<std::int64_t> row_ids, Split split,
                   std::vector<std::string> feature_names = {},
                   std::vector<bool> numeric_columns = {});

    std::size_t size() const noexcept { return targets_.size(); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }
    bool empty() const noexcept { return targets_.empty(); }

    const Matrix& features() const noexcept { return features_; }
    const Labels& targets() const noexcept { return targets_; }
    const std::optional<Labels>& sensitive() const noexcept { return sensitive_; }
    bool has_sensitive() const noexcept { return sensitive_.has_value(); }
    /// Throws DataError when no sensitive attribute is attached.
    const Labels& sensitive_or_throw() const;
    const std::vector<std::int64_t>& row_ids() const noexcept { return row_ids_; }
    Split split() const noexcept { return split_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    /// true for columns that came from numeric CSV columns (standardized),
    /// false for one-hot columns (passed through by the standardizer).
    const std::vector<bool>& numeric_columns() const noexcept { return numeric_columns_; }

    /// Rows at the given positions, in the given order.
    TabularDataset subset(std::span<const std::size_t> positions) const;
    /// Rows whose target equals `target_class`.
    TabularDataset restrict_to_class(Label target_class) const;

    TabularDataset with_split(Split split) const;
    TabularDataset with_features(Matrix features) const;
    /// Replaces (or attaches) the sensitive column.
    TabularDataset with_sensitive(std::optional<Labels> sensitive) const;

    /// Position of each row id, throwing DataError for unknown ids.
    std::vector<std::size_t> positions_of(std::span<const std::int64_t> ids) const;

private:
    Matrix features_;
    Labels targets_;
    std::optional<Labels> sensitive_;
    std::vector<std::int64_t> row_ids_;
    Split split_ = Split::unassigned;
    std::vector<std::string> feature_names_;
    std::vector<bool> numeric_columns_;
};

// --- schema / CSV ingestion ------------------------------------------------

enum class ColumnKind { numeric, categorical };

struct FeatureColumn {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    /// Ordered categories; one one-hot column per entry. Empty for numeric.
    std::vector<std::string> vocab;
};

struct DatasetSchema {
    std::vector<FeatureColumn> features;
    std::string target_column;
    std::string positive_token;
    std::optional<std::string> sensitive_column;
    std::string group1_token;

    /// Throws ConfigError when the target is listed as a feature, a column
    /// name repeats, or a categorical column has an empty vocabulary.
    void validate() const;
    std::size_t encoded_dim() const;
};

DatasetSchema schema_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const DatasetSchema& schema);

/// Scans the CSV and fills the vocabulary of every categorical column that
/// has none, in sorted order of the tokens seen.
DatasetSchema fit_vocabulary(const std::filesystem::path& path, DatasetSchema schema);

/// Parses a headered, comma-separated file. Cells are trimmed of
/// surrounding blanks. Numeric columns are parsed as doubles, categorical
/// ones one-hot encoded in vocabulary order. Errors carry the 1-based file
/// line and the column name.
TabularDataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema);

// --- canonical dataset file ------------------------------------------------

/// Header comment line written first when non-empty (without the leading '#').
void write_dataset_csv(const std::filesystem::path& path, const TabularDataset& data,
                       const std::string& header_comment = {});
std::string dataset_to_csv(const TabularDataset& data, const std::string& header_comment = {});
/// Reads the canonical format back. Lines starting with '#' are skipped.
TabularDataset read_dataset_csv(const std::filesystem::path& path);
TabularDataset dataset_from_csv(const std::string& text);

// --- standardization -------------------------------------------------------

/// Per-column (value - mean) / stdev using population statistics of the
/// training split. One-hot columns and zero-variance columns are special:
/// the former pass through, the latter map to 0.
class Standardizer {
public:
    static Standardizer fit(const TabularDataset& train);

    bool fitted() const noexcept { return fitted_; }
    TabularDataset apply(const TabularDataset& data) const;

    const Vector& mean() const noexcept { return mean_; }
    const Vector& stdev() const noexcept { return stdev_; }

    nlohmann::json to_json() const;
    static Standardizer from_json(const nlohmann::json& j);

private:
    bool fitted_ = false;
    Vector mean_;
    Vector stdev_;
    std::vector<bool> numeric_;
};

// --- splitting ---------------------------------------------------------------

struct SplitFractions {
    double train = 0.0;
    double validation = 0.0;
    double test = 0.0;
};

struct DatasetSplits {
    TabularDataset train;
    TabularDataset validation;
    TabularDataset test;
};

/// Seeded permutation, then validation = floor(n * f_val) and
/// test = floor(n * f_test) rows; the remainder goes to train.
DatasetSplits split(const TabularDataset& data, SplitFractions fractions, std::uint64_t seed);

// --- synthetic generator -----------------------------------------------------

/// One (y, a) subgroup: diagonal Gaussian and sample count.
struct SubgroupBlock {
    std::size_t count = 0;
    std::vector<double> mean;
    std::vector<double> variance;
};

struct SyntheticSpec {
    /// Indexed by 2 * y + a.
    std::array<SubgroupBlock, 4> blocks;
    std::uint64_t seed = 0;

    SubgroupBlock& block(Label y, Label a) { return blocks[2 * y + a]; }
    const SubgroupBlock& block(Label y, Label a) const { return blocks[2 * y + a]; }
    std::size_t dim() const { return blocks[0].mean.size(); }
    void validate() const;

    /// Four blocks on the axes: (y=1,a=1) at +s e1, (y=1,a=0) at -s e1,
    /// (y=0,a=1) at +s e2, (y=0,a=0) at -s e2, unit variance, extra
    /// dimensions zero-mean. Minority fraction applies within each class.
    static SyntheticSpec axis_blocks(std::size_t per_class, double minority_fraction,
                                     double separation = 2.0, std::size_t dim = 2,
                                     std::uint64_t seed = 0);

    /// Core feature e1 at +c for y=1 and -c for y=0 in every group;
    /// spurious feature e2 at +s when (y == a) and -s otherwise. The
    /// spurious feature predicts y only on the majority (a=1). Unit
    /// variance, extra dimensions zero-mean.
    static SyntheticSpec spurious_blocks(std::size_t per_class, double minority_fraction,
                                         double core = 1.0, double spurious = 2.0, std::size_t dim = 2,
                                         std::uint64_t seed = 0);
};

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);
nlohmann::json synthetic_spec_to_json(const SyntheticSpec& spec);

/// Samples each block i.i.d. and shuffles rows deterministically. Ground
/// truth sensitive attributes are attached.
TabularDataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace antigone
