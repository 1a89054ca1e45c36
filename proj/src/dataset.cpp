#include "antigone/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "antigone/error.hpp"
#include "csv.hpp"

namespace antigone {

namespace {

constexpr const char* kRowIdColumn = "__row_id";
constexpr const char* kTargetColumn = "__target";
constexpr const char* kSensitiveColumn = "__sensitive";
constexpr const char* kSplitColumn = "__split";

void check_binary(const Labels& labels, const char* what) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] > 1) {
            throw DataError(std::string(what) + " value at row " + std::to_string(i) +
                            " is not 0 or 1");
        }
    }
}

std::string location(std::size_t line, const std::string& column) {
    return "line " + std::to_string(line) + ", column '" + column + "'";
}

}  // namespace

std::string to_string(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        case Split::test: return "test";
        case Split::unassigned: return "unassigned";
    }
    return "unassigned";
}

Split split_from_string(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "validation") return Split::validation;
    if (name == "test") return Split::test;
    if (name == "unassigned" || name.empty()) return Split::unassigned;
    throw DataError("unknown split tag '" + name + "'");
}

// --- TabularDataset ----------------------------------------------------------

TabularDataset::TabularDataset(Matrix features, Labels targets, std::optional<Labels> sensitive,
                               std::vector<std::int64_t> row_ids, Split split,
                               std::vector<std::string> feature_names,
                               std::vector<bool> numeric_columns)
    : features_(std::move(features)),
      targets_(std::move(targets)),
      sensitive_(std::move(sensitive)),
      row_ids_(std::move(row_ids)),
      split_(split),
      feature_names_(std::move(feature_names)),
      numeric_columns_(std::move(numeric_columns)) {
    const auto n = targets_.size();
    if (static_cast<std::size_t>(features_.rows()) != n) {
        throw DataError("feature rows (" + std::to_string(features_.rows()) +
                        ") do not match target count (" + std::to_string(n) + ")");
    }
    if (row_ids_.size() != n) throw DataError("row_ids length does not match target count");
    if (sensitive_ && sensitive_->size() != n) {
        throw DataError("sensitive length does not match target count");
    }
    check_binary(targets_, "target");
    if (sensitive_) check_binary(*sensitive_, "sensitive");

    std::unordered_set<std::int64_t> seen;
    seen.reserve(n);
    for (auto id : row_ids_) {
        if (!seen.insert(id).second) throw DataError("duplicate row id " + std::to_string(id));
    }

    if (feature_names_.empty()) {
        for (Eigen::Index j = 0; j < features_.cols(); ++j) {
            feature_names_.push_back("x" + std::to_string(j));
        }
    } else if (feature_names_.size() != dim()) {
        throw DataError("feature name count does not match feature dimension");
    }
    if (numeric_columns_.empty()) {
        numeric_columns_.assign(dim(), true);
    } else if (numeric_columns_.size() != dim()) {
        throw DataError("numeric column mask does not match feature dimension");
    }
}

const Labels& TabularDataset::sensitive_or_throw() const {
    if (!sensitive_) throw DataError("dataset has no sensitive attribute column");
    return *sensitive_;
}

TabularDataset TabularDataset::subset(std::span<const std::size_t> positions) const {
    Matrix x(static_cast<Eigen::Index>(positions.size()), features_.cols());
    Labels y(positions.size());
    std::optional<Labels> a;
    if (sensitive_) a.emplace(positions.size());
    std::vector<std::int64_t> ids(positions.size());
    for (std::size_t k = 0; k < positions.size(); ++k) {
        const auto p = positions[k];
        if (p >= size()) throw DataError("subset position out of range");
        x.row(static_cast<Eigen::Index>(k)) = features_.row(static_cast<Eigen::Index>(p));
        y[k] = targets_[p];
        if (a) (*a)[k] = (*sensitive_)[p];
        ids[k] = row_ids_[p];
    }
    return TabularDataset(std::move(x), std::move(y), std::move(a), std::move(ids), split_,
                          feature_names_, numeric_columns_);
}

TabularDataset TabularDataset::restrict_to_class(Label target_class) const {
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < size(); ++i) {
        if (targets_[i] == target_class) positions.push_back(i);
    }
    return subset(positions);
}

TabularDataset TabularDataset::with_split(Split split) const {
    TabularDataset copy = *this;
    copy.split_ = split;
    return copy;
}

TabularDataset TabularDataset::with_features(Matrix features) const {
    if (features.rows() != features_.rows() || features.cols() != features_.cols()) {
        throw DataError("replacement features have a different shape");
    }
    TabularDataset copy = *this;
    copy.features_ = std::move(features);
    return copy;
}

TabularDataset TabularDataset::with_sensitive(std::optional<Labels> sensitive) const {
    return TabularDataset(features_, targets_, std::move(sensitive), row_ids_, split_,
                          feature_names_, numeric_columns_);
}

std::vector<std::size_t> TabularDataset::positions_of(std::span<const std::int64_t> ids) const {
    std::unordered_map<std::int64_t, std::size_t> index;
    index.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) index.emplace(row_ids_[i], i);
    std::vector<std::size_t> out;
    out.reserve(ids.size());
    for (auto id : ids) {
        auto it = index.find(id);
        if (it == index.end()) throw DataError("unknown row id " + std::to_string(id));
        out.push_back(it->second);
    }
    return out;
}

// --- schema --------------------------------------------------------------------

void DatasetSchema::validate() const {
    if (target_column.empty()) throw ConfigError("schema: target column name is empty");
    std::set<std::string> names;
    for (const auto& col : features) {
        if (col.name.empty()) throw ConfigError("schema: feature column with empty name");
        if (!names.insert(col.name).second) {
            throw ConfigError("schema: duplicate feature column '" + col.name + "'");
        }
        if (col.name == target_column) {
            throw ConfigError("schema: target column '" + col.name + "' listed as a feature");
        }
        if (col.kind == ColumnKind::categorical && col.vocab.empty()) {
            throw ConfigError("schema: categorical column '" + col.name + "' has no vocabulary");
        }
        if (col.kind == ColumnKind::categorical) {
            std::set<std::string> v(col.vocab.begin(), col.vocab.end());
            if (v.size() != col.vocab.size()) {
                throw ConfigError("schema: duplicate category in '" + col.name + "'");
            }
        }
    }
    if (sensitive_column && *sensitive_column == target_column) {
        throw ConfigError("schema: sensitive column equals target column");
    }
}

std::size_t DatasetSchema::encoded_dim() const {
    std::size_t d = 0;
    for (const auto& col : features) d += col.kind == ColumnKind::numeric ? 1 : col.vocab.size();
    return d;
}

DatasetSchema schema_from_json(const nlohmann::json& j) {
    DatasetSchema s;
    try {
        for (const auto& c : j.at("features")) {
            FeatureColumn col;
            col.name = c.at("name").get<std::string>();
            const auto kind = c.value("kind", std::string("numeric"));
            if (kind == "numeric") {
                col.kind = ColumnKind::numeric;
            } else if (kind == "categorical") {
                col.kind = ColumnKind::categorical;
                if (c.contains("vocab")) col.vocab = c.at("vocab").get<std::vector<std::string>>();
            } else {
                throw ConfigError("schema.features: unknown kind '" + kind + "'");
            }
            s.features.push_back(std::move(col));
        }
        s.target_column = j.at("target").at("name").get<std::string>();
        s.positive_token = j.at("target").at("positive").get<std::string>();
        if (j.contains("sensitive") && !j.at("sensitive").is_null()) {
            s.sensitive_column = j.at("sensitive").at("name").get<std::string>();
            s.group1_token = j.at("sensitive").at("group1").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("schema: ") + e.what());
    }
    return s;
}

nlohmann::json schema_to_json(const DatasetSchema& schema) {
    nlohmann::json features = nlohmann::json::array();
    for (const auto& col : schema.features) {
        nlohmann::json c = {{"name", col.name},
                            {"kind", col.kind == ColumnKind::numeric ? "numeric" : "categorical"}};
        if (col.kind == ColumnKind::categorical) c["vocab"] = col.vocab;
        features.push_back(std::move(c));
    }
    nlohmann::json j = {{"features", features},
                        {"target", {{"name", schema.target_column},
                                    {"positive", schema.positive_token}}}};
    if (schema.sensitive_column) {
        j["sensitive"] = {{"name", *schema.sensitive_column}, {"group1", schema.group1_token}};
    }
    return j;
}

namespace {

struct CsvHeader {
    std::vector<std::string> names;
    std::unordered_map<std::string, std::size_t> index;

    std::size_t require(const std::string& name) const {
        auto it = index.find(name);
        if (it == index.end()) throw DataError("line 1: missing column '" + name + "'");
        return it->second;
    }
};

CsvHeader read_header(std::istream& in, std::size_t& line_no) {
    std::string line;
    while (detail::next_line(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        CsvHeader h;
        for (auto& cell : detail::split_csv_line(line)) {
            std::string name(detail::trim(cell));
            if (!h.index.emplace(name, h.names.size()).second) {
                throw DataError("line " + std::to_string(line_no) + ": duplicate column '" + name + "'");
            }
            h.names.push_back(std::move(name));
        }
        return h;
    }
    throw DataError("empty file");
}

}  // namespace

DatasetSchema fit_vocabulary(const std::filesystem::path& path, DatasetSchema schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::size_t line_no = 0;
    const auto header = read_header(in, line_no);
    std::vector<std::pair<std::size_t, std::set<std::string>>> pending;
    std::vector<std::size_t> which;
    for (std::size_t k = 0; k < schema.features.size(); ++k) {
        const auto& col = schema.features[k];
        if (col.kind == ColumnKind::categorical && col.vocab.empty()) {
            pending.push_back({header.require(col.name), {}});
            which.push_back(k);
        }
    }
    std::string line;
    while (detail::next_line(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.names.size()) {
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.names.size()) + " cells, found " +
                            std::to_string(cells.size()));
        }
        for (auto& [column, tokens] : pending) tokens.emplace(detail::trim(cells[column]));
    }
    for (std::size_t k = 0; k < which.size(); ++k) {
        auto& vocab = schema.features[which[k]].vocab;
        vocab.assign(pending[k].second.begin(), pending[k].second.end());
    }
    return schema;
}

TabularDataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema) {
    schema.validate();
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::size_t line_no = 0;
    const auto header = read_header(in, line_no);

    std::vector<std::size_t> feature_index;
    std::vector<std::unordered_map<std::string, std::size_t>> vocab_index;
    std::vector<std::string> names;
    std::vector<bool> numeric;
    for (const auto& col : schema.features) {
        feature_index.push_back(header.require(col.name));
        std::unordered_map<std::string, std::size_t> vi;
        if (col.kind == ColumnKind::numeric) {
            names.push_back(col.name);
            numeric.push_back(true);
        } else {
            for (std::size_t v = 0; v < col.vocab.size(); ++v) {
                vi.emplace(col.vocab[v], v);
                names.push_back(col.name + "=" + col.vocab[v]);
                numeric.push_back(false);
            }
        }
        vocab_index.push_back(std::move(vi));
    }
    const auto target_index = header.require(schema.target_column);
    std::optional<std::size_t> sensitive_index;
    if (schema.sensitive_column) sensitive_index = header.require(*schema.sensitive_column);

    const auto d = schema.encoded_dim();
    std::vector<double> values;
    Labels targets;
    Labels sensitive;
    std::string line;
    while (detail::next_line(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.names.size()) {
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.names.size()) + " cells, found " +
                            std::to_string(cells.size()));
        }
        const auto row_start = values.size();
        values.resize(row_start + d, 0.0);
        std::size_t offset = row_start;
        for (std::size_t k = 0; k < schema.features.size(); ++k) {
            const auto& col = schema.features[k];
            const auto cell = detail::trim(cells[feature_index[k]]);
            if (col.kind == ColumnKind::numeric) {
                const auto v = detail::parse_double(cell);
                if (!v || !std::isfinite(*v)) {
                    throw DataError(location(line_no, col.name) + ": unparseable numeric cell '" +
                                    std::string(cell) + "'");
                }
                values[offset++] = *v;
            } else {
                auto it = vocab_index[k].find(std::string(cell));
                if (it == vocab_index[k].end()) {
                    throw DataError(location(line_no, col.name) + ": unseen category '" +
                                    std::string(cell) + "'");
                }
                values[offset + it->second] = 1.0;
                offset += col.vocab.size();
            }
        }
        targets.push_back(detail::trim(cells[target_index]) == schema.positive_token ? 1 : 0);
        if (sensitive_index) {
            sensitive.push_back(detail::trim(cells[*sensitive_index]) == schema.group1_token ? 1 : 0);
        }
    }
    if (targets.empty()) throw DataError("line " + std::to_string(line_no) + ": file has no data rows");

    const auto n = targets.size();
    Matrix x = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(n),
                                  static_cast<Eigen::Index>(d));
    std::vector<std::int64_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::optional<Labels> a;
    if (sensitive_index) a = std::move(sensitive);
    return TabularDataset(std::move(x), std::move(targets), std::move(a), std::move(ids),
                          Split::unassigned, std::move(names), std::move(numeric));
}

// --- canonical file ------------------------------------------------------------

std::string dataset_to_csv(const TabularDataset& data, const std::string& header_comment) {
    std::ostringstream out;
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "#kinds:";
    for (std::size_t j = 0; j < data.dim(); ++j) {
        out << (j ? "," : "") << (data.numeric_columns()[j] ? 'n' : 'c');
    }
    out << '\n';
    for (const auto& name : data.feature_names()) out << detail::quote(name) << ',';
    out << kRowIdColumn << ',' << kTargetColumn << ',' << kSensitiveColumn << ',' << kSplitColumn
        << '\n';
    const auto& x = data.features();
    const auto split_name = to_string(data.split());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dim(); ++j) {
            out << detail::format_double(x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
                << ',';
        }
        out << data.row_ids()[i] << ',' << int(data.targets()[i]) << ',';
        if (data.sensitive()) out << int((*data.sensitive())[i]);
        out << ',' << split_name << '\n';
    }
    return out.str();
}

void write_dataset_csv(const std::filesystem::path& path, const TabularDataset& data,
                       const std::string& header_comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << dataset_to_csv(data, header_comment);
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

namespace {

TabularDataset parse_canonical(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<bool> numeric;
    bool have_kinds = false;
    std::vector<std::string> header;
    while (detail::next_line(in, line)) {
        ++line_no;
        if (line.rfind("#kinds:", 0) == 0) {
            have_kinds = true;
            const auto body = line.substr(7);
            if (!body.empty()) {
                for (const auto& k : detail::split_csv_line(body)) numeric.push_back(k == "n");
            }
            continue;
        }
        if (!line.empty() && line[0] == '#') continue;
        if (detail::trim(line).empty()) continue;
        header = detail::split_csv_line(line);
        break;
    }
    if (header.empty()) throw DataError("empty file");
    if (header.size() < 4 || header[header.size() - 4] != kRowIdColumn ||
        header[header.size() - 3] != kTargetColumn || header[header.size() - 2] != kSensitiveColumn ||
        header[header.size() - 1] != kSplitColumn) {
        throw DataError("line " + std::to_string(line_no) + ": missing reserved columns");
    }
    const auto d = header.size() - 4;
    std::vector<std::string> names(header.begin(), header.begin() + static_cast<long>(d));
    if (!have_kinds) numeric.assign(d, true);
    if (numeric.size() != d) throw DataError("#kinds line does not match the column count");

    std::vector<double> values;
    Labels targets;
    Labels sensitive;
    std::vector<std::int64_t> ids;
    std::optional<bool> has_sensitive;
    std::optional<Split> split;
    while (detail::next_line(in, line)) {
        ++line_no;
        if (detail::trim(line).empty() || line[0] == '#') continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
        }
        for (std::size_t j = 0; j < d; ++j) {
            const auto v = detail::parse_double(cells[j]);
            if (!v) throw DataError(location(line_no, names[j]) + ": unparseable numeric cell");
            values.push_back(*v);
        }
        const auto id = detail::parse_int(cells[d]);
        if (!id) throw DataError(location(line_no, kRowIdColumn) + ": bad row id");
        ids.push_back(*id);
        const auto y = detail::parse_int(cells[d + 1]);
        if (!y || (*y != 0 && *y != 1)) throw DataError(location(line_no, kTargetColumn) + ": not 0/1");
        targets.push_back(static_cast<Label>(*y));
        const auto a_cell = detail::trim(cells[d + 2]);
        const bool present = !a_cell.empty();
        if (has_sensitive && *has_sensitive != present) {
            throw DataError(location(line_no, kSensitiveColumn) + ": blank and filled cells mixed");
        }
        has_sensitive = present;
        if (present) {
            const auto a = detail::parse_int(a_cell);
            if (!a || (*a != 0 && *a != 1)) {
                throw DataError(location(line_no, kSensitiveColumn) + ": not 0/1");
            }
            sensitive.push_back(static_cast<Label>(*a));
        }
        const auto s = split_from_string(std::string(detail::trim(cells[d + 3])));
        if (split && *split != s) throw DataError(location(line_no, kSplitColumn) + ": mixed split tags");
        split = s;
    }
    if (targets.empty()) throw DataError("file has no data rows");
    Matrix x = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(targets.size()),
                                  static_cast<Eigen::Index>(d));
    std::optional<Labels> a;
    if (has_sensitive.value_or(false)) a = std::move(sensitive);
    return TabularDataset(std::move(x), std::move(targets), std::move(a), std::move(ids),
                          split.value_or(Split::unassigned), std::move(names), std::move(numeric));
}

}  // namespace

TabularDataset read_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return parse_canonical(in);
}

TabularDataset dataset_from_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_canonical(in);
}

// --- standardizer --------------------------------------------------------------

Standardizer Standardizer::fit(const TabularDataset& train) {
    if (train.split() == Split::validation || train.split() == Split::test) {
        throw DataError("standardizer must be fitted on the training split");
    }
    if (train.empty()) throw DataError("cannot fit a standardizer on an empty dataset");
    Standardizer s;
    s.fitted_ = true;
    s.numeric_ = train.numeric_columns();
    const auto& x = train.features();
    const auto n = static_cast<double>(train.size());
    s.mean_ = x.colwise().sum().transpose() / n;
    s.stdev_ = Vector::Zero(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double ss = (x.col(j).array() - s.mean_(j)).square().sum();
        const double sd = std::sqrt(ss / n);
        s.stdev_(j) = sd > 1e-12 * std::max(1.0, std::abs(s.mean_(j))) ? sd : 0.0;
    }
    return s;
}

TabularDataset Standardizer::apply(const TabularDataset& data) const {
    if (!fitted_) throw DataError("standardizer has not been fitted");
    if (data.dim() != static_cast<std::size_t>(mean_.size())) {
        throw DataError("standardizer fitted on " + std::to_string(mean_.size()) +
                        " columns, dataset has " + std::to_string(data.dim()));
    }
    Matrix x = data.features();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (!numeric_[static_cast<std::size_t>(j)]) continue;
        if (stdev_(j) == 0.0) {
            x.col(j).setZero();
        } else {
            x.col(j) = (x.col(j).array() - mean_(j)) / stdev_(j);
        }
    }
    return data.with_features(std::move(x));
}

nlohmann::json Standardizer::to_json() const {
    if (!fitted_) throw DataError("standardizer has not been fitted");
    return {{"mean", std::vector<double>(mean_.data(), mean_.data() + mean_.size())},
            {"stdev", std::vector<double>(stdev_.data(), stdev_.data() + stdev_.size())},
            {"numeric", numeric_}};
}

Standardizer Standardizer::from_json(const nlohmann::json& j) {
    Standardizer s;
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto stdev = j.at("stdev").get<std::vector<double>>();
    s.numeric_ = j.at("numeric").get<std::vector<bool>>();
    if (mean.size() != stdev.size() || mean.size() != s.numeric_.size()) {
        throw DataError("standardizer file has inconsistent lengths");
    }
    s.mean_ = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    s.stdev_ = Eigen::Map<const Vector>(stdev.data(), static_cast<Eigen::Index>(stdev.size()));
    s.fitted_ = true;
    return s;
}

// --- split -----------------------------------------------------------------------

DatasetSplits split(const TabularDataset& data, SplitFractions f, std::uint64_t seed) {
    if (f.train < 0 || f.validation < 0 || f.test < 0) {
        throw ConfigError("split fractions must be nonnegative");
    }
    if (std::abs(f.train + f.validation + f.test - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1");
    }
    const auto n = data.size();
    // 1e-9 slack keeps exact ratios such as k/n from flooring to k-1.
    const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * f.validation + 1e-9));
    const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * f.test + 1e-9));
    if (n_val == 0) throw DataError("empty validation split");
    if (n_test == 0) throw DataError("empty test split");
    if (n_val + n_test >= n) throw DataError("empty train split");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);

    auto take = [&](std::size_t begin, std::size_t end, Split tag) {
        std::vector<std::size_t> rows(perm.begin() + static_cast<long>(begin),
                                      perm.begin() + static_cast<long>(end));
        std::sort(rows.begin(), rows.end());
        return data.subset(rows).with_split(tag);
    };
    DatasetSplits out;
    out.validation = take(0, n_val, Split::validation);
    out.test = take(n_val, n_val + n_test, Split::test);
    out.train = take(n_val + n_test, n, Split::train);
    return out;
}

// --- synthetic -------------------------------------------------------------------

void SyntheticSpec::validate() const {
    const auto d = dim();
    if (d == 0) throw ConfigError("synthetic: feature dimension must be positive");
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& b = blocks[k];
        const auto tag = "synthetic block (y=" + std::to_string(k / 2) + ",a=" + std::to_string(k % 2) + ")";
        if (b.mean.size() != d || b.variance.size() != d) {
            throw ConfigError(tag + ": dimension mismatch");
        }
        for (double v : b.variance) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(tag + ": variance must be > 0");
        }
        for (double m : b.mean) {
            if (!std::isfinite(m)) throw ConfigError(tag + ": non-finite mean");
        }
    }
}

namespace {

/// Unit-variance, zero-mean blocks with the per-class minority counts set.
SyntheticSpec two_group_layout(std::size_t per_class, double minority_fraction, std::size_t dim,
                               std::uint64_t seed) {
    if (dim < 2) throw ConfigError("synthetic: preset layouts need dim >= 2");
    if (minority_fraction < 0.0 || minority_fraction > 1.0) {
        throw ConfigError("synthetic: minority fraction outside [0, 1]");
    }
    SyntheticSpec spec;
    spec.seed = seed;
    const auto minority = static_cast<std::size_t>(
        std::llround(static_cast<double>(per_class) * minority_fraction));
    for (Label y = 0; y < 2; ++y) {
        for (Label a = 0; a < 2; ++a) {
            auto& b = spec.block(y, a);
            b.count = a == 1 ? per_class - minority : minority;
            b.mean.assign(dim, 0.0);
            b.variance.assign(dim, 1.0);
        }
    }
    return spec;
}

}  // namespace

SyntheticSpec SyntheticSpec::axis_blocks(std::size_t per_class, double minority_fraction,
                                         double separation, std::size_t dim, std::uint64_t seed) {
    auto spec = two_group_layout(per_class, minority_fraction, dim, seed);
    for (Label y = 0; y < 2; ++y) {
        for (Label a = 0; a < 2; ++a) {
            const std::size_t axis = y == 1 ? 0 : 1;
            spec.block(y, a).mean[axis] = a == 1 ? separation : -separation;
        }
    }
    return spec;
}

SyntheticSpec SyntheticSpec::spurious_blocks(std::size_t per_class, double minority_fraction, double core,
                                             double spurious, std::size_t dim, std::uint64_t seed) {
    auto spec = two_group_layout(per_class, minority_fraction, dim, seed);
    for (Label y = 0; y < 2; ++y) {
        for (Label a = 0; a < 2; ++a) {
            auto& mean = spec.block(y, a).mean;
            mean[0] = y == 1 ? core : -core;
            mean[1] = y == a ? spurious : -spurious;
        }
    }
    return spec;
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
    try {
        const auto seed = j.value("seed", std::uint64_t{0});
        if (j.contains("axis")) {
            const auto& ax = j.at("axis");
            return SyntheticSpec::axis_blocks(ax.at("per_class").get<std::size_t>(),
                                              ax.at("minority_fraction").get<double>(),
                                              ax.value("separation", 2.0),
                                              ax.value("dim", std::size_t{2}), seed);
        }
        if (j.contains("spurious")) {
            const auto& sp = j.at("spurious");
            return SyntheticSpec::spurious_blocks(sp.at("per_class").get<std::size_t>(),
                                                  sp.at("minority_fraction").get<double>(),
                                                  sp.value("core", 1.0), sp.value("spurious", 2.0),
                                                  sp.value("dim", std::size_t{2}), seed);
        }
        SyntheticSpec spec;
        spec.seed = seed;
        std::array<bool, 4> seen{};
        for (const auto& b : j.at("blocks")) {
            const auto y = b.at("y").get<int>();
            const auto a = b.at("a").get<int>();
            if ((y != 0 && y != 1) || (a != 0 && a != 1)) {
                throw ConfigError("synthetic.blocks: y and a must be 0 or 1");
            }
            auto& block = spec.block(static_cast<Label>(y), static_cast<Label>(a));
            block.count = b.at("count").get<std::size_t>();
            block.mean = b.at("mean").get<std::vector<double>>();
            block.variance = b.at("variance").get<std::vector<double>>();
            seen[static_cast<std::size_t>(2 * y + a)] = true;
        }
        for (bool s : seen) {
            if (!s) throw ConfigError("synthetic.blocks: all four (y, a) blocks are required");
        }
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("synthetic: ") + e.what());
    }
}

nlohmann::json synthetic_spec_to_json(const SyntheticSpec& spec) {
    nlohmann::json blocks = nlohmann::json::array();
    for (int y = 0; y < 2; ++y) {
        for (int a = 0; a < 2; ++a) {
            const auto& b = spec.block(static_cast<Label>(y), static_cast<Label>(a));
            blocks.push_back({{"y", y}, {"a", a}, {"count", b.count}, {"mean", b.mean},
                              {"variance", b.variance}});
        }
    }
    return {{"seed", spec.seed}, {"blocks", blocks}};
}

TabularDataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const auto d = spec.dim();
    std::size_t n = 0;
    for (const auto& b : spec.blocks) n += b.count;

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    Labels y(n);
    Labels a(n);
    std::size_t row = 0;
    for (Label yy = 0; yy < 2; ++yy) {
        for (Label aa = 0; aa < 2; ++aa) {
            const auto& b = spec.block(yy, aa);
            for (std::size_t i = 0; i < b.count; ++i, ++row) {
                for (std::size_t j = 0; j < d; ++j) {
                    x(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) =
                        b.mean[j] + std::sqrt(b.variance[j]) * normal(rng);
                }
                y[row] = yy;
                a[row] = aa;
            }
        }
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix xs(x.rows(), x.cols());
    Labels ys(n);
    Labels as(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(perm[i]));
        ys[i] = y[perm[i]];
        as[i] = a[perm[i]];
    }
    std::vector<std::int64_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    return TabularDataset(std::move(xs), std::move(ys), std::move(as), std::move(ids),
                          Split::unassigned);
}

}  // namespace antigone
