#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "antigone/dataset.hpp"
#include "antigone/error.hpp"
#include "antigone/jtt.hpp"
#include "antigone/learner.hpp"
#include "antigone/mc_noise.hpp"

namespace antigone::cli {

/// An upstream artifact is absent, unreadable, or was produced under a
/// different config hash.
class ArtifactError : public Error {
public:
    using Error::Error;
};

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_config = 2,
    exit_data = 3,
    exit_selection = 4,
    exit_artifact = 5,
};

int exit_code_for(const std::exception& e);

std::string tool_version();

struct CsvSource {
    std::filesystem::path path;
    DatasetSchema schema;
};

enum class CandidateEpochs { all, final };

struct AntigoneSection {
    std::vector<HyperParams> grid;
    CandidateEpochs epochs = CandidateEpochs::all;
};

struct McNoiseSection {
    Vector majority_mean;
    Vector minority_mean;
    double variance = 1.0;
    std::size_t rows_per_group = 0;
    double positive_rate = 0.5;
    std::vector<NoiseParams> cells;
    std::size_t n_samples = 0;
    std::optional<ModelParams> classifier;
    std::uint64_t seed = 0;
};

struct JttSection {
    JttConfig config;
    /// Extra tuning seeds; each reruns the search with reseeded grids.
    std::vector<std::uint64_t> seeds;
};

/// Parsed, validated experiment description. Field errors are reported as
/// ConfigError with a dotted path, e.g. "jtt.bins[1]".
struct ExperimentConfig {
    /// Canonical JSON (overrides applied, output directory removed). The
    /// config hash is taken over its dump.
    nlohmann::json canonical;
    std::uint64_t seed = 0;
    std::filesystem::path output;

    std::optional<CsvSource> csv;
    std::optional<SyntheticSpec> synthetic;
    SplitFractions fractions;
    std::uint64_t split_seed = 0;

    std::optional<AntigoneSection> antigone;
    std::optional<JttSection> jtt;
    std::optional<McNoiseSection> mc_noise;

    std::string hash() const;
};

struct Overrides {
    std::optional<std::filesystem::path> output;
    std::optional<std::uint64_t> seed;
};

/// Relative CSV paths resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& j, const Overrides& overrides,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

struct CommandOptions {
    Execution execution = Execution::parallel;
    /// Overwrite outputs written under a different config hash.
    bool force = false;
};

/// Output layout below the output directory.
namespace paths {
inline constexpr const char* train = "data/train.csv";
inline constexpr const char* validation = "data/validation.csv";
inline constexpr const char* test = "data/test.csv";
inline constexpr const char* standardizer = "data/standardizer.json";
inline constexpr const char* checkpoint_index = "checkpoints/index.json";
inline constexpr const char* pseudo_csv = "labels/pseudo_validation.csv";
inline constexpr const char* pseudo_sidecar = "labels/pseudo_validation.json";
inline constexpr const char* sweep = "mc/sweep.csv";
inline constexpr const char* tuner_result = "results/tuner_result.json";
inline constexpr const char* tuner_seeds = "results/tuner_seeds.json";
}  // namespace paths

/// Each command writes all of its files or none of them.
std::vector<std::filesystem::path> cmd_prepare(const ExperimentConfig& config, const CommandOptions& options = {});
std::vector<std::filesystem::path> cmd_train_grid(const ExperimentConfig& config,
                                                  const CommandOptions& options = {});
std::vector<std::filesystem::path> cmd_label(const ExperimentConfig& config, const CommandOptions& options = {});
std::vector<std::filesystem::path> cmd_mc_sweep(const ExperimentConfig& config,
                                                const CommandOptions& options = {});
std::vector<std::filesystem::path> cmd_tune(const ExperimentConfig& config, const CommandOptions& options = {});

enum class ReportFormat { table, json };

/// Renders one or more tuner result files.
std::string cmd_report(const std::vector<std::filesystem::path>& result_files, ReportFormat format);

/// Parses argv-style arguments (without the program name) and runs one
/// command. Diagnostics go to `err`, reports to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace antigone::cli
