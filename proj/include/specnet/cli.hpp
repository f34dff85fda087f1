#pragma once

#include "specnet/csv.hpp"
#include "specnet/dataset.hpp"
#include "specnet/forest.hpp"
#include "specnet/metrics.hpp"
#include "specnet/soil_class.hpp"
#include "specnet/synthetic.hpp"
#include "specnet/training.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specnet::cli {

inline constexpr int config_version = 1;
inline constexpr std::string_view forest_name = "random_forest";

/// Every model name in report order: the forest first, then the CNNs.
inline constexpr std::array<std::string_view, 6> report_order{
    "random_forest", "liu2018", "hu2015", "lucas_cnn", "lucas_resnet", "lucas_coordconv"};

struct ArchitectureOverrides {
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> batch_size;
    std::optional<double> learning_rate;
    std::optional<double> beta1;
    std::optional<double> beta2;
    std::optional<double> epsilon;

    friend bool operator==(const ArchitectureOverrides&, const ArchitectureOverrides&) = default;
};

struct DataSource {
    std::filesystem::path path;
    CsvFormat format = CsvFormat::reduced;
};

/// Parsed run configuration. Exactly one of `data` and `synthetic` is set.
/// Relative paths are resolved against `base_dir`, the directory of the
/// config file.
struct RunConfig {
    std::uint64_t seed = 0;
    std::optional<DataSource> data;
    std::optional<SynthConfig> synthetic;
    std::optional<std::filesystem::path> boundary_table;
    std::filesystem::path output_dir = "specnet-out";
    SplitRatios split;
    bool stratified = false;
    bool normalize = true;
    /// Keyed by architecture name; the key "*" applies to every architecture.
    std::map<std::string, ArchitectureOverrides> architectures;
    forest::ForestConfig forest;
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const std::filesystem::path& p) const;
    std::filesystem::path output() const { return resolve(output_dir); }
};

/// Strict JSON parsing: unknown keys, wrong types and a missing or
/// unsupported "version" are errors.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
/// Canonical JSON with every field spelled out; parse_config accepts it.
std::string config_to_json(const RunConfig& config);

TrainConfig train_config(const RunConfig& config, std::string_view architecture);
forest::ForestConfig forest_config(const RunConfig& config);

/// "all" expands to the five CNNs plus the forest ("rf" or "random_forest").
std::vector<std::string> parse_arch_selection(std::string_view selection);

std::filesystem::path model_path(const std::filesystem::path& out, std::string_view model);
std::filesystem::path history_path(const std::filesystem::path& out, std::string_view model);
std::filesystem::path confusion_path(const std::filesystem::path& out, std::string_view model);
std::filesystem::path report_path(const std::filesystem::path& out);

/// Labels every sample through the reduce, deduplicate and classify stages.
/// Errors name the failing stage.
std::vector<Sample> preprocess(std::span<const Sample> raw, const BoundaryTable& table);

/// Identifies a split: hashes the seed, ratios, stratification flag and the
/// ordered ids and labels of the full dataset.
std::string compute_run_id(const RunConfig& config, std::span<const Sample> samples);

struct PreparedData {
    std::vector<Sample> samples;
    DatasetSplit split;
    std::string run_id;
};

/// Loads (or generates) the labeled dataset named by the config and splits it.
PreparedData prepare_data(const RunConfig& config, std::ostream& log);

struct PreprocessSummary {
    std::size_t input_rows = 0;
    std::size_t output_rows = 0;
    std::array<std::size_t, soil_class_count> class_counts{};
};

PreprocessSummary cmd_preprocess(const std::filesystem::path& raw_csv,
                                 const std::filesystem::path& out_csv,
                                 const std::optional<std::filesystem::path>& boundary_table,
                                 std::ostream& log);

/// Trains each selected model on the training subset; the validation subset
/// is only scored. Writes checkpoints and history CSVs under the output dir.
void cmd_train(const RunConfig& config, std::string_view selection, std::ostream& log);

/// Scores checkpoints on the test subset and writes report.csv plus one
/// normalized confusion CSV per model. With no checkpoints given, every
/// model checkpoint found under the output dir is evaluated.
std::vector<metrics::ReportRow> cmd_evaluate(const RunConfig& config,
                                             std::vector<std::filesystem::path> checkpoints,
                                             std::ostream& log);

/// Writes `sample_id,label,p_L,p_S,p_T,p_U` per input row. Forest
/// probabilities are vote fractions.
void cmd_predict(const std::filesystem::path& checkpoint, const std::filesystem::path& input,
                 CsvFormat format, const std::filesystem::path& out_csv, std::ostream& log);

/// Full run into the output dir: config.json (re-runnable in place),
/// data/dataset.csv, models/, history/, report.csv, confusion CSVs.
/// Timestamps go only to run.log.
void cmd_benchmark(const RunConfig& config, std::ostream& log);

/// Command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace specnet::cli
