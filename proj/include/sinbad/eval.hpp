#pragma once

// Experiment runs, ablations and their reports.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sinbad/config.hpp"
#include "sinbad/dataset.hpp"
#include "sinbad/metrics.hpp"

namespace sinbad {

struct EvalResult {
    std::vector<std::string> ids;
    std::vector<int> labels;
    /// Fused test scores, higher is more anomalous.
    Vector scores;
    /// NaN when the test split lacks one of the labels.
    double auc = 0.0;
    /// Image runs only: per-level scores and AUCs in dataset level order.
    std::vector<LevelTag> levels;
    std::vector<LevelScores> level_scores;
    std::vector<double> level_auc;
};

/// Seed of one image level: derive_seed(master, tag code), so adding or
/// dropping a level leaves the others unchanged.
std::uint64_t level_seed(std::uint64_t master, LevelTag tag);

/// Fits on the train split and scores the test split.
EvalResult evaluate(const ExperimentConfig& config, const Dataset& data);

/// AUC or NaN when only one label is present.
double auc_or_nan(const Vector& scores, const std::vector<int>& labels);

enum class AblationVariant {
    sim_avg,
    no_projection,
    no_whitening,
    identity_proj,
    pca_proj,
    per_variable,
    bins_sweep,
    projections_sweep,
    levels_sweep,
};

std::string to_string(AblationVariant variant);
AblationVariant parse_ablation_variant(const std::string& s);
const std::vector<AblationVariant>& all_ablation_variants();

/// One modified config per row of the variant ("full" excluded). Throws
/// ConfigError when the variant does not apply to `base`.
struct VariantConfig {
    std::string delta;
    ExperimentConfig config;
};
std::vector<VariantConfig> ablation_configs(const ExperimentConfig& base, AblationVariant variant);

struct AblationRow {
    std::string variant;
    std::string config_delta;
    std::string dataset;
    std::uint64_t seed = 0;
    double auc = 0.0;
};

struct ScoreRow {
    std::string variant;
    std::string config_delta;
    std::uint64_t seed = 0;
    std::string sample_id;
    int label = 0;
    double score = 0.0;
};

struct AblationReport {
    std::string config_text;
    std::vector<AblationRow> rows;
    std::vector<ScoreRow> scores;
};

/// Runs the unmodified config (variant "full") and every row of `variant`
/// for each ablation seed, on the same data.
AblationReport run_ablation(const ExperimentConfig& base, const Dataset& data, AblationVariant variant);

/// Adds one report row (and its score rows) for an evaluated config.
void append_result(AblationReport& report, const std::string& variant, const std::string& delta,
                   const std::string& dataset, std::uint64_t seed, const EvalResult& result);

/// Writes `<dir>/report.csv`, `<dir>/scores.csv` and `<dir>/summary.txt`,
/// each atomically. Both CSVs start with the config snapshot as '#' lines.
void write_report(const std::filesystem::path& dir, const AblationReport& report);
/// Reads back the two CSV files written by write_report.
AblationReport read_report(const std::filesystem::path& dir);
/// Mean AUC per variant row; `with_config` appends the config snapshot.
std::string summary_text(const AblationReport& report, bool with_config = true);

} // namespace sinbad
