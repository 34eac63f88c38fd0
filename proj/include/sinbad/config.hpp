#pragma once

// Experiment configuration: a key = value text file with [sections], plus
// command-line overrides applied on top.
//
//   kind = image
//   seed = 0
//
//   [image]
//   crop_ratios = 1.0, 0.7, 0.5, 0.33
//
//   [level.raw_pixels]
//   repetitions = 16
//
// See docs/formats.md for the full key list.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sinbad/image_sets.hpp"
#include "sinbad/timeseries.hpp"

namespace sinbad {

enum class PipelineKind { timeseries, image };

std::string to_string(PipelineKind kind);
PipelineKind parse_pipeline_kind(const std::string& s);

struct DataConfig {
    /// Series manifest (CSV) or image manifest (JSON).
    std::filesystem::path manifest;
    /// Text .ts archives; used instead of a manifest when set.
    std::filesystem::path train_ts;
    std::filesystem::path test_ts;
    std::string normal_class;
    std::size_t min_length = 0;
    std::size_t max_length = 0;
    /// Fallback root for relative manifest paths (also read from SINBAD_DATA_DIR).
    std::filesystem::path root;
    /// Built-in dataset instead of files: logical, logical3 (image), motif
    /// (timeseries). Empty for file data.
    std::string synthetic;
    std::uint64_t synthetic_seed = 0;
};

struct ImageConfig {
    std::vector<LevelConfig> levels;
    std::vector<double> crop_ratios{1.0, 0.7, 0.5, 0.33};
    double stride = 0.25;
    /// z-normalize each level by its training scores before fusion.
    bool normalize_levels = true;
};

struct AblationConfig {
    std::vector<int> projections{5, 100, 1000};
    std::vector<int> bins{3, 5, 10, 20, 40};
    std::vector<int> levels{1, 2, 5, 10};
    /// Master seeds to repeat every run with; empty means the experiment seed.
    std::vector<std::uint64_t> seeds;
};

struct ExperimentConfig {
    PipelineKind kind = PipelineKind::timeseries;
    std::uint64_t seed = 0;
    /// Worker threads; 0 keeps the runtime default.
    int jobs = 0;
    TimeseriesConfig timeseries;
    ImageConfig image;
    DataConfig data;
    AblationConfig ablation;

    const LevelConfig* level(LevelTag tag) const;
    LevelConfig* level(LevelTag tag);
};

/// Default settings for the given kind.
ExperimentConfig default_config(PipelineKind kind = PipelineKind::timeseries);

/// Parses config text; `origin` prefixes error messages. Unknown keys and bad
/// values throw ConfigError with the line number.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(config_to_text(c)) reproduces c.
std::string config_to_text(const ExperimentConfig& config);

/// Values given on the command line. Pipeline overrides apply to the
/// time-series pipeline and the block levels; the raw-pixel level keeps its
/// own settings.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<int> projections;
    std::optional<int> bins;
    std::optional<int> tau;
    std::optional<int> levels;
    std::optional<int> k;
    std::optional<double> shrinkage;
    std::optional<std::vector<double>> crop_ratios;
    std::optional<double> stride;
    std::optional<std::vector<double>> weights;
    std::optional<EdgeMode> edge_mode;
};

void apply_overrides(ExperimentConfig& config, const ConfigOverrides& overrides);

/// Range checks shared by every entry point.
void validate(const ExperimentConfig& config);

std::vector<double> parse_real_list(const std::string& s);
std::vector<int> parse_int_list(const std::string& s);

} // namespace sinbad
