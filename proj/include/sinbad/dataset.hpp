#pragma once

// Loading the data an experiment config points at: a series manifest, a pair
// of .ts archives, an image manifest of SETF grids, or a built-in synthetic
// set.

#include <string>
#include <vector>

#include "sinbad/config.hpp"
#include "sinbad/image_sets.hpp"
#include "sinbad/timeseries.hpp"

namespace sinbad {

struct Dataset {
    std::string name;
    PipelineKind kind = PipelineKind::timeseries;

    std::vector<Series> train_series;
    std::vector<Series> test_series;

    /// Image levels in config order; grids are indexed [level][sample].
    std::vector<LevelTag> levels;
    std::vector<std::vector<FeatureGrid>> train_grids;
    std::vector<std::vector<FeatureGrid>> test_grids;

    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    /// 0 normal, 1 anomalous.
    std::vector<int> test_labels;

    std::size_t n_train() const noexcept { return train_ids.size(); }
    std::size_t n_test() const noexcept { return test_ids.size(); }
};

/// Resolves data.root from the config, then from SINBAD_DATA_DIR.
std::filesystem::path data_root(const ExperimentConfig& config);

/// Throws ConfigError when the config names no data and DataError on
/// unreadable or inconsistent files.
Dataset load_dataset(const ExperimentConfig& config);

/// Level settings for `tag`: the configured ones, or the defaults.
LevelConfig level_config_for(const ExperimentConfig& config, LevelTag tag);

} // namespace sinbad
