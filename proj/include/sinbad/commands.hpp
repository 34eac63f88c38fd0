#pragma once

// The operations behind the `sinbad` command-line tool, callable directly.
//
// A model bundle is a directory:
//
//   config.txt                        config snapshot
//   model.sinp                        time series: one pipeline blob
//   <level>/run_<rep>_<ratio>_<center>.sinp   image: one blob per crop run

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sinbad/config.hpp"
#include "sinbad/eval.hpp"
#include "sinbad/ts_io.hpp"

namespace sinbad {

struct FitSummary {
    std::size_t n_train = 0;
    std::vector<std::filesystem::path> files;
};

/// Fits on the train split of the configured data and writes a bundle.
FitSummary cmd_fit(const ExperimentConfig& config, const std::filesystem::path& bundle);

struct ScoreTable {
    std::string config_text;
    std::vector<std::string> ids;
    std::vector<std::string> labels;
    std::vector<std::string> splits;
    Vector scores;
};

/// Scores every entry of `manifest` in file order against a bundle. With an
/// empty manifest path, scores the test split of the bundle's configured data.
ScoreTable cmd_score(const std::filesystem::path& bundle, const std::filesystem::path& manifest,
                     const std::filesystem::path& data_root = {});
void write_score_table(std::ostream& out, const ScoreTable& table);

/// Fit-and-score on the configured data; writes a report when `out_dir` is set.
AblationReport cmd_eval(const ExperimentConfig& config, const std::filesystem::path& out_dir);
AblationReport cmd_ablate(const ExperimentConfig& config, AblationVariant variant, const std::filesystem::path& out_dir);

/// .ts archives to one CSV per series plus a manifest (`manifest.csv`).
std::size_t convert_ts(const std::filesystem::path& train_ts, const std::filesystem::path& test_ts,
                       const std::string& normal_class, const std::filesystem::path& out_dir,
                       const TsReadOptions& options = {});
/// Binary PPM to a raw-pixel SETF grid (224 x 224 x 3).
void convert_ppm(const std::filesystem::path& ppm, const std::filesystem::path& setf);

struct SetfCheck {
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::uint32_t depth = 0;
};
/// Parses a SETF file and re-encodes it; throws DataError unless the bytes
/// match the original exactly.
SetfCheck check_setf(const std::filesystem::path& path);

} // namespace sinbad
