#pragma once

// Time-series readers: CSV-per-sample with a manifest, and the text ".ts"
// classification archive format.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sinbad/timeseries.hpp"

namespace sinbad {

enum class Split { train, test };

std::string to_string(Split split);
std::string to_string(Label label);
Label parse_label(const std::string& s);
Split parse_split(const std::string& s);

/// Rows are time steps, columns channels. A leading non-numeric row is
/// treated as a header. Throws DataError with file and line on bad cells or
/// ragged rows.
Series read_series_csv(const std::filesystem::path& path, std::string sample_id = {});
void write_series_csv(const std::filesystem::path& path, const Series& series);

struct SeriesManifestEntry {
    std::string sample_id;
    std::filesystem::path file;
    Label label = Label::normal;
    Split split = Split::train;
};

/// CSV with header `sample_id,file,label,split` (sample_id optional; defaults
/// to the file stem). Relative paths resolve against the manifest directory,
/// falling back to `data_root` when the resolved file does not exist.
std::vector<SeriesManifestEntry> read_series_manifest(const std::filesystem::path& path,
                                                      const std::filesystem::path& data_root = {});
void write_series_manifest(const std::filesystem::path& path, const std::vector<SeriesManifestEntry>& entries);

struct TsReadOptions {
    /// Series outside [min_length, max_length] are dropped (0 = unbounded).
    std::size_t min_length = 0;
    std::size_t max_length = 0;
};

struct TsDataset {
    std::string problem_name;
    std::vector<Series> series;
    /// Class label per series, as written in the file.
    std::vector<std::string> classes;
    std::size_t dropped = 0;
};

/// Parses the "@problemName ... @data" text format with colon-separated
/// dimensions and comma-separated values. Missing values ('?' or NaN) are
/// replaced with 0; channels of unequal length are zero-extended.
TsDataset read_ts_file(const std::filesystem::path& path, const TsReadOptions& options = {});

/// One-class protocol: training series of `normal_class` form the training
/// set; every test series is labeled normal iff its class is `normal_class`.
struct OneClassSplit {
    std::vector<Series> train;
    std::vector<Series> test;
};

OneClassSplit one_class_split(const TsDataset& train, const TsDataset& test, const std::string& normal_class);

/// Distinct class labels in first-appearance order.
std::vector<std::string> class_names(const TsDataset& data);

} // namespace sinbad
