#pragma once

// Image feature grids as element sets: multi-crop scoring per representation
// level and weighted fusion across levels.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sinbad/pipeline.hpp"
#include "sinbad/set_core.hpp"

namespace sinbad {

enum class LevelTag : std::uint8_t { block3 = 0, block4 = 1, raw_pixels = 2 };

std::string to_string(LevelTag tag);
LevelTag parse_level_tag(const std::string& s);

/// H x W x D feature tensor stored row-major (h, w, d) in single precision,
/// as it arrives from the extractor.
struct FeatureGrid {
    Index height = 0;
    Index width = 0;
    Index depth = 0;
    std::vector<float> values;
    LevelTag level = LevelTag::block3;
    std::string sample_id;

    FeatureGrid() = default;
    FeatureGrid(Index h, Index w, Index d, LevelTag level = LevelTag::block3, std::string id = {});

    float& at(Index h, Index w, Index d) { return values[static_cast<std::size_t>((h * width + w) * depth + d)]; }
    float at(Index h, Index w, Index d) const { return values[static_cast<std::size_t>((h * width + w) * depth + d)]; }
};

/// Side length of raw-pixel grids before element extraction.
inline constexpr Index kRawPixelSide = 224;

/// Bilinear resize (half-pixel centers, edge clamped).
FeatureGrid resize_grid(const FeatureGrid& grid, Index height, Index width);

/// Raw-pixel grids are resized to 224 x 224; other levels pass through.
FeatureGrid prepare_grid(FeatureGrid grid);

struct CropSpec {
    double ratio = 1.0;
    double cy = 0.5;
    double cx = 0.5;
};

/// Cells of the ceil(ratio*H) x ceil(ratio*W) window centered at the
/// fractional center, shifted inside the grid when it would cross a border.
/// Elements are the D-dim cells in row-major order.
ElementSet crop_grid(const FeatureGrid& grid, const CropSpec& spec);

/// Crop centers on the lattice r/2, r/2 + stride, ... per axis, with the last
/// center clamped to 1 - r/2; duplicates after clamping are removed.
std::vector<CropSpec> enumerate_crops(double ratio, double stride);

struct LevelConfig {
    LevelTag tag = LevelTag::block3;
    SetPipelineConfig pipeline;
    int repetitions = 1;
    double weight = 1.0;
};

/// Default level settings: blocks use 1000 projections, 5 uniform bins
/// and whitened 1-NN; raw pixels use 10 projections, no whitening, 16
/// repetitions and weight 0.1.
LevelConfig default_level_config(LevelTag tag);

struct LevelScores {
    Vector test;
    /// Leave-one-out training scores, averaged the same way as `test`; used to
    /// normalize levels before fusion.
    Vector train;
};

/// Position of one crop run inside a level's ensemble.
struct CropRun {
    int repetition = 0;
    std::size_t ratio_index = 0;
    std::size_t spec_index = 0;
    CropSpec spec;
    /// Contribution of this run to the level score:
    /// 1 / (repetitions * ratios * centers of this ratio).
    double weight = 1.0;
};

/// Every run of a level ensemble in fit order (repetition, ratio, center).
std::vector<CropRun> crop_runs(int repetitions, std::span<const double> crop_ratios, double stride);

/// Fits every crop run of a level in a fixed order (repetition, ratio,
/// center) and hands each fitted pipeline to `visit`. Runs are not retained,
/// so memory stays bounded by one run.
void for_each_crop_run(std::span<const FeatureGrid> train, const LevelConfig& config,
                       std::span<const double> crop_ratios, double stride, std::uint64_t seed,
                       const std::function<void(const CropRun&, const FittedSetPipeline&)>& visit);

/// Scores test grids against one fitted crop run.
Vector score_crop_run(const FittedSetPipeline& pipeline, const CropRun& run, std::span<const FeatureGrid> test);

/// One independent fit-and-score run per (repetition, ratio, center); scores
/// are averaged over centers, then ratios, then repetitions. Repetition r uses
/// seed derive_seed(seed, r).
LevelScores score_level(std::span<const FeatureGrid> train, std::span<const FeatureGrid> test,
                        const LevelConfig& config, std::span<const double> crop_ratios, double stride,
                        std::uint64_t seed);

/// Weighted sum of per-level test scores. With `normalize`, level scores are
/// first z-scored by the mean and standard deviation of that level's training
/// scores.
Vector fuse_levels(std::span<const LevelScores> levels, std::span<const double> weights, bool normalize = true);

} // namespace sinbad
