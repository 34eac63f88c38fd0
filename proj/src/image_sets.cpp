#include "sinbad/image_sets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sinbad/error.hpp"
#include "sinbad/rng.hpp"

namespace sinbad {

namespace {
// Absorbs representation error in ratio * side (0.7 * 10 = 7.000000000000001).
constexpr double kRoundSlack = 1e-9;
} // namespace

std::string to_string(LevelTag tag) {
    switch (tag) {
    case LevelTag::block3: return "block3";
    case LevelTag::block4: return "block4";
    case LevelTag::raw_pixels: return "raw_pixels";
    }
    return "?";
}

LevelTag parse_level_tag(const std::string& s) {
    if (s == "block3") return LevelTag::block3;
    if (s == "block4") return LevelTag::block4;
    if (s == "raw_pixels" || s == "pixels") return LevelTag::raw_pixels;
    throw ConfigError("unknown level '" + s + "' (block3|block4|raw_pixels)");
}

FeatureGrid::FeatureGrid(Index h, Index w, Index d, LevelTag level_, std::string id)
    : height(h), width(w), depth(d), values(static_cast<std::size_t>(h * w * d), 0.0f), level(level_),
      sample_id(std::move(id)) {
    if (h < 1 || w < 1 || d < 1) throw DimensionError("feature grid dimensions must be positive");
}

FeatureGrid resize_grid(const FeatureGrid& grid, Index height, Index width) {
    if (grid.height == height && grid.width == width) return grid;
    FeatureGrid out(height, width, grid.depth, grid.level, grid.sample_id);
    const double sy = static_cast<double>(grid.height) / static_cast<double>(height);
    const double sx = static_cast<double>(grid.width) / static_cast<double>(width);
    for (Index y = 0; y < height; ++y) {
        const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, static_cast<double>(grid.height - 1));
        const auto y0 = static_cast<Index>(fy);
        const Index y1 = std::min(y0 + 1, grid.height - 1);
        const double wy = fy - static_cast<double>(y0);
        for (Index x = 0; x < width; ++x) {
            const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, static_cast<double>(grid.width - 1));
            const auto x0 = static_cast<Index>(fx);
            const Index x1 = std::min(x0 + 1, grid.width - 1);
            const double wx = fx - static_cast<double>(x0);
            for (Index d = 0; d < grid.depth; ++d) {
                const double top = (1 - wx) * grid.at(y0, x0, d) + wx * grid.at(y0, x1, d);
                const double bottom = (1 - wx) * grid.at(y1, x0, d) + wx * grid.at(y1, x1, d);
                out.at(y, x, d) = static_cast<float>((1 - wy) * top + wy * bottom);
            }
        }
    }
    return out;
}

FeatureGrid prepare_grid(FeatureGrid grid) {
    if (grid.level == LevelTag::raw_pixels) return resize_grid(grid, kRawPixelSide, kRawPixelSide);
    return grid;
}

namespace {

Index window_side(double ratio, Index side) {
    return std::clamp<Index>(static_cast<Index>(std::ceil(ratio * static_cast<double>(side) - kRoundSlack)), 1, side);
}

Index window_start(double center, Index window, Index side) {
    const auto start = static_cast<Index>(std::floor(center * static_cast<double>(side) - static_cast<double>(window) / 2.0 + 0.5));
    return std::clamp<Index>(start, 0, side - window);
}

} // namespace

ElementSet crop_grid(const FeatureGrid& grid, const CropSpec& spec) {
    if (!(spec.ratio > 0.0 && spec.ratio <= 1.0)) {
        std::ostringstream msg;
        msg << "crop ratio must lie in (0, 1], got " << spec.ratio;
        throw ConfigError(msg.str());
    }
    const Index h = window_side(spec.ratio, grid.height);
    const Index w = window_side(spec.ratio, grid.width);
    if (h < 1 || w < 1) throw DimensionError("crop window is empty after rounding");
    const Index top = window_start(spec.cy, h, grid.height);
    const Index left = window_start(spec.cx, w, grid.width);
    RowMatrix elements(h * w, grid.depth);
    Index row = 0;
    for (Index y = top; y < top + h; ++y)
        for (Index x = left; x < left + w; ++x, ++row)
            for (Index d = 0; d < grid.depth; ++d) elements(row, d) = grid.at(y, x, d);
    return ElementSet(std::move(elements), grid.sample_id);
}

std::vector<CropSpec> enumerate_crops(double ratio, double stride) {
    if (!(stride > 0.0 && stride <= 1.0)) throw ConfigError("crop stride must lie in (0, 1]");
    if (!(ratio > 0.0 && ratio <= 1.0)) throw ConfigError("crop ratio must lie in (0, 1]");
    const double first = ratio / 2.0;
    const double last = 1.0 - ratio / 2.0;
    std::vector<double> centers;
    for (double c = first;; c += stride) {
        const double clamped = std::min(c, last);
        if (centers.empty() || std::abs(centers.back() - clamped) > kRoundSlack) centers.push_back(clamped);
        if (c >= last - kRoundSlack) break;
    }
    std::vector<CropSpec> out;
    out.reserve(centers.size() * centers.size());
    for (double cy : centers)
        for (double cx : centers) out.push_back({ratio, cy, cx});
    return out;
}

LevelConfig default_level_config(LevelTag tag) {
    LevelConfig c;
    c.tag = tag;
    c.pipeline.projection = ProjectionKind::gaussian;
    c.pipeline.bins = 5;
    c.pipeline.edge_mode = EdgeMode::uniform;
    c.pipeline.k = 1;
    if (tag == LevelTag::raw_pixels) {
        c.pipeline.n_projections = 10;
        c.pipeline.scorer = Scorer::plain_knn;
        c.repetitions = 16;
        c.weight = 0.1;
    } else {
        c.pipeline.n_projections = 1000;
        c.pipeline.scorer = Scorer::whitened_knn;
        c.repetitions = 1;
        c.weight = 1.0;
    }
    return c;
}

std::vector<CropRun> crop_runs(int repetitions, std::span<const double> crop_ratios, double stride) {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (crop_ratios.empty()) throw ConfigError("at least one crop ratio is required");
    std::vector<CropRun> out;
    for (int rep = 0; rep < repetitions; ++rep)
        for (std::size_t r = 0; r < crop_ratios.size(); ++r) {
            const auto specs = enumerate_crops(crop_ratios[r], stride);
            for (std::size_t s = 0; s < specs.size(); ++s) {
                CropRun run;
                run.repetition = rep;
                run.ratio_index = r;
                run.spec_index = s;
                run.spec = specs[s];
                run.weight = 1.0 / (static_cast<double>(repetitions) * static_cast<double>(crop_ratios.size()) *
                                    static_cast<double>(specs.size()));
                out.push_back(run);
            }
        }
    return out;
}

void for_each_crop_run(std::span<const FeatureGrid> train, const LevelConfig& config,
                       std::span<const double> crop_ratios, double stride, std::uint64_t seed,
                       const std::function<void(const CropRun&, const FittedSetPipeline&)>& visit) {
    if (train.size() < 2) throw FitError("level scoring needs at least 2 training grids");
    const Index depth = train.front().depth;
    for (const auto& g : train)
        if (g.depth != depth) {
            std::ostringstream msg;
            msg << "grid '" << g.sample_id << "' has depth " << g.depth << ", expected " << depth;
            throw DimensionError(msg.str());
        }

    for (const CropRun& run : crop_runs(config.repetitions, crop_ratios, stride)) {
        SetPipelineConfig pipeline = config.pipeline;
        pipeline.seed = derive_seed(seed, static_cast<std::uint64_t>(run.repetition));
        const CropSpec spec = run.spec;
        const SetSource source{train.size(), [train, spec](std::size_t i) { return crop_grid(train[i], spec); }};
        visit(run, fit_set_pipeline(source, pipeline));
    }
}

Vector score_crop_run(const FittedSetPipeline& pipeline, const CropRun& run, std::span<const FeatureGrid> test) {
    const Index depth = pipeline.projection().n_dims();
    for (const auto& g : test)
        if (g.depth != depth) {
            std::ostringstream msg;
            msg << "grid '" << g.sample_id << "' has depth " << g.depth << ", expected " << depth;
            throw DimensionError(msg.str());
        }
    const CropSpec spec = run.spec;
    return pipeline.score_all(SetSource{test.size(), [test, spec](std::size_t i) { return crop_grid(test[i], spec); }});
}

LevelScores score_level(std::span<const FeatureGrid> train, std::span<const FeatureGrid> test,
                        const LevelConfig& config, std::span<const double> crop_ratios, double stride,
                        std::uint64_t seed) {
    LevelScores total{Vector::Zero(static_cast<Index>(test.size())), Vector::Zero(static_cast<Index>(train.size()))};
    for_each_crop_run(train, config, crop_ratios, stride, seed, [&](const CropRun& run, const FittedSetPipeline& fitted) {
        if (!test.empty()) total.test += run.weight * score_crop_run(fitted, run, test);
        total.train += run.weight * fitted.train_scores();
    });
    return total;
}

Vector fuse_levels(std::span<const LevelScores> levels, std::span<const double> weights, bool normalize) {
    if (levels.empty()) throw ConfigError("fusion needs at least one level");
    if (levels.size() != weights.size()) {
        std::ostringstream msg;
        msg << "got " << levels.size() << " levels but " << weights.size() << " weights";
        throw DimensionError(msg.str());
    }
    const Index n = levels.front().test.size();
    Vector fused = Vector::Zero(n);
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const auto& level = levels[l];
        if (level.test.size() != n) throw DimensionError("levels disagree on the number of test samples");
        if (weights[l] < 0.0) throw ConfigError("level weights must be non-negative");
        double offset = 0.0;
        double scale = 1.0;
        if (normalize && level.train.size() > 1) {
            offset = level.train.mean();
            const double var = (level.train.array() - offset).square().mean();
            if (var > 0.0) scale = std::sqrt(var);
        }
        fused += weights[l] * ((level.test.array() - offset) / scale).matrix();
    }
    return fused;
}

} // namespace sinbad
