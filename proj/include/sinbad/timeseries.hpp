#pragma once

// Multivariate time series as sets of temporal window pyramids.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sinbad/pipeline.hpp"
#include "sinbad/set_core.hpp"

namespace sinbad {

enum class Label : int { normal = 0, anomalous = 1 };

/// T x C values (time steps x channels).
struct Series {
    RowMatrix values;
    std::string sample_id;
    std::optional<Label> label;

    Index length() const noexcept { return values.rows(); }
    Index channels() const noexcept { return values.cols(); }
};

struct PyramidConfig {
    int tau = 9;    ///< window length in samples
    int levels = 10; ///< strides 1..levels
};

/// Defaults: tau 9, 10 levels, 100 gaussian projections, 20 quantile bins,
/// whitened 1-NN.
struct TimeseriesConfig {
    PyramidConfig pyramid;
    SetPipelineConfig pipeline;
};

/// One element per time step t. Level c (stride c) contributes the tau samples
/// x[t + c * (j - tau / 2)], j = 0..tau-1, with zeros outside the series
/// (equivalent to zero-padding by floor(c * tau / 2) on each side). Layout of
/// an element: level-major, then channel, then window offset; dim = L*tau*C.
ElementSet extract_pyramids(const Series& series, const PyramidConfig& config);

/// Validates a series (non-empty, finite).
void check_series(const Series& series);

class FittedSeriesModel {
public:
    FittedSeriesModel(PyramidConfig pyramid, FittedSetPipeline pipeline);

    const PyramidConfig& pyramid() const noexcept { return pyramid_; }
    const FittedSetPipeline& pipeline() const noexcept { return pipeline_; }

    Vector score(std::span<const Series> series) const;

private:
    PyramidConfig pyramid_;
    FittedSetPipeline pipeline_;
};

/// Throws FitError with fewer than two training series.
FittedSeriesModel fit_series(std::span<const Series> train, const TimeseriesConfig& config);

/// Fit on `train`, return one anomaly score per test series.
Vector score_series(std::span<const Series> train, std::span<const Series> test,
                    const TimeseriesConfig& config);

} // namespace sinbad
