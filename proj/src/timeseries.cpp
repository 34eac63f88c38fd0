#include "sinbad/timeseries.hpp"

#include <cmath>
#include <sstream>

#include "sinbad/error.hpp"

namespace sinbad {

void check_series(const Series& series) {
    if (series.length() < 1 || series.channels() < 1)
        throw DataError("series '" + series.sample_id + "' is empty");
    if (!series.values.allFinite())
        throw DataError("series '" + series.sample_id + "' contains NaN or infinite values");
}

ElementSet extract_pyramids(const Series& series, const PyramidConfig& config) {
    if (config.tau < 1 || config.levels < 1) throw ConfigError("pyramid needs tau >= 1 and levels >= 1");
    check_series(series);
    const Index T = series.length();
    const Index C = series.channels();
    const Index tau = config.tau;
    const Index half = tau / 2;
    RowMatrix elements = RowMatrix::Zero(T, config.levels * tau * C);
    for (Index t = 0; t < T; ++t) {
        Index col = 0;
        for (Index c = 1; c <= config.levels; ++c) {
            for (Index ch = 0; ch < C; ++ch) {
                for (Index j = 0; j < tau; ++j, ++col) {
                    const Index src = t + c * (j - half);
                    if (src >= 0 && src < T) elements(t, col) = series.values(src, ch);
                }
            }
        }
    }
    return ElementSet(std::move(elements), series.sample_id);
}

FittedSeriesModel::FittedSeriesModel(PyramidConfig pyramid, FittedSetPipeline pipeline)
    : pyramid_(pyramid), pipeline_(std::move(pipeline)) {}

namespace {

SetSource pyramid_source(std::span<const Series> series, const PyramidConfig& pyramid) {
    return SetSource{series.size(),
                     [series, pyramid](std::size_t i) { return extract_pyramids(series[i], pyramid); }};
}

void check_channels(std::span<const Series> series, Index channels) {
    for (const auto& s : series) {
        if (s.channels() != channels) {
            std::ostringstream msg;
            msg << "series '" << s.sample_id << "' has " << s.channels() << " channels, expected "
                << channels;
            throw DimensionError(msg.str());
        }
    }
}

} // namespace

Vector FittedSeriesModel::score(std::span<const Series> series) const {
    if (series.empty()) return {};
    const Index expected = pipeline_.projection().n_dims() / (pyramid_.levels * pyramid_.tau);
    check_channels(series, expected);
    return pipeline_.score_all(pyramid_source(series, pyramid_));
}

FittedSeriesModel fit_series(std::span<const Series> train, const TimeseriesConfig& config) {
    if (train.size() < 2) {
        std::ostringstream msg;
        msg << "time-series fitting needs at least 2 training series, got " << train.size();
        throw FitError(msg.str());
    }
    check_channels(train, train.front().channels());
    return FittedSeriesModel(config.pyramid,
                             fit_set_pipeline(pyramid_source(train, config.pyramid), config.pipeline));
}

Vector score_series(std::span<const Series> train, std::span<const Series> test,
                    const TimeseriesConfig& config) {
    return fit_series(train, config).score(test);
}

} // namespace sinbad
