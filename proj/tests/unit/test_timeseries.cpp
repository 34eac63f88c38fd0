#include <gtest/gtest.h>

#include "sinbad/error.hpp"
#include "sinbad/metrics.hpp"
#include "sinbad/synthetic.hpp"
#include "sinbad/timeseries.hpp"
#include "support.hpp"

using namespace sinbad;

namespace {

Series make_series(RowMatrix v, std::string id = {}) {
    Series s;
    s.values = std::move(v);
    s.sample_id = std::move(id);
    return s;
}

Series random_series(Xoshiro256& rng, Index t, Index c) {
    RowMatrix v(t, c);
    for (Index i = 0; i < t; ++i)
        for (Index j = 0; j < c; ++j) v(i, j) = rng.normal();
    return make_series(std::move(v));
}

TimeseriesConfig small_config() {
    TimeseriesConfig cfg;
    cfg.pyramid = {5, 3};
    cfg.pipeline.n_projections = 20;
    cfg.pipeline.bins = 8;
    return cfg;
}

} // namespace

TEST(ExtractPyramids, PaddingExample) {
    RowMatrix v(5, 1);
    v << 1, 2, 3, 4, 5;
    const auto e = extract_pyramids(make_series(v), PyramidConfig{3, 1});
    ASSERT_EQ(e.size(), 5);
    ASSERT_EQ(e.dims(), 3);
    EXPECT_EQ(e.elements(0, 0), 0.0);
    EXPECT_EQ(e.elements(0, 1), 1.0);
    EXPECT_EQ(e.elements(0, 2), 2.0);
    EXPECT_EQ(e.elements(2, 0), 2.0);
    EXPECT_EQ(e.elements(4, 2), 0.0);
}

TEST(ExtractPyramids, StrideTwoLevel) {
    RowMatrix v(5, 1);
    v << 1, 2, 3, 4, 5;
    const auto e = extract_pyramids(make_series(v), PyramidConfig{3, 2});
    ASSERT_EQ(e.dims(), 6);
    // level 2 at t = 2 (0-based): samples at 0, 2, 4
    EXPECT_EQ(e.elements(2, 3), 1.0);
    EXPECT_EQ(e.elements(2, 4), 3.0);
    EXPECT_EQ(e.elements(2, 5), 5.0);
    // level 2 at t = 1: samples at -1, 1, 3
    EXPECT_EQ(e.elements(1, 3), 0.0);
    EXPECT_EQ(e.elements(1, 4), 2.0);
    EXPECT_EQ(e.elements(1, 5), 4.0);
}

TEST(ExtractPyramids, ChannelLayout) {
    RowMatrix v(4, 2);
    v << 1, 10, 2, 20, 3, 30, 4, 40;
    const auto e = extract_pyramids(make_series(v), PyramidConfig{3, 1});
    ASSERT_EQ(e.dims(), 6);
    // channel 0 window then channel 1 window
    EXPECT_EQ(e.elements(1, 0), 1.0);
    EXPECT_EQ(e.elements(1, 1), 2.0);
    EXPECT_EQ(e.elements(1, 2), 3.0);
    EXPECT_EQ(e.elements(1, 3), 10.0);
    EXPECT_EQ(e.elements(1, 4), 20.0);
    EXPECT_EQ(e.elements(1, 5), 30.0);
}

TEST(ExtractPyramids, EvenTau) {
    RowMatrix v(4, 1);
    v << 1, 2, 3, 4;
    const auto e = extract_pyramids(make_series(v), PyramidConfig{4, 1});
    // window starts tau/2 = 2 samples to the left
    EXPECT_EQ(e.elements(2, 0), 1.0);
    EXPECT_EQ(e.elements(2, 3), 4.0);
}

TEST(ExtractPyramids, DefaultShape) {
    Xoshiro256 rng(1);
    for (Index t : {1, 7, 100}) {
        const auto e = extract_pyramids(random_series(rng, t, 3), PyramidConfig{9, 10});
        EXPECT_EQ(e.dims(), 270);
        EXPECT_EQ(e.size(), t);
    }
    const auto z = extract_pyramids(make_series(RowMatrix::Zero(12, 3)), PyramidConfig{9, 10});
    EXPECT_TRUE(z.elements.isZero());
}

TEST(ExtractPyramids, ShiftPermutesInteriorElements) {
    Xoshiro256 rng(2);
    const Index t = 40;
    const Series s = random_series(rng, t, 2);
    const PyramidConfig cfg{3, 2};
    // reach of the widest window: levels * (tau / 2)
    const Index reach = 2;
    RowMatrix shifted(t, 2);
    for (Index i = 0; i < t; ++i) shifted.row((i + 5) % t) = s.values.row(i);
    const auto a = extract_pyramids(s, cfg);
    const auto b = extract_pyramids(make_series(shifted), cfg);
    for (Index i = reach; i + reach < t - 5; ++i) EXPECT_TRUE(a.elements.row(i) == b.elements.row(i + 5)) << i;
}

TEST(CheckSeries, RejectsBadInput) {
    EXPECT_THROW(check_series(make_series(RowMatrix(0, 2))), Error);
    RowMatrix v(2, 1);
    v << 1, NAN;
    EXPECT_THROW(check_series(make_series(v)), DataError);
}

TEST(ScoreSeries, IdenticalSeriesScoresZero) {
    Xoshiro256 rng(3);
    std::vector<Series> train;
    for (int i = 0; i < 8; ++i) train.push_back(random_series(rng, 30 + i, 2));
    const std::vector<Series> test{train[2], train[5], random_series(rng, 30, 2)};
    const Vector s = score_series(train, test, small_config());
    EXPECT_EQ(s(0), 0.0);
    EXPECT_EQ(s(1), 0.0);
    EXPECT_GT(s(2), 0.0);
}

TEST(ScoreSeries, SingleProjectionIsFinite) {
    Xoshiro256 rng(4);
    std::vector<Series> train, test;
    for (int i = 0; i < 6; ++i) train.push_back(random_series(rng, 25, 1));
    for (int i = 0; i < 3; ++i) test.push_back(random_series(rng, 25, 1));
    auto cfg = small_config();
    cfg.pipeline.n_projections = 1;
    const Vector s = score_series(train, test, cfg);
    EXPECT_TRUE(s.allFinite());
}

TEST(ScoreSeries, NeedsTwoTrainingSeries) {
    Xoshiro256 rng(5);
    const std::vector<Series> train{random_series(rng, 10, 1)};
    EXPECT_THROW(fit_series(train, small_config()), FitError);
}

TEST(ScoreSeries, ChannelMismatch) {
    Xoshiro256 rng(6);
    std::vector<Series> train{random_series(rng, 10, 2), random_series(rng, 10, 2)};
    const auto model = fit_series(train, small_config());
    const std::vector<Series> test{random_series(rng, 10, 3)};
    EXPECT_THROW(model.score(test), DimensionError);
}

TEST(ScoreSeries, MotifCompositionAnomalies) {
    const auto data = synthetic::motif_series(100, 50, 128, 3, 0);
    const Vector s = score_series(data.train, data.test, TimeseriesConfig{});
    EXPECT_GE(roc_auc(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), data.test_labels), 0.95);
}
