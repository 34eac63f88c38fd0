#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "sinbad/error.hpp"
#include "sinbad/image_sets.hpp"
#include "support.hpp"

using namespace sinbad;

namespace {

FeatureGrid random_grid(Xoshiro256& rng, Index h, Index w, Index d, LevelTag tag = LevelTag::block3) {
    FeatureGrid g(h, w, d, tag);
    for (auto& v : g.values) v = static_cast<float>(rng.normal());
    return g;
}

std::vector<FeatureGrid> random_grids(std::uint64_t seed, int n, Index h, Index w, Index d) {
    Xoshiro256 rng(seed);
    std::vector<FeatureGrid> out;
    for (int i = 0; i < n; ++i) out.push_back(random_grid(rng, h, w, d));
    return out;
}

LevelConfig small_level() {
    LevelConfig c = default_level_config(LevelTag::block3);
    c.pipeline.n_projections = 16;
    return c;
}

std::vector<std::size_t> ranks(const Vector& v) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(v.size()));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v(static_cast<Index>(a)) < v(static_cast<Index>(b)); });
    return idx;
}

} // namespace

TEST(CropGrid, FullAndHalf) {
    Xoshiro256 rng(1);
    const auto g = random_grid(rng, 14, 14, 3);
    EXPECT_EQ(crop_grid(g, {1.0, 0.5, 0.5}).size(), 196);
    const auto half = crop_grid(g, {0.5, 0.5, 0.5});
    EXPECT_EQ(half.size(), 49);
    EXPECT_EQ(half.dims(), 3);
}

TEST(CropGrid, CornerIsClamped) {
    FeatureGrid g(14, 14, 1);
    for (Index h = 0; h < 14; ++h)
        for (Index w = 0; w < 14; ++w) g.at(h, w, 0) = static_cast<float>(h * 100 + w);
    const auto c = crop_grid(g, {0.5, 0.0, 0.0});
    ASSERT_EQ(c.size(), 49);
    EXPECT_EQ(c.elements(0, 0), 0.0);
    EXPECT_EQ(c.elements(48, 0), 606.0);
    const auto far = crop_grid(g, {0.5, 1.0, 1.0});
    EXPECT_EQ(far.elements(0, 0), 707.0);
    EXPECT_EQ(far.elements(48, 0), 1313.0);
}

TEST(CropGrid, RoundingUsesCeiling) {
    FeatureGrid g(7, 7, 1);
    // ceil(0.33 * 7) = 3
    EXPECT_EQ(crop_grid(g, {0.33, 0.5, 0.5}).size(), 9);
    EXPECT_EQ(crop_grid(g, {0.7, 0.5, 0.5}).size(), 25);
    EXPECT_THROW(crop_grid(g, {0.0, 0.5, 0.5}), Error);
}

TEST(EnumerateCrops, Lattices) {
    const auto one = enumerate_crops(1.0, 0.25);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_DOUBLE_EQ(one[0].cy, 0.5);

    const auto half = enumerate_crops(0.5, 0.25);
    ASSERT_EQ(half.size(), 9u);
    std::vector<double> ys;
    for (const auto& s : half) ys.push_back(s.cy);
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    ASSERT_EQ(ys.size(), 3u);
    EXPECT_NEAR(ys[0], 0.25, 1e-12);
    EXPECT_NEAR(ys[1], 0.5, 1e-12);
    EXPECT_NEAR(ys[2], 0.75, 1e-12);

    const auto third = enumerate_crops(0.33, 0.25);
    ASSERT_EQ(third.size(), 16u);
    std::vector<double> xs;
    for (const auto& s : third) xs.push_back(s.cx);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const std::vector<double> want{0.165, 0.415, 0.665, 0.835};
    ASSERT_EQ(xs.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(xs[i], want[i], 1e-12);

    EXPECT_THROW(enumerate_crops(0.5, 0.0), ConfigError);
}

TEST(CropRuns, WeightsSumToOne) {
    const std::vector<double> ratios{1.0, 0.7, 0.5, 0.33};
    const auto runs = crop_runs(3, ratios, 0.25);
    double total = 0.0;
    for (const auto& r : runs) total += r.weight;
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_EQ(runs.front().repetition, 0);
    EXPECT_EQ(runs.back().repetition, 2);
    EXPECT_THROW(crop_runs(0, ratios, 0.25), ConfigError);
}

TEST(ScoreLevel, SingleFullCropIsPlainPipeline) {
    const auto train = random_grids(2, 8, 5, 5, 4);
    const auto test = random_grids(3, 4, 5, 5, 4);
    const auto cfg = small_level();
    const std::vector<double> ratios{1.0};
    const auto level = score_level(train, test, cfg, ratios, 0.25, 11);

    std::vector<ElementSet> tr, te;
    for (const auto& g : train) tr.push_back(crop_grid(g, {}));
    for (const auto& g : test) te.push_back(crop_grid(g, {}));
    auto pc = cfg.pipeline;
    pc.seed = derive_seed(11, 0);
    const Vector direct = score_sets(tr, te, pc);
    EXPECT_TRUE(level.test.isApprox(direct, 1e-12));
    EXPECT_EQ(level.train.size(), 8);
}

TEST(ScoreLevel, TrainingGridScoresZeroEverywhere) {
    const auto train = random_grids(4, 6, 6, 6, 3);
    const std::vector<FeatureGrid> test{train[1], train[4]};
    const std::vector<double> ratios{1.0, 0.5};
    const auto level = score_level(train, test, small_level(), ratios, 0.25, 3);
    EXPECT_EQ(level.test(0), 0.0);
    EXPECT_EQ(level.test(1), 0.0);
}

TEST(ScoreLevel, DeterministicAndSpecOrderFree) {
    const auto train = random_grids(5, 6, 6, 6, 3);
    const auto test = random_grids(6, 3, 6, 6, 3);
    const std::vector<double> ratios{1.0, 0.5};
    const auto a = score_level(train, test, small_level(), ratios, 0.25, 7);
    const auto b = score_level(train, test, small_level(), ratios, 0.25, 7);
    EXPECT_TRUE(a.test == b.test);
    EXPECT_TRUE(a.train == b.train);

    // averaging over a permuted run order gives the same level scores
    auto cfg = small_level();
    std::vector<std::pair<CropRun, Vector>> runs;
    for_each_crop_run(train, cfg, ratios, 0.25, 7, [&](const CropRun& run, const FittedSetPipeline& p) {
        runs.emplace_back(run, score_crop_run(p, run, test));
    });
    std::reverse(runs.begin(), runs.end());
    Vector sum = Vector::Zero(3);
    for (const auto& [run, s] : runs) sum += run.weight * s;
    EXPECT_TRUE(sum.isApprox(a.test, 1e-12));
}

TEST(ScoreLevel, Errors) {
    const auto train = random_grids(7, 1, 4, 4, 2);
    const std::vector<double> ratios{1.0};
    EXPECT_THROW(score_level(train, train, small_level(), ratios, 0.25, 0), FitError);
    auto two = random_grids(8, 2, 4, 4, 2);
    const auto other = random_grids(9, 1, 4, 4, 3);
    EXPECT_THROW(score_level(two, other, small_level(), ratios, 0.25, 0), DimensionError);
}

TEST(ScoreLevel, RawPixelsEndToEnd) {
    std::vector<FeatureGrid> train, test;
    Xoshiro256 rng(10);
    for (int i = 0; i < 4; ++i) {
        FeatureGrid g(32, 40, 3, LevelTag::raw_pixels);
        for (auto& v : g.values) v = static_cast<float>(rng.uniform());
        (i < 3 ? train : test).push_back(prepare_grid(std::move(g)));
    }
    ASSERT_EQ(train[0].height, kRawPixelSide);
    ASSERT_EQ(train[0].width, kRawPixelSide);
    const LevelConfig cfg = default_level_config(LevelTag::raw_pixels);
    EXPECT_EQ(cfg.pipeline.n_projections, 10);
    EXPECT_EQ(cfg.repetitions, 16);
    EXPECT_EQ(cfg.pipeline.scorer, Scorer::plain_knn);
    const std::vector<double> ratios{1.0, 0.7, 0.5, 0.33};
    const auto level = score_level(train, test, cfg, ratios, 0.25, 1);
    ASSERT_EQ(level.test.size(), 1);
    EXPECT_TRUE(level.test.allFinite());
    EXPECT_GT(level.test(0), 0.0);
}

TEST(ResizeGrid, ConstantStaysConstant) {
    FeatureGrid g(5, 9, 2);
    std::fill(g.values.begin(), g.values.end(), 0.25f);
    const auto r = resize_grid(g, 7, 3);
    EXPECT_EQ(r.height, 7);
    EXPECT_EQ(r.width, 3);
    for (float v : r.values) EXPECT_FLOAT_EQ(v, 0.25f);
}

TEST(FuseLevels, Properties) {
    Xoshiro256 rng(12);
    auto random_level = [&] {
        LevelScores l;
        l.test.resize(20);
        l.train.resize(10);
        for (Index i = 0; i < 20; ++i) l.test(i) = std::abs(rng.normal());
        for (Index i = 0; i < 10; ++i) l.train(i) = std::abs(rng.normal());
        return l;
    };
    const LevelScores a = random_level();
    const LevelScores b = random_level();

    const std::vector<LevelScores> single{a};
    const std::vector<double> w1{1.0};
    EXPECT_EQ(ranks(fuse_levels(single, w1)), ranks(a.test));
    EXPECT_EQ(ranks(fuse_levels(single, w1, false)), ranks(a.test));

    const std::vector<LevelScores> same{a, a};
    const std::vector<double> w11{1.0, 1.0};
    EXPECT_EQ(ranks(fuse_levels(same, w11)), ranks(a.test));

    const std::vector<LevelScores> two{a, b};
    const std::vector<double> w{1.0, 0.3};
    const std::vector<double> scaled{7.0, 2.1};
    EXPECT_EQ(ranks(fuse_levels(two, w)), ranks(fuse_levels(two, scaled)));

    const std::vector<double> wrong{1.0};
    EXPECT_THROW(fuse_levels(two, wrong), DimensionError);
    LevelScores shorter = b;
    shorter.test.conservativeResize(5);
    const std::vector<LevelScores> mismatched{a, shorter};
    EXPECT_THROW(fuse_levels(mismatched, w), DimensionError);
}

TEST(LevelTags, Names) {
    for (auto t : {LevelTag::block3, LevelTag::block4, LevelTag::raw_pixels}) EXPECT_EQ(parse_level_tag(to_string(t)), t);
    EXPECT_THROW(parse_level_tag("block5"), ConfigError);
}
