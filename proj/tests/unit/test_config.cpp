#include <gtest/gtest.h>

#include <fstream>

#include "sinbad/config.hpp"
#include "sinbad/error.hpp"
#include "support.hpp"

using namespace sinbad;

TEST(DefaultConfig, PublishedValues) {
    const auto ts = default_config(PipelineKind::timeseries);
    EXPECT_EQ(ts.timeseries.pyramid.tau, 9);
    EXPECT_EQ(ts.timeseries.pyramid.levels, 10);
    EXPECT_EQ(ts.timeseries.pipeline.n_projections, 100);
    EXPECT_EQ(ts.timeseries.pipeline.bins, 20);
    EXPECT_EQ(ts.timeseries.pipeline.edge_mode, EdgeMode::quantile);
    EXPECT_EQ(ts.timeseries.pipeline.k, 1);
    EXPECT_EQ(ts.timeseries.pipeline.scorer, Scorer::whitened_knn);

    const auto img = default_config(PipelineKind::image);
    EXPECT_EQ(img.kind, PipelineKind::image);
    EXPECT_EQ(img.image.crop_ratios, (std::vector<double>{1.0, 0.7, 0.5, 0.33}));
    EXPECT_EQ(img.image.stride, 0.25);
    ASSERT_EQ(img.image.levels.size(), 3u);
    const std::vector<double> weights{1.0, 1.0, 0.1};
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(img.image.levels[i].weight, weights[i]);
    const auto* b3 = img.level(LevelTag::block3);
    ASSERT_NE(b3, nullptr);
    EXPECT_EQ(b3->pipeline.bins, 5);
    EXPECT_EQ(b3->pipeline.n_projections, 1000);
    const auto* raw = img.level(LevelTag::raw_pixels);
    ASSERT_NE(raw, nullptr);
    EXPECT_EQ(raw->pipeline.n_projections, 10);
    EXPECT_EQ(raw->repetitions, 16);
    EXPECT_EQ(raw->pipeline.scorer, Scorer::plain_knn);
}

TEST(ParseConfig, SectionsAndComments) {
    const auto c = parse_config(R"(
# experiment
kind = image
seed = 42   # master
jobs = 2

[timeseries]
tau = 5
edge_mode = uniform

[image]
levels = block4, raw_pixels
crop_ratios = 1.0, 0.5
stride = 0.5
normalize = false

[level.block4]
projections = 200
scorer = per_variable
weight = 2

[data]
synthetic = logical
synthetic_seed = 3

[ablation]
seeds = 1, 2, 3
)");
    EXPECT_EQ(c.kind, PipelineKind::image);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.jobs, 2);
    EXPECT_EQ(c.timeseries.pyramid.tau, 5);
    EXPECT_EQ(c.timeseries.pipeline.edge_mode, EdgeMode::uniform);
    ASSERT_EQ(c.image.levels.size(), 2u);
    EXPECT_EQ(c.image.levels[0].tag, LevelTag::block4);
    EXPECT_EQ(c.image.levels[0].pipeline.n_projections, 200);
    EXPECT_EQ(c.image.levels[0].pipeline.scorer, Scorer::per_variable);
    EXPECT_EQ(c.image.levels[0].weight, 2.0);
    EXPECT_EQ(c.image.levels[1].tag, LevelTag::raw_pixels);
    EXPECT_EQ(c.image.levels[1].repetitions, 16);
    EXPECT_EQ(c.image.crop_ratios, (std::vector<double>{1.0, 0.5}));
    EXPECT_FALSE(c.image.normalize_levels);
    EXPECT_EQ(c.data.synthetic, "logical");
    EXPECT_EQ(c.data.synthetic_seed, 3u);
    EXPECT_EQ(c.ablation.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
}

TEST(ParseConfig, ErrorsCarryLineNumbers) {
    const std::vector<std::pair<std::string, std::string>> cases{
        {"seed = 1\nbogus = 2\n", "cfg:2"},
        {"[timeseries]\ntau = nine\n", "cfg:2"},
        {"[nowhere]\n", "cfg:1"},
        {"[image\n", "cfg:1"},
        {"kind = audio\n", "cfg:1"},
        {"\n\n[level.block7]\n", "cfg:3"},
        {"[image]\nlevels = block3\nweights = 1, 2\n", "cfg:3"},
        {"just text\n", "cfg:1"},
    };
    for (const auto& [text, where] : cases) {
        try {
            parse_config(text, "cfg");
            ADD_FAILURE() << "accepted: " << text;
        } catch (const ConfigError& e) {
            EXPECT_EQ(std::string(e.what()).rfind(where, 0), 0u) << e.what();
        }
    }
}

TEST(ConfigText, RoundTrip) {
    auto c = default_config(PipelineKind::image);
    c.seed = 77;
    c.image.crop_ratios = {0.9, 0.45};
    c.image.levels[0].pipeline.shrinkage = 0.123456789;
    c.image.levels[2].weight = 0.05;
    c.timeseries.pipeline.projection = ProjectionKind::pca;
    c.data.manifest = "data/m.json";
    c.data.synthetic = "logical3";
    c.ablation.seeds = {4, 5};
    const std::string text = config_to_text(c);
    const auto back = parse_config(text);
    EXPECT_EQ(config_to_text(back), text);
    EXPECT_EQ(back.image.levels[0].pipeline.shrinkage, 0.123456789);
    EXPECT_EQ(back.image.levels[2].weight, 0.05);
    EXPECT_EQ(back.data.manifest, std::filesystem::path("data/m.json"));

    for (auto kind : {PipelineKind::timeseries, PipelineKind::image}) {
        const auto d = default_config(kind);
        EXPECT_EQ(config_to_text(parse_config(config_to_text(d))), config_to_text(d));
    }
}

TEST(LoadConfig, MissingFileIsConfigError) {
    EXPECT_THROW(load_config("/nonexistent/sinbad.cfg"), ConfigError);
    const auto dir = support::scratch_dir("config");
    std::ofstream(dir / "c.cfg") << "seed = 9\n";
    EXPECT_EQ(load_config(dir / "c.cfg").seed, 9u);
}

TEST(ApplyOverrides, FlagsWinAndSkipRawPixels) {
    auto c = default_config(PipelineKind::image);
    ConfigOverrides o;
    o.seed = 5;
    o.projections = 64;
    o.bins = 7;
    o.tau = 3;
    o.k = 2;
    o.shrinkage = 0.3;
    o.edge_mode = EdgeMode::quantile;
    o.crop_ratios = std::vector<double>{1.0};
    o.weights = std::vector<double>{1.0, 0.5, 0.02};
    apply_overrides(c, o);
    EXPECT_EQ(c.seed, 5u);
    EXPECT_EQ(c.timeseries.pipeline.n_projections, 64);
    EXPECT_EQ(c.timeseries.pyramid.tau, 3);
    EXPECT_EQ(c.level(LevelTag::block3)->pipeline.n_projections, 64);
    EXPECT_EQ(c.level(LevelTag::block4)->pipeline.bins, 7);
    EXPECT_EQ(c.level(LevelTag::block4)->pipeline.k, 2);
    EXPECT_EQ(c.level(LevelTag::raw_pixels)->pipeline.n_projections, 10);
    EXPECT_EQ(c.level(LevelTag::raw_pixels)->weight, 0.02);
    EXPECT_EQ(c.level(LevelTag::block4)->weight, 0.5);
    EXPECT_EQ(c.image.crop_ratios, std::vector<double>{1.0});

    ConfigOverrides bad;
    bad.weights = std::vector<double>{1.0};
    EXPECT_THROW(apply_overrides(c, bad), ConfigError);
}

TEST(Validate, RangeChecks) {
    auto ok = default_config(PipelineKind::image);
    EXPECT_NO_THROW(validate(ok));
    auto c = ok;
    c.image.crop_ratios = {1.5};
    EXPECT_THROW(validate(c), ConfigError);
    c = ok;
    c.image.stride = 0.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = ok;
    c.image.levels[0].pipeline.bins = 1;
    EXPECT_THROW(validate(c), ConfigError);
    c = ok;
    c.image.levels[1].weight = -1.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = ok;
    c.image.levels.push_back(c.image.levels[0]);
    EXPECT_THROW(validate(c), ConfigError);
    c = ok;
    c.timeseries.pipeline.shrinkage = 2.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = ok;
    c.data.synthetic = "mnist";
    EXPECT_THROW(validate(c), ConfigError);
}

TEST(Lists, Parse) {
    EXPECT_EQ(parse_real_list("1, 0.5,0.25"), (std::vector<double>{1.0, 0.5, 0.25}));
    EXPECT_EQ(parse_int_list("5,100, 1000"), (std::vector<int>{5, 100, 1000}));
    EXPECT_THROW(parse_real_list("1,x"), ConfigError);
    EXPECT_THROW(parse_int_list("1.5"), ConfigError);
}
