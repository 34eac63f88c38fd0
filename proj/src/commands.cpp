#include "sinbad/commands.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "sinbad/atomic_file.hpp"
#include "sinbad/dataset.hpp"
#include "sinbad/error.hpp"
#include "sinbad/setf.hpp"
#include "sinbad/ts_io.hpp"

namespace fs = std::filesystem;

namespace sinbad {

namespace {

constexpr const char* kConfigFile = "config.txt";
constexpr const char* kSeriesModel = "model.sinp";

fs::path run_path(const fs::path& bundle, LevelTag tag, const CropRun& run) {
    return bundle / to_string(tag) /
           ("run_" + std::to_string(run.repetition) + "_" + std::to_string(run.ratio_index) + "_" +
            std::to_string(run.spec_index) + ".sinp");
}

void save_pipeline(const fs::path& path, const FittedSetPipeline& pipeline) {
    write_file_atomic(path, [&](std::ostream& out) { write_pipeline(out, pipeline); });
}

FittedSetPipeline load_pipeline(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model blob " + path.string());
    try {
        return read_pipeline(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
}

// Scores image grids [level][sample] with the runs stored in a bundle.
Vector score_image_bundle(const fs::path& bundle, const ExperimentConfig& config,
                          const std::vector<std::vector<FeatureGrid>>& grids) {
    std::vector<LevelScores> levels;
    std::vector<double> weights;
    for (std::size_t l = 0; l < config.image.levels.size(); ++l) {
        const LevelConfig& lc = config.image.levels[l];
        const auto& test = grids[l];
        LevelScores total{Vector::Zero(static_cast<Index>(test.size())), Vector()};
        for (const CropRun& run : crop_runs(lc.repetitions, config.image.crop_ratios, config.image.stride)) {
            const FittedSetPipeline pipeline = load_pipeline(run_path(bundle, lc.tag, run));
            if (total.train.size() == 0) total.train = Vector::Zero(pipeline.train_scores().size());
            if (pipeline.train_scores().size() != total.train.size())
                throw DataError(bundle.string() + ": runs of level " + to_string(lc.tag) +
                                " disagree on the number of training samples");
            if (!test.empty()) total.test += run.weight * score_crop_run(pipeline, run, test);
            total.train += run.weight * pipeline.train_scores();
        }
        levels.push_back(std::move(total));
        weights.push_back(lc.weight);
    }
    return fuse_levels(levels, weights, config.image.normalize_levels);
}

} // namespace

FitSummary cmd_fit(const ExperimentConfig& input, const fs::path& bundle) {
    validate(input);
    const Dataset data = load_dataset(input);
    ExperimentConfig config = input;
    FitSummary summary;
    summary.n_train = data.n_train();
    make_dir(bundle);

    if (data.kind == PipelineKind::timeseries) {
        TimeseriesConfig ts = config.timeseries;
        ts.pipeline.seed = config.seed;
        const FittedSeriesModel model = fit_series(data.train_series, ts);
        save_pipeline(bundle / kSeriesModel, model.pipeline());
        summary.files.push_back(bundle / kSeriesModel);
    } else {
        // The snapshot lists exactly the levels that were fitted.
        std::vector<LevelConfig> fitted;
        for (LevelTag tag : data.levels) fitted.push_back(level_config_for(input, tag));
        config.image.levels = fitted;
        for (std::size_t l = 0; l < data.levels.size(); ++l) {
            const LevelConfig& lc = config.image.levels[l];
            make_dir(bundle / to_string(lc.tag));
            for_each_crop_run(data.train_grids[l], lc, config.image.crop_ratios, config.image.stride,
                              level_seed(config.seed, lc.tag), [&](const CropRun& run, const FittedSetPipeline& p) {
                                  const fs::path path = run_path(bundle, lc.tag, run);
                                  save_pipeline(path, p);
                                  summary.files.push_back(path);
                              });
        }
    }
    const std::string text = config_to_text(config);
    write_file_atomic(bundle / kConfigFile, [&](std::ostream& out) { out << text; }, false);
    summary.files.push_back(bundle / kConfigFile);
    return summary;
}

ScoreTable cmd_score(const fs::path& bundle, const fs::path& manifest, const fs::path& root_override) {
    const fs::path config_path = bundle / kConfigFile;
    if (!fs::exists(config_path)) throw DataError(bundle.string() + " is not a model bundle (no " + kConfigFile + ")");
    ExperimentConfig config = load_config(config_path);
    if (!root_override.empty()) config.data.root = root_override;
    ScoreTable table;
    table.config_text = config_to_text(config);

    if (manifest.empty()) {
        const Dataset data = load_dataset(config);
        table.ids = data.test_ids;
        for (int label : data.test_labels) table.labels.push_back(to_string(label ? Label::anomalous : Label::normal));
        table.splits.assign(data.n_test(), to_string(Split::test));
        if (config.kind == PipelineKind::timeseries) {
            const FittedSeriesModel model(config.timeseries.pyramid, load_pipeline(bundle / kSeriesModel));
            table.scores = model.score(data.test_series);
        } else {
            std::vector<std::vector<FeatureGrid>> grids(config.image.levels.size());
            for (std::size_t l = 0; l < config.image.levels.size(); ++l) {
                std::size_t d = 0;
                while (d < data.levels.size() && data.levels[d] != config.image.levels[l].tag) ++d;
                if (d == data.levels.size())
                    throw DataError("data has no " + to_string(config.image.levels[l].tag) + " level");
                grids[l] = data.test_grids[d];
            }
            table.scores = score_image_bundle(bundle, config, grids);
        }
        return table;
    }

    const fs::path root = data_root(config);
    if (config.kind == PipelineKind::timeseries) {
        const FittedSeriesModel model(config.timeseries.pyramid, load_pipeline(bundle / kSeriesModel));
        std::vector<Series> series;
        for (const auto& e : read_series_manifest(manifest, root)) {
            series.push_back(read_series_csv(e.file, e.sample_id));
            table.ids.push_back(e.sample_id);
            table.labels.push_back(to_string(e.label));
            table.splits.push_back(to_string(e.split));
        }
        table.scores = model.score(series);
    } else {
        const auto entries = read_image_manifest(manifest, root);
        std::vector<std::vector<FeatureGrid>> grids(config.image.levels.size());
        for (const auto& e : entries) {
            for (std::size_t l = 0; l < config.image.levels.size(); ++l) {
                const LevelTag tag = config.image.levels[l].tag;
                const auto it = e.files.find(tag);
                if (it == e.files.end())
                    throw DataError(manifest.string() + ": sample '" + e.sample_id + "' has no " + to_string(tag) + " file");
                grids[l].push_back(prepare_grid(read_setf(it->second, tag, e.sample_id)));
            }
            table.ids.push_back(e.sample_id);
            table.labels.push_back(to_string(e.label));
            table.splits.push_back(to_string(e.split));
        }
        table.scores = score_image_bundle(bundle, config, grids);
    }
    return table;
}

void write_score_table(std::ostream& out, const ScoreTable& table) {
    std::istringstream cfg(table.config_text);
    std::string line;
    while (std::getline(cfg, line)) out << "# " << line << '\n';
    out << "sample_id,label,split,score\n";
    char buf[64];
    for (std::size_t i = 0; i < table.ids.size(); ++i) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, table.scores(static_cast<Index>(i)));
        out << table.ids[i] << ',' << table.labels[i] << ',' << table.splits[i] << ',' << std::string(buf, ptr) << '\n';
    }
}

AblationReport cmd_eval(const ExperimentConfig& config, const fs::path& out_dir) {
    validate(config);
    const Dataset data = load_dataset(config);
    AblationReport report;
    report.config_text = config_to_text(config);
    append_result(report, "full", "", data.name, config.seed, evaluate(config, data));
    if (!out_dir.empty()) write_report(out_dir, report);
    return report;
}

AblationReport cmd_ablate(const ExperimentConfig& config, AblationVariant variant, const fs::path& out_dir) {
    validate(config);
    // Rejects inapplicable variants before any data is read.
    ablation_configs(config, variant);
    const Dataset data = load_dataset(config);
    AblationReport report = run_ablation(config, data, variant);
    if (!out_dir.empty()) write_report(out_dir, report);
    return report;
}

std::size_t convert_ts(const fs::path& train_ts, const fs::path& test_ts, const std::string& normal_class,
                       const fs::path& out_dir, const TsReadOptions& options) {
    if (normal_class.empty()) throw ConfigError("converting .ts data needs the normal class");
    const TsDataset train = read_ts_file(train_ts, options);
    const TsDataset test = read_ts_file(test_ts, options);
    const OneClassSplit split = one_class_split(train, test, normal_class);
    make_dir(out_dir / "series");
    std::vector<SeriesManifestEntry> entries;
    auto emit = [&](const Series& s, Split which) {
        SeriesManifestEntry e;
        e.sample_id = to_string(which) + "_" + s.sample_id;
        e.file = out_dir / "series" / (e.sample_id + ".csv");
        e.label = s.label.value_or(Label::normal);
        e.split = which;
        write_series_csv(e.file, s);
        entries.push_back(std::move(e));
    };
    for (const auto& s : split.train) emit(s, Split::train);
    for (const auto& s : split.test) emit(s, Split::test);
    write_series_manifest(out_dir / "manifest.csv", entries);
    return entries.size();
}

void convert_ppm(const fs::path& ppm, const fs::path& setf) {
    write_setf(setf, read_ppm_pixels(ppm));
}

SetfCheck check_setf(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    const std::string original((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::istringstream parse(original);
    FeatureGrid grid;
    try {
        grid = read_setf(parse);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    std::ostringstream encoded;
    write_setf(encoded, grid);
    if (encoded.str() != original) throw DataError(path.string() + ": re-encoding does not reproduce the file bytes");
    return {static_cast<std::uint32_t>(grid.height), static_cast<std::uint32_t>(grid.width),
            static_cast<std::uint32_t>(grid.depth)};
}

} // namespace sinbad
