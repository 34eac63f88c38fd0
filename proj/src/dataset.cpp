#include "sinbad/dataset.hpp"

#include <cstdlib>

#include "sinbad/error.hpp"
#include "sinbad/setf.hpp"
#include "sinbad/synthetic.hpp"
#include "sinbad/ts_io.hpp"

namespace fs = std::filesystem;

namespace sinbad {

namespace {

void require_kind(const ExperimentConfig& config, PipelineKind kind, const std::string& what) {
    if (config.kind != kind)
        throw ConfigError(what + " is " + to_string(kind) + " data but kind = " + to_string(config.kind));
}

Dataset from_grids(synthetic::GridDataset grids, std::string name) {
    Dataset d;
    d.name = std::move(name);
    d.kind = PipelineKind::image;
    d.levels = std::move(grids.levels);
    for (const auto& g : grids.train.front()) d.train_ids.push_back(g.sample_id);
    for (const auto& g : grids.test.front()) d.test_ids.push_back(g.sample_id);
    d.train_grids = std::move(grids.train);
    d.test_grids = std::move(grids.test);
    d.test_labels = std::move(grids.test_labels);
    return d;
}

Dataset from_series(synthetic::SeriesDataset series, std::string name) {
    Dataset d;
    d.name = std::move(name);
    d.kind = PipelineKind::timeseries;
    for (const auto& s : series.train) d.train_ids.push_back(s.sample_id);
    for (const auto& s : series.test) d.test_ids.push_back(s.sample_id);
    d.train_series = std::move(series.train);
    d.test_series = std::move(series.test);
    d.test_labels = std::move(series.test_labels);
    return d;
}

Dataset load_synthetic(const ExperimentConfig& config) {
    const auto& name = config.data.synthetic;
    const std::uint64_t seed = config.data.synthetic_seed;
    if (name == "logical" || name == "logical3") {
        require_kind(config, PipelineKind::image, "synthetic '" + name + "'");
        const auto params = name == "logical" ? synthetic::LogicalBenchmarkParams{} : synthetic::three_level_benchmark();
        return from_grids(synthetic::logical_benchmark(params, seed), "synthetic-" + name);
    }
    if (name == "motif") {
        require_kind(config, PipelineKind::timeseries, "synthetic 'motif'");
        return from_series(synthetic::motif_series(100, 50, 128, 3, seed), "synthetic-motif");
    }
    throw ConfigError("unknown synthetic dataset '" + name + "' (logical|logical3|motif)");
}

Dataset load_ts_pair(const ExperimentConfig& config, const fs::path& root) {
    require_kind(config, PipelineKind::timeseries, ".ts archive");
    const auto& data = config.data;
    if (data.test_ts.empty()) throw ConfigError("train_ts is set but test_ts is not");
    if (data.normal_class.empty()) throw ConfigError(".ts data needs normal_class");
    auto resolve = [&](const fs::path& p) {
        if (p.is_relative() && !fs::exists(p) && !root.empty() && fs::exists(root / p)) return root / p;
        return p;
    };
    const TsReadOptions options{data.min_length, data.max_length};
    const TsDataset train = read_ts_file(resolve(data.train_ts), options);
    const TsDataset test = read_ts_file(resolve(data.test_ts), options);
    OneClassSplit split = one_class_split(train, test, data.normal_class);
    Dataset d;
    d.name = train.problem_name.empty() ? data.train_ts.stem().string() : train.problem_name;
    d.name += ":" + data.normal_class;
    d.kind = PipelineKind::timeseries;
    for (const auto& s : split.train) d.train_ids.push_back(s.sample_id);
    for (const auto& s : split.test) {
        d.test_ids.push_back(s.sample_id);
        d.test_labels.push_back(s.label == Label::anomalous ? 1 : 0);
    }
    d.train_series = std::move(split.train);
    d.test_series = std::move(split.test);
    return d;
}

Dataset load_series_manifest(const fs::path& manifest, const fs::path& root) {
    Dataset d;
    d.name = manifest.stem().string();
    d.kind = PipelineKind::timeseries;
    for (const auto& e : read_series_manifest(manifest, root)) {
        Series s = read_series_csv(e.file, e.sample_id);
        s.label = e.label;
        if (e.split == Split::train) {
            d.train_ids.push_back(s.sample_id);
            d.train_series.push_back(std::move(s));
        } else {
            d.test_ids.push_back(s.sample_id);
            d.test_labels.push_back(e.label == Label::anomalous ? 1 : 0);
            d.test_series.push_back(std::move(s));
        }
    }
    return d;
}

Dataset load_image_manifest(const ExperimentConfig& config, const fs::path& manifest, const fs::path& root) {
    Dataset d;
    d.name = manifest.stem().string();
    d.kind = PipelineKind::image;
    for (const auto& l : config.image.levels) d.levels.push_back(l.tag);
    d.train_grids.resize(d.levels.size());
    d.test_grids.resize(d.levels.size());
    for (const auto& e : read_image_manifest(manifest, root)) {
        const bool train = e.split == Split::train;
        for (std::size_t l = 0; l < d.levels.size(); ++l) {
            const auto it = e.files.find(d.levels[l]);
            if (it == e.files.end())
                throw DataError(manifest.string() + ": sample '" + e.sample_id + "' has no " + to_string(d.levels[l]) +
                                " file");
            FeatureGrid g = prepare_grid(read_setf(it->second, d.levels[l], e.sample_id));
            (train ? d.train_grids : d.test_grids)[l].push_back(std::move(g));
        }
        if (train) {
            d.train_ids.push_back(e.sample_id);
        } else {
            d.test_ids.push_back(e.sample_id);
            d.test_labels.push_back(e.label == Label::anomalous ? 1 : 0);
        }
    }
    return d;
}

} // namespace

fs::path data_root(const ExperimentConfig& config) {
    if (!config.data.root.empty()) return config.data.root;
    if (const char* env = std::getenv("SINBAD_DATA_DIR"); env && *env) return env;
    return {};
}

LevelConfig level_config_for(const ExperimentConfig& config, LevelTag tag) {
    if (const LevelConfig* l = config.level(tag)) return *l;
    return default_level_config(tag);
}

Dataset load_dataset(const ExperimentConfig& config) {
    const fs::path root = data_root(config);
    if (!config.data.synthetic.empty()) return load_synthetic(config);
    if (!config.data.train_ts.empty()) return load_ts_pair(config, root);
    if (config.data.manifest.empty())
        throw ConfigError("no data configured: set [data] manifest, train_ts/test_ts or synthetic");
    fs::path manifest = config.data.manifest;
    if (manifest.is_relative() && !fs::exists(manifest) && !root.empty() && fs::exists(root / manifest))
        manifest = root / manifest;
    if (config.kind == PipelineKind::timeseries) return load_series_manifest(manifest, root);
    return load_image_manifest(config, manifest, root);
}

} // namespace sinbad
