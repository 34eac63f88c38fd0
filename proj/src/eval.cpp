#include "sinbad/eval.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "sinbad/atomic_file.hpp"
#include "sinbad/error.hpp"
#include "sinbad/rng.hpp"

namespace fs = std::filesystem;

namespace sinbad {

namespace {

// Visits the pipelines the config's kind actually runs.
void for_each_pipeline(ExperimentConfig& c, bool include_pixels,
                       const std::function<void(SetPipelineConfig&)>& fn) {
    if (c.kind == PipelineKind::timeseries) {
        fn(c.timeseries.pipeline);
        return;
    }
    for (auto& l : c.image.levels)
        if (include_pixels || l.tag != LevelTag::raw_pixels) fn(l.pipeline);
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                out.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.emplace_back();
        } else if (ch != '\r') {
            out.back() += ch;
        }
    }
    return out;
}

template <typename T>
T parse_cell(const std::string& s, const fs::path& path, std::size_t line) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError(path.string() + ":" + std::to_string(line) + ": bad value '" + s + "'");
    return value;
}

void write_config_comment(std::ostream& out, const std::string& config_text) {
    std::istringstream in(config_text);
    std::string line;
    while (std::getline(in, line)) out << "# " << line << '\n';
}

// Reads one CSV written by write_report: '#' lines into `config`, then the
// header, then rows of exactly `columns` cells.
std::vector<std::vector<std::string>> read_csv(const fs::path& path, std::size_t columns, std::string& config) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    config.clear();
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '#') {
            config += line.size() > 2 ? line.substr(2) : std::string{};
            config += '\n';
            continue;
        }
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (cells.size() != columns)
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                            " columns");
        if (!header) {
            header = true;
            continue;
        }
        rows.push_back(std::move(cells));
    }
    if (!header) throw DataError(path.string() + ": missing header");
    return rows;
}

} // namespace

std::uint64_t level_seed(std::uint64_t master, LevelTag tag) {
    return derive_seed(master, static_cast<std::uint64_t>(tag));
}

double auc_or_nan(const Vector& scores, const std::vector<int>& labels) {
    bool pos = false;
    bool neg = false;
    for (int l : labels) (l ? pos : neg) = true;
    if (!pos || !neg) return std::numeric_limits<double>::quiet_NaN();
    return roc_auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())), labels);
}

EvalResult evaluate(const ExperimentConfig& config, const Dataset& data) {
    if (config.kind != data.kind)
        throw ConfigError("config kind " + to_string(config.kind) + " does not match " + to_string(data.kind) +
                          " dataset '" + data.name + "'");
    EvalResult r;
    r.ids = data.test_ids;
    r.labels = data.test_labels;
    if (data.kind == PipelineKind::timeseries) {
        TimeseriesConfig ts = config.timeseries;
        ts.pipeline.seed = config.seed;
        r.scores = score_series(data.train_series, data.test_series, ts);
    } else {
        std::vector<double> weights;
        for (std::size_t l = 0; l < data.levels.size(); ++l) {
            const LevelConfig lc = level_config_for(config, data.levels[l]);
            r.levels.push_back(data.levels[l]);
            r.level_scores.push_back(score_level(data.train_grids[l], data.test_grids[l], lc, config.image.crop_ratios,
                                                 config.image.stride, level_seed(config.seed, data.levels[l])));
            r.level_auc.push_back(auc_or_nan(r.level_scores.back().test, r.labels));
            weights.push_back(lc.weight);
        }
        r.scores = fuse_levels(r.level_scores, weights, config.image.normalize_levels);
    }
    r.auc = auc_or_nan(r.scores, r.labels);
    return r;
}

std::string to_string(AblationVariant v) {
    switch (v) {
    case AblationVariant::sim_avg: return "sim_avg";
    case AblationVariant::no_projection: return "no_projection";
    case AblationVariant::no_whitening: return "no_whitening";
    case AblationVariant::identity_proj: return "identity_proj";
    case AblationVariant::pca_proj: return "pca_proj";
    case AblationVariant::per_variable: return "per_variable";
    case AblationVariant::bins_sweep: return "bins_sweep";
    case AblationVariant::projections_sweep: return "projections_sweep";
    case AblationVariant::levels_sweep: return "levels_sweep";
    }
    return "?";
}

const std::vector<AblationVariant>& all_ablation_variants() {
    static const std::vector<AblationVariant> all{
        AblationVariant::sim_avg,       AblationVariant::no_projection,     AblationVariant::no_whitening,
        AblationVariant::identity_proj, AblationVariant::pca_proj,          AblationVariant::per_variable,
        AblationVariant::bins_sweep,    AblationVariant::projections_sweep, AblationVariant::levels_sweep};
    return all;
}

AblationVariant parse_ablation_variant(const std::string& s) {
    for (auto v : all_ablation_variants())
        if (to_string(v) == s) return v;
    std::string names;
    for (auto v : all_ablation_variants()) names += (names.empty() ? "" : "|") + to_string(v);
    throw ConfigError("unknown ablation variant '" + s + "' (" + names + ")");
}

std::vector<VariantConfig> ablation_configs(const ExperimentConfig& base, AblationVariant variant) {
    std::vector<VariantConfig> out;
    auto single = [&](const std::string& delta, const std::function<bool(SetPipelineConfig&)>& edit,
                      const std::string& inapplicable) {
        ExperimentConfig c = base;
        bool changed = false;
        for_each_pipeline(c, true, [&](SetPipelineConfig& p) { changed = edit(p) || changed; });
        if (!changed) throw ConfigError(to_string(variant) + ": " + inapplicable);
        out.push_back({delta, std::move(c)});
    };
    auto sweep = [&](const char* key, const std::vector<int>& values, const std::function<void(ExperimentConfig&, int)>& set) {
        if (values.empty()) throw ConfigError(to_string(variant) + ": no sweep values configured");
        for (int v : values) {
            ExperimentConfig c = base;
            set(c, v);
            out.push_back({std::string(key) + "=" + std::to_string(v), std::move(c)});
        }
    };

    switch (variant) {
    case AblationVariant::sim_avg:
        single("pooling=mean", [](SetPipelineConfig& p) { p.pooling = Pooling::mean; return true; }, "");
        break;
    case AblationVariant::no_projection:
    case AblationVariant::identity_proj:
        single("projection=identity", [](SetPipelineConfig& p) { p.projection = ProjectionKind::identity; return true; }, "");
        break;
    case AblationVariant::pca_proj:
        single("projection=pca", [](SetPipelineConfig& p) { p.projection = ProjectionKind::pca; return true; }, "");
        break;
    case AblationVariant::no_whitening:
        single("scorer=plain_knn", [](SetPipelineConfig& p) {
            if (p.scorer != Scorer::whitened_knn) return false;
            p.scorer = Scorer::plain_knn;
            return true;
        }, "no level uses the whitened kNN scorer");
        break;
    case AblationVariant::per_variable:
        single("scorer=per_variable", [](SetPipelineConfig& p) {
            if (p.scorer != Scorer::whitened_knn && p.scorer != Scorer::gaussian) return false;
            p.scorer = Scorer::per_variable;
            return true;
        }, "needs a covariance-based scorer (whitened_knn or gaussian)");
        break;
    case AblationVariant::bins_sweep:
        sweep("bins", base.ablation.bins, [](ExperimentConfig& c, int v) {
            for_each_pipeline(c, false, [v](SetPipelineConfig& p) { p.bins = v; });
        });
        break;
    case AblationVariant::projections_sweep:
        sweep("projections", base.ablation.projections, [](ExperimentConfig& c, int v) {
            for_each_pipeline(c, false, [v](SetPipelineConfig& p) { p.n_projections = v; });
        });
        break;
    case AblationVariant::levels_sweep:
        if (base.kind != PipelineKind::timeseries)
            throw ConfigError("levels_sweep applies to time-series pipelines only");
        sweep("levels", base.ablation.levels, [](ExperimentConfig& c, int v) { c.timeseries.pyramid.levels = v; });
        break;
    }
    for (const auto& v : out) validate(v.config);
    return out;
}

void append_result(AblationReport& report, const std::string& variant, const std::string& delta,
                   const std::string& dataset, std::uint64_t seed, const EvalResult& result) {
    report.rows.push_back({variant, delta, dataset, seed, result.auc});
    for (std::size_t i = 0; i < result.ids.size(); ++i)
        report.scores.push_back({variant, delta, seed, result.ids[i], result.labels.empty() ? 0 : result.labels[i],
                                 result.scores(static_cast<Index>(i))});
}

AblationReport run_ablation(const ExperimentConfig& base, const Dataset& data, AblationVariant variant) {
    validate(base);
    const auto variants = ablation_configs(base, variant);
    std::vector<std::uint64_t> seeds = base.ablation.seeds;
    if (seeds.empty()) seeds.push_back(base.seed);

    AblationReport report;
    report.config_text = config_to_text(base);
    const std::string name = to_string(variant);
    for (std::uint64_t seed : seeds) {
        ExperimentConfig full = base;
        full.seed = seed;
        append_result(report, "full", "", data.name, seed, evaluate(full, data));
        for (const auto& v : variants) {
            ExperimentConfig c = v.config;
            c.seed = seed;
            append_result(report, name, v.delta, data.name, seed, evaluate(c, data));
        }
    }
    return report;
}

std::string summary_text(const AblationReport& report, bool with_config) {
    // Mean AUC per (variant, delta) over seeds, in first-appearance order.
    std::vector<std::pair<std::string, std::string>> keys;
    std::map<std::pair<std::string, std::string>, std::vector<double>> aucs;
    std::string dataset;
    for (const auto& r : report.rows) {
        const auto key = std::make_pair(r.variant, r.config_delta);
        if (!aucs.count(key)) keys.push_back(key);
        aucs[key].push_back(r.auc);
        dataset = r.dataset;
    }
    std::ostringstream out;
    out << "dataset: " << dataset << "\n\n";
    out << std::left << std::setw(20) << "variant" << std::setw(24) << "delta" << std::setw(8) << "seeds"
        << "mean ROC-AUC (%)\n";
    for (const auto& key : keys) {
        const auto& v = aucs[key];
        double sum = 0.0;
        for (double a : v) sum += a;
        out << std::left << std::setw(20) << key.first << std::setw(24) << (key.second.empty() ? "-" : key.second)
            << std::setw(8) << v.size() << std::fixed << std::setprecision(1) << 100.0 * sum / static_cast<double>(v.size())
            << '\n';
        out.unsetf(std::ios::fixed);
    }
    if (!with_config) return out.str();
    out << "\nconfig:\n";
    std::istringstream cfg(report.config_text);
    std::string line;
    while (std::getline(cfg, line)) out << "  " << line << '\n';
    return out.str();
}

void write_report(const fs::path& dir, const AblationReport& report) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
    write_file_atomic(dir / "report.csv", [&](std::ostream& out) {
        write_config_comment(out, report.config_text);
        out << "variant,config_delta,dataset,seed,auc\n";
        for (const auto& r : report.rows)
            out << csv_field(r.variant) << ',' << csv_field(r.config_delta) << ',' << csv_field(r.dataset) << ','
                << r.seed << ',' << fmt(r.auc) << '\n';
    }, false);
    write_file_atomic(dir / "scores.csv", [&](std::ostream& out) {
        write_config_comment(out, report.config_text);
        out << "variant,config_delta,seed,sample_id,label,score\n";
        for (const auto& s : report.scores)
            out << csv_field(s.variant) << ',' << csv_field(s.config_delta) << ',' << s.seed << ','
                << csv_field(s.sample_id) << ',' << s.label << ',' << fmt(s.score) << '\n';
    }, false);
    write_file_atomic(dir / "summary.txt", [&](std::ostream& out) { out << summary_text(report); }, false);
}

AblationReport read_report(const fs::path& dir) {
    AblationReport report;
    const fs::path rpath = dir / "report.csv";
    const fs::path spath = dir / "scores.csv";
    std::size_t line = 0;
    for (const auto& c : read_csv(rpath, 5, report.config_text)) {
        ++line;
        report.rows.push_back({c[0], c[1], c[2], parse_cell<std::uint64_t>(c[3], rpath, line),
                               parse_cell<double>(c[4], rpath, line)});
    }
    std::string scores_config;
    line = 0;
    for (const auto& c : read_csv(spath, 6, scores_config)) {
        ++line;
        report.scores.push_back({c[0], c[1], parse_cell<std::uint64_t>(c[2], spath, line), c[3],
                                 parse_cell<int>(c[4], spath, line), parse_cell<double>(c[5], spath, line)});
    }
    if (scores_config != report.config_text) throw DataError(dir.string() + ": report and scores disagree on the config");
    return report;
}

} // namespace sinbad
