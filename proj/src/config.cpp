#include "sinbad/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "sinbad/atomic_file.hpp"
#include "sinbad/error.hpp"

namespace sinbad {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& raw) {
    const std::string s = trim(raw);
    T value{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (s.empty() || ec != std::errc{} || ptr != end) throw ConfigError("not a number: '" + raw + "'");
    return value;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw ConfigError("not a boolean: '" + s + "'");
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_floating_point_v<T>)
            out += fmt(values[i]);
        else
            out += std::to_string(values[i]);
    }
    return out;
}

// Pipeline keys shared by [timeseries] and [level.*]; returns false when the
// key is not a pipeline key.
bool set_pipeline_key(SetPipelineConfig& p, const std::string& key, const std::string& value) {
    if (key == "projections") p.n_projections = parse_number<int>(value);
    else if (key == "bins") p.bins = parse_number<int>(value);
    else if (key == "edge_mode") p.edge_mode = parse_edge_mode(value);
    else if (key == "histogram") p.histogram = parse_histogram_kind(value);
    else if (key == "pooling") p.pooling = parse_pooling(value);
    else if (key == "scorer") p.scorer = parse_scorer(value);
    else if (key == "projection") p.projection = parse_projection_kind(value);
    else if (key == "k") p.k = parse_number<int>(value);
    else if (key == "shrinkage") p.shrinkage = parse_number<double>(value);
    else return false;
    return true;
}

void write_pipeline_keys(std::ostream& out, const SetPipelineConfig& p) {
    out << "projection = " << to_string(p.projection) << '\n'
        << "projections = " << p.n_projections << '\n'
        << "bins = " << p.bins << '\n'
        << "edge_mode = " << to_string(p.edge_mode) << '\n'
        << "histogram = " << to_string(p.histogram) << '\n'
        << "pooling = " << to_string(p.pooling) << '\n'
        << "scorer = " << to_string(p.scorer) << '\n'
        << "k = " << p.k << '\n'
        << "shrinkage = " << fmt(p.shrinkage) << '\n';
}

void check_pipeline(const SetPipelineConfig& p, const std::string& where) {
    auto fail = [&](const std::string& what) { throw ConfigError(where + ": " + what); };
    if (p.n_projections < 1) fail("projections must be >= 1");
    if (p.bins < 2) fail("bins must be >= 2");
    if (p.k < 1) fail("k must be >= 1");
    if (!(p.shrinkage >= 0.0 && p.shrinkage <= 1.0)) fail("shrinkage must lie in [0, 1]");
}

LevelConfig& level_or_add(ImageConfig& image, LevelTag tag) {
    for (auto& l : image.levels)
        if (l.tag == tag) return l;
    image.levels.push_back(default_level_config(tag));
    return image.levels.back();
}

} // namespace

std::string to_string(PipelineKind kind) { return kind == PipelineKind::image ? "image" : "timeseries"; }

PipelineKind parse_pipeline_kind(const std::string& s) {
    if (s == "timeseries" || s == "ts") return PipelineKind::timeseries;
    if (s == "image") return PipelineKind::image;
    throw ConfigError("unknown pipeline kind '" + s + "' (timeseries|image)");
}

const LevelConfig* ExperimentConfig::level(LevelTag tag) const {
    for (const auto& l : image.levels)
        if (l.tag == tag) return &l;
    return nullptr;
}

LevelConfig* ExperimentConfig::level(LevelTag tag) {
    for (auto& l : image.levels)
        if (l.tag == tag) return &l;
    return nullptr;
}

ExperimentConfig default_config(PipelineKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    c.image.levels = {default_level_config(LevelTag::block3), default_level_config(LevelTag::block4),
                      default_level_config(LevelTag::raw_pixels)};
    return c;
}

std::vector<double> parse_real_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split_list(s)) out.push_back(parse_number<double>(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (const auto& item : split_list(s)) out.push_back(parse_number<int>(item));
    return out;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    ExperimentConfig c = default_config();
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        try {
            if (line.front() == '[') {
                if (line.back() != ']') throw ConfigError("unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.rfind("level.", 0) == 0)
                    level_or_add(c.image, parse_level_tag(section.substr(6)));
                else if (section != "timeseries" && section != "image" && section != "data" && section != "ablation")
                    throw ConfigError("unknown section [" + section + "]");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            bool known = true;
            if (section.empty()) {
                if (key == "kind") c.kind = parse_pipeline_kind(value);
                else if (key == "seed") c.seed = parse_number<std::uint64_t>(value);
                else if (key == "jobs") c.jobs = parse_number<int>(value);
                else known = false;
            } else if (section == "timeseries") {
                if (key == "tau") c.timeseries.pyramid.tau = parse_number<int>(value);
                else if (key == "levels") c.timeseries.pyramid.levels = parse_number<int>(value);
                else known = set_pipeline_key(c.timeseries.pipeline, key, value);
            } else if (section == "image") {
                if (key == "levels") {
                    std::vector<LevelConfig> chosen;
                    for (const auto& name : split_list(value)) {
                        const LevelTag tag = parse_level_tag(name);
                        const LevelConfig* existing = c.level(tag);
                        chosen.push_back(existing ? *existing : default_level_config(tag));
                    }
                    c.image.levels = std::move(chosen);
                } else if (key == "crop_ratios") c.image.crop_ratios = parse_real_list(value);
                else if (key == "stride") c.image.stride = parse_number<double>(value);
                else if (key == "normalize") c.image.normalize_levels = parse_bool(value);
                else if (key == "weights") {
                    const auto w = parse_real_list(value);
                    if (w.size() != c.image.levels.size())
                        throw ConfigError("weights lists " + std::to_string(w.size()) + " values for " +
                                          std::to_string(c.image.levels.size()) + " levels");
                    for (std::size_t i = 0; i < w.size(); ++i) c.image.levels[i].weight = w[i];
                } else known = false;
            } else if (section.rfind("level.", 0) == 0) {
                LevelConfig& l = level_or_add(c.image, parse_level_tag(section.substr(6)));
                if (key == "repetitions") l.repetitions = parse_number<int>(value);
                else if (key == "weight") l.weight = parse_number<double>(value);
                else known = set_pipeline_key(l.pipeline, key, value);
            } else if (section == "data") {
                if (key == "manifest") c.data.manifest = value;
                else if (key == "train_ts") c.data.train_ts = value;
                else if (key == "test_ts") c.data.test_ts = value;
                else if (key == "normal_class") c.data.normal_class = value;
                else if (key == "min_length") c.data.min_length = parse_number<std::size_t>(value);
                else if (key == "max_length") c.data.max_length = parse_number<std::size_t>(value);
                else if (key == "root") c.data.root = value;
                else if (key == "synthetic") c.data.synthetic = value;
                else if (key == "synthetic_seed") c.data.synthetic_seed = parse_number<std::uint64_t>(value);
                else known = false;
            } else if (section == "ablation") {
                if (key == "projections") c.ablation.projections = parse_int_list(value);
                else if (key == "bins") c.ablation.bins = parse_int_list(value);
                else if (key == "levels") c.ablation.levels = parse_int_list(value);
                else if (key == "seeds") {
                    c.ablation.seeds.clear();
                    for (const auto& s : split_list(value)) c.ablation.seeds.push_back(parse_number<std::uint64_t>(s));
                } else known = false;
            }
            if (!known) throw ConfigError("unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"));
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file_text(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text, path.string());
}

std::string config_to_text(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "kind = " << to_string(c.kind) << '\n'
        << "seed = " << c.seed << '\n'
        << "jobs = " << c.jobs << '\n';
    out << "\n[timeseries]\n"
        << "tau = " << c.timeseries.pyramid.tau << '\n'
        << "levels = " << c.timeseries.pyramid.levels << '\n';
    write_pipeline_keys(out, c.timeseries.pipeline);
    out << "\n[image]\nlevels = ";
    for (std::size_t i = 0; i < c.image.levels.size(); ++i) out << (i ? ", " : "") << to_string(c.image.levels[i].tag);
    out << "\ncrop_ratios = " << join(c.image.crop_ratios) << '\n'
        << "stride = " << fmt(c.image.stride) << '\n'
        << "normalize = " << (c.image.normalize_levels ? "true" : "false") << '\n';
    for (const auto& l : c.image.levels) {
        out << "\n[level." << to_string(l.tag) << "]\n"
            << "repetitions = " << l.repetitions << '\n'
            << "weight = " << fmt(l.weight) << '\n';
        write_pipeline_keys(out, l.pipeline);
    }
    out << "\n[data]\n";
    auto path_key = [&](const char* key, const std::filesystem::path& p) {
        if (!p.empty()) out << key << " = " << p.string() << '\n';
    };
    path_key("manifest", c.data.manifest);
    path_key("train_ts", c.data.train_ts);
    path_key("test_ts", c.data.test_ts);
    if (!c.data.normal_class.empty()) out << "normal_class = " << c.data.normal_class << '\n';
    out << "min_length = " << c.data.min_length << '\n' << "max_length = " << c.data.max_length << '\n';
    path_key("root", c.data.root);
    if (!c.data.synthetic.empty()) out << "synthetic = " << c.data.synthetic << '\n';
    out << "synthetic_seed = " << c.data.synthetic_seed << '\n';
    out << "\n[ablation]\n"
        << "projections = " << join(c.ablation.projections) << '\n'
        << "bins = " << join(c.ablation.bins) << '\n'
        << "levels = " << join(c.ablation.levels) << '\n';
    if (!c.ablation.seeds.empty()) out << "seeds = " << join(c.ablation.seeds) << '\n';
    return out.str();
}

void apply_overrides(ExperimentConfig& c, const ConfigOverrides& o) {
    if (o.seed) c.seed = *o.seed;
    if (o.jobs) c.jobs = *o.jobs;
    if (o.tau) c.timeseries.pyramid.tau = *o.tau;
    if (o.levels) c.timeseries.pyramid.levels = *o.levels;
    auto apply_pipeline = [&](SetPipelineConfig& p) {
        if (o.projections) p.n_projections = *o.projections;
        if (o.bins) p.bins = *o.bins;
        if (o.k) p.k = *o.k;
        if (o.shrinkage) p.shrinkage = *o.shrinkage;
        if (o.edge_mode) p.edge_mode = *o.edge_mode;
    };
    apply_pipeline(c.timeseries.pipeline);
    for (auto& l : c.image.levels)
        if (l.tag != LevelTag::raw_pixels) apply_pipeline(l.pipeline);
    if (o.crop_ratios) c.image.crop_ratios = *o.crop_ratios;
    if (o.stride) c.image.stride = *o.stride;
    if (o.weights) {
        if (o.weights->size() != c.image.levels.size())
            throw ConfigError("--weights lists " + std::to_string(o.weights->size()) + " values for " +
                              std::to_string(c.image.levels.size()) + " levels");
        for (std::size_t i = 0; i < o.weights->size(); ++i) c.image.levels[i].weight = (*o.weights)[i];
    }
}

void validate(const ExperimentConfig& c) {
    if (c.jobs < 0) throw ConfigError("jobs must be >= 0");
    if (c.timeseries.pyramid.tau < 1) throw ConfigError("tau must be >= 1");
    if (c.timeseries.pyramid.levels < 1) throw ConfigError("levels must be >= 1");
    check_pipeline(c.timeseries.pipeline, "[timeseries]");
    if (c.image.levels.empty()) throw ConfigError("[image] needs at least one level");
    if (c.image.crop_ratios.empty()) throw ConfigError("crop_ratios must not be empty");
    for (double r : c.image.crop_ratios)
        if (!(r > 0.0 && r <= 1.0)) throw ConfigError("crop ratios must lie in (0, 1], got " + fmt(r));
    if (!(c.image.stride > 0.0 && c.image.stride <= 1.0)) throw ConfigError("stride must lie in (0, 1]");
    for (const auto& l : c.image.levels) {
        const std::string where = "[level." + to_string(l.tag) + "]";
        check_pipeline(l.pipeline, where);
        if (l.repetitions < 1) throw ConfigError(where + ": repetitions must be >= 1");
        if (!(l.weight >= 0.0)) throw ConfigError(where + ": weight must be >= 0");
        if (std::count_if(c.image.levels.begin(), c.image.levels.end(), [&](const LevelConfig& o) { return o.tag == l.tag; }) > 1)
            throw ConfigError("level " + to_string(l.tag) + " listed twice");
    }
    const auto& s = c.data.synthetic;
    if (!s.empty() && s != "logical" && s != "logical3" && s != "motif")
        throw ConfigError("unknown synthetic dataset '" + s + "' (logical|logical3|motif)");
}

} // namespace sinbad
