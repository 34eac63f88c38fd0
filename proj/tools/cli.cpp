#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>

#include "sinbad/atomic_file.hpp"
#include "sinbad/commands.hpp"
#include "sinbad/error.hpp"
#include "sinbad/kernels.hpp"

namespace sinbad::cli {

namespace {

struct ConfigFlags {
    std::string config;
    std::string kind;
    std::string manifest;
    std::string synthetic;
    std::string data_root;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<int> projections;
    std::optional<int> bins;
    std::optional<int> tau;
    std::optional<int> levels;
    std::optional<int> k;
    std::optional<double> shrinkage;
    std::string crop_ratios;
    std::optional<double> stride;
    std::string weights;
    std::string edge_mode;
};

void add_config_flags(CLI::App& cmd, ConfigFlags& f) {
    cmd.add_option("--config", f.config, "experiment config file");
    cmd.add_option("--kind", f.kind, "timeseries | image");
    cmd.add_option("--manifest", f.manifest, "dataset manifest (CSV for series, JSON for images)");
    cmd.add_option("--synthetic", f.synthetic, "built-in dataset: logical | logical3 | motif");
    cmd.add_option("--data-root", f.data_root, "fallback root for relative paths (default $SINBAD_DATA_DIR)");
    cmd.add_option("--seed", f.seed, "master seed");
    cmd.add_option("--jobs", f.jobs, "worker threads");
    cmd.add_option("--projections", f.projections, "projections per pipeline (not raw pixels)");
    cmd.add_option("--bins", f.bins, "histogram bins (not raw pixels)");
    cmd.add_option("--tau", f.tau, "time-series window length");
    cmd.add_option("--levels", f.levels, "time-series pyramid levels");
    cmd.add_option("--k", f.k, "nearest neighbours");
    cmd.add_option("--shrinkage", f.shrinkage, "covariance shrinkage in [0, 1]");
    cmd.add_option("--crop-ratios", f.crop_ratios, "comma-separated crop ratios");
    cmd.add_option("--stride", f.stride, "crop center stride");
    cmd.add_option("--weights", f.weights, "comma-separated level weights");
    cmd.add_option("--edge-mode", f.edge_mode, "uniform | quantile");
}

ExperimentConfig build_config(const ConfigFlags& f) {
    ExperimentConfig c = f.config.empty() ? default_config() : load_config(f.config);
    if (!f.kind.empty()) c.kind = parse_pipeline_kind(f.kind);
    if (!f.manifest.empty()) c.data.manifest = f.manifest;
    if (!f.synthetic.empty()) {
        c.data.synthetic = f.synthetic;
        if (f.kind.empty() && f.config.empty())
            c.kind = f.synthetic == "motif" ? PipelineKind::timeseries : PipelineKind::image;
    }
    if (!f.data_root.empty()) c.data.root = f.data_root;
    ConfigOverrides o;
    o.seed = f.seed;
    o.jobs = f.jobs;
    o.projections = f.projections;
    o.bins = f.bins;
    o.tau = f.tau;
    o.levels = f.levels;
    o.k = f.k;
    o.shrinkage = f.shrinkage;
    if (!f.crop_ratios.empty()) o.crop_ratios = parse_real_list(f.crop_ratios);
    o.stride = f.stride;
    if (!f.weights.empty()) o.weights = parse_real_list(f.weights);
    if (!f.edge_mode.empty()) o.edge_mode = parse_edge_mode(f.edge_mode);
    apply_overrides(c, o);
    validate(c);
    if (c.jobs > 0) kernels::set_num_threads(c.jobs);
    return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Set-feature anomaly detection for time series and image feature grids", "sinbad"};
    app.require_subcommand(1);

    ConfigFlags fit_flags;
    std::string fit_out;
    auto* fit = app.add_subcommand("fit", "fit on the train split and write a model bundle");
    add_config_flags(*fit, fit_flags);
    fit->add_option("--out,-o", fit_out, "bundle directory")->required();

    std::string model_dir;
    std::string score_manifest;
    std::string score_out;
    std::string score_root;
    std::optional<int> score_jobs;
    auto* score = app.add_subcommand("score", "score samples against a model bundle");
    score->add_option("--model,-m", model_dir, "bundle directory written by fit")->required();
    score->add_option("--manifest", score_manifest, "samples to score (default: the bundle's test split)");
    score->add_option("--data-root", score_root, "fallback root for relative paths");
    score->add_option("--jobs", score_jobs, "worker threads");
    score->add_option("--out,-o", score_out, "output CSV (default stdout)");

    ConfigFlags eval_flags;
    std::string eval_out;
    auto* eval = app.add_subcommand("eval", "fit and score, report ROC-AUC");
    add_config_flags(*eval, eval_flags);
    eval->add_option("--out,-o", eval_out, "report directory");

    ConfigFlags ablate_flags;
    std::string ablate_out;
    std::string variant;
    auto* ablate = app.add_subcommand("ablate", "run an ablation next to the full method");
    add_config_flags(*ablate, ablate_flags);
    ablate->add_option("--variant", variant,
                       "sim_avg | no_projection | no_whitening | identity_proj | pca_proj | per_variable | "
                       "bins_sweep | projections_sweep | levels_sweep")
        ->required();
    ablate->add_option("--out,-o", ablate_out, "report directory");

    auto* convert = app.add_subcommand("convert", "convert raw data to the tool's formats");
    convert->require_subcommand(1);
    std::string ts_train, ts_test, ts_class, ts_out;
    std::size_t ts_min = 0, ts_max = 0;
    auto* conv_ts = convert->add_subcommand("ts", ".ts archives to per-series CSV files and a manifest");
    conv_ts->add_option("--train", ts_train, "training .ts file")->required();
    conv_ts->add_option("--test", ts_test, "test .ts file")->required();
    conv_ts->add_option("--normal-class", ts_class, "class treated as normal")->required();
    conv_ts->add_option("--out,-o", ts_out, "output directory")->required();
    conv_ts->add_option("--min-length", ts_min, "drop shorter series");
    conv_ts->add_option("--max-length", ts_max, "drop longer series");
    std::string ppm_in, ppm_out;
    auto* conv_ppm = convert->add_subcommand("ppm", "binary PPM image to a raw-pixel SETF grid");
    conv_ppm->add_option("input", ppm_in, "PPM file")->required();
    conv_ppm->add_option("output", ppm_out, "SETF file")->required();
    std::vector<std::string> setf_files;
    auto* conv_check = convert->add_subcommand("setf-check", "validate SETF files by a byte-exact round trip");
    conv_check->add_option("files", setf_files, "SETF files")->required();

    std::vector<std::string> argv_store{"sinbad"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "sinbad: " << e.what() << "\nRun 'sinbad --help' for usage.\n";
        return kConfigError;
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        if (fit->parsed()) {
            const ExperimentConfig config = build_config(fit_flags);
            const FitSummary s = cmd_fit(config, fit_out);
            out << "fitted " << s.n_train << " training samples; wrote " << s.files.size() << " files to " << fit_out
                << " in " << seconds_since(t0) << " s\n";
        } else if (score->parsed()) {
            if (score_jobs) kernels::set_num_threads(*score_jobs);
            const ScoreTable table = cmd_score(model_dir, score_manifest, score_root);
            if (score_out.empty())
                write_score_table(out, table);
            else
                write_file_atomic(score_out, [&](std::ostream& o) { write_score_table(o, table); }, false);
        } else if (eval->parsed()) {
            const ExperimentConfig config = build_config(eval_flags);
            out << summary_text(cmd_eval(config, eval_out), false);
            out << "elapsed: " << seconds_since(t0) << " s\n";
        } else if (ablate->parsed()) {
            const ExperimentConfig config = build_config(ablate_flags);
            out << summary_text(cmd_ablate(config, parse_ablation_variant(variant), ablate_out), false);
            out << "elapsed: " << seconds_since(t0) << " s\n";
        } else if (conv_ts->parsed()) {
            const std::size_t n = convert_ts(ts_train, ts_test, ts_class, ts_out, {ts_min, ts_max});
            out << "wrote " << n << " series and manifest.csv to " << ts_out << '\n';
        } else if (conv_ppm->parsed()) {
            convert_ppm(ppm_in, ppm_out);
            out << "wrote " << ppm_out << '\n';
        } else if (conv_check->parsed()) {
            for (const auto& f : setf_files) {
                const SetfCheck c = check_setf(f);
                out << f << ": ok " << c.height << "x" << c.width << "x" << c.depth << '\n';
            }
        }
    } catch (const ConfigError& e) {
        err << "sinbad: config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "sinbad: data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "sinbad: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

} // namespace sinbad::cli
