#include "sinbad/pipeline.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "sinbad/binary_io.hpp"
#include "sinbad/error.hpp"
#include "sinbad/kernels.hpp"

namespace sinbad {

namespace {

// Sets materialized (and projected) at once while streaming over a source.
constexpr std::size_t kChunk = 64;

std::vector<ElementSet> materialize(const SetSource& source, std::size_t begin, std::size_t end) {
    std::vector<ElementSet> out(end - begin);
    if (end - begin == 1) {
        out[0] = source.get(begin);
        return out;
    }
#ifdef SINBAD_HAVE_OPENMP
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(kernels::num_threads())
    for (long i = 0; i < static_cast<long>(out.size()); ++i) {
        try {
            out[static_cast<std::size_t>(i)] = source.get(begin + static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(sinbad_materialize_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
#else
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = source.get(begin + i);
#endif
    return out;
}

template <typename Fn>
void for_each_chunk(const SetSource& source, Fn&& fn) {
    for (std::size_t begin = 0; begin < source.count; begin += kChunk) {
        const std::size_t end = std::min(source.count, begin + kChunk);
        fn(begin, materialize(source, begin, end));
    }
}

RowMatrix pooled_elements(const SetSource& source) {
    std::vector<ElementSet> all;
    Index rows = 0;
    for_each_chunk(source, [&](std::size_t, std::vector<ElementSet> chunk) {
        for (auto& s : chunk) {
            rows += s.size();
            all.push_back(std::move(s));
        }
    });
    RowMatrix pooled(rows, all.front().dims());
    Index at = 0;
    for (const auto& s : all) {
        pooled.middleRows(at, s.size()) = s.elements;
        at += s.size();
    }
    return pooled;
}

} // namespace

std::string to_string(ProjectionKind kind) {
    switch (kind) {
    case ProjectionKind::gaussian: return "gaussian";
    case ProjectionKind::identity: return "identity";
    case ProjectionKind::pca: return "pca";
    }
    return "?";
}

std::string to_string(EdgeMode mode) { return mode == EdgeMode::uniform ? "uniform" : "quantile"; }

std::string to_string(Scorer scorer) {
    switch (scorer) {
    case Scorer::whitened_knn: return "whitened_knn";
    case Scorer::plain_knn: return "plain_knn";
    case Scorer::gaussian: return "gaussian";
    case Scorer::per_variable: return "per_variable";
    }
    return "?";
}

std::string to_string(Pooling pooling) { return pooling == Pooling::histogram ? "histogram" : "mean"; }

std::string to_string(HistogramKind kind) {
    return kind == HistogramKind::cumulative ? "cumulative" : "plain";
}

ProjectionKind parse_projection_kind(const std::string& s) {
    if (s == "gaussian") return ProjectionKind::gaussian;
    if (s == "identity") return ProjectionKind::identity;
    if (s == "pca") return ProjectionKind::pca;
    throw ConfigError("unknown projection kind '" + s + "' (gaussian|identity|pca)");
}

EdgeMode parse_edge_mode(const std::string& s) {
    if (s == "uniform") return EdgeMode::uniform;
    if (s == "quantile") return EdgeMode::quantile;
    throw ConfigError("unknown edge mode '" + s + "' (uniform|quantile)");
}

Scorer parse_scorer(const std::string& s) {
    if (s == "whitened_knn") return Scorer::whitened_knn;
    if (s == "plain_knn") return Scorer::plain_knn;
    if (s == "gaussian") return Scorer::gaussian;
    if (s == "per_variable") return Scorer::per_variable;
    throw ConfigError("unknown scorer '" + s + "' (whitened_knn|plain_knn|gaussian|per_variable)");
}

Pooling parse_pooling(const std::string& s) {
    if (s == "histogram") return Pooling::histogram;
    if (s == "mean") return Pooling::mean;
    throw ConfigError("unknown pooling '" + s + "' (histogram|mean)");
}

HistogramKind parse_histogram_kind(const std::string& s) {
    if (s == "cumulative") return HistogramKind::cumulative;
    if (s == "plain") return HistogramKind::plain;
    throw ConfigError("unknown histogram kind '" + s + "' (cumulative|plain)");
}

SetSource SetSource::from(std::span<const ElementSet> sets) {
    return SetSource{sets.size(), [sets](std::size_t i) { return sets[i]; }};
}

FittedSetPipeline::FittedSetPipeline(SetPipelineConfig config, ProjectionMatrix projection,
                                     BinEdges edges, ModelBlob model, Vector train_scores)
    : config_(config), projection_(std::move(projection)), edges_(std::move(edges)),
      model_(std::move(model)), train_scores_(std::move(train_scores)) {}

Vector FittedSetPipeline::describe(const ElementSet& set) const {
    if (config_.pooling == Pooling::mean) return mean_pool(set);
    return describe_set(project_elements(set, projection_), edges_, config_.histogram).values;
}

RowMatrix FittedSetPipeline::describe_all(const SetSource& sets) const {
    const Index d = config_.pooling == Pooling::mean ? projection_.n_dims() : edges_.descriptor_length();
    RowMatrix out(static_cast<Index>(sets.count), d);
    for_each_chunk(sets, [&](std::size_t begin, std::vector<ElementSet> chunk) {
        RowMatrix block;
        if (config_.pooling == Pooling::mean) {
            block = kernels::mean_pool_all(chunk);
        } else {
            block = kernels::describe_all(kernels::project_all(chunk, projection_), edges_,
                                          config_.histogram);
        }
        if (block.cols() != d) throw DimensionError("sets disagree on element dims");
        out.middleRows(static_cast<Index>(begin), block.rows()) = block;
    });
    return out;
}

Vector FittedSetPipeline::score_descriptors(const RowMatrix& descriptors) const {
    switch (model_.kind) {
    case ScorerKind::whitened_knn: return model_.knn->score_rows(descriptors);
    case ScorerKind::gaussian: {
        Vector out(descriptors.rows());
        for (Index i = 0; i < descriptors.rows(); ++i)
            out(i) = model_.gaussian->mahalanobis(descriptors.row(i).transpose());
        return out;
    }
    case ScorerKind::per_variable: {
        Vector out(descriptors.rows());
        for (Index i = 0; i < descriptors.rows(); ++i)
            out(i) = score_per_variable(*model_.diagonal, descriptors.row(i).transpose());
        return out;
    }
    }
    throw FitError("pipeline has no scorer");
}

double FittedSetPipeline::score(const ElementSet& set) const {
    RowMatrix row = describe(set).transpose();
    return score_descriptors(row)(0);
}

Vector FittedSetPipeline::score_all(const SetSource& sets) const {
    return score_descriptors(describe_all(sets));
}

FittedSetPipeline fit_set_pipeline(const SetSource& train, const SetPipelineConfig& config) {
    if (train.count < 2) {
        std::ostringstream msg;
        msg << "fitting needs at least 2 training samples, got " << train.count;
        throw FitError(msg.str());
    }
    if (config.k < 1) throw ConfigError("k must be >= 1");
    const ElementSet first = train.get(0);
    const Index dims = first.dims();

    ProjectionMatrix projection;
    BinEdges edges;
    if (config.pooling == Pooling::mean) {
        projection.kind = ProjectionKind::identity;
        projection.weights = RowMatrix::Identity(dims, dims);
        projection.seed = config.seed;
    } else {
        switch (config.projection) {
        case ProjectionKind::gaussian:
            projection = make_projection(config.seed, dims, config.n_projections, ProjectionKind::gaussian);
            break;
        case ProjectionKind::identity:
            projection = make_projection(config.seed, dims, dims, ProjectionKind::identity);
            break;
        case ProjectionKind::pca:
            projection = pca_projection(pooled_elements(train), std::min<Index>(config.n_projections, dims));
            projection.seed = config.seed;
            break;
        }
        EdgeFitter fitter(projection.n_projections(), config.edge_mode);
        for_each_chunk(train, [&](std::size_t, std::vector<ElementSet> chunk) {
            for (const auto& s : kernels::project_all(chunk, projection)) fitter.add(s);
        });
        edges = fitter.finish(config.bins);
        if (edges.descriptor_length() == 0)
            throw FitError("every projection is constant on the training data; descriptors would be empty");
    }

    FittedSetPipeline shell(config, projection, edges, ModelBlob{}, Vector{});
    const RowMatrix descriptors = shell.describe_all(train);

    ModelBlob model;
    Vector train_scores(descriptors.rows());
    switch (config.scorer) {
    case Scorer::whitened_knn:
    case Scorer::plain_knn: {
        model.kind = ScorerKind::whitened_knn;
        model.knn = fit_whitened_knn(descriptors, config.shrinkage, config.k,
                                     config.scorer == Scorer::whitened_knn);
        train_scores = model.knn->leave_one_out_scores();
        break;
    }
    case Scorer::gaussian:
        model.kind = ScorerKind::gaussian;
        model.gaussian = fit_gaussian(descriptors, config.shrinkage);
        for (Index i = 0; i < descriptors.rows(); ++i)
            train_scores(i) = model.gaussian->mahalanobis(descriptors.row(i).transpose());
        break;
    case Scorer::per_variable:
        model.kind = ScorerKind::per_variable;
        model.diagonal = fit_diagonal(descriptors, config.shrinkage);
        for (Index i = 0; i < descriptors.rows(); ++i)
            train_scores(i) = score_per_variable(*model.diagonal, descriptors.row(i).transpose());
        break;
    }
    return FittedSetPipeline(config, std::move(projection), std::move(edges), std::move(model),
                             std::move(train_scores));
}

FittedSetPipeline fit_set_pipeline(std::span<const ElementSet> train, const SetPipelineConfig& config) {
    return fit_set_pipeline(SetSource::from(train), config);
}

Vector score_sets(std::span<const ElementSet> train, std::span<const ElementSet> test,
                  const SetPipelineConfig& config) {
    const FittedSetPipeline fitted = fit_set_pipeline(train, config);
    return fitted.score_all(SetSource::from(test));
}

// ---------------------------------------------------------------------------
// SINP blobs

namespace {
constexpr std::uint32_t kPipelineVersion = 1;
}

void write_pipeline(std::ostream& out, const FittedSetPipeline& p) {
    const auto& c = p.config();
    io::write_magic(out, "SINP");
    io::write_le<std::uint32_t>(out, kPipelineVersion);
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(c.projection));
    io::write_le<std::int32_t>(out, c.n_projections);
    io::write_le<std::int32_t>(out, c.bins);
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(c.edge_mode));
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(c.histogram));
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(c.pooling));
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(c.scorer));
    io::write_le<std::int32_t>(out, c.k);
    io::write_le<double>(out, c.shrinkage);
    io::write_le<std::uint64_t>(out, c.seed);

    const auto& proj = p.projection();
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(proj.kind));
    io::write_le<std::uint64_t>(out, proj.seed);
    io::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(proj.weights.rows()));
    io::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(proj.weights.cols()));
    io::write_array(out, proj.weights.data(), static_cast<std::size_t>(proj.weights.size()));

    const auto& e = p.edges();
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(e.mode));
    io::write_le<std::int32_t>(out, e.bins);
    io::write_le<std::uint64_t>(out, e.edges.size());
    for (std::size_t i = 0; i < e.edges.size(); ++i) {
        io::write_le<std::uint8_t>(out, e.degenerate[i] ? 1 : 0);
        io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.edges[i].size()));
        io::write_array(out, e.edges[i].data(), e.edges[i].size());
    }
    io::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(p.train_scores().size()));
    io::write_array(out, p.train_scores().data(), static_cast<std::size_t>(p.train_scores().size()));
    write_model(out, p.model());
    if (!out) throw DataError("failed writing pipeline blob");
}

FittedSetPipeline read_pipeline(std::istream& in) {
    io::expect_magic(in, "SINP");
    const auto version = io::read_le<std::uint32_t>(in, "pipeline version");
    if (version != kPipelineVersion) throw DataError("unsupported SINP version " + std::to_string(version));
    auto enum_byte = [&in](std::string_view what, std::uint8_t max) {
        const auto v = io::read_le<std::uint8_t>(in, what);
        if (v > max) throw DataError("invalid " + std::string(what) + " code " + std::to_string(v));
        return v;
    };
    SetPipelineConfig c;
    c.projection = static_cast<ProjectionKind>(enum_byte("projection kind", 2));
    c.n_projections = io::read_le<std::int32_t>(in, "n_projections");
    c.bins = io::read_le<std::int32_t>(in, "bins");
    c.edge_mode = static_cast<EdgeMode>(enum_byte("edge mode", 1));
    c.histogram = static_cast<HistogramKind>(enum_byte("histogram kind", 1));
    c.pooling = static_cast<Pooling>(enum_byte("pooling", 1));
    c.scorer = static_cast<Scorer>(enum_byte("scorer", 3));
    c.k = io::read_le<std::int32_t>(in, "k");
    c.shrinkage = io::read_le<double>(in, "shrinkage");
    c.seed = io::read_le<std::uint64_t>(in, "seed");

    ProjectionMatrix proj;
    proj.kind = static_cast<ProjectionKind>(enum_byte("projection kind", 2));
    proj.seed = io::read_le<std::uint64_t>(in, "projection seed");
    const auto rows = io::read_le<std::uint64_t>(in, "projection rows");
    const auto cols = io::read_le<std::uint64_t>(in, "projection cols");
    if (rows > (1u << 24) || cols > (1u << 24)) throw DataError("implausible projection shape");
    proj.weights.resize(static_cast<Index>(rows), static_cast<Index>(cols));
    io::read_array(in, proj.weights.data(), static_cast<std::size_t>(proj.weights.size()), "projection weights");

    BinEdges e;
    e.mode = static_cast<EdgeMode>(enum_byte("edge mode", 1));
    e.bins = io::read_le<std::int32_t>(in, "bins");
    const auto n_proj = io::read_le<std::uint64_t>(in, "edge projections");
    if (n_proj > (1u << 24)) throw DataError("implausible edge count");
    e.edges.resize(n_proj);
    e.degenerate.resize(n_proj);
    for (std::size_t i = 0; i < n_proj; ++i) {
        e.degenerate[i] = io::read_le<std::uint8_t>(in, "degenerate flag") != 0;
        const auto n = io::read_le<std::uint32_t>(in, "edge list length");
        if (n > (1u << 20)) throw DataError("implausible edge list length");
        e.edges[i].resize(n);
        io::read_array(in, e.edges[i].data(), n, "edges");
        const std::size_t expected = e.degenerate[i] ? 2 : static_cast<std::size_t>(e.bins) + 1;
        if (n != expected) throw DataError("edge list length does not match bin count");
    }
    const auto n_scores = io::read_le<std::uint64_t>(in, "train score count");
    if (n_scores > (1u << 30)) throw DataError("implausible train score count");
    Vector scores(static_cast<Index>(n_scores));
    io::read_array(in, scores.data(), n_scores, "train scores");
    ModelBlob model = read_model(in);
    return FittedSetPipeline(c, std::move(proj), std::move(e), std::move(model), std::move(scores));
}

} // namespace sinbad
