#pragma once

// Fit-and-score pipeline over element sets: projection -> bin edges ->
// descriptors -> scorer. Time series and image levels both reduce to this.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sinbad/density.hpp"
#include "sinbad/set_core.hpp"

namespace sinbad {

/// How a set becomes a fixed-length vector.
enum class Pooling : std::uint8_t { histogram = 0, mean = 1 };

enum class Scorer : std::uint8_t {
    whitened_knn = 0, ///< kNN after Mahalanobis whitening
    plain_knn = 1,    ///< kNN on raw descriptors
    gaussian = 2,     ///< Mahalanobis distance to the training mean
    per_variable = 3, ///< diagonal Gaussian
};

struct SetPipelineConfig {
    ProjectionKind projection = ProjectionKind::gaussian;
    int n_projections = 100;
    int bins = 20;
    EdgeMode edge_mode = EdgeMode::quantile;
    HistogramKind histogram = HistogramKind::cumulative;
    Pooling pooling = Pooling::histogram;
    Scorer scorer = Scorer::whitened_knn;
    int k = 1;
    double shrinkage = kDefaultShrinkage;
    std::uint64_t seed = 0;
};

std::string to_string(ProjectionKind kind);
std::string to_string(EdgeMode mode);
std::string to_string(Scorer scorer);
std::string to_string(Pooling pooling);
std::string to_string(HistogramKind kind);
ProjectionKind parse_projection_kind(const std::string& s);
EdgeMode parse_edge_mode(const std::string& s);
Scorer parse_scorer(const std::string& s);
Pooling parse_pooling(const std::string& s);
HistogramKind parse_histogram_kind(const std::string& s);

/// Produces sample i on demand so large sets (raw pixels) need not all be
/// resident at once. Must be safe to call concurrently.
struct SetSource {
    std::size_t count = 0;
    std::function<ElementSet(std::size_t)> get;

    static SetSource from(std::span<const ElementSet> sets);
};

class FittedSetPipeline {
public:
    FittedSetPipeline() = default;
    FittedSetPipeline(SetPipelineConfig config, ProjectionMatrix projection, BinEdges edges,
                      ModelBlob model, Vector train_loo_scores);

    const SetPipelineConfig& config() const noexcept { return config_; }
    const ProjectionMatrix& projection() const noexcept { return projection_; }
    const BinEdges& edges() const noexcept { return edges_; }
    const ModelBlob& model() const noexcept { return model_; }
    /// Leave-one-out scores of the training samples (in-sample scores for the
    /// Gaussian scorers, which have no per-sample memory).
    const Vector& train_scores() const noexcept { return train_scores_; }

    /// Fixed-length vector the scorer sees for one raw set.
    Vector describe(const ElementSet& set) const;
    RowMatrix describe_all(const SetSource& sets) const;
    double score(const ElementSet& set) const;
    Vector score_all(const SetSource& sets) const;
    Vector score_descriptors(const RowMatrix& descriptors) const;

private:
    SetPipelineConfig config_;
    ProjectionMatrix projection_;
    BinEdges edges_;
    ModelBlob model_;
    Vector train_scores_;
};

/// Throws FitError with fewer than two training sets.
FittedSetPipeline fit_set_pipeline(const SetSource& train, const SetPipelineConfig& config);
FittedSetPipeline fit_set_pipeline(std::span<const ElementSet> train, const SetPipelineConfig& config);

/// Fit on `train`, score `test`.
Vector score_sets(std::span<const ElementSet> train, std::span<const ElementSet> test,
                  const SetPipelineConfig& config);

// Pipeline blobs ("SINP" v1): config, projection, edges, then a SINM blob.
void write_pipeline(std::ostream& out, const FittedSetPipeline& pipeline);
FittedSetPipeline read_pipeline(std::istream& in);

} // namespace sinbad
