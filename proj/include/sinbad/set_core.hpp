#pragma once

// Element sets, projections, bin edges and histogram set descriptors.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sinbad {

using Index = Eigen::Index;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// One sample: an unordered collection of element feature vectors, one per row.
struct ElementSet {
    RowMatrix elements;
    std::string sample_id;

    ElementSet() = default;
    /// Throws DimensionError on an empty matrix.
    explicit ElementSet(RowMatrix elements, std::string sample_id = {});

    Index size() const noexcept { return elements.rows(); }
    Index dims() const noexcept { return elements.cols(); }
};

enum class ProjectionKind : std::uint8_t { gaussian = 0, identity = 1, pca = 2 };

/// Linear map applied to every element: row i of the output is `weights * e`.
struct ProjectionMatrix {
    RowMatrix weights; // n_projections x n_dims
    std::uint64_t seed = 0;
    ProjectionKind kind = ProjectionKind::gaussian;

    Index n_projections() const noexcept { return weights.rows(); }
    Index n_dims() const noexcept { return weights.cols(); }
};

enum class EdgeMode : std::uint8_t { uniform = 0, quantile = 1 };

/// Per-projection bin edges fitted on training data.
///
/// Projection p has `bins + 1` non-decreasing edges. A value v falls into bin
/// `#{interior edges <= v}`, so values below the first interior edge go to bin
/// 0 and values at or above the last interior edge go to bin `bins - 1`;
/// out-of-range test values clamp to the boundary bins. A projection whose
/// training values are all equal is degenerate: it keeps a single bin and
/// contributes nothing to the descriptor.
struct BinEdges {
    std::vector<std::vector<double>> edges;
    std::vector<bool> degenerate;
    EdgeMode mode = EdgeMode::uniform;
    int bins = 0;

    Index n_projections() const noexcept { return static_cast<Index>(edges.size()); }
    /// Descriptor entries contributed by projection p: bins - 1, or 0 if degenerate.
    Index block_length(Index p) const noexcept;
    Index descriptor_length() const noexcept;
    /// Bin index of `value` under projection p.
    int bin_of(Index p, double value) const noexcept;
    /// FNV-1a over the edge values and flags; recorded in descriptor provenance.
    std::uint64_t hash() const noexcept;
};

enum class HistogramKind : std::uint8_t { cumulative = 0, plain = 1 };

struct SetDescriptor {
    Vector values;
    std::uint64_t projection_seed = 0;
    std::uint64_t edges_hash = 0;
};

/// Gaussian kind: entries i.i.d. N(0,1) drawn row-major from Xoshiro256(seed)
/// with the polar method. Identity kind requires n_projections == n_dims.
/// PCA needs data; use pca_projection instead.
ProjectionMatrix make_projection(std::uint64_t seed, Index n_dims, Index n_projections,
                                 ProjectionKind kind);

/// Rows are the top-variance unit eigenvectors of the pooled element covariance,
/// each signed so its largest-magnitude entry is positive. Throws FitError if
/// n_projections exceeds the effective rank of the data.
ProjectionMatrix pca_projection(const RowMatrix& pooled_elements, Index n_projections);

ElementSet project_elements(const ElementSet& set, const ProjectionMatrix& projection);

/// Streaming accumulator behind fit_bin_edges. Uniform mode keeps only the
/// per-projection range; quantile mode pools every value.
class EdgeFitter {
public:
    EdgeFitter(Index n_projections, EdgeMode mode);

    void add(const ElementSet& projected);
    /// Merge another fitter's state (used by parallel reductions).
    void merge(const EdgeFitter& other);
    BinEdges finish(int bins) const;

    EdgeMode mode() const noexcept { return mode_; }

private:
    Index n_projections_;
    EdgeMode mode_;
    std::vector<double> lo_, hi_;
    std::vector<std::vector<double>> pooled_;
};

/// Uniform mode: `bins` equal-width bins over [min, max] of the pooled values.
/// Quantile mode: edge k is the k/bins empirical quantile (linear interpolation
/// between order statistics) of the pooled values.
BinEdges fit_bin_edges(std::span<const ElementSet> projected_train, int bins, EdgeMode mode);

/// Histogram descriptor of a projected set. Per projection: bin counts,
/// normalized by the element count, accumulated (cumulative kind), final entry
/// dropped; blocks concatenated in projection order.
SetDescriptor describe_set(const ElementSet& projected, const BinEdges& edges,
                           HistogramKind kind = HistogramKind::cumulative,
                           std::uint64_t projection_seed = 0);

/// Element-wise mean of the set.
Vector mean_pool(const ElementSet& set);

} // namespace sinbad
