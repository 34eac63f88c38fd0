#include "sinbad/set_core.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sinbad/error.hpp"
#include "sinbad/kernels.hpp"
#include "sinbad/rng.hpp"

namespace sinbad {

ElementSet::ElementSet(RowMatrix elements_, std::string sample_id_)
    : elements(std::move(elements_)), sample_id(std::move(sample_id_)) {
    if (elements.rows() < 1 || elements.cols() < 1) {
        throw DimensionError("element set '" + sample_id + "' is empty");
    }
}

Index BinEdges::block_length(Index p) const noexcept {
    return degenerate[static_cast<std::size_t>(p)] ? 0 : bins - 1;
}

Index BinEdges::descriptor_length() const noexcept {
    Index total = 0;
    for (Index p = 0; p < n_projections(); ++p) total += block_length(p);
    return total;
}

int BinEdges::bin_of(Index p, double value) const noexcept {
    const auto& e = edges[static_cast<std::size_t>(p)];
    if (degenerate[static_cast<std::size_t>(p)]) return 0;
    // interior edges are e[1] .. e[bins-1]
    auto first = e.begin() + 1;
    auto last = e.end() - 1;
    return static_cast<int>(std::upper_bound(first, last, value) - first);
}

std::uint64_t BinEdges::hash() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    const auto m = static_cast<std::uint8_t>(mode);
    feed(&m, 1);
    feed(&bins, sizeof bins);
    for (std::size_t p = 0; p < edges.size(); ++p) {
        const std::uint8_t d = degenerate[p] ? 1 : 0;
        feed(&d, 1);
        feed(edges[p].data(), edges[p].size() * sizeof(double));
    }
    return h;
}

ProjectionMatrix make_projection(std::uint64_t seed, Index n_dims, Index n_projections,
                                 ProjectionKind kind) {
    if (n_dims < 1 || n_projections < 1) {
        throw DimensionError("projection needs n_dims >= 1 and n_projections >= 1");
    }
    ProjectionMatrix out;
    out.seed = seed;
    out.kind = kind;
    switch (kind) {
    case ProjectionKind::identity:
        if (n_projections != n_dims) {
            std::ostringstream msg;
            msg << "identity projection requires n_projections == n_dims (got " << n_projections
                << " vs " << n_dims << ")";
            throw DimensionError(msg.str());
        }
        out.weights = RowMatrix::Identity(n_dims, n_dims);
        break;
    case ProjectionKind::gaussian: {
        Xoshiro256 rng(seed);
        out.weights.resize(n_projections, n_dims);
        for (Index i = 0; i < n_projections; ++i)
            for (Index j = 0; j < n_dims; ++j) out.weights(i, j) = rng.normal();
        break;
    }
    case ProjectionKind::pca:
        throw FitError("pca projections are fitted from data; use pca_projection");
    }
    return out;
}

ProjectionMatrix pca_projection(const RowMatrix& pooled, Index n_projections) {
    const Index n = pooled.rows();
    const Index d = pooled.cols();
    if (n < 2 || d < 1) throw FitError("pca projection needs at least two pooled elements");
    if (n_projections < 1) throw DimensionError("pca projection needs n_projections >= 1");

    const Eigen::RowVectorXd mean = pooled.colwise().mean();
    const Eigen::MatrixXd centered = pooled.rowwise() - mean;
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw FitError("pca eigendecomposition failed");

    const Vector& values = eig.eigenvalues(); // ascending
    const double top = std::max(values(d - 1), 0.0);
    const double tol = std::max(top, 1e-300) * 1e-10 * static_cast<double>(d);
    Index rank = 0;
    for (Index i = 0; i < d; ++i)
        if (values(i) > tol) ++rank;
    if (n_projections > rank) {
        std::ostringstream msg;
        msg << "pca projection: requested " << n_projections
            << " projections but the pooled elements have effective rank " << rank;
        throw FitError(msg.str());
    }

    ProjectionMatrix out;
    out.kind = ProjectionKind::pca;
    out.weights.resize(n_projections, d);
    for (Index r = 0; r < n_projections; ++r) {
        Vector v = eig.eigenvectors().col(d - 1 - r).normalized();
        Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        out.weights.row(r) = v.transpose();
    }
    return out;
}

ElementSet project_elements(const ElementSet& set, const ProjectionMatrix& projection) {
    if (set.dims() != projection.n_dims()) {
        std::ostringstream msg;
        msg << "set '" << set.sample_id << "' has " << set.dims()
            << " dims but the projection expects " << projection.n_dims();
        throw DimensionError(msg.str());
    }
    RowMatrix projected = set.elements * projection.weights.transpose();
    return ElementSet(std::move(projected), set.sample_id);
}

EdgeFitter::EdgeFitter(Index n_projections, EdgeMode mode)
    : n_projections_(n_projections), mode_(mode),
      lo_(static_cast<std::size_t>(n_projections), std::numeric_limits<double>::infinity()),
      hi_(static_cast<std::size_t>(n_projections), -std::numeric_limits<double>::infinity()) {
    if (mode_ == EdgeMode::quantile) pooled_.resize(static_cast<std::size_t>(n_projections));
}

void EdgeFitter::add(const ElementSet& projected) {
    if (projected.dims() != n_projections_) {
        std::ostringstream msg;
        msg << "set '" << projected.sample_id << "' has " << projected.dims()
            << " projected dims, expected " << n_projections_;
        throw DimensionError(msg.str());
    }
    for (Index p = 0; p < n_projections_; ++p) {
        const auto col = projected.elements.col(p);
        const auto sp = static_cast<std::size_t>(p);
        lo_[sp] = std::min(lo_[sp], col.minCoeff());
        hi_[sp] = std::max(hi_[sp], col.maxCoeff());
        if (mode_ == EdgeMode::quantile) {
            auto& pool = pooled_[sp];
            for (Index i = 0; i < col.size(); ++i) pool.push_back(col(i));
        }
    }
}

void EdgeFitter::merge(const EdgeFitter& other) {
    if (other.n_projections_ != n_projections_ || other.mode_ != mode_)
        throw DimensionError("cannot merge edge fitters of different shape");
    for (std::size_t p = 0; p < lo_.size(); ++p) {
        lo_[p] = std::min(lo_[p], other.lo_[p]);
        hi_[p] = std::max(hi_[p], other.hi_[p]);
        if (mode_ == EdgeMode::quantile)
            pooled_[p].insert(pooled_[p].end(), other.pooled_[p].begin(), other.pooled_[p].end());
    }
}

BinEdges EdgeFitter::finish(int bins) const {
    if (bins < 2) throw FitError("bin count must be at least 2");
    if (n_projections_ > 0 && !(lo_[0] <= hi_[0])) throw FitError("no training values to fit bin edges");

    BinEdges out;
    out.mode = mode_;
    out.bins = bins;
    out.edges.resize(lo_.size());
    out.degenerate.assign(lo_.size(), false);
    for (std::size_t p = 0; p < lo_.size(); ++p) {
        const double lo = lo_[p];
        const double hi = hi_[p];
        auto& e = out.edges[p];
        if (!(hi > lo)) {
            out.degenerate[p] = true;
            e = {lo, hi};
            continue;
        }
        e.resize(static_cast<std::size_t>(bins) + 1);
        e.front() = lo;
        e.back() = hi;
        if (mode_ == EdgeMode::uniform) {
            const double width = hi - lo;
            for (int k = 1; k < bins; ++k) e[static_cast<std::size_t>(k)] = lo + width * k / bins;
        } else {
            std::vector<double> sorted = pooled_[p];
            std::sort(sorted.begin(), sorted.end());
            const double last = static_cast<double>(sorted.size() - 1);
            for (int k = 1; k < bins; ++k) {
                const double pos = last * k / bins;
                const auto below = static_cast<std::size_t>(pos);
                const double frac = pos - static_cast<double>(below);
                const double a = sorted[below];
                const double b = sorted[std::min(below + 1, sorted.size() - 1)];
                e[static_cast<std::size_t>(k)] = frac == 0.0 ? a : a + frac * (b - a);
            }
        }
    }
    return out;
}

BinEdges fit_bin_edges(std::span<const ElementSet> projected_train, int bins, EdgeMode mode) {
    if (projected_train.empty()) throw FitError("fit_bin_edges needs at least one training set");
    EdgeFitter fitter(projected_train.front().dims(), mode);
    for (const auto& s : projected_train) fitter.add(s);
    return fitter.finish(bins);
}

SetDescriptor describe_set(const ElementSet& projected, const BinEdges& edges, HistogramKind kind,
                           std::uint64_t projection_seed) {
    SetDescriptor out;
    out.values.resize(edges.descriptor_length());
    kernels::describe_into(projected, edges, kind, out.values.data());
    out.projection_seed = projection_seed;
    out.edges_hash = edges.hash();
    return out;
}

Vector mean_pool(const ElementSet& set) {
    if (set.size() < 1) throw DimensionError("mean_pool of an empty set");
    return set.elements.colwise().mean().transpose();
}

} // namespace sinbad
