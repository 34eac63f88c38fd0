#include "sinbad/kernels.hpp"

#include <algorithm>
#include <sstream>

#ifdef SINBAD_HAVE_OPENMP
#include <omp.h>
#endif

#include "sinbad/error.hpp"

namespace sinbad::kernels {

namespace {

#ifdef SINBAD_HAVE_OPENMP
int g_threads = 0;
#endif

bool use_omp(Backend backend) noexcept {
#ifdef SINBAD_HAVE_OPENMP
    return backend == Backend::openmp;
#else
    (void)backend;
    return false;
#endif
}

// Runs body(i) for i in [0, n). Iterations must write disjoint outputs.
template <typename Body>
void for_each_index(Index n, Backend backend, Body&& body) {
    if (use_omp(backend)) {
#ifdef SINBAD_HAVE_OPENMP
        const int threads = g_threads > 0 ? g_threads : omp_get_max_threads();
        // Exceptions must not cross the parallel region boundary.
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (Index i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
#pragma omp critical(sinbad_kernel_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        return;
#endif
    }
    for (Index i = 0; i < n; ++i) body(i);
}

double mean_of_smallest(std::vector<double>& dist, int k) {
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    double sum = 0.0;
    // the k smallest are now in [0, k); sort them so the summation order is fixed
    std::sort(dist.begin(), dist.begin() + k);
    for (int j = 0; j < k; ++j) sum += dist[static_cast<std::size_t>(j)];
    return sum / k;
}

} // namespace

Backend default_backend() noexcept {
#ifdef SINBAD_HAVE_OPENMP
    return Backend::openmp;
#else
    return Backend::serial;
#endif
}

void set_num_threads(int n) noexcept {
#ifdef SINBAD_HAVE_OPENMP
    g_threads = std::max(n, 0);
#else
    (void)n;
#endif
}

int num_threads() noexcept {
#ifdef SINBAD_HAVE_OPENMP
    return g_threads > 0 ? g_threads : omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<ElementSet> project_all(std::span<const ElementSet> sets,
                                    const ProjectionMatrix& projection, Backend backend) {
    std::vector<ElementSet> out(sets.size());
    for_each_index(static_cast<Index>(sets.size()), backend, [&](Index i) {
        const auto si = static_cast<std::size_t>(i);
        out[si] = project_elements(sets[si], projection);
    });
    return out;
}

void describe_into(const ElementSet& projected, const BinEdges& edges, HistogramKind kind,
                   double* out) {
    if (projected.dims() != edges.n_projections()) {
        std::ostringstream msg;
        msg << "set '" << projected.sample_id << "' has " << projected.dims()
            << " projected dims but the bin edges cover " << edges.n_projections();
        throw DimensionError(msg.str());
    }
    const Index n = projected.size();
    const double n_real = static_cast<double>(n);
    const int bins = edges.bins;
    std::vector<long> counts(static_cast<std::size_t>(bins));
    Index offset = 0;
    for (Index p = 0; p < edges.n_projections(); ++p) {
        const Index len = edges.block_length(p);
        if (len == 0) continue;
        std::fill(counts.begin(), counts.end(), 0L);
        const auto col = projected.elements.col(p);
        for (Index i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(edges.bin_of(p, col(i)))];
        long running = 0;
        for (Index b = 0; b < len; ++b) {
            const long c = counts[static_cast<std::size_t>(b)];
            running += c;
            // integer accumulation keeps the cumulative value exactly count/n
            out[offset + b] = static_cast<double>(kind == HistogramKind::cumulative ? running : c) / n_real;
        }
        offset += len;
    }
}

RowMatrix describe_all(std::span<const ElementSet> projected, const BinEdges& edges,
                       HistogramKind kind, Backend backend) {
    RowMatrix out(static_cast<Index>(projected.size()), edges.descriptor_length());
    for_each_index(out.rows(), backend, [&](Index i) {
        describe_into(projected[static_cast<std::size_t>(i)], edges, kind, out.row(i).data());
    });
    return out;
}

RowMatrix mean_pool_all(std::span<const ElementSet> sets, Backend backend) {
    if (sets.empty()) return {};
    const Index d = sets.front().dims();
    RowMatrix out(static_cast<Index>(sets.size()), d);
    for_each_index(out.rows(), backend, [&](Index i) {
        const auto& s = sets[static_cast<std::size_t>(i)];
        if (s.dims() != d) throw DimensionError("sets disagree on element dims");
        out.row(i) = s.elements.colwise().mean();
    });
    return out;
}

Vector knn_scores(const RowMatrix& reference, const RowMatrix& queries, int k, bool leave_one_out,
                  Backend backend) {
    const Index n_ref = reference.rows();
    const Index available = leave_one_out ? n_ref - 1 : n_ref;
    if (k < 1 || k > available) {
        std::ostringstream msg;
        msg << "k=" << k << " but only " << available << " reference descriptors are available";
        throw FitError(msg.str());
    }
    if (queries.cols() != reference.cols()) {
        std::ostringstream msg;
        msg << "query descriptors have " << queries.cols() << " dims, reference has "
            << reference.cols();
        throw DimensionError(msg.str());
    }
    if (leave_one_out && queries.rows() != n_ref)
        throw DimensionError("leave-one-out scoring needs queries == reference");

    Vector out(queries.rows());
    for_each_index(queries.rows(), backend, [&](Index q) {
        std::vector<double> dist;
        dist.reserve(static_cast<std::size_t>(n_ref));
        const auto query = queries.row(q);
        for (Index r = 0; r < n_ref; ++r) {
            if (leave_one_out && r == q) continue;
            dist.push_back((reference.row(r) - query).squaredNorm());
        }
        out(q) = mean_of_smallest(dist, k);
    });
    return out;
}

} // namespace sinbad::kernels
