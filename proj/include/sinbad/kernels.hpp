#pragma once

// Batch kernels over many samples. Each kernel has a serial reference and an
// OpenMP variant; both produce bit-identical results (every output row is
// written by exactly one thread, with no cross-row reductions).

#include <span>
#include <vector>

#include "sinbad/set_core.hpp"

namespace sinbad::kernels {

enum class Backend { serial, openmp };

/// OpenMP when the library was built with it, serial otherwise.
Backend default_backend() noexcept;

/// Thread count used by the OpenMP backend; 0 restores the runtime default.
void set_num_threads(int n) noexcept;
int num_threads() noexcept;

std::vector<ElementSet> project_all(std::span<const ElementSet> sets,
                                    const ProjectionMatrix& projection,
                                    Backend backend = default_backend());

/// One descriptor per row.
RowMatrix describe_all(std::span<const ElementSet> projected, const BinEdges& edges,
                       HistogramKind kind, Backend backend = default_backend());

/// Writes the descriptor of one projected set into `out`
/// (length edges.descriptor_length()).
void describe_into(const ElementSet& projected, const BinEdges& edges, HistogramKind kind,
                   double* out);

/// Row-wise mean pooling.
RowMatrix mean_pool_all(std::span<const ElementSet> sets, Backend backend = default_backend());

/// For every query row: mean of the k smallest squared Euclidean distances to
/// the reference rows. With `leave_one_out`, queries are the reference rows
/// themselves and row i skips reference i.
Vector knn_scores(const RowMatrix& reference, const RowMatrix& queries, int k,
                  bool leave_one_out = false, Backend backend = default_backend());

} // namespace sinbad::kernels
