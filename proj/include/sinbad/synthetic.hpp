#pragma once

// Synthetic datasets with known answers, used by the acceptance suite, the
// CLI's built-in benchmark and the bundled fixtures.

#include <cstdint>
#include <vector>

#include "sinbad/image_sets.hpp"
#include "sinbad/set_core.hpp"
#include "sinbad/timeseries.hpp"

namespace sinbad::synthetic {

/// A multi-level dataset of element grids: every sample carries one grid per
/// level, all levels derived from the same latent elements.
struct GridDataset {
    std::vector<LevelTag> levels;
    /// grids[level][sample]
    std::vector<std::vector<FeatureGrid>> train;
    std::vector<std::vector<FeatureGrid>> test;
    std::vector<int> test_labels;
};

struct LevelSpec {
    LevelTag tag = LevelTag::block3;
    int dims = 16;
    double noise = 0.1;
    /// Extra channels holding only per-element noise N(0, nuisance_noise^2).
    int nuisance_dims = 0;
    double nuisance_noise = 1.0;
};

/// Logical-anomaly benchmark. Latent elements come from three Gaussian
/// clusters; a normal sample holds `normal_counts` elements per cluster and an
/// anomaly `anomaly_counts` (each count multiplied by `multiplicity`). Per
/// sample, cluster centers are jittered by N(0, center_jitter^2) and the third
/// cluster drifts along the axis joining the first two, which moves the sample
/// mean exactly the way the anomaly does. Each level observes the latent
/// elements through its own random linear map plus noise, optionally padded
/// with noise-only channels.
struct LogicalBenchmarkParams {
    int n_train = 200;
    int n_test_normal = 100;
    int n_test_anomalous = 100;
    int latent_dims = 2;
    double cluster_radius = 6.0;
    double cluster_spread = 0.5;
    double center_jitter = 0.3;
    /// Latent dims beyond the first two carry no cluster structure; every
    /// element of a sample shares one offset N(0, global_shift^2) there.
    double global_shift = 0.0;
    /// Per-sample offset N(0, drift^2) of the third cluster along the axis
    /// joining the first two.
    double drift = 3.0;
    std::vector<int> normal_counts{2, 2, 2};
    std::vector<int> anomaly_counts{3, 1, 2};
    int multiplicity = 4;
    std::vector<LevelSpec> levels{{LevelTag::block3, 16, 0.1, 16, 5.0}};
};

/// Three levels in the shape of the image pipeline: two block levels with
/// noise channels and a 3-channel raw-pixel level.
LogicalBenchmarkParams three_level_benchmark();

GridDataset logical_benchmark(const LogicalBenchmarkParams& params, std::uint64_t seed);

/// Flattens one level of a grid dataset into element sets.
std::vector<ElementSet> grid_sets(const std::vector<FeatureGrid>& grids);

/// Two 2-D sets with equal means and identical per-axis value multisets that
/// differ jointly: {(0,0),(1,1),(0,0),(1,1)} vs {(0,1),(1,0),(0,1),(1,0)}.
std::pair<ElementSet, ElementSet> equal_marginal_pair();

struct SetDataset {
    std::vector<ElementSet> train;
    std::vector<ElementSet> test;
    std::vector<int> test_labels;
};

/// Sets of 2-D elements (x, x) for normal samples and (x, -x) for anomalies,
/// x ~ N(0, 1): both classes share means and per-axis marginals, so only a
/// mixing projection separates them.
SetDataset equal_marginal_dataset(int n_train, int n_test_per_class, int set_size, std::uint64_t seed);

struct SeriesDataset {
    std::vector<Series> train;
    std::vector<Series> test;
    std::vector<int> test_labels;
};

/// Multichannel series built from sinusoidal motifs. Normal series contain
/// motifs A and B in equal numbers; anomalies replace half of the B motifs by
/// A, so every local window remains typical.
SeriesDataset motif_series(int n_train, int n_test_per_class, int length, int channels, std::uint64_t seed);

} // namespace sinbad::synthetic
