#include "sinbad/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sinbad/error.hpp"
#include "sinbad/rng.hpp"

namespace sinbad::synthetic {

namespace {

template <typename T>
void shuffle(std::vector<T>& v, Xoshiro256& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

RowMatrix gaussian_matrix(Index rows, Index cols, Xoshiro256& rng, double scale) {
    RowMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
    return m;
}

} // namespace

GridDataset logical_benchmark(const LogicalBenchmarkParams& p, std::uint64_t seed) {
    if (p.normal_counts.size() != 3 || p.anomaly_counts.size() != 3)
        throw ConfigError("logical benchmark expects three cluster counts");
    if (p.latent_dims < 2) throw ConfigError("logical benchmark needs latent_dims >= 2");
    Xoshiro256 rng(seed);
    const Index q = p.latent_dims;

    std::vector<Vector> centers(3, Vector::Zero(q));
    for (int c = 0; c < 3; ++c) {
        const double angle = 2.0 * std::numbers::pi * c / 3.0;
        centers[static_cast<std::size_t>(c)](0) = p.cluster_radius * std::cos(angle);
        centers[static_cast<std::size_t>(c)](1) = p.cluster_radius * std::sin(angle);
    }
    const Vector axis = (centers[0] - centers[1]).normalized();
    std::vector<RowMatrix> maps;
    for (const auto& level : p.levels)
        maps.push_back(gaussian_matrix(level.dims, q, rng, 1.0 / std::sqrt(static_cast<double>(q))));

    GridDataset out;
    for (const auto& level : p.levels) out.levels.push_back(level.tag);
    out.train.resize(p.levels.size());
    out.test.resize(p.levels.size());

    auto make_sample = [&](const std::vector<int>& counts, const std::string& id) {
        std::vector<Vector> latent;
        Vector shift = Vector::Zero(q);
        for (Index j = 2; j < q; ++j) shift(j) = p.global_shift * rng.normal();
        const double drift = p.drift * rng.normal();
        for (int c = 0; c < 3; ++c) {
            Vector center = centers[static_cast<std::size_t>(c)];
            for (Index j = 0; j < q; ++j) center(j) += p.center_jitter * rng.normal();
            if (c == 2) center += drift * axis;
            for (int i = 0; i < counts[static_cast<std::size_t>(c)] * p.multiplicity; ++i) {
                Vector z = center + shift;
                for (Index j = 0; j < q; ++j) z(j) += p.cluster_spread * rng.normal();
                latent.push_back(std::move(z));
            }
        }
        shuffle(latent, rng);
        std::vector<FeatureGrid> grids;
        for (std::size_t l = 0; l < p.levels.size(); ++l) {
            const auto& spec = p.levels[l];
            FeatureGrid g(1, static_cast<Index>(latent.size()), spec.dims + spec.nuisance_dims, spec.tag, id);
            for (std::size_t e = 0; e < latent.size(); ++e) {
                const Vector f = maps[l] * latent[e];
                for (Index d = 0; d < spec.dims; ++d)
                    g.at(0, static_cast<Index>(e), d) = static_cast<float>(f(d) + spec.noise * rng.normal());
                for (Index d = 0; d < spec.nuisance_dims; ++d)
                    g.at(0, static_cast<Index>(e), spec.dims + d) = static_cast<float>(spec.nuisance_noise * rng.normal());
            }
            grids.push_back(std::move(g));
        }
        return grids;
    };

    auto append = [&](std::vector<std::vector<FeatureGrid>>& dst, std::vector<FeatureGrid> grids) {
        for (std::size_t l = 0; l < grids.size(); ++l) dst[l].push_back(std::move(grids[l]));
    };
    for (int i = 0; i < p.n_train; ++i) append(out.train, make_sample(p.normal_counts, "train_" + std::to_string(i)));
    for (int i = 0; i < p.n_test_normal; ++i) {
        append(out.test, make_sample(p.normal_counts, "test_normal_" + std::to_string(i)));
        out.test_labels.push_back(0);
    }
    for (int i = 0; i < p.n_test_anomalous; ++i) {
        append(out.test, make_sample(p.anomaly_counts, "test_anomalous_" + std::to_string(i)));
        out.test_labels.push_back(1);
    }
    return out;
}

LogicalBenchmarkParams three_level_benchmark() {
    LogicalBenchmarkParams p;
    p.levels = {{LevelTag::block3, 16, 0.1, 16, 5.0}, {LevelTag::block4, 32, 0.2, 16, 5.0}, {LevelTag::raw_pixels, 3, 2.0, 0, 1.0}};
    return p;
}

std::vector<ElementSet> grid_sets(const std::vector<FeatureGrid>& grids) {
    std::vector<ElementSet> out;
    out.reserve(grids.size());
    for (const auto& g : grids) out.push_back(crop_grid(g, CropSpec{}));
    return out;
}

std::pair<ElementSet, ElementSet> equal_marginal_pair() {
    RowMatrix a(4, 2);
    a << 0, 0, 1, 1, 0, 0, 1, 1;
    RowMatrix b(4, 2);
    b << 0, 1, 1, 0, 0, 1, 1, 0;
    return {ElementSet(std::move(a), "diagonal"), ElementSet(std::move(b), "anti_diagonal")};
}

SetDataset equal_marginal_dataset(int n_train, int n_test_per_class, int set_size, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    auto make = [&](bool anomalous, const std::string& id) {
        RowMatrix e(set_size, 2);
        for (int i = 0; i < set_size; ++i) {
            const double x = rng.normal();
            e(i, 0) = x;
            e(i, 1) = anomalous ? -x : x;
        }
        return ElementSet(std::move(e), id);
    };
    SetDataset out;
    for (int i = 0; i < n_train; ++i) out.train.push_back(make(false, "train_" + std::to_string(i)));
    for (int label = 0; label < 2; ++label)
        for (int i = 0; i < n_test_per_class; ++i) {
            out.test.push_back(make(label == 1, "test_" + std::to_string(label) + "_" + std::to_string(i)));
            out.test_labels.push_back(label);
        }
    return out;
}

SeriesDataset motif_series(int n_train, int n_test_per_class, int length, int channels, std::uint64_t seed) {
    constexpr int kMotif = 16;
    const int slots = length / kMotif;
    if (slots < 4 || channels < 1) throw ConfigError("motif series need length >= 64 and channels >= 1");
    Xoshiro256 rng(seed);
    const RowMatrix mixing = gaussian_matrix(channels, 2, rng, 1.0);

    auto make = [&](bool anomalous, const std::string& id) {
        // motif 0: slow sine, motif 1: fast sine; anomalies swap half the fast ones
        const int half = slots / 2;
        std::vector<int> motifs(static_cast<std::size_t>(slots));
        for (int s = 0; s < slots; ++s) motifs[static_cast<std::size_t>(s)] = s < half ? 0 : 1;
        if (anomalous)
            for (int s = half; s < half + (slots - half) / 2; ++s) motifs[static_cast<std::size_t>(s)] = 0;
        shuffle(motifs, rng);
        Series series;
        series.sample_id = id;
        series.label = anomalous ? Label::anomalous : Label::normal;
        series.values = RowMatrix::Zero(length, channels);
        for (int s = 0; s < slots; ++s) {
            const double freq = motifs[static_cast<std::size_t>(s)] == 0 ? 1.0 : 3.0;
            const double amp = 1.0 + 0.1 * rng.normal();
            for (int t = 0; t < kMotif; ++t) {
                const double phase = 2.0 * std::numbers::pi * freq * t / kMotif;
                const double a = amp * std::sin(phase);
                const double b = amp * std::cos(phase);
                for (int c = 0; c < channels; ++c)
                    series.values(s * kMotif + t, c) = mixing(c, 0) * a + mixing(c, 1) * b;
            }
        }
        for (Index t = 0; t < series.values.rows(); ++t)
            for (Index c = 0; c < channels; ++c) series.values(t, c) += 0.1 * rng.normal();
        return series;
    };

    SeriesDataset out;
    for (int i = 0; i < n_train; ++i) out.train.push_back(make(false, "train_" + std::to_string(i)));
    for (int label = 0; label < 2; ++label)
        for (int i = 0; i < n_test_per_class; ++i) {
            out.test.push_back(make(label == 1, "test_" + std::to_string(label) + "_" + std::to_string(i)));
            out.test_labels.push_back(label);
        }
    return out;
}

} // namespace sinbad::synthetic
