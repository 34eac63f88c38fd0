#pragma once

// Gaussian density estimation over set descriptors and whitened kNN scoring.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "sinbad/set_core.hpp"

namespace sinbad {

inline constexpr double kDefaultShrinkage = 0.1;

/// Shrunk covariance: (1 - s) * S + s * (trace(S) / d) * I, S the population
/// (1/N) covariance.
Eigen::MatrixXd shrunk_covariance(const RowMatrix& descriptors, double shrinkage,
                                  Vector* mean_out = nullptr);

/// Mean and shrunk covariance of the training descriptors. The Cholesky
/// factor is computed once at construction; the model is immutable afterwards.
class GaussianModel {
public:
    GaussianModel() = default;
    GaussianModel(Vector mean, Eigen::MatrixXd covariance, double shrinkage, Index n_train);

    const Vector& mean() const noexcept { return mean_; }
    const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
    double shrinkage() const noexcept { return shrinkage_; }
    Index n_train() const noexcept { return n_train_; }
    Index dims() const noexcept { return mean_.size(); }
    /// False when the covariance is not positive definite (shrinkage 0 on
    /// rank-deficient data); mahalanobis then throws.
    bool positive_definite() const noexcept { return positive_definite_; }

    /// (h - mean)^T covariance^-1 (h - mean) through the Cholesky factor.
    double mahalanobis(const Vector& h) const;

private:
    Vector mean_;
    Eigen::MatrixXd covariance_;
    Eigen::LLT<Eigen::MatrixXd> factor_;
    double shrinkage_ = kDefaultShrinkage;
    Index n_train_ = 0;
    bool positive_definite_ = false;
};

/// Throws FitError with fewer than two descriptors or shrinkage outside [0, 1].
GaussianModel fit_gaussian(const RowMatrix& descriptors, double shrinkage = kDefaultShrinkage);

double mahalanobis(const GaussianModel& model, const Vector& h);

/// Mean plus per-dimension variances (the diagonal of the shrunk covariance).
struct DiagonalGaussian {
    Vector mean;
    Vector variance;
    double shrinkage = kDefaultShrinkage;
    /// Dimensions with zero variance; ignored when scoring.
    std::vector<Index> skipped;
};

DiagonalGaussian fit_diagonal(const RowMatrix& descriptors, double shrinkage = kDefaultShrinkage);

/// Sum over dimensions of (h_j - mean_j)^2 / variance_j.
double score_per_variable(const DiagonalGaussian& model, const Vector& h);

/// Symmetric whitening transform stored in factored form
///
///     W = scale * I + basis * diag(coeffs) * basis^T
///
/// with orthonormal basis columns. When the descriptor dimension does not
/// exceed the training count the basis is the full eigenbasis of the shrunk
/// covariance (scale = 0). Otherwise the covariance is identity-plus-low-rank
/// and the basis spans the centered training descriptors; every direction
/// outside that span shares one eigenvalue, captured by `scale`.
class Whitener {
public:
    Whitener() = default;
    Whitener(double scale, Eigen::MatrixXd basis, Vector coeffs);

    /// W = I.
    static Whitener identity();

    Index rank() const noexcept { return basis_.cols(); }
    double scale() const noexcept { return scale_; }
    const Eigen::MatrixXd& basis() const noexcept { return basis_; }
    const Vector& coeffs() const noexcept { return coeffs_; }
    bool is_identity() const noexcept { return identity_; }

    Vector apply(const Vector& h) const;
    RowMatrix apply_rows(const RowMatrix& rows) const;
    /// Materializes W (d x d).
    Eigen::MatrixXd dense(Index dims) const;

private:
    double scale_ = 1.0;
    Eigen::MatrixXd basis_;
    Vector coeffs_;
    bool identity_ = true;
};

/// Eigenvalues below this fraction of the largest are floored to it.
inline constexpr double kEigenFloor = 1e-12;

/// W = covariance^{-1/2} through a symmetric eigendecomposition.
Whitener whitener_from_covariance(const Eigen::MatrixXd& covariance);

/// W = shrunk_covariance(descriptors)^{-1/2}, using the low-rank route when
/// descriptors.cols() > descriptors.rows().
Whitener fit_whitener(const RowMatrix& descriptors, double shrinkage);

class WhitenedKnnModel {
public:
    WhitenedKnnModel() = default;
    WhitenedKnnModel(Whitener whitener, RowMatrix whitened_train, int k, double shrinkage,
                     bool whitened);

    const Whitener& whitener() const noexcept { return whitener_; }
    const RowMatrix& whitened_train() const noexcept { return whitened_train_; }
    int k() const noexcept { return k_; }
    double shrinkage() const noexcept { return shrinkage_; }
    bool whitened() const noexcept { return whitened_; }
    Index dims() const noexcept { return whitened_train_.cols(); }
    Index n_train() const noexcept { return whitened_train_.rows(); }

    double score(const Vector& h) const;
    /// One score per row of `descriptors`.
    Vector score_rows(const RowMatrix& descriptors) const;
    /// Score of every training descriptor against the others.
    Vector leave_one_out_scores() const;

private:
    Whitener whitener_;
    RowMatrix whitened_train_;
    int k_ = 1;
    double shrinkage_ = kDefaultShrinkage;
    bool whitened_ = true;
};

/// Throws FitError when k exceeds the training count or fewer than two
/// descriptors are given. With `whiten` false the model is plain Euclidean kNN.
WhitenedKnnModel fit_whitened_knn(const RowMatrix& descriptors, double shrinkage = kDefaultShrinkage,
                                  int k = 1, bool whiten = true);

/// kNN model over `train` whitened by an externally supplied covariance.
WhitenedKnnModel knn_with_covariance(const RowMatrix& train, const Eigen::MatrixXd& covariance,
                                     int k = 1);

/// Mean squared Euclidean distance from W h to its k nearest whitened
/// training descriptors.
double score_knn(const WhitenedKnnModel& model, const Vector& h);

// Model blobs ("SINM" v1, little-endian). Layout in docs/formats.md.

enum class ScorerKind : std::uint8_t { whitened_knn = 0, gaussian = 1, per_variable = 2 };

struct ModelBlob {
    ScorerKind kind = ScorerKind::whitened_knn;
    std::optional<WhitenedKnnModel> knn;
    std::optional<GaussianModel> gaussian;
    std::optional<DiagonalGaussian> diagonal;
};

void write_model(std::ostream& out, const ModelBlob& model);
ModelBlob read_model(std::istream& in);

} // namespace sinbad
