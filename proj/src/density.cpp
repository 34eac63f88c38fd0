#include "sinbad/density.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sinbad/binary_io.hpp"
#include "sinbad/error.hpp"
#include "sinbad/kernels.hpp"

namespace sinbad {

namespace {

void check_shrinkage(double s) {
    if (!(s >= 0.0 && s <= 1.0)) {
        std::ostringstream msg;
        msg << "shrinkage must lie in [0, 1], got " << s;
        throw FitError(msg.str());
    }
}

void check_train_count(const RowMatrix& descriptors) {
    if (descriptors.rows() < 2) {
        std::ostringstream msg;
        msg << "density estimation needs at least 2 training descriptors, got " << descriptors.rows();
        throw FitError(msg.str());
    }
}

void check_dims(Index expected, Index got) {
    if (expected != got) {
        std::ostringstream msg;
        msg << "descriptor has " << got << " dims, model expects " << expected;
        throw DimensionError(msg.str());
    }
}

} // namespace

Eigen::MatrixXd shrunk_covariance(const RowMatrix& descriptors, double shrinkage, Vector* mean_out) {
    check_shrinkage(shrinkage);
    const Index n = descriptors.rows();
    const Index d = descriptors.cols();
    const Eigen::RowVectorXd mean = descriptors.colwise().mean();
    const Eigen::MatrixXd centered = descriptors.rowwise() - mean;
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
    cov = 0.5 * (cov + cov.transpose()).eval();
    const double mu = cov.trace() / static_cast<double>(d);
    cov *= (1.0 - shrinkage);
    cov.diagonal().array() += shrinkage * mu;
    if (mean_out) *mean_out = mean.transpose();
    return cov;
}

GaussianModel::GaussianModel(Vector mean, Eigen::MatrixXd covariance, double shrinkage, Index n_train)
    : mean_(std::move(mean)), covariance_(std::move(covariance)), shrinkage_(shrinkage),
      n_train_(n_train) {
    if (covariance_.rows() != mean_.size() || covariance_.cols() != mean_.size())
        throw DimensionError("covariance shape does not match the mean");
    factor_.compute(covariance_);
    positive_definite_ = factor_.info() == Eigen::Success;
}

double GaussianModel::mahalanobis(const Vector& h) const {
    check_dims(dims(), h.size());
    if (!positive_definite_)
        throw FitError("covariance is not positive definite; refit with shrinkage > 0");
    Vector y = h - mean_;
    factor_.matrixL().solveInPlace(y);
    return y.squaredNorm();
}

GaussianModel fit_gaussian(const RowMatrix& descriptors, double shrinkage) {
    check_train_count(descriptors);
    Vector mean;
    Eigen::MatrixXd cov = shrunk_covariance(descriptors, shrinkage, &mean);
    return GaussianModel(std::move(mean), std::move(cov), shrinkage, descriptors.rows());
}

double mahalanobis(const GaussianModel& model, const Vector& h) { return model.mahalanobis(h); }

DiagonalGaussian fit_diagonal(const RowMatrix& descriptors, double shrinkage) {
    check_train_count(descriptors);
    check_shrinkage(shrinkage);
    DiagonalGaussian out;
    out.shrinkage = shrinkage;
    out.mean = descriptors.colwise().mean().transpose();
    const RowMatrix centered = descriptors.rowwise() - out.mean.transpose();
    const Vector var = centered.colwise().squaredNorm().transpose() / static_cast<double>(descriptors.rows());
    const double mu = var.sum() / static_cast<double>(var.size());
    out.variance = (1.0 - shrinkage) * var.array() + shrinkage * mu;
    for (Index j = 0; j < out.variance.size(); ++j)
        if (!(out.variance(j) > 0.0)) out.skipped.push_back(j);
    if (!out.skipped.empty()) {
        std::clog << "sinbad: per-variable model skips " << out.skipped.size()
                  << " zero-variance dimension(s)\n";
    }
    return out;
}

double score_per_variable(const DiagonalGaussian& model, const Vector& h) {
    check_dims(model.mean.size(), h.size());
    double total = 0.0;
    for (Index j = 0; j < h.size(); ++j) {
        const double v = model.variance(j);
        if (!(v > 0.0)) continue;
        const double diff = h(j) - model.mean(j);
        total += diff * diff / v;
    }
    return total;
}

Whitener::Whitener(double scale, Eigen::MatrixXd basis, Vector coeffs)
    : scale_(scale), basis_(std::move(basis)), coeffs_(std::move(coeffs)), identity_(false) {
    if (basis_.cols() != coeffs_.size()) throw DimensionError("whitener basis/coefficient mismatch");
}

Whitener Whitener::identity() { return Whitener(); }

Vector Whitener::apply(const Vector& h) const {
    if (identity_) return h;
    if (basis_.rows() != h.size()) check_dims(basis_.rows(), h.size());
    Vector out = scale_ * h;
    out.noalias() += basis_ * (coeffs_.asDiagonal() * (basis_.transpose() * h));
    return out;
}

RowMatrix Whitener::apply_rows(const RowMatrix& rows) const {
    if (identity_) return rows;
    check_dims(basis_.rows(), rows.cols());
    // row by row, so a descriptor whitens to the same bits alone or in a batch
    RowMatrix out(rows.rows(), rows.cols());
    for (Index i = 0; i < rows.rows(); ++i) out.row(i) = apply(rows.row(i).transpose()).transpose();
    return out;
}

Eigen::MatrixXd Whitener::dense(Index dims) const {
    if (identity_) return Eigen::MatrixXd::Identity(dims, dims);
    check_dims(basis_.rows(), dims);
    Eigen::MatrixXd w = basis_ * coeffs_.asDiagonal() * basis_.transpose();
    w.diagonal().array() += scale_;
    return w;
}

Whitener whitener_from_covariance(const Eigen::MatrixXd& covariance) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance);
    if (eig.info() != Eigen::Success) throw FitError("covariance eigendecomposition failed");
    const Vector& values = eig.eigenvalues();
    const double top = values.maxCoeff();
    if (!(top > 0.0)) throw FitError("covariance has no positive eigenvalue");
    const double floor = kEigenFloor * top;
    Vector coeffs = values.unaryExpr([floor](double v) { return 1.0 / std::sqrt(std::max(v, floor)); });
    return Whitener(0.0, eig.eigenvectors(), std::move(coeffs));
}

Whitener fit_whitener(const RowMatrix& descriptors, double shrinkage) {
    check_train_count(descriptors);
    check_shrinkage(shrinkage);
    const Index n = descriptors.rows();
    const Index d = descriptors.cols();
    if (d <= n) return whitener_from_covariance(shrunk_covariance(descriptors, shrinkage));

    // Covariance = (1 - s) X^T X / n + alpha I with X the centered descriptors.
    // Its non-trivial eigenvectors come from the n x n Gram matrix.
    const Eigen::RowVectorXd mean = descriptors.colwise().mean();
    const Eigen::MatrixXd centered = descriptors.rowwise() - mean;
    Eigen::MatrixXd gram = (centered * centered.transpose()) / static_cast<double>(n);
    gram = 0.5 * (gram + gram.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) throw FitError("gram eigendecomposition failed");

    const Vector& lambda = eig.eigenvalues(); // ascending, = covariance eigenvalues
    const double alpha = shrinkage * gram.trace() / static_cast<double>(d);
    const double top_lambda = std::max(lambda.maxCoeff(), 0.0);
    const double top = std::max((1.0 - shrinkage) * top_lambda + alpha, alpha);
    if (!(top > 0.0)) throw FitError("training descriptors are all identical and shrinkage cannot help");
    const double floor = kEigenFloor * top;
    const double cutoff = 1e-10 * top_lambda;

    std::vector<Index> kept;
    for (Index i = 0; i < n; ++i)
        if (lambda(i) > cutoff) kept.push_back(i);

    const double complement = 1.0 / std::sqrt(std::max(alpha, floor));
    Eigen::MatrixXd basis(d, static_cast<Index>(kept.size()));
    Vector coeffs(static_cast<Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) {
        const Index i = kept[j];
        const auto jj = static_cast<Index>(j);
        basis.col(jj) = centered.transpose() * eig.eigenvectors().col(i);
        basis.col(jj).normalize();
        const double value = std::max((1.0 - shrinkage) * lambda(i) + alpha, floor);
        coeffs(jj) = 1.0 / std::sqrt(value) - complement;
    }
    return Whitener(complement, std::move(basis), std::move(coeffs));
}

WhitenedKnnModel::WhitenedKnnModel(Whitener whitener, RowMatrix whitened_train, int k,
                                   double shrinkage, bool whitened)
    : whitener_(std::move(whitener)), whitened_train_(std::move(whitened_train)), k_(k),
      shrinkage_(shrinkage), whitened_(whitened) {
    if (k_ < 1 || k_ > whitened_train_.rows()) {
        std::ostringstream msg;
        msg << "k=" << k_ << " exceeds the " << whitened_train_.rows() << " training descriptors";
        throw FitError(msg.str());
    }
}

double WhitenedKnnModel::score(const Vector& h) const {
    check_dims(dims(), h.size());
    const RowMatrix query = whitener_.apply(h).transpose();
    return kernels::knn_scores(whitened_train_, query, k_, false, kernels::Backend::serial)(0);
}

Vector WhitenedKnnModel::score_rows(const RowMatrix& descriptors) const {
    check_dims(dims(), descriptors.cols());
    return kernels::knn_scores(whitened_train_, whitener_.apply_rows(descriptors), k_);
}

Vector WhitenedKnnModel::leave_one_out_scores() const {
    const int k = std::min<int>(k_, static_cast<int>(n_train()) - 1);
    return kernels::knn_scores(whitened_train_, whitened_train_, k, true);
}

WhitenedKnnModel fit_whitened_knn(const RowMatrix& descriptors, double shrinkage, int k, bool whiten) {
    check_train_count(descriptors);
    check_shrinkage(shrinkage);
    if (k < 1 || k > descriptors.rows()) {
        std::ostringstream msg;
        msg << "k=" << k << " exceeds the " << descriptors.rows() << " training descriptors";
        throw FitError(msg.str());
    }
    Whitener w = whiten ? fit_whitener(descriptors, shrinkage) : Whitener::identity();
    RowMatrix whitened = w.apply_rows(descriptors);
    return WhitenedKnnModel(std::move(w), std::move(whitened), k, shrinkage, whiten);
}

WhitenedKnnModel knn_with_covariance(const RowMatrix& train, const Eigen::MatrixXd& covariance, int k) {
    if (covariance.rows() != train.cols() || covariance.cols() != train.cols())
        throw DimensionError("covariance does not match the training descriptor dims");
    Whitener w = whitener_from_covariance(covariance);
    RowMatrix whitened = w.apply_rows(train);
    return WhitenedKnnModel(std::move(w), std::move(whitened), k, 0.0, true);
}

double score_knn(const WhitenedKnnModel& model, const Vector& h) { return model.score(h); }

// ---------------------------------------------------------------------------
// SINM blobs

namespace {

constexpr std::uint32_t kModelVersion = 1;

void write_vector(std::ostream& out, const Vector& v) { io::write_array(out, v.data(), static_cast<std::size_t>(v.size())); }

Vector read_vector(std::istream& in, Index n, std::string_view what) {
    Vector v(n);
    io::read_array(in, v.data(), static_cast<std::size_t>(n), what);
    return v;
}

// Guards against absurd sizes from corrupt headers before allocating.
Index checked_size(std::uint64_t v, std::string_view what) {
    if (v > (1ULL << 34)) throw DataError("implausible " + std::string(what) + " in model blob");
    return static_cast<Index>(v);
}

} // namespace

void write_model(std::ostream& out, const ModelBlob& model) {
    io::write_magic(out, "SINM");
    io::write_le<std::uint32_t>(out, kModelVersion);
    io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(model.kind));
    switch (model.kind) {
    case ScorerKind::whitened_knn: {
        const auto& m = model.knn.value();
        const Whitener& w = m.whitener();
        io::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.dims()));
        io::write_le<double>(out, m.shrinkage());
        io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.k()));
        io::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.n_train()));
        io::write_le<std::uint8_t>(out, m.whitened() ? 1 : 0);
        io::write_le<std::uint8_t>(out, w.is_identity() ? 1 : 0);
        if (!w.is_identity()) {
            io::write_le<double>(out, w.scale());
            io::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(w.rank()));
            io::write_array(out, w.basis().data(), static_cast<std::size_t>(w.basis().size()));
            write_vector(out, w.coeffs());
        }
        io::write_array(out, m.whitened_train().data(), static_cast<std::size_t>(m.whitened_train().size()));
        break;
    }
    case ScorerKind::gaussian: {
        const auto& g = model.gaussian.value();
        io::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(g.dims()));
        io::write_le<double>(out, g.shrinkage());
        io::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(g.n_train()));
        write_vector(out, g.mean());
        io::write_array(out, g.covariance().data(), static_cast<std::size_t>(g.covariance().size()));
        break;
    }
    case ScorerKind::per_variable: {
        const auto& g = model.diagonal.value();
        io::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(g.mean.size()));
        io::write_le<double>(out, g.shrinkage);
        write_vector(out, g.mean);
        write_vector(out, g.variance);
        break;
    }
    }
    if (!out) throw DataError("failed writing model blob");
}

ModelBlob read_model(std::istream& in) {
    io::expect_magic(in, "SINM");
    const auto version = io::read_le<std::uint32_t>(in, "model version");
    if (version != kModelVersion) throw DataError("unsupported SINM version " + std::to_string(version));
    ModelBlob model;
    const auto kind = io::read_le<std::uint8_t>(in, "scorer kind");
    if (kind > 2) throw DataError("unknown scorer kind " + std::to_string(kind));
    model.kind = static_cast<ScorerKind>(kind);
    switch (model.kind) {
    case ScorerKind::whitened_knn: {
        const Index d = checked_size(io::read_le<std::uint64_t>(in, "dims"), "dims");
        const double shrinkage = io::read_le<double>(in, "shrinkage");
        const int k = static_cast<int>(io::read_le<std::uint32_t>(in, "k"));
        const Index n = checked_size(io::read_le<std::uint64_t>(in, "n_train"), "n_train");
        const bool whitened = io::read_le<std::uint8_t>(in, "whitened flag") != 0;
        const bool identity = io::read_le<std::uint8_t>(in, "identity flag") != 0;
        Whitener w;
        if (!identity) {
            const double scale = io::read_le<double>(in, "scale");
            const Index rank = checked_size(io::read_le<std::uint64_t>(in, "rank"), "rank");
            Eigen::MatrixXd basis(d, rank);
            io::read_array(in, basis.data(), static_cast<std::size_t>(basis.size()), "whitener basis");
            Vector coeffs = read_vector(in, rank, "whitener coefficients");
            w = Whitener(scale, std::move(basis), std::move(coeffs));
        }
        RowMatrix train(n, d);
        io::read_array(in, train.data(), static_cast<std::size_t>(train.size()), "whitened training descriptors");
        model.knn.emplace(std::move(w), std::move(train), k, shrinkage, whitened);
        break;
    }
    case ScorerKind::gaussian: {
        const Index d = checked_size(io::read_le<std::uint64_t>(in, "dims"), "dims");
        const double shrinkage = io::read_le<double>(in, "shrinkage");
        const Index n = checked_size(io::read_le<std::uint64_t>(in, "n_train"), "n_train");
        Vector mean = read_vector(in, d, "mean");
        Eigen::MatrixXd cov(d, d);
        io::read_array(in, cov.data(), static_cast<std::size_t>(cov.size()), "covariance");
        model.gaussian.emplace(std::move(mean), std::move(cov), shrinkage, n);
        break;
    }
    case ScorerKind::per_variable: {
        const Index d = checked_size(io::read_le<std::uint64_t>(in, "dims"), "dims");
        DiagonalGaussian g;
        g.shrinkage = io::read_le<double>(in, "shrinkage");
        g.mean = read_vector(in, d, "mean");
        g.variance = read_vector(in, d, "variance");
        for (Index j = 0; j < d; ++j)
            if (!(g.variance(j) > 0.0)) g.skipped.push_back(j);
        model.diagonal = std::move(g);
        break;
    }
    }
    return model;
}

} // namespace sinbad
