#pragma once

// Generators and slow reference implementations shared by the unit tests and
// the acceptance runner.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sinbad/rng.hpp"
#include "sinbad/set_core.hpp"

namespace sinbad::support {

inline int uniform_int(Xoshiro256& rng, int lo, int hi) {
    return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

/// Random set with some repeated values so ties against edges occur.
inline ElementSet random_set(Xoshiro256& rng, int n, int d) {
    RowMatrix m(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            const double u = rng.uniform();
            m(i, j) = u < 0.2 ? std::round(4.0 * rng.normal()) : rng.normal() * 3.0;
        }
    return ElementSet(std::move(m));
}

/// Count-and-accumulate: entry b of a block is the share of values below
/// interior edge b + 1. Plain kind: share in bin b alone.
inline std::vector<double> oracle_descriptor(const ElementSet& projected, const BinEdges& edges,
                                             bool cumulative = true) {
    std::vector<double> out;
    const Index n = projected.size();
    for (Index p = 0; p < projected.dims(); ++p) {
        if (edges.degenerate[static_cast<std::size_t>(p)]) continue;
        const auto& e = edges.edges[static_cast<std::size_t>(p)];
        for (int b = 0; b + 1 < edges.bins; ++b) {
            long below_upper = 0;
            long below_lower = 0;
            for (Index i = 0; i < n; ++i) {
                const double v = projected.elements(i, p);
                if (v < e[static_cast<std::size_t>(b) + 1]) ++below_upper;
                if (b > 0 && v < e[static_cast<std::size_t>(b)]) ++below_lower;
            }
            const long c = cumulative ? below_upper : below_upper - below_lower;
            out.push_back(static_cast<double>(c) / static_cast<double>(n));
        }
    }
    return out;
}

/// Gauss-Jordan inverse with partial pivoting.
inline Eigen::MatrixXd gauss_jordan_inverse(const Eigen::MatrixXd& a) {
    const Index n = a.rows();
    Eigen::MatrixXd m(n, 2 * n);
    m << a, Eigen::MatrixXd::Identity(n, n);
    for (Index col = 0; col < n; ++col) {
        Index piv = col;
        for (Index r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
        m.row(col).swap(m.row(piv));
        m.row(col) /= m(col, col);
        for (Index r = 0; r < n; ++r)
            if (r != col) m.row(r) -= m(r, col) * m.row(col);
    }
    return m.rightCols(n);
}

/// Explicit quadratic form through a reference inverse.
inline double quadratic_form(const Eigen::MatrixXd& cov, const Eigen::VectorXd& diff) {
    const Eigen::MatrixXd inv = gauss_jordan_inverse(cov);
    double s = 0.0;
    for (Index i = 0; i < diff.size(); ++i)
        for (Index j = 0; j < diff.size(); ++j) s += diff(i) * inv(i, j) * diff(j);
    return s;
}

/// Random positive definite matrix with condition number up to `max_cond`.
inline Eigen::MatrixXd random_pd(Xoshiro256& rng, int d, double max_cond) {
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd ev(d);
    for (int i = 0; i < d; ++i) ev(i) = std::pow(max_cond, -rng.uniform());
    Eigen::MatrixXd out = q * ev.asDiagonal() * q.transpose();
    return 0.5 * (out + out.transpose());
}

/// Population covariance.
inline Eigen::MatrixXd population_cov(const RowMatrix& x) {
    const Eigen::RowVectorXd mu = x.colwise().mean();
    const Eigen::MatrixXd c = x.rowwise() - mu;
    return c.transpose() * c / static_cast<double>(x.rows());
}

inline std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("sinbad_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace sinbad::support
