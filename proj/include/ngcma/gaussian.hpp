#pragma once

#include "ngcma/linalg.hpp"
#include "ngcma/random.hpp"

#include <Eigen/Cholesky>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ngcma {

/// Mean and covariance of a nonsingular multivariate normal distribution.
///
/// The covariance is symmetrized on construction (inputs with relative
/// asymmetry above 1e-10 are rejected) and certified positive definite by a
/// Cholesky factorization, which is kept for sampling and solves.
class GaussianParams {
public:
    GaussianParams(Vector mean, const Matrix& cov);

    static GaussianParams standard(std::size_t dim);

    std::size_t dim() const { return static_cast<std::size_t>(mean_.size()); }
    const Vector& mean() const { return mean_; }
    const Matrix& cov() const { return cov_; }

    /// Lower-triangular L with L L^T = cov.
    Matrix chol() const { return llt_.matrixL(); }
    double log_det() const { return log_det_; }

    Vector solve(const Vector& v) const { return llt_.solve(v); }
    Matrix solve(const Matrix& m) const { return llt_.solve(m); }
    Matrix precision() const;

    /// Squared Mahalanobis norm (x - m)^T C^{-1} (x - m).
    double mahalanobis2(const Vector& x) const;

private:
    Vector mean_;
    Matrix cov_;
    Eigen::LLT<Matrix> llt_;
    double log_det_ = 0.0;
};

/// Half-vectorization: stacks each column from its diagonal entry downward.
Vector vech(const Matrix& m);
Matrix unvech(const Vector& v);

/// Same layout as vech, applied to the lower triangle of a (not necessarily
/// symmetric) square matrix; unvech_lower rebuilds a lower-triangular matrix.
Vector vech_lower(const Matrix& m);
Matrix unvech_lower(const Vector& v);

/// Position of entry (row, col), row >= col, inside a vech vector of a d x d matrix.
constexpr std::size_t vech_index(std::size_t d, std::size_t row, std::size_t col)
{
    return col * d - col * (col - 1) / 2 + (row - col);
}

std::vector<Vector> sample(const GaussianParams& params, std::size_t count, Rng& rng);
std::vector<Vector> sample(const GaussianParams& params, std::size_t count, std::uint64_t seed);

double log_density(const GaussianParams& params, const Vector& x);

/// Gradient of log_density with respect to (m, vech(C)).
struct ScoreBlocks {
    Vector mean_block;
    Vector cov_block;
};

ScoreBlocks log_density_grad(const GaussianParams& params, const Vector& x);

/// KL(p || q) in closed form.
double kl_divergence(const GaussianParams& p, const GaussianParams& q);

}  // namespace ngcma
