#include "ngcma/gaussian.hpp"

#include "ngcma/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ngcma {

namespace {

void check_dim(const GaussianParams& params, const Vector& x)
{
    if (static_cast<std::size_t>(x.size()) != params.dim())
        throw ValidationError("point has dimension " + std::to_string(x.size()) + ", distribution has " +
                              std::to_string(params.dim()));
}

}  // namespace

GaussianParams::GaussianParams(Vector mean, const Matrix& cov) : mean_(std::move(mean))
{
    if (mean_.size() == 0) throw ValidationError("Gaussian dimension must be positive");
    if (cov.rows() != mean_.size() || cov.cols() != mean_.size())
        throw ValidationError("covariance shape does not match mean of dimension " + std::to_string(mean_.size()));
    if (!mean_.allFinite()) throw ValidationError("mean has non-finite entries");
    cov_ = symmetrized(cov);
    llt_.compute(cov_);
    if (llt_.info() != Eigen::Success) throw NumericError("covariance is not positive definite");
    const Vector diag = Matrix(llt_.matrixL()).diagonal();
    if (!(diag.array() > 0.0).all() || !diag.allFinite())
        throw NumericError("covariance is not positive definite");
    log_det_ = 2.0 * diag.array().log().sum();
}

GaussianParams GaussianParams::standard(std::size_t dim)
{
    const auto d = static_cast<Eigen::Index>(dim);
    return GaussianParams(Vector::Zero(d), Matrix::Identity(d, d));
}

Matrix GaussianParams::precision() const
{
    return llt_.solve(Matrix::Identity(cov_.rows(), cov_.cols()));
}

double GaussianParams::mahalanobis2(const Vector& x) const
{
    const Vector z = llt_.matrixL().solve(x - mean_);
    return z.squaredNorm();
}

Vector vech(const Matrix& m)
{
    return vech_lower(symmetrized(m));
}

Matrix unvech(const Vector& v)
{
    const auto d = tri_dim(static_cast<std::size_t>(v.size()));
    if (!d) throw ValidationError("vech length " + std::to_string(v.size()) + " is not a triangular number");
    Matrix m(*d, *d);
    std::size_t k = 0;
    for (std::size_t c = 0; c < *d; ++c)
        for (std::size_t r = c; r < *d; ++r, ++k) {
            m(r, c) = v(k);
            m(c, r) = v(k);
        }
    return m;
}

Vector vech_lower(const Matrix& m)
{
    if (m.rows() != m.cols()) throw ValidationError("vech requires a square matrix");
    const auto d = static_cast<std::size_t>(m.rows());
    Vector v(tri_size(d));
    std::size_t k = 0;
    for (std::size_t c = 0; c < d; ++c)
        for (std::size_t r = c; r < d; ++r) v(k++) = m(r, c);
    return v;
}

Matrix unvech_lower(const Vector& v)
{
    const auto d = tri_dim(static_cast<std::size_t>(v.size()));
    if (!d) throw ValidationError("vech length " + std::to_string(v.size()) + " is not a triangular number");
    Matrix m = Matrix::Zero(*d, *d);
    std::size_t k = 0;
    for (std::size_t c = 0; c < *d; ++c)
        for (std::size_t r = c; r < *d; ++r) m(r, c) = v(k++);
    return m;
}

std::vector<Vector> sample(const GaussianParams& params, std::size_t count, Rng& rng)
{
    if (count == 0) throw ValidationError("sample count must be at least 1");
    const Matrix l = params.chol();
    const auto d = static_cast<Eigen::Index>(params.dim());
    std::vector<Vector> points;
    points.reserve(count);
    Vector z(d);
    for (std::size_t i = 0; i < count; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal();
        points.emplace_back(params.mean() + l.triangularView<Eigen::Lower>() * z);
    }
    return points;
}

std::vector<Vector> sample(const GaussianParams& params, std::size_t count, std::uint64_t seed)
{
    Rng rng(seed);
    return sample(params, count, rng);
}

double log_density(const GaussianParams& params, const Vector& x)
{
    check_dim(params, x);
    const double d = static_cast<double>(params.dim());
    return -0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * params.log_det() - 0.5 * params.mahalanobis2(x);
}

ScoreBlocks log_density_grad(const GaussianParams& params, const Vector& x)
{
    check_dim(params, x);
    const Vector u = params.solve(Vector(x - params.mean()));
    // Matrix gradient G = (C^{-1} S C^{-1} - C^{-1}) / 2 with S = (x-m)(x-m)^T.
    // Off-diagonal vech coordinates stand for two symmetric entries.
    const Matrix g = 0.5 * (u * u.transpose() - params.precision());
    Matrix folded = 2.0 * g;
    folded.diagonal() = g.diagonal();
    return {u, vech_lower(folded)};
}

double kl_divergence(const GaussianParams& p, const GaussianParams& q)
{
    if (p.dim() != q.dim())
        throw ValidationError("KL divergence between distributions of different dimension");
    const double d = static_cast<double>(p.dim());
    const double trace_term = q.solve(p.cov()).trace();
    const double quad = q.mahalanobis2(p.mean());
    const double kl = 0.5 * (trace_term + quad - d + q.log_det() - p.log_det());
    return kl < 0.0 ? 0.0 : kl;
}

}  // namespace ngcma
