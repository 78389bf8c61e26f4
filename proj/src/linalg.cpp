#include "ngcma/linalg.hpp"

#include "ngcma/error.hpp"

#include <cmath>
#include <string>

namespace ngcma {

double relative_asymmetry(const Matrix& m)
{
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

Matrix symmetrized(const Matrix& m, double tol)
{
    if (m.rows() != m.cols() || m.rows() == 0)
        throw ValidationError("matrix must be square and non-empty, got " + std::to_string(m.rows()) +
                              "x" + std::to_string(m.cols()));
    if (!m.allFinite()) throw ValidationError("matrix has non-finite entries");
    const double asym = relative_asymmetry(m);
    if (asym > tol)
        throw ValidationError("matrix is not symmetric (relative asymmetry " + std::to_string(asym) + ")");
    return 0.5 * (m + m.transpose());
}

std::optional<std::size_t> tri_dim(std::size_t len)
{
    auto d = static_cast<std::size_t>(std::floor((std::sqrt(8.0 * static_cast<double>(len) + 1.0) - 1.0) / 2.0));
    // Guard against rounding in the square root.
    while (tri_size(d) < len) ++d;
    while (d > 0 && tri_size(d) > len) --d;
    if (d == 0 || tri_size(d) != len) return std::nullopt;
    return d;
}

Matrix sym_exp(const Matrix& s)
{
    return spectral_map(s, [](double v) { return std::exp(v); });
}

Matrix sym_log(const Matrix& s)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.eigenvalues().minCoeff() <= 0.0) throw DomainError("matrix logarithm of a non-PD matrix");
    Vector mapped = es.eigenvalues().array().log();
    return es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
}

Matrix sym_inv_sqrt(const Matrix& s)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.eigenvalues().minCoeff() <= 0.0) throw NumericError("inverse square root of a non-PD matrix");
    Vector mapped = es.eigenvalues().array().rsqrt();
    return es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
}

std::pair<double, double> eigen_range(const Matrix& s)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace ngcma
