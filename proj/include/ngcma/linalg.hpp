#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <utility>

namespace ngcma {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Tolerance under which an input matrix is silently symmetrized.
inline constexpr double kSymmetryTolerance = 1e-10;

/// Largest |M(i,j) - M(j,i)| relative to the largest |M(i,j)|.
double relative_asymmetry(const Matrix& m);

/// Returns (M + M^T)/2 when the relative asymmetry is within `tol`;
/// throws ValidationError otherwise (or when M is not square).
Matrix symmetrized(const Matrix& m, double tol = kSymmetryTolerance);

/// Number of entries in the half-vectorization of a d x d matrix.
constexpr std::size_t tri_size(std::size_t d) { return d * (d + 1) / 2; }

/// Inverse of tri_size; nullopt when `len` is not a triangular number.
std::optional<std::size_t> tri_dim(std::size_t len);

/// Applies a scalar function to the spectrum of a symmetric matrix.
template <class F>
Matrix spectral_map(const Matrix& s, F&& f)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    Vector mapped = es.eigenvalues().unaryExpr(f);
    return es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
}

Matrix sym_exp(const Matrix& s);
Matrix sym_log(const Matrix& s);  // requires s PD
Matrix sym_inv_sqrt(const Matrix& s);  // requires s PD

/// (min, max) eigenvalue of a symmetric matrix.
std::pair<double, double> eigen_range(const Matrix& s);

}  // namespace ngcma
