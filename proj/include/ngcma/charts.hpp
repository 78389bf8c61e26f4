#pragma once

#include "ngcma/gaussian.hpp"

#include <cstddef>
#include <string>

namespace ngcma {

enum class ChartKind { FullVech, Cholesky, Exponential, Diagonal, ScalarScale };

/// Scalar map s(t) used by the restricted charts: identity (s = t, needs
/// t > 0) or exponential (s = e^t, any t).
enum class ScaleMap { Identity, Exp };

/// Coordinate system theta = [theta_m, theta_C] on the Gaussian manifold.
/// The mean depends on theta_m only (m = theta_m) and the covariance on
/// theta_C only:
///   FullVech     vech(C) = theta_C
///   Cholesky     vech(A) = theta_C, A lower triangular with positive diagonal, C = A A^T
///   Exponential  vech(B) = theta_C, C = exp(B)
///   Diagonal     C = diag(s(theta_C,1), ..., s(theta_C,d))
///   ScalarScale  C = s(theta_C) C0 for a fixed PD matrix C0
class Chart {
public:
    static Chart full_vech(std::size_t dim);
    static Chart cholesky(std::size_t dim);
    static Chart exponential(std::size_t dim);
    static Chart diagonal(std::size_t dim, ScaleMap map = ScaleMap::Identity);
    static Chart scalar_scale(const Matrix& base_cov, ScaleMap map = ScaleMap::Identity);

    ChartKind kind() const { return kind_; }
    ScaleMap scale_map() const { return map_; }
    std::size_t dim() const { return dim_; }
    std::size_t mean_dim() const { return dim_; }
    std::size_t cov_dim() const;
    std::size_t theta_dim() const { return mean_dim() + cov_dim(); }
    /// C0 of the ScalarScale chart; empty for other kinds.
    const Matrix& base_cov() const { return base_cov_; }
    /// Charts whose covariance Jacobian is square (Theorem-1 hypothesis).
    bool is_full() const;
    std::string name() const;

    bool operator==(const Chart& other) const;

private:
    Chart(ChartKind kind, std::size_t dim, ScaleMap map, Matrix base);

    ChartKind kind_;
    std::size_t dim_;
    ScaleMap map_;
    Matrix base_cov_;
};

/// Parse a chart name ("fullvech", "cholesky", "exponential", "diagonal",
/// "diagonal-exp", "scalar", "scalar-exp"); `base_cov` is used by the scalar charts.
Chart chart_from_name(const std::string& name, std::size_t dim, const Matrix& base_cov);

class ThetaPoint {
public:
    ThetaPoint(Chart chart, Vector theta_m, Vector theta_c);

    const Chart& chart() const { return chart_; }
    const Vector& theta_m() const { return theta_m_; }
    const Vector& theta_c() const { return theta_c_; }

    Vector stacked() const;
    static ThetaPoint from_stacked(const Chart& chart, const Vector& theta);

private:
    Chart chart_;
    Vector theta_m_;
    Vector theta_c_;
};

/// Direction in theta space, split into mean and covariance blocks.
struct NaturalGradient {
    Vector mean_block;
    Vector cov_block;

    Vector stacked() const;
    static NaturalGradient zeros_like(const Chart& chart);
    static NaturalGradient from_stacked(const Chart& chart, const Vector& v);
};

GaussianParams to_params(const ThetaPoint& theta);
ThetaPoint from_params(const Chart& chart, const GaussianParams& params);

/// dm/dtheta_m^T (d x dim theta_m) and dvech(C)/dtheta_C^T (d(d+1)/2 x dim theta_C).
struct Jacobians {
    Matrix mean;
    Matrix cov;
};

Jacobians jacobians(const ThetaPoint& theta);

/// Central differences of (m, vech C) at step h and h/2, Richardson-combined.
struct NumericJacobians {
    Jacobians value;
    double error_estimate;  // max |D(h/2) - D(h)| over all entries
};

NumericJacobians numeric_jacobians(const ThetaPoint& theta, double step = 1e-6);

/// Exact Fisher information in theta coordinates; the mean/covariance cross
/// block is structurally zero.
Matrix fisher_matrix(const ThetaPoint& theta);

/// F^{-1} grad log pi(x; theta) evaluated without forming F.
NaturalGradient natural_gradient_loglik(const ThetaPoint& theta, const Vector& x);

/// Same quantity by assembling F and the chain-ruled score and solving.
/// Throws NumericError when cond(F) exceeds kFisherConditionCap.
NaturalGradient natural_gradient_loglik_reference(const ThetaPoint& theta, const Vector& x);

inline constexpr double kFisherConditionCap = 1e12;

}  // namespace ngcma
