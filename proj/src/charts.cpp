#include "ngcma/charts.hpp"

#include "ngcma/error.hpp"

#include <cmath>
#include <string>

namespace ngcma {

namespace {

double scale_of(ScaleMap map, double t) { return map == ScaleMap::Identity ? t : std::exp(t); }

double scale_derivative(ScaleMap map, double t) { return map == ScaleMap::Identity ? 1.0 : std::exp(t); }

double scale_inverse(ScaleMap map, double s) { return map == ScaleMap::Identity ? s : std::log(s); }

GaussianParams make_params(const Vector& mean, const Matrix& cov)
{
    try {
        return GaussianParams(mean, cov);
    } catch (const NumericError& e) {
        throw DomainError(std::string("chart point maps to an inadmissible covariance: ") + e.what());
    }
}

/// Divided differences of exp on the spectrum: phi(i,j) = (e^a - e^b)/(a - b).
Matrix exp_divided_differences(const Vector& lambda)
{
    const auto d = lambda.size();
    Matrix phi(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            const double delta = lambda(i) - lambda(j);
            const double ratio = delta == 0.0 ? 1.0 : std::expm1(delta) / delta;
            phi(i, j) = std::exp(lambda(j)) * ratio;
        }
    return phi;
}

/// Symmetric matrix represented by one theta_C coordinate of the vech layout:
/// off-diagonal coordinates move both mirrored entries.
Matrix vech_basis(std::size_t d, std::size_t k)
{
    Vector e = Vector::Zero(static_cast<Eigen::Index>(tri_size(d)));
    e(static_cast<Eigen::Index>(k)) = 1.0;
    return unvech(e);
}

Matrix lower_factor(const ThetaPoint& theta)
{
    Matrix a = unvech_lower(theta.theta_c());
    if (!(a.diagonal().array() > 0.0).all())
        throw DomainError("Cholesky chart requires a factor with positive diagonal");
    return a;
}

/// vech((x-m)(x-m)^T - C), entry by entry.
Vector centered_outer_minus_cov(const Vector& y, const Matrix& cov)
{
    const auto d = static_cast<std::size_t>(y.size());
    Vector v(static_cast<Eigen::Index>(tri_size(d)));
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < y.size(); ++c)
        for (Eigen::Index r = c; r < y.size(); ++r) v(k++) = y(r) * y(c) - cov(r, c);
    return v;
}

}  // namespace

// --- Chart -------------------------------------------------------------------

Chart::Chart(ChartKind kind, std::size_t dim, ScaleMap map, Matrix base)
    : kind_(kind), dim_(dim), map_(map), base_cov_(std::move(base))
{
    if (dim_ == 0) throw ValidationError("chart dimension must be positive");
}

Chart Chart::full_vech(std::size_t dim) { return Chart(ChartKind::FullVech, dim, ScaleMap::Identity, {}); }

Chart Chart::cholesky(std::size_t dim) { return Chart(ChartKind::Cholesky, dim, ScaleMap::Identity, {}); }

Chart Chart::exponential(std::size_t dim) { return Chart(ChartKind::Exponential, dim, ScaleMap::Identity, {}); }

Chart Chart::diagonal(std::size_t dim, ScaleMap map) { return Chart(ChartKind::Diagonal, dim, map, {}); }

Chart Chart::scalar_scale(const Matrix& base_cov, ScaleMap map)
{
    const auto d = static_cast<std::size_t>(base_cov.rows());
    if (d == 0) throw ValidationError("scalar-scale chart needs a non-empty base covariance");
    // Validates symmetry and positive definiteness.
    GaussianParams base(Vector::Zero(base_cov.rows()), base_cov);
    return Chart(ChartKind::ScalarScale, d, map, base.cov());
}

std::size_t Chart::cov_dim() const
{
    switch (kind_) {
    case ChartKind::Diagonal:
        return dim_;
    case ChartKind::ScalarScale:
        return 1;
    default:
        return tri_size(dim_);
    }
}

bool Chart::is_full() const { return cov_dim() == tri_size(dim_); }

std::string Chart::name() const
{
    const std::string suffix = map_ == ScaleMap::Exp ? "-exp" : "";
    switch (kind_) {
    case ChartKind::FullVech:
        return "fullvech";
    case ChartKind::Cholesky:
        return "cholesky";
    case ChartKind::Exponential:
        return "exponential";
    case ChartKind::Diagonal:
        return "diagonal" + suffix;
    case ChartKind::ScalarScale:
        return "scalar" + suffix;
    }
    return "unknown";
}

bool Chart::operator==(const Chart& other) const
{
    if (kind_ != other.kind_ || dim_ != other.dim_ || map_ != other.map_) return false;
    if (kind_ != ChartKind::ScalarScale) return true;
    return base_cov_ == other.base_cov_;
}

Chart chart_from_name(const std::string& name, std::size_t dim, const Matrix& base_cov)
{
    if (name == "fullvech") return Chart::full_vech(dim);
    if (name == "cholesky") return Chart::cholesky(dim);
    if (name == "exponential") return Chart::exponential(dim);
    if (name == "diagonal") return Chart::diagonal(dim);
    if (name == "diagonal-exp") return Chart::diagonal(dim, ScaleMap::Exp);
    if (name == "scalar") return Chart::scalar_scale(base_cov);
    if (name == "scalar-exp") return Chart::scalar_scale(base_cov, ScaleMap::Exp);
    throw ValidationError("unknown chart '" + name + "'");
}

// --- ThetaPoint --------------------------------------------------------------

ThetaPoint::ThetaPoint(Chart chart, Vector theta_m, Vector theta_c)
    : chart_(std::move(chart)), theta_m_(std::move(theta_m)), theta_c_(std::move(theta_c))
{
    if (static_cast<std::size_t>(theta_m_.size()) != chart_.mean_dim() ||
        static_cast<std::size_t>(theta_c_.size()) != chart_.cov_dim())
        throw ValidationError("theta block sizes (" + std::to_string(theta_m_.size()) + ", " +
                              std::to_string(theta_c_.size()) + ") do not match chart " + chart_.name());
    if (!theta_m_.allFinite() || !theta_c_.allFinite()) throw ValidationError("theta has non-finite entries");
}

Vector ThetaPoint::stacked() const
{
    Vector v(theta_m_.size() + theta_c_.size());
    v << theta_m_, theta_c_;
    return v;
}

ThetaPoint ThetaPoint::from_stacked(const Chart& chart, const Vector& theta)
{
    if (static_cast<std::size_t>(theta.size()) != chart.theta_dim())
        throw ValidationError("stacked theta has wrong length for chart " + chart.name());
    const auto nm = static_cast<Eigen::Index>(chart.mean_dim());
    return ThetaPoint(chart, theta.head(nm), theta.tail(theta.size() - nm));
}

Vector NaturalGradient::stacked() const
{
    Vector v(mean_block.size() + cov_block.size());
    v << mean_block, cov_block;
    return v;
}

NaturalGradient NaturalGradient::zeros_like(const Chart& chart)
{
    return {Vector::Zero(static_cast<Eigen::Index>(chart.mean_dim())),
            Vector::Zero(static_cast<Eigen::Index>(chart.cov_dim()))};
}

NaturalGradient NaturalGradient::from_stacked(const Chart& chart, const Vector& v)
{
    const auto nm = static_cast<Eigen::Index>(chart.mean_dim());
    if (static_cast<std::size_t>(v.size()) != chart.theta_dim())
        throw ValidationError("stacked gradient has wrong length for chart " + chart.name());
    return {v.head(nm), v.tail(v.size() - nm)};
}

// --- chart maps --------------------------------------------------------------

GaussianParams to_params(const ThetaPoint& theta)
{
    const Chart& chart = theta.chart();
    const Vector& tc = theta.theta_c();
    const auto d = static_cast<Eigen::Index>(chart.dim());
    switch (chart.kind()) {
    case ChartKind::FullVech:
        return make_params(theta.theta_m(), unvech(tc));
    case ChartKind::Cholesky: {
        const Matrix a = lower_factor(theta);
        return make_params(theta.theta_m(), a * a.transpose());
    }
    case ChartKind::Exponential:
        return make_params(theta.theta_m(), sym_exp(unvech(tc)));
    case ChartKind::Diagonal: {
        Vector s(d);
        for (Eigen::Index i = 0; i < d; ++i) s(i) = scale_of(chart.scale_map(), tc(i));
        if (!(s.array() > 0.0).all()) throw DomainError("diagonal chart requires positive variances");
        return make_params(theta.theta_m(), s.asDiagonal().toDenseMatrix());
    }
    case ChartKind::ScalarScale: {
        const double s = scale_of(chart.scale_map(), tc(0));
        if (!(s > 0.0)) throw DomainError("scalar-scale chart requires a positive scale");
        return make_params(theta.theta_m(), s * chart.base_cov());
    }
    }
    throw ValidationError("unknown chart kind");
}

ThetaPoint from_params(const Chart& chart, const GaussianParams& params)
{
    if (params.dim() != chart.dim()) throw ValidationError("parameters do not match chart dimension");
    const Matrix& c = params.cov();
    const auto d = static_cast<Eigen::Index>(chart.dim());
    switch (chart.kind()) {
    case ChartKind::FullVech:
        return ThetaPoint(chart, params.mean(), vech_lower(c));
    case ChartKind::Cholesky:
        return ThetaPoint(chart, params.mean(), vech_lower(params.chol()));
    case ChartKind::Exponential:
        return ThetaPoint(chart, params.mean(), vech_lower(sym_log(c)));
    case ChartKind::Diagonal: {
        Matrix off = c;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() > 1e-12 * c.diagonal().cwiseAbs().maxCoeff())
            throw DomainError("diagonal chart requires a diagonal covariance");
        Vector t(d);
        for (Eigen::Index i = 0; i < d; ++i) t(i) = scale_inverse(chart.scale_map(), c(i, i));
        return ThetaPoint(chart, params.mean(), t);
    }
    case ChartKind::ScalarScale: {
        const Matrix& c0 = chart.base_cov();
        const double s = c0.llt().solve(c).trace() / static_cast<double>(d);
        if (!(s > 0.0) || (c - s * c0).cwiseAbs().maxCoeff() > 1e-10 * c.cwiseAbs().maxCoeff())
            throw DomainError("covariance is not a positive multiple of the chart's base covariance");
        Vector t(1);
        t(0) = scale_inverse(chart.scale_map(), s);
        return ThetaPoint(chart, params.mean(), t);
    }
    }
    throw ValidationError("unknown chart kind");
}

// --- Jacobians ---------------------------------------------------------------

Jacobians jacobians(const ThetaPoint& theta)
{
    const Chart& chart = theta.chart();
    const std::size_t d = chart.dim();
    const auto di = static_cast<Eigen::Index>(d);
    const auto nv = static_cast<Eigen::Index>(tri_size(d));
    const auto nc = static_cast<Eigen::Index>(chart.cov_dim());
    Jacobians jac{Matrix::Identity(di, di), Matrix::Zero(nv, nc)};
    const Vector& tc = theta.theta_c();

    switch (chart.kind()) {
    case ChartKind::FullVech:
        jac.cov.setIdentity();
        break;
    case ChartKind::Cholesky: {
        // dC = E A^T + A E^T for each lower-triangular basis element E.
        const Matrix a = lower_factor(theta);
        Eigen::Index k = 0;
        for (Eigen::Index c = 0; c < di; ++c)
            for (Eigen::Index r = c; r < di; ++r, ++k) {
                Matrix e = Matrix::Zero(di, di);
                e(r, c) = 1.0;
                jac.cov.col(k) = vech_lower(e * a.transpose() + a * e.transpose());
            }
        break;
    }
    case ChartKind::Exponential: {
        // Daleckii-Krein: d exp(B)[E] = Q (Phi o (Q^T E Q)) Q^T.
        Eigen::SelfAdjointEigenSolver<Matrix> es(unvech(tc));
        const Matrix& q = es.eigenvectors();
        const Matrix phi = exp_divided_differences(es.eigenvalues());
        for (Eigen::Index k = 0; k < nc; ++k) {
            const Matrix e = vech_basis(d, static_cast<std::size_t>(k));
            const Matrix dc = q * phi.cwiseProduct(q.transpose() * e * q) * q.transpose();
            jac.cov.col(k) = vech_lower(dc);
        }
        break;
    }
    case ChartKind::Diagonal:
        for (std::size_t i = 0; i < d; ++i)
            jac.cov(static_cast<Eigen::Index>(vech_index(d, i, i)), static_cast<Eigen::Index>(i)) =
                scale_derivative(chart.scale_map(), tc(static_cast<Eigen::Index>(i)));
        break;
    case ChartKind::ScalarScale:
        jac.cov.col(0) = scale_derivative(chart.scale_map(), tc(0)) * vech_lower(chart.base_cov());
        break;
    }
    return jac;
}

NumericJacobians numeric_jacobians(const ThetaPoint& theta, double step)
{
    const Chart& chart = theta.chart();
    const Vector base = theta.stacked();
    const auto n = static_cast<Eigen::Index>(chart.theta_dim());
    const auto nm = static_cast<Eigen::Index>(chart.mean_dim());
    const auto nv = static_cast<Eigen::Index>(tri_size(chart.dim()));

    auto image = [&](const Vector& t) {
        const GaussianParams p = to_params(ThetaPoint::from_stacked(chart, t));
        Vector out(nm + nv);
        out << p.mean(), vech_lower(p.cov());
        return out;
    };
    auto central = [&](double h) {
        Matrix full(nm + nv, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            Vector plus = base, minus = base;
            plus(j) += h;
            minus(j) -= h;
            full.col(j) = (image(plus) - image(minus)) / (2.0 * h);
        }
        return full;
    };
    const Matrix coarse = central(step);
    const Matrix fine = central(0.5 * step);
    const Matrix extrapolated = (4.0 * fine - coarse) / 3.0;

    const auto nc = n - nm;
    NumericJacobians out;
    out.value.mean = extrapolated.topLeftCorner(nm, nm);
    out.value.cov = extrapolated.bottomRightCorner(nv, nc);
    out.error_estimate = (fine - coarse).cwiseAbs().maxCoeff();
    return out;
}

// --- Fisher information ------------------------------------------------------

Matrix fisher_matrix(const ThetaPoint& theta)
{
    const GaussianParams params = to_params(theta);
    const Jacobians jac = jacobians(theta);
    const auto nm = jac.mean.cols();
    const auto nc = jac.cov.cols();
    Matrix f = Matrix::Zero(nm + nc, nm + nc);

    f.topLeftCorner(nm, nm) = jac.mean.transpose() * params.solve(jac.mean);

    // (F_C)_ij = tr(C^{-1} dC_i C^{-1} dC_j) / 2
    std::vector<Matrix> whitened;
    whitened.reserve(static_cast<std::size_t>(nc));
    for (Eigen::Index i = 0; i < nc; ++i) whitened.push_back(params.solve(unvech(jac.cov.col(i))));
    for (Eigen::Index i = 0; i < nc; ++i)
        for (Eigen::Index j = i; j < nc; ++j) {
            const double v =
                0.5 * whitened[static_cast<std::size_t>(i)]
                          .cwiseProduct(whitened[static_cast<std::size_t>(j)].transpose())
                          .sum();
            f(nm + i, nm + j) = v;
            f(nm + j, nm + i) = v;
        }
    return f;
}

// --- natural gradient of the log-likelihood ----------------------------------

NaturalGradient natural_gradient_loglik(const ThetaPoint& theta, const Vector& x)
{
    const Chart& chart = theta.chart();
    const GaussianParams params = to_params(theta);
    if (static_cast<std::size_t>(x.size()) != chart.dim())
        throw ValidationError("point dimension does not match chart");
    const Vector y = x - params.mean();
    const Matrix& c = params.cov();
    const Vector& tc = theta.theta_c();
    const auto d = y.size();

    // Every chart uses m = theta_m, so the inverse mean Jacobian is the identity.
    NaturalGradient ng{y, Vector()};

    switch (chart.kind()) {
    case ChartKind::FullVech:
        ng.cov_block = centered_outer_minus_cov(y, c);
        break;
    case ChartKind::Cholesky: {
        // Solve dA A^T + A dA^T = D for lower-triangular dA:
        // X = A^{-1} D A^{-T}, dA = A (strict_lower(X) + diag(X)/2).
        const Matrix a = lower_factor(theta);
        const Matrix dmat = y * y.transpose() - c;
        const auto lower = a.triangularView<Eigen::Lower>();
        const Matrix half = lower.solve(dmat);
        const Matrix xmat = lower.solve(half.transpose()).transpose();
        Matrix phi = xmat.triangularView<Eigen::StrictlyLower>();
        phi.diagonal() = 0.5 * xmat.diagonal();
        ng.cov_block = vech_lower(a * phi);
        break;
    }
    case ChartKind::Exponential: {
        // Inverse Daleckii-Krein map: dB = Q ((Q^T D Q) ./ Phi) Q^T.
        Eigen::SelfAdjointEigenSolver<Matrix> es(unvech(tc));
        const Matrix& q = es.eigenvectors();
        const Matrix phi = exp_divided_differences(es.eigenvalues());
        if (!(phi.array() > 0.0).all() || !phi.allFinite())
            throw NumericError("exponential chart Jacobian is singular");
        const Matrix dmat = y * y.transpose() - c;
        const Matrix db = q * (q.transpose() * dmat * q).cwiseQuotient(phi) * q.transpose();
        ng.cov_block = vech_lower(0.5 * (db + db.transpose()));
        break;
    }
    case ChartKind::Diagonal: {
        ng.cov_block.resize(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            const double ds = scale_derivative(chart.scale_map(), tc(i));
            if (!(ds != 0.0) || !std::isfinite(ds)) throw NumericError("diagonal chart Jacobian is singular");
            ng.cov_block(i) = (y(i) * y(i) - c(i, i)) / ds;
        }
        break;
    }
    case ChartKind::ScalarScale: {
        const double ds = scale_derivative(chart.scale_map(), tc(0));
        if (!(ds != 0.0) || !std::isfinite(ds)) throw NumericError("scalar-scale chart Jacobian is singular");
        const double s = scale_of(chart.scale_map(), tc(0));
        const double r = y.dot(chart.base_cov().llt().solve(y));
        ng.cov_block.resize(1);
        ng.cov_block(0) = (r / static_cast<double>(d) - s) / ds;
        break;
    }
    }
    return ng;
}

NaturalGradient natural_gradient_loglik_reference(const ThetaPoint& theta, const Vector& x)
{
    const GaussianParams params = to_params(theta);
    const ScoreBlocks score = log_density_grad(params, x);
    const Jacobians jac = jacobians(theta);
    const Matrix f = fisher_matrix(theta);

    Vector grad(f.rows());
    grad << jac.mean.transpose() * score.mean_block, jac.cov.transpose() * score.cov_block;

    Eigen::SelfAdjointEigenSolver<Matrix> es(f);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kFisherConditionCap)
        throw NumericError("Fisher matrix is ill-conditioned (condition number " + std::to_string(hi / lo) + ")");

    const Vector solved = f.ldlt().solve(grad);
    return NaturalGradient::from_stacked(theta.chart(), solved);
}

}  // namespace ngcma
