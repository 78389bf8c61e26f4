#include "oracles.hpp"

#include "ngcma/charts.hpp"
#include "ngcma/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace ngcma;

TEST_CASE("chart dimensions and names")
{
    CHECK(Chart::full_vech(3).cov_dim() == 6);
    CHECK(Chart::cholesky(3).cov_dim() == 6);
    CHECK(Chart::exponential(3).cov_dim() == 6);
    CHECK(Chart::diagonal(3).cov_dim() == 3);
    CHECK(Chart::scalar_scale(Matrix::Identity(3, 3)).cov_dim() == 1);
    CHECK(Chart::full_vech(2).theta_dim() == 5);
    for (const char* n : {"fullvech", "cholesky", "exponential", "diagonal", "diagonal-exp", "scalar", "scalar-exp"})
        CHECK(chart_from_name(n, 2, Matrix::Identity(2, 2)).name() == n);
    CHECK_THROWS_AS(chart_from_name("polar", 2, Matrix::Identity(2, 2)), ValidationError);
}

TEST_CASE("to_params inverts from_params on every chart")
{
    Rng rng(1);
    for (ChartKind kind : oracle::kAllCharts)
        for (Eigen::Index d : {1, 2, 3}) {
            const ThetaPoint t = oracle::random_theta(rng, kind, d);
            const GaussianParams p = to_params(t);
            const ThetaPoint back = from_params(t.chart(), p);
            CHECK((back.stacked() - t.stacked()).cwiseAbs().maxCoeff() < 1e-9);
        }
}

TEST_CASE("charts reject points outside their domain")
{
    Vector tc(3);
    tc << -1.0, 0.0, 1.0;
    CHECK_THROWS_AS(to_params(ThetaPoint(Chart::cholesky(2), Vector::Zero(2), tc)), DomainError);
    CHECK_THROWS_AS(to_params(ThetaPoint(Chart::full_vech(2), Vector::Zero(2), tc)), DomainError);
    CHECK_THROWS_AS(to_params(ThetaPoint(Chart::diagonal(2), Vector::Zero(2), Vector::Constant(2, -1.0))),
                    DomainError);
    Matrix c(2, 2);
    c << 1.0, 0.5, 0.5, 1.0;
    CHECK_THROWS_AS(from_params(Chart::diagonal(2), GaussianParams(Vector::Zero(2), c)), DomainError);
    CHECK_THROWS_AS(from_params(Chart::scalar_scale(Matrix::Identity(2, 2)), GaussianParams(Vector::Zero(2), c)),
                    DomainError);
    CHECK_THROWS_AS(ThetaPoint(Chart::full_vech(2), Vector::Zero(2), Vector::Zero(2)), ValidationError);
}

TEST_CASE("exponential chart admits any symmetric theta")
{
    Vector tc(3);
    tc << -8.0, 2.0, 5.0;
    const GaussianParams p = to_params(ThetaPoint(Chart::exponential(2), Vector::Zero(2), tc));
    CHECK(eigen_range(p.cov()).first > 0.0);
}

TEST_CASE("analytic Jacobians agree with finite differences")
{
    Rng rng(2);
    for (ChartKind kind : oracle::kAllCharts)
        for (Eigen::Index d : {1, 2, 3}) {
            const ThetaPoint t = oracle::random_theta(rng, kind, d);
            const Jacobians a = jacobians(t);
            const NumericJacobians n = numeric_jacobians(t);
            CHECK((a.mean - n.value.mean).cwiseAbs().maxCoeff() < 1e-6);
            CHECK((a.cov - n.value.cov).cwiseAbs().maxCoeff() < 1e-6);
        }
}

TEST_CASE("Fisher matrix of N(0, 2) in fullvech coordinates")
{
    const ThetaPoint t(Chart::full_vech(1), Vector::Zero(1), Vector::Constant(1, 2.0));
    const Matrix f = fisher_matrix(t);
    CHECK(std::abs(f(0, 0) - 0.5) < 1e-12);
    CHECK(std::abs(f(1, 1) - 0.125) < 1e-12);
    CHECK(f(0, 1) == 0.0);
    CHECK(f(1, 0) == 0.0);
}

TEST_CASE("Fisher matrix equals the score covariance")
{
    Rng rng(4);
    for (ChartKind kind : oracle::kAllCharts) {
        const ThetaPoint t = oracle::random_theta(rng, kind, 2);
        const GaussianParams p = to_params(t);
        const Jacobians j = numeric_jacobians(t).value;
        const auto n = static_cast<Eigen::Index>(t.chart().theta_dim());
        Matrix mc = Matrix::Zero(n, n);
        const std::size_t count = 200000;
        for (const auto& x : sample(p, count, rng)) {
            const ScoreBlocks s = log_density_grad(p, x);
            Vector v(n);
            v << j.mean.transpose() * s.mean_block, j.cov.transpose() * s.cov_block;
            mc += v * v.transpose();
        }
        mc /= static_cast<double>(count);
        const Matrix f = fisher_matrix(t);
        CHECK((mc - f).cwiseAbs().maxCoeff() < 0.05 * std::max(1.0, f.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("fullvech natural gradient of the log-likelihood")
{
    const ThetaPoint t(Chart::full_vech(1), Vector::Zero(1), Vector::Constant(1, 1.0));
    const NaturalGradient g = natural_gradient_loglik(t, Vector::Constant(1, 2.0));
    CHECK(g.mean_block(0) == 2.0);
    CHECK(g.cov_block(0) == 3.0);
}

TEST_CASE("closed form natural gradient equals the Fisher solve")
{
    Rng rng(5);
    for (int trial = 0; trial < 40; ++trial)
        for (ChartKind kind : oracle::kAllCharts) {
            const Eigen::Index d = 1 + trial % 4;
            const ThetaPoint t = oracle::random_theta(rng, kind, d);
            const Vector x = sample(to_params(t), 1, rng).front();
            const Vector a = natural_gradient_loglik(t, x).stacked();
            const Vector b = natural_gradient_loglik_reference(t, x).stacked();
            CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-8 * b.cwiseAbs().maxCoeff());
        }
}

TEST_CASE("reference solve refuses ill-conditioned Fisher matrices")
{
    Vector tc = vech(Matrix::Identity(2, 2));
    tc(0) = 1e-7;
    const ThetaPoint t(Chart::full_vech(2), Vector::Zero(2), tc);
    CHECK_THROWS_AS(natural_gradient_loglik_reference(t, Vector::Zero(2)), NumericError);
}

TEST_CASE("natural gradient has zero mean under the sampling distribution")
{
    Rng rng(6);
    const ThetaPoint t = oracle::random_theta(rng, ChartKind::Cholesky, 2);
    const auto xs = sample(to_params(t), 100000, rng);
    Vector acc = Vector::Zero(static_cast<Eigen::Index>(t.chart().theta_dim()));
    Vector acc2 = acc;
    for (const auto& x : xs) {
        const Vector g = natural_gradient_loglik(t, x).stacked();
        acc += g;
        acc2 += g.cwiseProduct(g);
    }
    const double n = static_cast<double>(xs.size());
    for (Eigen::Index i = 0; i < acc.size(); ++i) {
        const double mean = acc(i) / n;
        const double se = std::sqrt((acc2(i) / n - mean * mean) / n);
        CHECK(std::abs(mean) < 5.0 * se);
    }
}
