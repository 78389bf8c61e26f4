#include "oracles.hpp"

#include "ngcma/error.hpp"
#include "ngcma/gaussian.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace ngcma;

TEST_CASE("symmetrized accepts roundoff and rejects real asymmetry")
{
    Matrix m(2, 2);
    m << 2.0, 1.0, 1.0 + 1e-13, 3.0;
    const Matrix s = symmetrized(m);
    CHECK(s(0, 1) == s(1, 0));
    m(1, 0) = 1.1;
    CHECK_THROWS_AS(symmetrized(m), ValidationError);
    CHECK_THROWS_AS(symmetrized(Matrix::Zero(2, 3)), ValidationError);
}

TEST_CASE("tiny covariances are accepted at any scale")
{
    const GaussianParams p(Vector::Zero(1), Matrix::Constant(1, 1, 1e-20));
    CHECK(p.cov()(0, 0) == 1e-20);
}

TEST_CASE("vech stacks columns from the diagonal down")
{
    Matrix m(3, 3);
    m << 1, 2, 3, 2, 4, 5, 3, 5, 6;
    const Vector v = vech(m);
    REQUIRE(v.size() == 6);
    CHECK(v(0) == 1);
    CHECK(v(1) == 2);
    CHECK(v(2) == 3);
    CHECK(v(3) == 4);
    CHECK(v(4) == 5);
    CHECK(v(5) == 6);
    CHECK(unvech(v) == m);
    CHECK(vech_index(3, 2, 1) == 4);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t r = c; r < 3; ++r) CHECK(v(static_cast<Eigen::Index>(vech_index(3, r, c))) == m(r, c));
    CHECK_THROWS_AS(unvech(Vector::Zero(4)), ValidationError);
    CHECK(tri_dim(10) == std::optional<std::size_t>(4));
    CHECK_FALSE(tri_dim(7).has_value());
}

TEST_CASE("spectral functions")
{
    Rng rng(3);
    const Matrix c = oracle::random_spd(rng, 3, 0.5, 2.0);
    CHECK((sym_exp(sym_log(c)) - c).cwiseAbs().maxCoeff() < 1e-12);
    const Matrix r = sym_inv_sqrt(c);
    CHECK((r * c * r - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    Matrix bad = Matrix::Identity(2, 2);
    bad(1, 1) = -1.0;
    CHECK_THROWS_AS(sym_log(bad), DomainError);
    CHECK_THROWS_AS(sym_inv_sqrt(bad), NumericError);
    const auto [lo, hi] = eigen_range(c);
    CHECK(lo > 0.4);
    CHECK(hi < 2.1);
}

TEST_CASE("GaussianParams validates its covariance")
{
    Matrix bad = Matrix::Identity(2, 2);
    bad(1, 1) = -0.5;
    CHECK_THROWS_AS(GaussianParams(Vector::Zero(2), bad), NumericError);
    CHECK_THROWS_AS(GaussianParams(Vector::Zero(3), Matrix::Identity(2, 2)), ValidationError);
    Vector nan = Vector::Zero(2);
    nan(0) = NAN;
    CHECK_THROWS_AS(GaussianParams(nan, Matrix::Identity(2, 2)), ValidationError);
}

TEST_CASE("log density matches the 1-D closed form")
{
    const GaussianParams p(Vector::Constant(1, 1.0), Matrix::Constant(1, 1, 4.0));
    const Vector x = Vector::Constant(1, 2.0);
    const double expected = -0.5 * std::log(2.0 * std::numbers::pi * 4.0) - 0.5 * 0.25;
    CHECK(log_density(p, x) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("score agrees with central differences of the log density")
{
    Rng rng(11);
    for (Eigen::Index d : {1, 2, 3}) {
        const GaussianParams p(oracle::random_vector(rng, d), oracle::random_spd(rng, d, 0.5, 2.0));
        const Vector x = sample(p, 1, rng).front();
        const ScoreBlocks s = log_density_grad(p, x);

        const Vector gm = oracle::central_gradient(
            [&](const Vector& m) { return log_density(GaussianParams(m, p.cov()), x); }, p.mean());
        CHECK((gm - s.mean_block).cwiseAbs().maxCoeff() < 1e-7);

        // Moving one vech coordinate moves both symmetric entries.
        const Vector gc = oracle::central_gradient(
            [&](const Vector& v) { return log_density(GaussianParams(p.mean(), unvech(v)), x); }, vech(p.cov()));
        CHECK((gc - s.cov_block).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("samples have the requested moments")
{
    Matrix c(2, 2);
    c << 2.0, 0.6, 0.6, 1.0;
    const GaussianParams p(Vector::Constant(2, 1.5), c);
    const std::size_t n = 200000;
    const auto m = oracle::sample_moments(sample(p, n, std::uint64_t{5}));
    for (Eigen::Index i = 0; i < 2; ++i) CHECK(std::abs(m.mean(i) - 1.5) < 5.0 * std::sqrt(c(i, i) / n));
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) {
            const double se = std::sqrt((c(i, i) * c(j, j) + c(i, j) * c(i, j)) / n);
            CHECK(std::abs(m.cov(i, j) - c(i, j)) < 5.0 * se);
        }
}

TEST_CASE("sampling is a deterministic function of the seed")
{
    const GaussianParams p = GaussianParams::standard(3);
    const auto a = sample(p, 10, std::uint64_t{42});
    const auto b = sample(p, 10, std::uint64_t{42});
    const auto c = sample(p, 10, std::uint64_t{43});
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    CHECK_FALSE(a[0] == c[0]);
    CHECK_THROWS_AS(sample(p, 0, std::uint64_t{1}), ValidationError);
}

TEST_CASE("split streams are reproducible and distinct")
{
    const Rng root(9);
    Rng a = root.split(1), b = root.split(1), c = root.split(2);
    const double va = a.normal();
    CHECK(va == b.normal());
    CHECK(va != c.normal());
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(root.split(s).seed());
    CHECK(seen.size() == 1000);
}

TEST_CASE("KL divergence matches a Monte-Carlo estimate")
{
    Rng rng(17);
    const GaussianParams p(oracle::random_vector(rng, 2), oracle::random_spd(rng, 2, 0.5, 2.0));
    const GaussianParams q(oracle::random_vector(rng, 2), oracle::random_spd(rng, 2, 0.5, 2.0));
    CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
    const std::size_t n = 200000;
    double acc = 0.0, acc2 = 0.0;
    for (const auto& x : sample(p, n, rng)) {
        const double v = log_density(p, x) - log_density(q, x);
        acc += v;
        acc2 += v * v;
    }
    const double mean = acc / n;
    const double se = std::sqrt((acc2 / n - mean * mean) / n);
    CHECK(std::abs(kl_divergence(p, q) - mean) < 5.0 * se);
}
