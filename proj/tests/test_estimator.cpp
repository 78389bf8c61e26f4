#include "oracles.hpp"

#include "ngcma/error.hpp"
#include "ngcma/estimator.hpp"
#include "ngcma/quadrature.hpp"
#include "ngcma/strategies.hpp"
#include "ngcma/theory.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace ngcma;

TEST_CASE("ranking is descending with index tie-breaks")
{
    const std::vector<double> f = {1.0, 3.0, 3.0, -2.0};
    const auto r = rank(f);
    CHECK(r == std::vector<std::size_t>{3, 1, 2, 4});
    const std::vector<double> bad = {1.0, NAN};
    CHECK_THROWS_AS(rank(bad), ValidationError);
    CHECK_THROWS_AS(rank(std::vector<double>{}), ValidationError);
}

TEST_CASE("default rank weights")
{
    for (std::size_t lambda : {2, 3, 6, 12, 13, 100}) {
        const auto w = default_rank_weights(lambda);
        REQUIRE(w.size() == lambda);
        CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
        for (std::size_t i = 1; i < lambda; ++i) CHECK(w[i] <= w[i - 1]);
        for (std::size_t i = lambda / 2; i < lambda; ++i) CHECK(w[i] == 0.0);
    }
    const auto w = default_rank_weights(4);
    const double a = std::log(2.5), b = std::log(2.5) - std::log(2.0);
    CHECK(w[0] == doctest::Approx(a / (a + b)));
    CHECK(w[1] == doctest::Approx(b / (a + b)));
}

TEST_CASE("weight scheme axioms are enforced")
{
    CHECK_THROWS_AS(WeightScheme::rank_based({0.3, 0.7}), ValidationError);
    CHECK_THROWS_AS(WeightScheme::rank_based({0.5, 0.4}), ValidationError);
    CHECK_THROWS_AS(WeightScheme::rank_based({1.5, -0.5}), ValidationError);
    CHECK_NOTHROW(WeightScheme::rank_based({1.0}));
    CHECK_THROWS_AS(WeightScheme::active({0.5, 0.4}), ValidationError);
    const auto act = WeightScheme::default_active(8);
    CHECK(std::abs(std::accumulate(act.weights().begin(), act.weights().end(), 0.0)) < 1e-12);
}

TEST_CASE("shaping coefficients per scheme")
{
    const Population pop({Vector::Zero(1), Vector::Ones(1), Vector::Constant(1, 2.0)}, {2.0, 6.0, 4.0});
    const auto raw = shaping_weights(3, WeightScheme::raw_fitness(), pop);
    CHECK(raw[1] == doctest::Approx(2.0));
    const auto norm = shaping_weights(3, WeightScheme::normalized_fitness(), pop);
    CHECK(norm[0] == doctest::Approx(2.0 / 12.0));
    const auto ranked = shaping_weights(3, WeightScheme::rank_based({0.6, 0.4, 0.0}), pop);
    CHECK(ranked == std::vector<double>{0.0, 0.6, 0.4});
    CHECK_THROWS_AS(shaping_weights(4, WeightScheme::raw_fitness(), pop), ValidationError);

    const Population negative({Vector::Zero(1), Vector::Ones(1)}, {1.0, -1.0});
    CHECK_THROWS_AS(shaping_weights(2, WeightScheme::normalized_fitness(), negative), DomainError);
}

TEST_CASE("population validation")
{
    CHECK_THROWS_AS(Population({Vector::Zero(1)}, {1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(Population({Vector::Zero(1), Vector::Zero(2)}, {1.0, 2.0}), ValidationError);
}

TEST_CASE("single-point raw estimate is (f - b) times the log-likelihood natural gradient")
{
    const ThetaPoint t(Chart::full_vech(1), Vector::Zero(1), Vector::Constant(1, 1.0));
    const Population pop({Vector::Constant(1, 2.0)}, {5.0});
    const NaturalGradient g = estimate_natural_gradient(t, pop, WeightScheme::raw_fitness(), 1.0);
    CHECK(g.mean_block(0) == doctest::Approx(8.0));
    CHECK(g.cov_block(0) == doctest::Approx(12.0));
}

namespace {

NaturalGradient quadrature_expected_estimate(const ThetaPoint& t, const Objective& f, double baseline)
{
    NaturalGradient sum = NaturalGradient::zeros_like(t.chart());
    for (const auto& node : quadrature_nodes(to_params(t), QuadratureSpec{})) {
        const Population pop({node.x}, {f(node.x)});
        const NaturalGradient g = estimate_natural_gradient(t, pop, WeightScheme::raw_fitness(), baseline);
        sum.mean_block += node.weight * g.mean_block;
        sum.cov_block += node.weight * g.cov_block;
    }
    return sum;
}

}  // namespace

TEST_CASE("lambda = 1 raw estimate is unbiased for the exact natural gradient")
{
    const auto bump = [](const Vector& x) { return std::exp(-0.5 * x.squaredNorm()); };
    const ThetaPoint t(Chart::full_vech(1), Vector::Zero(1), Vector::Constant(1, 1.0));
    const NaturalGradient e = quadrature_expected_estimate(t, bump, 0.0);
    CHECK(std::abs(e.mean_block(0)) < 1e-6);
    CHECK(std::abs(e.cov_block(0) + 1.0 / (2.0 * std::sqrt(2.0))) < 1e-6);
}

TEST_CASE("baseline leaves the expected estimate unchanged")
{
    Rng rng(8);
    const auto f = [](const Vector& x) { return -x.squaredNorm() + 0.3 * x(0); };
    for (ChartKind kind : oracle::kAllCharts) {
        const ThetaPoint t = oracle::random_theta(rng, kind, 2);
        const Vector a = quadrature_expected_estimate(t, f, 0.0).stacked();
        const Vector b = quadrature_expected_estimate(t, f, 5.0).stacked();
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("baseline changes the estimator variance")
{
    Rng rng(10);
    const ThetaPoint t(Chart::full_vech(1), Vector::Zero(1), Vector::Constant(1, 1.0));
    const auto xs = sample(to_params(t), 20000, rng);
    auto second_moment = [&](double b) {
        double s = 0.0;
        for (const auto& x : xs) {
            const Population pop({x}, {10.0 - x.squaredNorm()});
            s += estimate_natural_gradient(t, pop, WeightScheme::raw_fitness(), b).mean_block.squaredNorm();
        }
        return s / static_cast<double>(xs.size());
    };
    CHECK(second_moment(10.0) < second_moment(0.0));
}

TEST_CASE("expected fitness estimate is the population mean")
{
    const Population pop({Vector::Zero(1), Vector::Ones(1)}, {1.0, 4.0});
    CHECK(estimate_expected_fitness(pop) == 2.5);
}
