#include "oracles.hpp"

#include "ngcma/error.hpp"
#include "ngcma/strategies.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

using namespace ngcma;

namespace {

double sphere(const Vector& x) { return -x.squaredNorm(); }

StrategyConfig sphere_config(StrategyKind kind, std::size_t lambda = 12)
{
    StrategyConfig c;
    c.kind = kind;
    c.lambda = lambda;
    c.weights = WeightScheme::default_rank_based(lambda);
    c.rates = default_learning_rates(2, lambda);
    c.mean0 = Vector::Constant(2, 3.0);
    c.cov0 = Matrix::Identity(2, 2);
    return c;
}

}  // namespace

TEST_CASE("ngl_step adds the scaled blocks")
{
    const ThetaPoint t(Chart::full_vech(1), Vector::Zero(1), Vector::Ones(1));
    const NaturalGradient g{Vector::Constant(1, 2.0), Vector::Constant(1, 3.0)};
    const ThetaPoint n = ngl_step(t, g, 1.0, 1.0);
    CHECK(n.theta_m()(0) == 2.0);
    CHECK(n.theta_c()(0) == 4.0);
    const ThetaPoint same = ngl_step(t, g, 0.0, 0.0);
    CHECK(same.stacked() == t.stacked());
}

TEST_CASE("ngl_step rejects non-PD fullvech results with the offending theta")
{
    const ThetaPoint t(Chart::full_vech(1), Vector::Zero(1), Vector::Ones(1));
    const NaturalGradient g{Vector::Zero(1), Vector::Constant(1, -3.0)};
    try {
        (void)ngl_step(t, g, 1.0, 1.0);
        FAIL("expected StepRejected");
    } catch (const StepRejected& e) {
        CHECK(e.offending()(1) == -2.0);
    }
}

TEST_CASE("ngl_step on the exponential chart never rejects")
{
    Rng rng(1);
    const ThetaPoint t = oracle::random_theta(rng, ChartKind::Exponential, 3);
    for (int i = 0; i < 50; ++i) {
        NaturalGradient g{oracle::random_vector(rng, 3), 3.0 * oracle::random_vector(rng, 6)};
        CHECK_NOTHROW(ngl_step(t, g, 1.0, 1.0));
    }
}

TEST_CASE("rank-mu step with a single point moves the mean onto it")
{
    RankMuState s{Vector::Zero(2), Matrix::Identity(2, 2), 1.0, 0.0, 0};
    const Vector x = (Vector(2) << 1.5, -2.0).finished();
    const RankMuState n = rank_mu_step(s, Population({x}, {1.0}), WeightScheme::rank_based({1.0}));
    CHECK(n.mean == x);
    CHECK(n.cov == s.cov);
    CHECK(n.iteration == 1);
}

TEST_CASE("rank-mu step with zero rates leaves the state unchanged")
{
    Rng rng(2);
    const GaussianParams p(oracle::random_vector(rng, 3), oracle::random_spd(rng, 3, 0.5, 2.0));
    RankMuState s{p.mean(), p.cov(), 0.0, 0.0, 0};
    const RankMuState n = rank_mu_step(s, oracle::random_population(rng, p, 8), WeightScheme::default_rank_based(8));
    CHECK(n.mean == s.mean);
    CHECK(n.cov == s.cov);
}

TEST_CASE("rank-mu step uses the pre-update mean in the covariance")
{
    RankMuState s{Vector::Zero(1), Matrix::Identity(1, 1), 1.0, 1.0, 0};
    const Population pop({Vector::Constant(1, 2.0), Vector::Constant(1, 0.0)}, {1.0, 0.0});
    const RankMuState n = rank_mu_step(s, pop, WeightScheme::rank_based({1.0, 0.0}));
    CHECK(n.mean(0) == 2.0);
    CHECK(n.cov(0, 0) == 4.0);
}

TEST_CASE("rank-mu and fullvech natural-gradient steps are the same floating-point operations")
{
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index d = 1 + trial % 4;
        const std::size_t lambda = static_cast<std::size_t>(d) + 2 + static_cast<std::size_t>(trial % 7);
        const GaussianParams p(oracle::random_vector(rng, d), oracle::random_spd(rng, d, 0.3, 3.0));
        const Population pop = oracle::random_population(rng, p, lambda);
        const WeightScheme w = WeightScheme::default_rank_based(lambda);
        const double eta_m = rng.uniform(0.1, 1.0), eta_c = rng.uniform(0.1, 1.0);

        const RankMuState a = rank_mu_step(RankMuState{p.mean(), p.cov(), eta_m, eta_c, 0}, pop, w);
        const ThetaPoint t = from_params(Chart::full_vech(static_cast<std::size_t>(d)), p);
        const ThetaPoint b = ngl_step(t, estimate_natural_gradient(t, pop, w), eta_m, eta_c);
        CHECK(a.mean == b.theta_m());
        CHECK(vech_lower(a.cov) == b.theta_c());
    }
}

TEST_CASE("sep-CMA hand example")
{
    SepCmaState s{Vector::Zero(2), Vector::Ones(2), 1.0, 0.5, 0};
    const Population pop({(Vector(2) << 2.0, 0.0).finished()}, {1.0});
    const SepCmaState n = sep_cma_step(s, pop, WeightScheme::rank_based({1.0}));
    CHECK(n.variances(0) == doctest::Approx(2.5));
    CHECK(n.variances(1) == doctest::Approx(0.5));

    SepCmaState frozen = s;
    frozen.eta_c = 0.0;
    CHECK(sep_cma_step(frozen, pop, WeightScheme::rank_based({1.0})).variances == s.variances);
}

TEST_CASE("sep-CMA coincides with rank-mu in one dimension")
{
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const GaussianParams p(oracle::random_vector(rng, 1), oracle::random_spd(rng, 1, 0.3, 3.0));
        const Population pop = oracle::random_population(rng, p, 6);
        const auto w = WeightScheme::default_rank_based(6);
        const RankMuState a = rank_mu_step(RankMuState{p.mean(), p.cov(), 0.7, 0.4, 0}, pop, w);
        const SepCmaState b = sep_cma_step(SepCmaState{p.mean(), p.cov().diagonal(), 0.7, 0.4, 0}, pop, w);
        CHECK(a.mean == b.mean);
        CHECK(a.cov(0, 0) == b.variances(0));
    }
}

TEST_CASE("chi mean table")
{
    CHECK(chi_mean(1) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-14));
    CHECK(chi_mean(2) == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-14));
    // Monte-Carlo check for d = 5.
    Rng rng(5);
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += oracle::random_vector(rng, 5).norm();
    CHECK(std::abs(acc / n - chi_mean(5)) < 5.0 * 0.7 / std::sqrt(n));
}

TEST_CASE("default learning rates")
{
    for (std::size_t d = 1; d <= 100; ++d)
        for (std::size_t lambda = 2; lambda <= 1000; lambda += (lambda < 50 ? 1 : 37)) {
            const LearningRates r = default_learning_rates(d, lambda);
            CHECK(r.c_1 + r.c_mu <= 1.0);
            CHECK(r.eta_m == 1.0);
            CHECK(r.eta_c > 0.0);
            CHECK(r.eta_c <= 1.0);
            CHECK(r.c_sigma > 0.0);
            CHECK(r.c_sigma <= 1.0);
            CHECK(r.c_c > 0.0);
            CHECK(r.c_c <= 1.0);
            CHECK(r.c_1 > 0.0);
            CHECK(r.d_sigma >= 1.0);
            if (lambda >= 4) CHECK(r.c_mu > 0.0);
        }
    const LearningRates a = default_learning_rates(7, 13), b = default_learning_rates(7, 13);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
    CHECK_THROWS_AS(default_learning_rates(0, 4), ValidationError);
    CHECK_THROWS_AS(default_learning_rates(2, 1), ValidationError);
}

TEST_CASE("full CMA with adaptation off only moves the mean")
{
    Rng rng(6);
    const GaussianParams p(oracle::random_vector(rng, 3), oracle::random_spd(rng, 3, 0.5, 2.0));
    const FullCmaState s = FullCmaState::initial(p.mean(), 0.7, p.cov(), FullCmaRates{0.0, 1.0, 0.3, 0.0, 0.0});
    const auto w = WeightScheme::default_rank_based(8);
    const FullCmaState n = full_cma_step(s, oracle::random_population(rng, GaussianParams(p.mean(), 0.49 * p.cov()), 8), w);
    CHECK(n.sigma == s.sigma);
    CHECK(n.cov == s.cov);
    CHECK_FALSE(n.mean == s.mean);
}

TEST_CASE("full CMA keeps sigma when the path length equals chi_d")
{
    Rng rng(7);
    const GaussianParams p = GaussianParams::standard(2);
    const auto w = WeightScheme::default_rank_based(10);
    const LearningRates r = default_learning_rates(2, 10);
    FullCmaState s = FullCmaState::initial(p.mean(), 1.0, p.cov(), FullCmaRates{r.c_sigma, r.d_sigma, r.c_c, r.c_1, r.c_mu});
    const Population pop = oracle::random_population(rng, p, 10);
    s.chi_d = full_cma_step(s, pop, w).p_sigma.norm();
    CHECK(full_cma_step(s, pop, w).sigma == 1.0);
}

TEST_CASE("full CMA without paths or step-size reduces to rank-mu")
{
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index d = 1 + trial % 3;
        const std::size_t lambda = 4 + static_cast<std::size_t>(trial % 9);
        const GaussianParams p(oracle::random_vector(rng, d), oracle::random_spd(rng, d, 0.3, 3.0));
        const Population pop = oracle::random_population(rng, p, lambda);
        const auto w = WeightScheme::default_rank_based(lambda);
        const double c_mu = rng.uniform(0.05, 0.9);
        const FullCmaState s = FullCmaState::initial(p.mean(), 1.0, p.cov(), FullCmaRates{0.0, 1.0, 0.0, 0.0, c_mu});
        const FullCmaState a = full_cma_step(s, pop, w);
        const RankMuState b = rank_mu_step(RankMuState{p.mean(), p.cov(), 1.0, c_mu, 0}, pop, w);
        CHECK(a.mean == b.mean);
        CHECK(a.cov == b.cov);
        CHECK(a.sigma == 1.0);
    }
}

TEST_CASE("full CMA requires rank-based weights")
{
    const FullCmaState s = FullCmaState::initial(Vector::Zero(1), 1.0, Matrix::Identity(1, 1), FullCmaRates{0.5, 1.0, 0.5, 0.1, 0.1});
    const Population pop({Vector::Zero(1), Vector::Ones(1)}, {1.0, 2.0});
    CHECK_THROWS_AS(full_cma_step(s, pop, WeightScheme::raw_fitness()), ValidationError);
}

TEST_CASE("rank-based mean update is stationary on constant fitness")
{
    Rng rng(9);
    const GaussianParams p = GaussianParams::standard(2);
    const auto w = WeightScheme::default_rank_based(10);
    const int trials = 10000;
    Vector drift = Vector::Zero(2);
    for (int i = 0; i < trials; ++i) {
        std::vector<double> f(10, 1.0);
        const Population pop(sample(p, 10, rng), f);
        drift += rank_mu_step(RankMuState{p.mean(), p.cov(), 1.0, 0.3, 0}, pop, w).mean - p.mean();
    }
    drift /= trials;
    double sum_w2 = 0.0;
    for (double v : w.weights()) sum_w2 += v * v;
    const double se = std::sqrt(sum_w2 / trials);
    CHECK(drift.cwiseAbs().maxCoeff() <= 3.0 * se);
}

TEST_CASE("run with zero budget returns the initial state")
{
    const RunResult r = run(sphere_config(StrategyKind::RankMu), sphere, 0, 1);
    CHECK(r.trace.empty());
    CHECK(r.mean == Vector::Constant(2, 3.0));
    CHECK(r.reason == Termination::Budget);
}

TEST_CASE("runs are deterministic in the seed")
{
    for (StrategyKind k : {StrategyKind::RankMu, StrategyKind::FullCma, StrategyKind::SepCma, StrategyKind::Ngl}) {
        const RunResult a = run(sphere_config(k), sphere, 30, 5);
        const RunResult b = run(sphere_config(k), sphere, 30, 5);
        REQUIRE(a.trace.size() == b.trace.size());
        for (std::size_t i = 0; i < a.trace.size(); ++i) {
            CHECK(a.trace[i].mean == b.trace[i].mean);
            CHECK(a.trace[i].best_f == b.trace[i].best_f);
            CHECK(a.trace[i].sigma == b.trace[i].sigma);
        }
        const RunResult c = run(sphere_config(k), sphere, 30, 6);
        CHECK_FALSE(c.trace.back().mean == a.trace.back().mean);
    }
}

TEST_CASE("covariance stays positive definite along accepted runs")
{
    for (StrategyKind k : {StrategyKind::RankMu, StrategyKind::FullCma, StrategyKind::SepCma}) {
        const RunResult r = run(sphere_config(k), sphere, 100, 3);
        for (const auto& rec : r.trace) CHECK(rec.cov_eig_min > 0.0);
    }
}

TEST_CASE("run stops at the target")
{
    StrategyConfig c = sphere_config(StrategyKind::FullCma);
    c.target = -1e-10;
    const RunResult r = run(c, sphere, 500, 2);
    CHECK(r.reason == Termination::Target);
    CHECK(r.best_f >= -1e-10);
    CHECK(r.trace.back().best_f >= -1e-10);
    CHECK(r.evaluations == r.trace.size() * 12);
}

TEST_CASE("run stops when the covariance condition number exceeds the cap")
{
    StrategyConfig c = sphere_config(StrategyKind::FullCma);
    c.condition_cap = 10.0;
    const auto ellipse = [](const Vector& x) { return -(x(0) * x(0) + 1e4 * x(1) * x(1)); };
    const RunResult r = run(c, ellipse, 500, 2);
    CHECK(r.reason == Termination::ConditionCap);
    CHECK(r.trace.back().cov_eig_max / r.trace.back().cov_eig_min > 10.0);
}

TEST_CASE("a rejected step surfaces the partial trace")
{
    StrategyConfig c = sphere_config(StrategyKind::RankMu);
    c.weights = WeightScheme::raw_fitness();
    c.rates.eta_c = 1.0;
    try {
        (void)run(c, sphere, 50, 1);
        FAIL("expected RunFailed");
    } catch (const RunFailed& e) {
        CHECK(e.partial().trace.size() < 50);
        CHECK(e.partial().evaluations == (e.partial().trace.size() + 1) * 12);
    }
}

TEST_CASE("sep-CMA needs a diagonal initial covariance")
{
    StrategyConfig c = sphere_config(StrategyKind::SepCma);
    c.cov0(0, 1) = c.cov0(1, 0) = 0.2;
    CHECK_THROWS_AS(run(c, sphere, 1, 1), ValidationError);
}

TEST_CASE("the natural-gradient strategy runs on every chart")
{
    for (const char* chart : {"fullvech", "cholesky", "exponential", "diagonal", "diagonal-exp", "scalar", "scalar-exp"}) {
        StrategyConfig c = sphere_config(StrategyKind::Ngl);
        c.chart = chart;
        c.rates.eta_c = 0.2;
        const RunResult r = run(c, sphere, 60, 4);
        CHECK(r.best_f > -1e-2);
    }
}
