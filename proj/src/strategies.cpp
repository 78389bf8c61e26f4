#include "ngcma/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace ngcma {

namespace {

Vector stack_mean_cov(const Vector& mean, const Matrix& cov)
{
    const Vector v = vech_lower(cov);
    Vector out(mean.size() + v.size());
    out << mean, v;
    return out;
}

void check_rate(double eta, const char* name)
{
    if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError(std::string(name) + " must lie in [0, 1]");
}

void check_population(const Population& population, std::size_t dim)
{
    if (population.dim() != dim) throw ValidationError("population dimension does not match the state");
}

}  // namespace

ThetaPoint ngl_step(const ThetaPoint& theta, const NaturalGradient& delta, double eta_m, double eta_c)
{
    if (delta.mean_block.size() != theta.theta_m().size() || delta.cov_block.size() != theta.theta_c().size())
        throw ValidationError("natural gradient blocks do not match theta");
    Vector tm = theta.theta_m() + eta_m * delta.mean_block;
    Vector tc = theta.theta_c() + eta_c * delta.cov_block;
    Vector stacked(tm.size() + tc.size());
    stacked << tm, tc;
    try {
        ThetaPoint next(theta.chart(), std::move(tm), std::move(tc));
        (void)to_params(next);
        return next;
    } catch (const DomainError& e) {
        throw StepRejected(std::string("natural-gradient step rejected: ") + e.what(), stacked);
    } catch (const ValidationError& e) {
        throw StepRejected(std::string("natural-gradient step rejected: ") + e.what(), stacked);
    }
}

double chi_mean(std::size_t d)
{
    const double n = static_cast<double>(d);
    return std::sqrt(2.0) * std::exp(std::lgamma(0.5 * (n + 1.0)) - std::lgamma(0.5 * n));
}

LearningRates default_learning_rates(std::size_t d, std::size_t lambda)
{
    if (d < 1) throw ValidationError("dimension must be at least 1");
    if (lambda < 2) throw ValidationError("population size must be at least 2");
    const std::vector<double> w = default_rank_weights(lambda);
    double sum_w2 = 0.0;
    for (double v : w) sum_w2 += v * v;
    const double mu_eff = 1.0 / sum_w2;
    const double n = static_cast<double>(d);

    LearningRates r{};
    r.mu_eff = mu_eff;
    r.eta_m = 1.0;
    r.c_sigma = (mu_eff + 2.0) / (n + mu_eff + 3.0);
    r.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + r.c_sigma;
    r.c_c = 4.0 / (n + 4.0);
    const double rank_mu_share = std::min(1.0, (2.0 * mu_eff - 1.0) / ((n + 2.0) * (n + 2.0) + mu_eff));
    const double c_cov =
        (1.0 / mu_eff) * 2.0 / ((n + std::sqrt(2.0)) * (n + std::sqrt(2.0))) + (1.0 - 1.0 / mu_eff) * rank_mu_share;
    r.c_1 = c_cov / mu_eff;
    r.c_mu = c_cov * (1.0 - 1.0 / mu_eff);
    // Without a rank-one term the whole covariance rate goes to rank-mu.
    r.eta_c = rank_mu_share;
    return r;
}

RankMuState rank_mu_step(const RankMuState& state, const Population& population, const WeightScheme& weights)
{
    check_rate(state.eta_m, "eta_m");
    check_rate(state.eta_c, "eta_C");
    const auto d = state.mean.size();
    check_population(population, static_cast<std::size_t>(d));
    const std::vector<double> w = shaping_weights(population.size(), weights, population);

    Vector mean_acc = Vector::Zero(d);
    Matrix cov_acc = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < population.size(); ++i) {
        const Vector y = population.points()[i] - state.mean;
        mean_acc += w[i] * y;
        cov_acc += w[i] * (y * y.transpose() - state.cov);
    }
    RankMuState next = state;
    next.mean = state.mean + state.eta_m * mean_acc;
    next.cov = state.cov + state.eta_c * cov_acc;
    next.iteration = state.iteration + 1;
    try {
        (void)GaussianParams(next.mean, next.cov);
    } catch (const Error& e) {
        throw StepRejected(std::string("rank-mu step rejected: ") + e.what(), stack_mean_cov(next.mean, next.cov));
    }
    return next;
}

SepCmaState sep_cma_step(const SepCmaState& state, const Population& population, const WeightScheme& weights)
{
    check_rate(state.eta_m, "eta_m");
    check_rate(state.eta_c, "eta_C");
    const auto d = state.mean.size();
    if (state.variances.size() != d) throw ValidationError("variances do not match mean dimension");
    check_population(population, static_cast<std::size_t>(d));
    const std::vector<double> w = shaping_weights(population.size(), weights, population);

    Vector mean_acc = Vector::Zero(d);
    Vector var_acc = Vector::Zero(d);
    for (std::size_t i = 0; i < population.size(); ++i) {
        const Vector y = population.points()[i] - state.mean;
        mean_acc += w[i] * y;
        var_acc += w[i] * (y.cwiseProduct(y) - state.variances);
    }
    SepCmaState next = state;
    next.mean = state.mean + state.eta_m * mean_acc;
    next.variances = state.variances + state.eta_c * var_acc;
    next.iteration = state.iteration + 1;
    if (!(next.variances.array() > 0.0).all() || !next.variances.allFinite()) {
        Vector offending(2 * d);
        offending << next.mean, next.variances;
        throw StepRejected("sep-CMA step rejected: non-positive variance", offending);
    }
    return next;
}

FullCmaState FullCmaState::initial(Vector mean, double sigma, Matrix cov, const FullCmaRates& rates)
{
    FullCmaState s;
    const auto d = mean.size();
    s.mean = std::move(mean);
    s.sigma = sigma;
    s.cov = std::move(cov);
    s.p_sigma = Vector::Zero(d);
    s.p_c = Vector::Zero(d);
    s.rates = rates;
    s.chi_d = chi_mean(static_cast<std::size_t>(d));
    return s;
}

FullCmaState full_cma_step(const FullCmaState& state, const Population& population, const WeightScheme& weights)
{
    if (weights.kind() != WeightKind::RankBased) throw ValidationError("full CMA-ES requires rank-based weights");
    const FullCmaRates& r = state.rates;
    if (!(state.sigma > 0.0)) throw ValidationError("step-size must be positive");
    if (1.0 - r.c_1 - r.c_mu < 0.0) throw ValidationError("c_1 + c_mu must not exceed 1");
    const auto d = state.mean.size();
    check_population(population, static_cast<std::size_t>(d));
    const std::vector<double> w = shaping_weights(population.size(), weights, population);

    double sum_w2 = 0.0;
    for (double v : weights.weights()) sum_w2 += v * v;

    Vector shift = Vector::Zero(d);
    Matrix rank_mu = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < population.size(); ++i) {
        const Vector dx = population.points()[i] - state.mean;
        const Vector y = dx / state.sigma;
        shift += w[i] * dx;
        rank_mu += w[i] * (y * y.transpose() - state.cov);
    }

    FullCmaState next = state;
    // With unit-sum weights m + sum w_i (x_i - m) = sum w_i x_i.
    next.mean = state.mean + shift;

    const Matrix inv_sqrt = sym_inv_sqrt(state.cov);
    next.p_sigma = (1.0 - r.c_sigma) * state.p_sigma +
                   std::sqrt(r.c_sigma * (2.0 - r.c_sigma) / sum_w2) * (inv_sqrt * shift) / state.sigma;
    next.sigma = state.sigma * std::exp((r.c_sigma / r.d_sigma) * (next.p_sigma.norm() - state.chi_d) / state.chi_d);
    next.p_c = (1.0 - r.c_c) * state.p_c + std::sqrt(r.c_c * (2.0 - r.c_c) / sum_w2) * shift / state.sigma;

    // (1 - c1 - cmu) C + c1 p p^T + cmu sum w y y^T, in increment form.
    next.cov = state.cov + r.c_1 * (next.p_c * next.p_c.transpose() - state.cov) + r.c_mu * rank_mu;
    next.iteration = state.iteration + 1;

    if (!std::isfinite(next.sigma) || !(next.sigma > 0.0))
        throw StepRejected("full CMA step rejected: non-finite step-size", stack_mean_cov(next.mean, next.cov));
    try {
        (void)GaussianParams(next.mean, next.cov);
    } catch (const Error& e) {
        throw StepRejected(std::string("full CMA step rejected: ") + e.what(), stack_mean_cov(next.mean, next.cov));
    }
    return next;
}

std::string to_string(StrategyKind kind)
{
    switch (kind) {
    case StrategyKind::RankMu:
        return "rank-mu";
    case StrategyKind::FullCma:
        return "full-cma";
    case StrategyKind::SepCma:
        return "sep-cma";
    case StrategyKind::Ngl:
        return "ngl";
    }
    return "unknown";
}

std::string to_string(Termination reason)
{
    switch (reason) {
    case Termination::Budget:
        return "budget";
    case Termination::Target:
        return "target";
    case Termination::ConditionCap:
        return "condition";
    }
    return "unknown";
}

// --- run loop ----------------------------------------------------------------

namespace {

class Driver {
public:
    virtual ~Driver() = default;
    virtual GaussianParams sampling() const = 0;
    virtual void step(const Population& population) = 0;
    virtual Vector mean() const = 0;
    virtual Matrix shape() const = 0;
    virtual double sigma() const { return 1.0; }
};

class RankMuDriver final : public Driver {
public:
    RankMuDriver(RankMuState s, WeightScheme w) : state_(std::move(s)), weights_(std::move(w)) {}
    GaussianParams sampling() const override { return GaussianParams(state_.mean, state_.cov); }
    void step(const Population& p) override { state_ = rank_mu_step(state_, p, weights_); }
    Vector mean() const override { return state_.mean; }
    Matrix shape() const override { return state_.cov; }

private:
    RankMuState state_;
    WeightScheme weights_;
};

class SepCmaDriver final : public Driver {
public:
    SepCmaDriver(SepCmaState s, WeightScheme w) : state_(std::move(s)), weights_(std::move(w)) {}
    GaussianParams sampling() const override { return GaussianParams(state_.mean, shape()); }
    void step(const Population& p) override { state_ = sep_cma_step(state_, p, weights_); }
    Vector mean() const override { return state_.mean; }
    Matrix shape() const override { return state_.variances.asDiagonal().toDenseMatrix(); }

private:
    SepCmaState state_;
    WeightScheme weights_;
};

class FullCmaDriver final : public Driver {
public:
    FullCmaDriver(FullCmaState s, WeightScheme w) : state_(std::move(s)), weights_(std::move(w)) {}
    GaussianParams sampling() const override
    {
        return GaussianParams(state_.mean, state_.sigma * state_.sigma * state_.cov);
    }
    void step(const Population& p) override { state_ = full_cma_step(state_, p, weights_); }
    Vector mean() const override { return state_.mean; }
    Matrix shape() const override { return state_.cov; }
    double sigma() const override { return state_.sigma; }

private:
    FullCmaState state_;
    WeightScheme weights_;
};

class NglDriver final : public Driver {
public:
    NglDriver(ThetaPoint theta, WeightScheme w, double baseline, double eta_m, double eta_c)
        : theta_(std::move(theta)), weights_(std::move(w)), baseline_(baseline), eta_m_(eta_m), eta_c_(eta_c)
    {
    }
    GaussianParams sampling() const override { return to_params(theta_); }
    void step(const Population& p) override
    {
        const NaturalGradient delta = estimate_natural_gradient(theta_, p, weights_, baseline_);
        theta_ = ngl_step(theta_, delta, eta_m_, eta_c_);
    }
    Vector mean() const override { return to_params(theta_).mean(); }
    Matrix shape() const override { return to_params(theta_).cov(); }

private:
    ThetaPoint theta_;
    WeightScheme weights_;
    double baseline_;
    double eta_m_;
    double eta_c_;
};

std::unique_ptr<Driver> make_driver(const StrategyConfig& config)
{
    const auto d = config.mean0.size();
    if (d == 0 || config.cov0.rows() != d || config.cov0.cols() != d)
        throw ValidationError("initial mean and covariance dimensions disagree");
    const GaussianParams initial(config.mean0, config.cov0);
    const LearningRates& r = config.rates;
    switch (config.kind) {
    case StrategyKind::RankMu:
        return std::make_unique<RankMuDriver>(RankMuState{initial.mean(), initial.cov(), r.eta_m, r.eta_c, 0},
                                              config.weights);
    case StrategyKind::SepCma: {
        Matrix off = initial.cov();
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() != 0.0) throw ValidationError("sep-CMA requires a diagonal initial covariance");
        return std::make_unique<SepCmaDriver>(
            SepCmaState{initial.mean(), initial.cov().diagonal(), r.eta_m, r.eta_c, 0}, config.weights);
    }
    case StrategyKind::FullCma: {
        if (config.weights.kind() != WeightKind::RankBased)
            throw ValidationError("full CMA-ES requires rank-based weights");
        if (!(config.sigma0 > 0.0)) throw ValidationError("initial step-size must be positive");
        const FullCmaRates fr{r.c_sigma, r.d_sigma, r.c_c, r.c_1, r.c_mu};
        return std::make_unique<FullCmaDriver>(FullCmaState::initial(initial.mean(), config.sigma0, initial.cov(), fr),
                                               config.weights);
    }
    case StrategyKind::Ngl: {
        const Chart chart = chart_from_name(config.chart, static_cast<std::size_t>(d), initial.cov());
        return std::make_unique<NglDriver>(from_params(chart, initial), config.weights, config.baseline, r.eta_m,
                                           r.eta_c);
    }
    }
    throw ValidationError("unknown strategy kind");
}

}  // namespace

RunResult run(const StrategyConfig& config, const Objective& objective, std::size_t budget, std::uint64_t seed)
{
    if (config.lambda < 1) throw ValidationError("population size must be positive");
    if (config.weights.is_rank_based() && config.weights.weights().size() != config.lambda)
        throw ValidationError("weight vector length differs from lambda");

    std::unique_ptr<Driver> driver = make_driver(config);
    Rng rng(seed);

    RunResult result;
    result.best_f = -std::numeric_limits<double>::infinity();
    result.best_x = config.mean0;
    auto snapshot = [&] {
        result.mean = driver->mean();
        result.cov = driver->shape();
        result.sigma = driver->sigma();
    };
    snapshot();

    for (std::size_t it = 1; it <= budget; ++it) {
        const GaussianParams params = driver->sampling();
        std::vector<Vector> points = sample(params, config.lambda, rng);
        std::vector<double> fitness(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) fitness[i] = objective(points[i]);
        result.evaluations += points.size();
        for (std::size_t i = 0; i < points.size(); ++i)
            if (fitness[i] > result.best_f) {
                result.best_f = fitness[i];
                result.best_x = points[i];
            }
        Population population(std::move(points), std::move(fitness));
        const double j_estimate = estimate_expected_fitness(population);

        try {
            driver->step(population);
        } catch (const NumericError& e) {
            throw RunFailed(e.what(), result);
        }
        snapshot();

        const auto [lo, hi] = eigen_range(result.cov);
        if (!(lo > 0.0)) throw RunFailed("covariance lost positive definiteness", result);
        result.trace.push_back({it, result.evaluations, result.best_f, result.mean, result.sigma, lo, hi, j_estimate});

        if (config.target && result.best_f >= *config.target) {
            result.reason = Termination::Target;
            return result;
        }
        if (hi / lo > config.condition_cap) {
            result.reason = Termination::ConditionCap;
            return result;
        }
    }
    result.reason = Termination::Budget;
    return result;
}

}  // namespace ngcma
