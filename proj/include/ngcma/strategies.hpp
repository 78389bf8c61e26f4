#pragma once

#include "ngcma/charts.hpp"
#include "ngcma/error.hpp"
#include "ngcma/estimator.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ngcma {

/// An update produced an inadmissible distribution; the rejected parameter
/// vector (stacked theta, or mean followed by vech(C)) is kept for inspection.
class StepRejected : public NumericError {
public:
    StepRejected(const std::string& what, Vector offending) : NumericError(what), offending_(std::move(offending)) {}
    const Vector& offending() const { return offending_; }

private:
    Vector offending_;
};

/// theta_m += eta_m * mean_block, theta_C += eta_C * cov_block; rejects
/// results outside the chart's domain.
ThetaPoint ngl_step(const ThetaPoint& theta, const NaturalGradient& delta, double eta_m, double eta_c);

struct LearningRates {
    double eta_m;
    double eta_c;  // rank-mu only covariance rate
    double c_sigma;
    double d_sigma;
    double c_c;
    double c_1;
    double c_mu;
    double mu_eff;
};

/// Deterministic defaults for dimension d and population size lambda,
/// computed for the default rank weights.
LearningRates default_learning_rates(std::size_t d, std::size_t lambda);

/// Mean of the chi distribution with d degrees of freedom.
double chi_mean(std::size_t d);

// --- rank-mu only CMA-ES -----------------------------------------------------

struct RankMuState {
    Vector mean;
    Matrix cov;
    double eta_m = 1.0;
    double eta_c = 1.0;
    std::size_t iteration = 0;
};

/// m += eta_m sum_i w_i (x_i - m);  C += eta_C sum_i w_i ((x_i - m)(x_i - m)^T - C),
/// both with the pre-update mean. w_i is the scheme's coefficient for point i.
RankMuState rank_mu_step(const RankMuState& state, const Population& population, const WeightScheme& weights);

// --- sep-CMA-ES --------------------------------------------------------------

struct SepCmaState {
    Vector mean;
    Vector variances;
    double eta_m = 1.0;
    double eta_c = 1.0;
    std::size_t iteration = 0;
};

SepCmaState sep_cma_step(const SepCmaState& state, const Population& population, const WeightScheme& weights);

// --- full CMA-ES -------------------------------------------------------------

struct FullCmaRates {
    double c_sigma;
    double d_sigma;
    double c_c;
    double c_1;
    double c_mu;
};

struct FullCmaState {
    Vector mean;
    double sigma = 1.0;
    Matrix cov;
    Vector p_sigma;
    Vector p_c;
    FullCmaRates rates{};
    double chi_d = 0.0;
    std::size_t iteration = 0;

    /// Zero evolution paths and chi_d for the mean's dimension.
    static FullCmaState initial(Vector mean, double sigma, Matrix cov, const FullCmaRates& rates);
};

/// One generation of the CMA-ES with cumulative step-size adaptation and
/// rank-one plus rank-mu covariance update. Requires rank-based weights.
FullCmaState full_cma_step(const FullCmaState& state, const Population& population, const WeightScheme& weights);

// --- optimization loop -------------------------------------------------------

enum class StrategyKind { RankMu, FullCma, SepCma, Ngl };

std::string to_string(StrategyKind kind);

using Objective = std::function<double(const Vector&)>;

struct StrategyConfig {
    StrategyKind kind = StrategyKind::RankMu;
    std::string chart = "fullvech";  // Ngl only
    WeightScheme weights = WeightScheme::default_rank_based(2);
    double baseline = 0.0;
    LearningRates rates{};
    std::size_t lambda = 2;
    Vector mean0;
    Matrix cov0;
    double sigma0 = 1.0;  // FullCma only
    std::optional<double> target;
    double condition_cap = 1e14;
};

struct TraceRecord {
    std::size_t iteration;
    std::size_t evaluations;
    double best_f;
    Vector mean;
    double sigma;
    double cov_eig_min;
    double cov_eig_max;
    double j_estimate;  // mean fitness of this iteration's population
};

enum class Termination { Budget, Target, ConditionCap };

std::string to_string(Termination reason);

struct RunResult {
    std::vector<TraceRecord> trace;
    Termination reason = Termination::Budget;
    Vector mean;
    Matrix cov;
    double sigma = 1.0;
    double best_f;
    Vector best_x;
    std::size_t evaluations = 0;
};

/// A step was rejected mid-run; carries everything recorded up to the failure.
class RunFailed : public NumericError {
public:
    RunFailed(const std::string& what, RunResult partial) : NumericError(what), partial_(std::move(partial)) {}
    const RunResult& partial() const { return partial_; }

private:
    RunResult partial_;
};

/// sample -> evaluate -> rank -> weight -> step, for at most `budget` iterations.
RunResult run(const StrategyConfig& config, const Objective& objective, std::size_t budget, std::uint64_t seed);

}  // namespace ngcma
