#include "ngcma/estimator.hpp"

#include "ngcma/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ngcma {

std::vector<std::size_t> rank(std::span<const double> fitnesses)
{
    if (fitnesses.empty()) throw ValidationError("cannot rank an empty population");
    for (double f : fitnesses)
        if (std::isnan(f)) throw ValidationError("NaN fitness value");
    std::vector<std::size_t> order(fitnesses.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fitnesses[a] > fitnesses[b]; });
    std::vector<std::size_t> ranks(fitnesses.size());
    for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = r + 1;
    return ranks;
}

Population::Population(std::vector<Vector> points, std::vector<double> fitnesses)
    : points_(std::move(points)), fitnesses_(std::move(fitnesses))
{
    if (points_.empty()) throw ValidationError("population must not be empty");
    if (points_.size() != fitnesses_.size())
        throw ValidationError("population has " + std::to_string(points_.size()) + " points but " +
                              std::to_string(fitnesses_.size()) + " fitness values");
    for (const auto& p : points_)
        if (p.size() != points_.front().size()) throw ValidationError("population points differ in dimension");
    ranks_ = rank(fitnesses_);
}

namespace {

constexpr double kWeightSumTolerance = 1e-12;

}  // namespace

WeightScheme WeightScheme::rank_based(std::vector<double> weights)
{
    if (weights.empty()) throw ValidationError("rank weights must not be empty");
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0 && weights[i] <= 1.0)) throw ValidationError("rank weights must lie in [0, 1]");
        if (i > 0 && weights[i] > weights[i - 1]) throw ValidationError("rank weights must be non-increasing");
        sum += weights[i];
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) throw ValidationError("rank weights must sum to one");
    return WeightScheme(WeightKind::RankBased, std::move(weights));
}

WeightScheme WeightScheme::active(std::vector<double> weights)
{
    if (weights.empty()) throw ValidationError("active weights must not be empty");
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w)) throw ValidationError("active weights must be finite");
        sum += w;
    }
    if (std::abs(sum) > kWeightSumTolerance) throw ValidationError("active weights must sum to zero");
    return WeightScheme(WeightKind::Active, std::move(weights));
}

std::vector<double> default_rank_weights(std::size_t lambda)
{
    if (lambda == 0) throw ValidationError("population size must be positive");
    const std::size_t mu = std::max<std::size_t>(1, lambda / 2);
    std::vector<double> w(lambda, 0.0);
    const double base = std::log(static_cast<double>(lambda) / 2.0 + 0.5);
    double sum = 0.0;
    for (std::size_t i = 0; i < mu; ++i) {
        w[i] = base - std::log(static_cast<double>(i + 1));
        sum += w[i];
    }
    for (std::size_t i = 0; i < mu; ++i) w[i] /= sum;
    return w;
}

WeightScheme WeightScheme::default_rank_based(std::size_t lambda) { return rank_based(default_rank_weights(lambda)); }

WeightScheme WeightScheme::default_active(std::size_t lambda)
{
    std::vector<double> w = default_rank_weights(lambda);
    const double shift = 1.0 / static_cast<double>(lambda);
    for (double& v : w) v -= shift;
    return active(std::move(w));
}

std::vector<double> shaping_weights(std::size_t lambda, const WeightScheme& scheme, const Population& population)
{
    if (lambda != population.size())
        throw ValidationError("population size " + std::to_string(population.size()) + " differs from lambda " +
                              std::to_string(lambda));
    const auto& f = population.fitnesses();
    std::vector<double> coeff(lambda);
    switch (scheme.kind()) {
    case WeightKind::RawFitness:
        for (std::size_t i = 0; i < lambda; ++i) coeff[i] = f[i] / static_cast<double>(lambda);
        break;
    case WeightKind::NormalizedFitness: {
        double total = 0.0;
        for (double v : f) {
            if (!(v > 0.0)) throw DomainError("normalized fitness weights require positive fitness values");
            total += v;
        }
        if (!(total > 0.0) || !std::isfinite(total)) throw DomainError("total fitness must be positive");
        for (std::size_t i = 0; i < lambda; ++i) coeff[i] = f[i] / total;
        break;
    }
    case WeightKind::RankBased:
    case WeightKind::Active: {
        if (scheme.weights().size() != lambda)
            throw ValidationError("weight vector has " + std::to_string(scheme.weights().size()) +
                                  " entries, population has " + std::to_string(lambda));
        const auto& ranks = population.ranks();
        for (std::size_t i = 0; i < lambda; ++i) coeff[i] = scheme.weights()[ranks[i] - 1];
        break;
    }
    }
    return coeff;
}

NaturalGradient weighted_natural_gradient(const ThetaPoint& theta, const Population& population,
                                          std::span<const double> coefficients)
{
    if (population.dim() != theta.chart().dim())
        throw ValidationError("population dimension does not match chart");
    if (coefficients.size() != population.size())
        throw ValidationError("coefficient count does not match population");
    NaturalGradient sum = NaturalGradient::zeros_like(theta.chart());
    for (std::size_t i = 0; i < population.size(); ++i) {
        const NaturalGradient term = natural_gradient_loglik(theta, population.points()[i]);
        sum.mean_block += coefficients[i] * term.mean_block;
        sum.cov_block += coefficients[i] * term.cov_block;
    }
    return sum;
}

NaturalGradient estimate_natural_gradient(const ThetaPoint& theta, const Population& population,
                                          const WeightScheme& scheme, double baseline)
{
    const std::size_t lambda = population.size();
    std::vector<double> coeff;
    if (scheme.kind() == WeightKind::RawFitness) {
        coeff.resize(lambda);
        for (std::size_t i = 0; i < lambda; ++i)
            coeff[i] = (population.fitnesses()[i] - baseline) / static_cast<double>(lambda);
    } else {
        coeff = shaping_weights(lambda, scheme, population);
    }
    return weighted_natural_gradient(theta, population, coeff);
}

double estimate_expected_fitness(const Population& population)
{
    const auto& f = population.fitnesses();
    return std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
}

}  // namespace ngcma
