#pragma once

#include "ngcma/charts.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ngcma {

/// Ranks by descending fitness (1 = best); ties go to the lower index.
/// Throws ValidationError on NaN.
std::vector<std::size_t> rank(std::span<const double> fitnesses);

/// Sampled points with their fitness values and ranks.
class Population {
public:
    Population(std::vector<Vector> points, std::vector<double> fitnesses);

    std::size_t size() const { return points_.size(); }
    std::size_t dim() const { return static_cast<std::size_t>(points_.front().size()); }
    const std::vector<Vector>& points() const { return points_; }
    const std::vector<double>& fitnesses() const { return fitnesses_; }
    const std::vector<std::size_t>& ranks() const { return ranks_; }

private:
    std::vector<Vector> points_;
    std::vector<double> fitnesses_;
    std::vector<std::size_t> ranks_;
};

enum class WeightKind { RawFitness, NormalizedFitness, RankBased, Active };

/// How fitness values become the coefficients of the gradient estimate.
class WeightScheme {
public:
    static WeightScheme raw_fitness() { return WeightScheme(WeightKind::RawFitness, {}); }
    static WeightScheme normalized_fitness() { return WeightScheme(WeightKind::NormalizedFitness, {}); }
    /// Weights by rank; requires 0 <= w_i <= w_j <= 1 for i > j and a unit sum.
    static WeightScheme rank_based(std::vector<double> weights);
    /// Weights by rank that sum to zero (possibly negative).
    static WeightScheme active(std::vector<double> weights);

    /// ln(lambda/2 + 0.5) - ln i for i <= floor(lambda/2), zero afterwards, normalized.
    static WeightScheme default_rank_based(std::size_t lambda);
    /// Default rank weights minus 1/lambda.
    static WeightScheme default_active(std::size_t lambda);

    WeightKind kind() const { return kind_; }
    const std::vector<double>& weights() const { return weights_; }
    bool is_rank_based() const { return kind_ == WeightKind::RankBased || kind_ == WeightKind::Active; }

private:
    WeightScheme(WeightKind kind, std::vector<double> weights) : kind_(kind), weights_(std::move(weights)) {}

    WeightKind kind_;
    std::vector<double> weights_;
};

std::vector<double> default_rank_weights(std::size_t lambda);

/// Coefficient of each point (in population order):
///   RawFitness         f_i / lambda
///   NormalizedFitness  f_i / sum_j f_j   (all f_j > 0)
///   RankBased/Active   w_{R_i}
std::vector<double> shaping_weights(std::size_t lambda, const WeightScheme& scheme, const Population& population);

/// Monte-Carlo natural-gradient estimate sum_i coeff_i * F^{-1} grad ln pi(x_i).
/// The baseline enters only the RawFitness coefficients, (f_i - b)/lambda.
NaturalGradient estimate_natural_gradient(const ThetaPoint& theta, const Population& population,
                                          const WeightScheme& scheme, double baseline = 0.0);

/// Weighted sum of per-point natural gradients in index order.
NaturalGradient weighted_natural_gradient(const ThetaPoint& theta, const Population& population,
                                          std::span<const double> coefficients);

double estimate_expected_fitness(const Population& population);

}  // namespace ngcma
