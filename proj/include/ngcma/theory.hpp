#pragma once

#include "ngcma/charts.hpp"
#include "ngcma/quadrature.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ngcma {

/// A fitness function that is required to be strictly positive. Positivity is
/// checked at every point it is evaluated on.
class PositiveFitness {
public:
    explicit PositiveFitness(std::function<double(const Vector&)> f, std::string name = "f")
        : f_(std::move(f)), name_(std::move(name))
    {
    }

    /// Throws DomainError if f(x) is not finite and positive.
    double operator()(const Vector& x) const;
    const std::string& name() const { return name_; }

private:
    std::function<double(const Vector&)> f_;
    std::string name_;
};

double expected_fitness_quadrature(const PositiveFitness& f, const GaussianParams& params,
                                   const QuadratureSpec& spec = {});

/// E[f(x) F^{-1} grad ln pi(x; theta)] by quadrature.
NaturalGradient exact_natural_gradient(const PositiveFitness& f, const ThetaPoint& theta,
                                       const QuadratureSpec& spec = {});

/// Q(theta, theta') = E_{q_theta}[ln pi(x; theta')] with q_theta = f pi_theta / J(theta).
double q_function(const ThetaPoint& theta, const ThetaPoint& theta_prime, const PositiveFitness& f,
                  const QuadratureSpec& spec = {});

enum class ScanAxis { Covariance, Mean };

struct ScanRow {
    double eta_m;
    double eta_c;
    double q;   // NaN when inadmissible
    double dq;  // analytic derivative along the scanned axis; NaN in exploratory mode
    bool admissible;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    double j = 0.0;
    double inv_j = 0.0;
    bool verified = true;        // false on exploratory charts
    std::size_t violations = 0;  // non-increasing steps for eta in (0, 1/J)
    std::optional<double> argmax_eta;
};

/// Q along theta'(eta_m, eta_C) = theta + (eta_m g_m, eta_C g_C) with g the
/// exact natural gradient. The Covariance axis fixes eta_m = 0, the Mean axis
/// fixes eta_C = fixed_eta_c. FullVech is the verified mode; Exponential is
/// exploratory. Other charts throw ValidationError. The grid must be
/// strictly increasing and non-negative.
ScanResult theorem2_scan(const PositiveFitness& f, const ThetaPoint& theta, std::span<const double> eta_grid,
                         const QuadratureSpec& spec = {}, ScanAxis axis = ScanAxis::Covariance,
                         double fixed_eta_c = 0.0);

/// `points` evenly spaced values on (0, (1 + overshoot)/J], overshoot 0.25.
std::vector<double> default_eta_grid(double inv_j, std::size_t points, double overshoot = 0.25);

/// (E[f x] / J, E[f (x - m)(x - m)^T] / J) under pi_theta. Requires FullVech.
GaussianParams em_target(const PositiveFitness& f, const ThetaPoint& theta, const QuadratureSpec& spec = {});

struct ImprovementTerms {
    double lnj_gain;   // ln J(theta') - ln J(theta)
    double kl_q_term;  // KL(q_theta || q_theta')
    double kl_pi_gap;  // KL(q_theta || pi_theta) - KL(q_theta || pi_theta')
    double residual;   // lnj_gain - kl_q_term - kl_pi_gap
};

ImprovementTerms improvement_decomposition(const ThetaPoint& theta, const ThetaPoint& theta_prime,
                                           const PositiveFitness& f, const QuadratureSpec& spec = {});

}  // namespace ngcma
