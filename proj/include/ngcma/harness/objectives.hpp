#pragma once

#include "ngcma/strategies.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ngcma::harness {

double sphere(const Vector& x);
/// -sum_i 10^{6 (i-1)/(d-1)} x_i^2; the single coefficient is 1 when d = 1.
double ellipsoid(const Vector& x);
double rosenbrock(const Vector& x);
double rastrigin(const Vector& x);

struct ObjectiveInfo {
    std::string name;
    Objective fn;
    std::optional<double> optimum;
    bool positive = false;
};

/// Base names plus their "exp-" wrappers, x -> exp(scale * f(x)).
std::vector<std::string> builtin_objectives();

/// Throws ConfigError for unknown names.
ObjectiveInfo make_objective(const std::string& name, double scale = 1.0);

}  // namespace ngcma::harness
