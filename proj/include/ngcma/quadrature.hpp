#pragma once

#include "ngcma/gaussian.hpp"

#include <cstddef>
#include <vector>

namespace ngcma {

/// Gauss-Hermite rule for the standard normal weight; weights sum to one.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(std::size_t n);

struct QuadratureSpec {
    std::size_t nodes_per_dim = 64;
};

constexpr std::size_t kMaxQuadratureDim = 3;
constexpr std::size_t kMaxQuadratureNodes = 64 * 64 * 64;

/// Throws ValidationError unless nodes_per_dim >= 8, dim <= 3 and the tensor
/// grid has at most 64^3 points.
void validate_spec(const QuadratureSpec& spec, std::size_t dim);

struct QuadratureNode {
    Vector x;
    double weight;
};

/// Tensor-grid nodes x = m + L z against N(m, C).
std::vector<QuadratureNode> quadrature_nodes(const GaussianParams& params, const QuadratureSpec& spec);

}  // namespace ngcma
