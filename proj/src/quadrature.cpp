#include "ngcma/quadrature.hpp"

#include "ngcma/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace ngcma {

namespace {

// Orthonormal probabilists' Hermite polynomials p_0..p_n at x.
void hermite_orthonormal(double x, std::size_t n, double& pn, double& pn1, double& sum_sq)
{
    double prev = 0.0;
    double cur = 1.0;
    sum_sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sum_sq += cur * cur;
        const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(static_cast<double>(k + 1));
        prev = cur;
        cur = next;
    }
    pn = cur;
    pn1 = prev;
}

}  // namespace

GaussHermiteRule gauss_hermite(std::size_t n)
{
    if (n == 0) throw ValidationError("Gauss-Hermite rule needs at least one node");
    Matrix jacobi = Matrix::Zero(n, n);
    for (std::size_t k = 1; k < n; ++k) {
        const double b = std::sqrt(static_cast<double>(k));
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
    if (eig.info() != Eigen::Success) throw NumericError("Gauss-Hermite eigenproblem failed");

    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = eig.eigenvalues()(static_cast<Eigen::Index>(i));
        double pn = 0.0, pn1 = 0.0, sum_sq = 0.0;
        for (int iter = 0; iter < 3; ++iter) {
            hermite_orthonormal(x, n, pn, pn1, sum_sq);
            x -= pn / (std::sqrt(static_cast<double>(n)) * pn1);
        }
        rule.nodes[i] = x;
    }
    for (std::size_t i = 0; i < n / 2; ++i) {
        const double a = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
        rule.nodes[i] = -a;
        rule.nodes[n - 1 - i] = a;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pn = 0.0, pn1 = 0.0, sum_sq = 0.0;
        hermite_orthonormal(rule.nodes[i], n, pn, pn1, sum_sq);
        rule.weights[i] = 1.0 / sum_sq;
        total += rule.weights[i];
    }
    for (double& w : rule.weights) w /= total;
    return rule;
}

void validate_spec(const QuadratureSpec& spec, std::size_t dim)
{
    if (spec.nodes_per_dim < 8) throw ValidationError("quadrature needs at least 8 nodes per dimension");
    if (dim == 0 || dim > kMaxQuadratureDim)
        throw ValidationError("quadrature supports dimensions 1 to 3, got " + std::to_string(dim));
    std::size_t total = 1;
    for (std::size_t i = 0; i < dim; ++i) {
        total *= spec.nodes_per_dim;
        if (total > kMaxQuadratureNodes) throw ValidationError("quadrature grid exceeds 64^3 points");
    }
}

std::vector<QuadratureNode> quadrature_nodes(const GaussianParams& params, const QuadratureSpec& spec)
{
    const std::size_t d = params.dim();
    validate_spec(spec, d);
    const GaussHermiteRule rule = gauss_hermite(spec.nodes_per_dim);
    const std::size_t n = spec.nodes_per_dim;
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= n;

    const Matrix l = params.chol();
    std::vector<QuadratureNode> out;
    out.reserve(total);
    std::vector<std::size_t> idx(d, 0);
    Vector z(d);
    for (std::size_t flat = 0; flat < total; ++flat) {
        double w = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            z(static_cast<Eigen::Index>(k)) = rule.nodes[idx[k]];
            w *= rule.weights[idx[k]];
        }
        out.push_back({params.mean() + l * z, w});
        for (std::size_t k = 0; k < d; ++k) {
            if (++idx[k] < n) break;
            idx[k] = 0;
        }
    }
    return out;
}

}  // namespace ngcma
