#include "ngcma/theory.hpp"

#include "ngcma/error.hpp"

#include <cmath>
#include <limits>

namespace ngcma {

double PositiveFitness::operator()(const Vector& x) const
{
    const double v = f_(x);
    if (!std::isfinite(v) || !(v > 0.0))
        throw DomainError("fitness '" + name_ + "' is not positive at a quadrature node");
    return v;
}

namespace {

// Quadrature nodes of pi_theta with the tilted weights w_k f(x_k) / J.
struct Tilted {
    std::vector<Vector> x;
    std::vector<double> fx;
    std::vector<double> qw;
    double j = 0.0;
};

Tilted tilt(const PositiveFitness& f, const GaussianParams& params, const QuadratureSpec& spec)
{
    const std::vector<QuadratureNode> nodes = quadrature_nodes(params, spec);
    Tilted t;
    t.x.reserve(nodes.size());
    t.fx.reserve(nodes.size());
    t.qw.reserve(nodes.size());
    for (const auto& n : nodes) {
        const double v = f(n.x);
        t.x.push_back(n.x);
        t.fx.push_back(v);
        t.qw.push_back(n.weight * v);
        t.j += n.weight * v;
    }
    if (!(t.j > 0.0) || !std::isfinite(t.j)) throw DomainError("expected fitness is not positive");
    for (double& w : t.qw) w /= t.j;
    return t;
}

double tilted_mean_log_density(const Tilted& t, const GaussianParams& params)
{
    double q = 0.0;
    for (std::size_t k = 0; k < t.x.size(); ++k) q += t.qw[k] * log_density(params, t.x[k]);
    return q;
}

}  // namespace

double expected_fitness_quadrature(const PositiveFitness& f, const GaussianParams& params, const QuadratureSpec& spec)
{
    double j = 0.0;
    for (const auto& n : quadrature_nodes(params, spec)) j += n.weight * f(n.x);
    if (!(j > 0.0)) throw DomainError("expected fitness is not positive");
    return j;
}

NaturalGradient exact_natural_gradient(const PositiveFitness& f, const ThetaPoint& theta, const QuadratureSpec& spec)
{
    const GaussianParams params = to_params(theta);
    NaturalGradient sum = NaturalGradient::zeros_like(theta.chart());
    for (const auto& n : quadrature_nodes(params, spec)) {
        const double c = n.weight * f(n.x);
        const NaturalGradient term = natural_gradient_loglik(theta, n.x);
        sum.mean_block += c * term.mean_block;
        sum.cov_block += c * term.cov_block;
    }
    return sum;
}

double q_function(const ThetaPoint& theta, const ThetaPoint& theta_prime, const PositiveFitness& f,
                  const QuadratureSpec& spec)
{
    if (theta.chart().dim() != theta_prime.chart().dim())
        throw ValidationError("Q-function arguments differ in dimension");
    return tilted_mean_log_density(tilt(f, to_params(theta), spec), to_params(theta_prime));
}

std::vector<double> default_eta_grid(double inv_j, std::size_t points, double overshoot)
{
    if (!(inv_j > 0.0)) throw ValidationError("1/J must be positive");
    std::vector<double> grid(points);
    const double top = (1.0 + overshoot) * inv_j;
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = top * static_cast<double>(i + 1) / static_cast<double>(points);
    return grid;
}

ScanResult theorem2_scan(const PositiveFitness& f, const ThetaPoint& theta, std::span<const double> eta_grid,
                         const QuadratureSpec& spec, ScanAxis axis, double fixed_eta_c)
{
    const ChartKind kind = theta.chart().kind();
    if (kind != ChartKind::FullVech && kind != ChartKind::Exponential)
        throw ValidationError("learning-rate scan is defined for the fullvech chart (exponential: exploratory only)");
    for (std::size_t i = 0; i < eta_grid.size(); ++i) {
        if (!(eta_grid[i] >= 0.0) || !std::isfinite(eta_grid[i]))
            throw ValidationError("learning-rate grid values must be finite and non-negative");
        if (i > 0 && !(eta_grid[i] > eta_grid[i - 1]))
            throw ValidationError("learning-rate grid must be strictly increasing");
    }

    ScanResult result;
    result.verified = kind == ChartKind::FullVech;
    const GaussianParams params = to_params(theta);
    const Tilted t = tilt(f, params, spec);
    result.j = t.j;
    result.inv_j = 1.0 / t.j;
    const NaturalGradient g = exact_natural_gradient(f, theta, spec);
    const auto cd = static_cast<Eigen::Index>(theta.chart().cov_dim());

    double best = -std::numeric_limits<double>::infinity();
    for (double eta : eta_grid) {
        ScanRow row{};
        row.eta_m = axis == ScanAxis::Mean ? eta : 0.0;
        row.eta_c = axis == ScanAxis::Covariance ? eta : fixed_eta_c;
        row.q = std::numeric_limits<double>::quiet_NaN();
        row.dq = std::numeric_limits<double>::quiet_NaN();
        row.admissible = false;
        try {
            const ThetaPoint moved(theta.chart(), theta.theta_m() + row.eta_m * g.mean_block,
                                   theta.theta_c() + row.eta_c * g.cov_block);
            const GaussianParams p = to_params(moved);
            row.q = tilted_mean_log_density(t, p);
            row.admissible = true;
            if (result.verified) {
                if (axis == ScanAxis::Covariance) {
                    const Matrix fc = fisher_matrix(moved).bottomRightCorner(cd, cd);
                    row.dq = (result.inv_j - eta) * g.cov_block.dot(fc * g.cov_block);
                } else {
                    row.dq = (result.inv_j - eta) * g.mean_block.dot(p.solve(g.mean_block));
                }
            }
        } catch (const DomainError&) {
        } catch (const NumericError&) {
        }
        if (row.admissible && row.q > best) {
            best = row.q;
            result.argmax_eta = eta;
        }
        result.rows.push_back(row);
    }

    std::optional<double> previous;
    for (const auto& row : result.rows) {
        const double eta = axis == ScanAxis::Mean ? row.eta_m : row.eta_c;
        if (!(eta > 0.0 && eta < result.inv_j)) continue;
        if (!row.admissible) {
            ++result.violations;
            continue;
        }
        if (previous && !(row.q > *previous)) ++result.violations;
        previous = row.q;
    }
    return result;
}

GaussianParams em_target(const PositiveFitness& f, const ThetaPoint& theta, const QuadratureSpec& spec)
{
    if (theta.chart().kind() != ChartKind::FullVech) throw ValidationError("EM target requires the fullvech chart");
    const GaussianParams params = to_params(theta);
    const Tilted t = tilt(f, params, spec);
    const auto d = static_cast<Eigen::Index>(params.dim());
    Vector m = Vector::Zero(d);
    Matrix c = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < t.x.size(); ++k) {
        const Vector y = t.x[k] - params.mean();
        m += t.qw[k] * t.x[k];
        c += t.qw[k] * (y * y.transpose());
    }
    return GaussianParams(m, c);
}

ImprovementTerms improvement_decomposition(const ThetaPoint& theta, const ThetaPoint& theta_prime,
                                           const PositiveFitness& f, const QuadratureSpec& spec)
{
    if (!(theta.chart() == theta_prime.chart())) throw ValidationError("decomposition needs both points on one chart");
    const GaussianParams p = to_params(theta);
    const GaussianParams p_prime = to_params(theta_prime);
    const Tilted t = tilt(f, p, spec);
    const double j_prime = expected_fitness_quadrature(f, p_prime, spec);
    const double ln_j = std::log(t.j);
    const double ln_j_prime = std::log(j_prime);

    double kl_q = 0.0;
    double kl_pi = 0.0;
    double kl_pi_prime = 0.0;
    for (std::size_t k = 0; k < t.x.size(); ++k) {
        const double ln_f = std::log(t.fx[k]);
        const double ln_pi = log_density(p, t.x[k]);
        const double ln_pi_prime = log_density(p_prime, t.x[k]);
        const double ln_q = ln_f + ln_pi - ln_j;
        const double ln_q_prime = ln_f + ln_pi_prime - ln_j_prime;
        kl_q += t.qw[k] * (ln_q - ln_q_prime);
        kl_pi += t.qw[k] * (ln_q - ln_pi);
        kl_pi_prime += t.qw[k] * (ln_q - ln_pi_prime);
    }
    ImprovementTerms out{};
    out.lnj_gain = ln_j_prime - ln_j;
    out.kl_q_term = kl_q;
    out.kl_pi_gap = kl_pi - kl_pi_prime;
    out.residual = out.lnj_gain - out.kl_q_term - out.kl_pi_gap;
    return out;
}

}  // namespace ngcma
