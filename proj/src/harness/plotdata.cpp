#include "ngcma/harness/plotdata.hpp"

#include "ngcma/error.hpp"
#include "ngcma/harness/objectives.hpp"
#include "ngcma/harness/trace_io.hpp"
#include "ngcma/theory.hpp"

#include <ostream>

namespace ngcma::harness {

void write_qgrid(std::ostream& out, const RunConfig& config)
{
    const ObjectiveInfo obj = make_objective(config.objective, config.objective_scale);
    if (!obj.positive) throw ConfigError("qgrid needs a positive objective (one of the exp- wrappers)");
    if (config.dim > kMaxQuadratureDim) throw ConfigError("qgrid supports dimensions up to 3");
    const StrategyConfig sc = to_strategy_config(config);
    const GaussianParams params(sc.mean0, sc.cov0);
    const Chart chart = chart_from_name(config.plot.chart, config.dim, params.cov());
    const ThetaPoint theta = from_params(chart, params);
    const QuadratureSpec spec{config.plot.nodes};
    const PositiveFitness f(obj.fn, obj.name);

    write_comment_header(out, config, "qgrid");
    out << "eta_m,eta_c,q\n";
    if (config.plot.eta_points == 0) return;

    double j = 0.0;
    try {
        j = expected_fitness_quadrature(f, params, spec);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("objective is not positive on the quadrature grid: ") + e.what());
    }
    const std::vector<double> grid = default_eta_grid(1.0 / j, config.plot.eta_points, config.plot.overshoot);
    std::vector<std::vector<ScanRow>> columns;
    columns.reserve(grid.size());
    for (double eta_c : grid) columns.push_back(theorem2_scan(f, theta, grid, spec, ScanAxis::Mean, eta_c).rows);
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const ScanRow& r = columns[k][i];
            out << format_double(r.eta_m) << ',' << format_double(r.eta_c) << ',' << format_double(r.q) << "\n";
        }
}

void write_runcurve(std::ostream& out, const RunConfig& config, std::uint64_t seed)
{
    const ObjectiveInfo obj = make_objective(config.objective, config.objective_scale);
    const StrategyConfig sc = to_strategy_config(config);
    const RunResult result = run(sc, obj.fn, config.budget, seed);
    write_comment_header(out, config, "runcurve");
    out << "iteration,j_estimate\n";
    for (const auto& r : result.trace) out << r.iteration << ',' << format_double(r.j_estimate) << "\n";
}

}  // namespace ngcma::harness
