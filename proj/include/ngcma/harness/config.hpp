#pragma once

#include "ngcma/strategies.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ngcma::harness {

/// Unset entries mean "use the default for (d, lambda)".
struct RateOverrides {
    std::optional<double> eta_m;
    std::optional<double> eta_c;
    std::optional<double> c_sigma;
    std::optional<double> d_sigma;
    std::optional<double> c_c;
    std::optional<double> c_1;
    std::optional<double> c_mu;

    bool operator==(const RateOverrides&) const = default;
};

struct PlotConfig {
    std::string kind = "qgrid";  // qgrid | runcurve
    std::size_t eta_points = 41;
    double overshoot = 0.25;
    std::string chart = "fullvech";
    std::size_t nodes = 64;

    bool operator==(const PlotConfig&) const = default;
};

/// Fully resolved run description. Parsing expands every default (lambda,
/// mean, covariance) so a parsed config serializes to an explicit file.
struct RunConfig {
    std::string objective = "sphere";
    double objective_scale = 1.0;
    std::size_t dim = 2;
    std::string strategy = "rank-mu";  // rank-mu | full-cma | sep-cma | ngl:<chart>
    std::string weights = "rank";      // rank | active | raw | normalized
    std::size_t lambda = 0;
    double baseline = 0.0;
    RateOverrides rates;
    std::vector<double> mean;  // dim entries
    std::vector<double> cov;   // dim * dim entries, row-major
    double sigma = 1.0;
    std::uint64_t seed = 1;
    std::size_t budget = 200;
    std::optional<double> target;
    std::string output = "trace.csv";
    PlotConfig plot;

    bool operator==(const RunConfig&) const = default;
};

/// 4 + floor(3 ln d).
std::size_t default_lambda(std::size_t dim);

/// INI text with sections [objective] [problem] [strategy] [rates] [init]
/// [run] [plot]. Throws ConfigError on syntax errors, unknown keys and
/// invalid values.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every key, numbers with 17 significant digits.
std::string serialize(const RunConfig& config);

/// Resolved strategy settings; default rates come from default_learning_rates.
StrategyConfig to_strategy_config(const RunConfig& config);

std::string format_double(double v);

}  // namespace ngcma::harness
