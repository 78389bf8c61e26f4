#include "ngcma/harness/config.hpp"

#include "ngcma/error.hpp"
#include "ngcma/harness/objectives.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ngcma::harness {

namespace pt = boost::property_tree;

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::size_t default_lambda(std::size_t dim)
{
    return 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(dim))));
}

namespace {

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> s = {
        {"objective", {"name", "scale"}},
        {"problem", {"dim"}},
        {"strategy", {"kind", "weights", "lambda", "baseline"}},
        {"rates", {"eta_m", "eta_c", "c_sigma", "d_sigma", "c_c", "c_1", "c_mu"}},
        {"init", {"mean", "cov", "sigma"}},
        {"run", {"seed", "budget", "target", "output"}},
        {"plot", {"kind", "eta_points", "overshoot", "chart", "nodes"}},
    };
    return s;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError("'" + key + "' is not a number: '" + text + "'");
    return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError("'" + key + "' is not a non-negative integer: '" + text + "'");
    return v;
}

std::vector<double> to_list(const std::string& key, const std::string& text)
{
    std::string t = text;
    for (char& c : t)
        if (c == ',') c = ' ';
    std::istringstream in(t);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(to_double(key, tok));
    return out;
}

std::optional<double> to_optional(const std::string& key, const std::string& text, const char* none_word)
{
    if (trim(text) == none_word) return std::nullopt;
    return to_double(key, text);
}

std::string join(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += format_double(v[i]);
    }
    return out;
}

std::string optional_text(const std::optional<double>& v, const char* none_word)
{
    return v ? format_double(*v) : std::string(none_word);
}

void check_strategy(const std::string& kind, std::size_t dim)
{
    if (kind == "rank-mu" || kind == "full-cma" || kind == "sep-cma") return;
    if (kind.rfind("ngl:", 0) == 0) {
        try {
            (void)chart_from_name(kind.substr(4), dim, Matrix::Identity(dim, dim));
            return;
        } catch (const Error& e) {
            throw ConfigError("unknown chart in strategy '" + kind + "': " + e.what());
        }
    }
    throw ConfigError("unknown strategy '" + kind + "' (rank-mu, full-cma, sep-cma, ngl:<chart>)");
}

void check_config(RunConfig& c)
{
    if (c.dim < 1) throw ConfigError("dim must be at least 1");
    (void)make_objective(c.objective, c.objective_scale);
    check_strategy(c.strategy, c.dim);
    if (c.weights != "rank" && c.weights != "active" && c.weights != "raw" && c.weights != "normalized")
        throw ConfigError("unknown weight scheme '" + c.weights + "' (rank, active, raw, normalized)");
    if (c.lambda == 0) c.lambda = default_lambda(c.dim);
    if ((c.weights == "rank" || c.weights == "active") && c.lambda < 2)
        throw ConfigError("rank-based weights need lambda >= 2");
    if (c.strategy == "full-cma" && c.weights != "rank") throw ConfigError("full-cma requires rank weights");
    if (c.strategy == "full-cma" && c.lambda < 2) throw ConfigError("full-cma needs lambda >= 2");
    if (!std::isfinite(c.baseline)) throw ConfigError("baseline must be finite");

    if (c.mean.empty()) c.mean.assign(c.dim, 0.0);
    if (c.mean.size() == 1 && c.dim > 1) c.mean.assign(c.dim, c.mean.front());
    if (c.mean.size() != c.dim) throw ConfigError("init mean needs 1 or dim values");

    const std::size_t d = c.dim;
    std::vector<double> full(d * d, 0.0);
    if (c.cov.empty()) {
        for (std::size_t i = 0; i < d; ++i) full[i * d + i] = 1.0;
    } else if (c.cov.size() == 1) {
        for (std::size_t i = 0; i < d; ++i) full[i * d + i] = c.cov.front();
    } else if (c.cov.size() == d * d) {
        full = c.cov;
    } else if (c.cov.size() == d) {
        for (std::size_t i = 0; i < d; ++i) full[i * d + i] = c.cov[i];
    } else {
        throw ConfigError("init cov needs 1, dim or dim*dim values");
    }
    c.cov = std::move(full);
    try {
        (void)GaussianParams(Eigen::Map<const Vector>(c.mean.data(), static_cast<Eigen::Index>(d)),
                             Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                                 c.cov.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
    } catch (const Error& e) {
        throw ConfigError(std::string("init covariance is not admissible: ") + e.what());
    }
    if (!(c.sigma > 0.0) || !std::isfinite(c.sigma)) throw ConfigError("init sigma must be positive");
    if (c.target && std::isnan(*c.target)) throw ConfigError("target must not be NaN");
    if (c.output.empty()) throw ConfigError("run output must not be empty");

    if (c.plot.kind != "qgrid" && c.plot.kind != "runcurve")
        throw ConfigError("unknown plot kind '" + c.plot.kind + "' (qgrid, runcurve)");
    if (c.plot.chart != "fullvech" && c.plot.chart != "exponential")
        throw ConfigError("plot chart must be fullvech or exponential");
    if (!(c.plot.overshoot >= 0.0) || !std::isfinite(c.plot.overshoot))
        throw ConfigError("plot overshoot must be non-negative");
    if (c.plot.nodes < 8) throw ConfigError("plot nodes must be at least 8");
}

}  // namespace

RunConfig parse_config(std::istream& in)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }

    RunConfig c;
    for (const auto& [section, body] : tree) {
        const auto it = schema().find(section);
        if (it == schema().end()) throw ConfigError("unknown config section [" + section + "]");
        if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
        for (const auto& [key, node] : body) {
            if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            const std::string full = section + "." + key;
            const std::string v = trim(node.data());
            if (section == "objective") {
                if (key == "name") c.objective = v;
                else c.objective_scale = to_double(full, v);
            } else if (section == "problem") {
                c.dim = static_cast<std::size_t>(to_u64(full, v));
            } else if (section == "strategy") {
                if (key == "kind") c.strategy = v;
                else if (key == "weights") c.weights = v;
                else if (key == "lambda") {
                    c.lambda = v == "default" ? 0 : static_cast<std::size_t>(to_u64(full, v));
                    if (v != "default" && c.lambda == 0) throw ConfigError("lambda must be positive");
                }
                else c.baseline = to_double(full, v);
            } else if (section == "rates") {
                auto& r = c.rates;
                std::optional<double>* slot = key == "eta_m"     ? &r.eta_m
                                              : key == "eta_c"   ? &r.eta_c
                                              : key == "c_sigma" ? &r.c_sigma
                                              : key == "d_sigma" ? &r.d_sigma
                                              : key == "c_c"     ? &r.c_c
                                              : key == "c_1"     ? &r.c_1
                                                                 : &r.c_mu;
                *slot = to_optional(full, v, "default");
            } else if (section == "init") {
                if (key == "mean") c.mean = to_list(full, v);
                else if (key == "cov") c.cov = v == "identity" ? std::vector<double>{} : to_list(full, v);
                else c.sigma = to_double(full, v);
            } else if (section == "run") {
                if (key == "seed") c.seed = to_u64(full, v);
                else if (key == "budget") c.budget = static_cast<std::size_t>(to_u64(full, v));
                else if (key == "target") c.target = to_optional(full, v, "none");
                else c.output = v;
            } else {
                auto& p = c.plot;
                if (key == "kind") p.kind = v;
                else if (key == "eta_points") p.eta_points = static_cast<std::size_t>(to_u64(full, v));
                else if (key == "overshoot") p.overshoot = to_double(full, v);
                else if (key == "chart") p.chart = v;
                else p.nodes = static_cast<std::size_t>(to_u64(full, v));
            }
        }
    }
    check_config(c);
    return c;
}

RunConfig parse_config_string(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    return parse_config(in);
}

std::string serialize(const RunConfig& c)
{
    std::ostringstream o;
    o << "[objective]\n"
      << "name = " << c.objective << "\n"
      << "scale = " << format_double(c.objective_scale) << "\n\n"
      << "[problem]\n"
      << "dim = " << c.dim << "\n\n"
      << "[strategy]\n"
      << "kind = " << c.strategy << "\n"
      << "weights = " << c.weights << "\n"
      << "lambda = " << c.lambda << "\n"
      << "baseline = " << format_double(c.baseline) << "\n\n"
      << "[rates]\n"
      << "eta_m = " << optional_text(c.rates.eta_m, "default") << "\n"
      << "eta_c = " << optional_text(c.rates.eta_c, "default") << "\n"
      << "c_sigma = " << optional_text(c.rates.c_sigma, "default") << "\n"
      << "d_sigma = " << optional_text(c.rates.d_sigma, "default") << "\n"
      << "c_c = " << optional_text(c.rates.c_c, "default") << "\n"
      << "c_1 = " << optional_text(c.rates.c_1, "default") << "\n"
      << "c_mu = " << optional_text(c.rates.c_mu, "default") << "\n\n"
      << "[init]\n"
      << "mean = " << join(c.mean) << "\n"
      << "cov = " << join(c.cov) << "\n"
      << "sigma = " << format_double(c.sigma) << "\n\n"
      << "[run]\n"
      << "seed = " << c.seed << "\n"
      << "budget = " << c.budget << "\n"
      << "target = " << optional_text(c.target, "none") << "\n"
      << "output = " << c.output << "\n\n"
      << "[plot]\n"
      << "kind = " << c.plot.kind << "\n"
      << "eta_points = " << c.plot.eta_points << "\n"
      << "overshoot = " << format_double(c.plot.overshoot) << "\n"
      << "chart = " << c.plot.chart << "\n"
      << "nodes = " << c.plot.nodes << "\n";
    return o.str();
}

StrategyConfig to_strategy_config(const RunConfig& c)
{
    StrategyConfig s;
    if (c.strategy == "rank-mu") s.kind = StrategyKind::RankMu;
    else if (c.strategy == "full-cma") s.kind = StrategyKind::FullCma;
    else if (c.strategy == "sep-cma") s.kind = StrategyKind::SepCma;
    else {
        s.kind = StrategyKind::Ngl;
        s.chart = c.strategy.substr(4);
    }

    if (c.weights == "rank") s.weights = WeightScheme::default_rank_based(c.lambda);
    else if (c.weights == "active") s.weights = WeightScheme::default_active(c.lambda);
    else if (c.weights == "raw") s.weights = WeightScheme::raw_fitness();
    else s.weights = WeightScheme::normalized_fitness();

    s.lambda = c.lambda;
    s.baseline = c.baseline;
    s.rates = default_learning_rates(c.dim, std::max<std::size_t>(c.lambda, 2));
    const RateOverrides& r = c.rates;
    if (r.eta_m) s.rates.eta_m = *r.eta_m;
    if (r.eta_c) s.rates.eta_c = *r.eta_c;
    if (r.c_sigma) s.rates.c_sigma = *r.c_sigma;
    if (r.d_sigma) s.rates.d_sigma = *r.d_sigma;
    if (r.c_c) s.rates.c_c = *r.c_c;
    if (r.c_1) s.rates.c_1 = *r.c_1;
    if (r.c_mu) s.rates.c_mu = *r.c_mu;

    const auto d = static_cast<Eigen::Index>(c.dim);
    s.mean0 = Eigen::Map<const Vector>(c.mean.data(), d);
    s.cov0 = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(c.cov.data(), d, d);
    s.sigma0 = c.sigma;
    s.target = c.target;
    return s;
}

}  // namespace ngcma::harness
