#include "ngcma/harness/commands.hpp"

#include "ngcma/error.hpp"
#include "ngcma/harness/config.hpp"
#include "ngcma/harness/objectives.hpp"
#include "ngcma/harness/plotdata.hpp"
#include "ngcma/harness/trace_io.hpp"
#include "ngcma/harness/validate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace ngcma::harness {

namespace {

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << content;
    f.close();
    if (!f) throw IoError("failed writing '" + path + "'");
}

void emit(const std::optional<std::string>& path, const std::string& content, std::ostream& out)
{
    if (path) write_file(*path, content);
    else out << content;
}

int optimize(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<std::string> out_path,
             std::ostream& out, std::ostream& err)
{
    RunConfig config = load_config(config_path);
    if (seed) config.seed = *seed;
    if (out_path) config.output = *out_path;
    const ObjectiveInfo obj = make_objective(config.objective, config.objective_scale);
    const StrategyConfig sc = to_strategy_config(config);

    std::ostringstream trace;
    try {
        const RunResult result = run(sc, obj.fn, config.budget, config.seed);
        write_trace(trace, config, result.trace);
        write_file(config.output, trace.str());
        if (result.reason == Termination::ConditionCap)
            err << "warning: covariance condition number exceeded " << format_double(sc.condition_cap) << "\n";
        out << "best_f " << format_double(result.best_f) << "\nevaluations " << result.evaluations
            << "\ntermination " << to_string(result.reason) << "\n";
        return kExitOk;
    } catch (const RunFailed& e) {
        write_trace(trace, config, e.partial().trace);
        write_file(config.output, trace.str());
        err << "error: " << e.what() << "\n";
        out << "best_f " << format_double(e.partial().best_f) << "\nevaluations " << e.partial().evaluations
            << "\ntermination step-rejected\n";
        return kExitNumeric;
    }
}

int validate(const std::string& suite, const std::optional<std::string>& config_path,
             std::optional<std::uint64_t> seed, const std::optional<std::string>& out_path, std::ostream& out,
             std::ostream& err)
{
    std::uint64_t s = 1;
    if (config_path) s = load_config(*config_path).seed;
    if (seed) s = *seed;
    const Report report = run_validation(suite, s);
    std::ostringstream text;
    write_report(text, report);
    emit(out_path, text.str(), out);
    err << suite << ": " << report.rows.size() - report.failures() << "/" << report.rows.size() << " cases pass\n";
    return report.all_pass() ? kExitOk : kExitNumeric;
}

int plotdata(const std::optional<std::string>& kind, const std::string& config_path,
             std::optional<std::uint64_t> seed, const std::optional<std::string>& out_path, std::ostream& out)
{
    RunConfig config = load_config(config_path);
    if (kind) config.plot.kind = *kind;
    if (config.plot.kind != "qgrid" && config.plot.kind != "runcurve")
        throw ConfigError("unknown plot kind '" + config.plot.kind + "' (qgrid, runcurve)");
    if (seed) config.seed = *seed;
    std::ostringstream text;
    if (config.plot.kind == "qgrid") write_qgrid(text, config);
    else write_runcurve(text, config, config.seed);
    emit(out_path, text.str(), out);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Natural-gradient evolution strategies and verification lab", "ngcma"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> opt_config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_path;
    std::string suite;
    std::optional<std::string> plot_kind;

    auto* opt = app.add_subcommand("optimize", "run a strategy and write its trace");
    opt->add_option("--config", config_path, "config file")->required();
    opt->add_option("--seed", seed, "override [run] seed");
    opt->add_option("--out", out_path, "override [run] output");

    auto* val = app.add_subcommand("validate", "run an oracle battery and write a report");
    val->add_option("suite", suite, "fisher | theorem1 | theorem2 | em | decomposition")->required();
    val->add_option("--config", opt_config, "config file (only [run] seed is used)");
    val->add_option("--seed", seed, "random seed");
    val->add_option("--out", out_path, "report file (default: standard output)");

    auto* plot = app.add_subcommand("plotdata", "write plot tables");
    plot->add_option("kind", plot_kind, "qgrid | runcurve (default: [plot] kind)");
    plot->add_option("--config", config_path, "config file")->required();
    plot->add_option("--seed", seed, "override [run] seed");
    plot->add_option("--out", out_path, "output file (default: standard output)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (opt->parsed()) return optimize(config_path, seed, out_path, out, err);
        if (val->parsed()) {
            const auto& suites = validation_suites();
            if (std::find(suites.begin(), suites.end(), suite) == suites.end()) {
                err << "error: unknown suite '" << suite << "'\n" << val->help();
                return kExitConfig;
            }
            return validate(suite, opt_config, seed, out_path, out, err);
        }
        return plotdata(plot_kind, config_path, seed, out_path, out);
    } catch (const NumericError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace ngcma::harness
