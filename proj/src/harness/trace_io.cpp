#include "ngcma/harness/trace_io.hpp"

#include <ostream>
#include <sstream>

namespace ngcma::harness {

std::string trace_columns(std::size_t dim)
{
    std::string out = "iteration,evaluations,best_f";
    for (std::size_t i = 0; i < dim; ++i) out += ",mean_" + std::to_string(i);
    out += ",sigma,cov_eig_min,cov_eig_max";
    return out;
}

void write_comment_header(std::ostream& out, const RunConfig& config, const std::string& kind)
{
    out << "# ngcma " << kind << " schema " << kTraceSchemaVersion << "\n";
    std::istringstream lines(serialize(config));
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty()) out << "# " << line << "\n";
}

void write_trace(std::ostream& out, const RunConfig& config, const std::vector<TraceRecord>& trace)
{
    write_comment_header(out, config, "trace");
    out << trace_columns(config.dim) << "\n";
    for (const auto& r : trace) {
        out << r.iteration << ',' << r.evaluations << ',' << format_double(r.best_f);
        for (Eigen::Index i = 0; i < r.mean.size(); ++i) out << ',' << format_double(r.mean(i));
        out << ',' << format_double(r.sigma) << ',' << format_double(r.cov_eig_min) << ','
            << format_double(r.cov_eig_max) << "\n";
    }
}

}  // namespace ngcma::harness
