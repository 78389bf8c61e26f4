#pragma once

#include "ngcma/harness/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ngcma::harness {

inline constexpr int kTraceSchemaVersion = 1;

/// iteration,evaluations,best_f,mean_0,...,mean_{d-1},sigma,cov_eig_min,cov_eig_max
std::string trace_columns(std::size_t dim);

/// `#` comment block: schema line followed by the resolved config.
void write_comment_header(std::ostream& out, const RunConfig& config, const std::string& kind);

void write_trace(std::ostream& out, const RunConfig& config, const std::vector<TraceRecord>& trace);

}  // namespace ngcma::harness
