#pragma once

#include "ngcma/harness/config.hpp"

#include <cstdint>
#include <iosfwd>

namespace ngcma::harness {

/// eta_m,eta_c,q over an eta_points x eta_points grid on (0, (1 + overshoot)/J]
/// at the config's initial distribution. Requires a positive objective
/// (ConfigError otherwise); eta_points = 0 gives a header-only table.
void write_qgrid(std::ostream& out, const RunConfig& config);

/// iteration,j_estimate of a run with the given seed.
void write_runcurve(std::ostream& out, const RunConfig& config, std::uint64_t seed);

}  // namespace ngcma::harness
