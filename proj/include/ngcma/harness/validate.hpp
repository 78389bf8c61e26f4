#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ngcma::harness {

struct ReportRow {
    std::string case_id;
    std::string quantity;
    double expected;
    double actual;
    double tolerance;
    bool pass;
};

struct Report {
    std::string suite;
    std::vector<ReportRow> rows;

    std::size_t failures() const;
    bool all_pass() const { return failures() == 0; }
};

/// fisher, theorem1, theorem2, em, decomposition
const std::vector<std::string>& validation_suites();

/// Throws ConfigError for an unknown suite name.
Report run_validation(const std::string& suite, std::uint64_t seed);

/// case_id,quantity,expected,actual,tolerance,pass
void write_report(std::ostream& out, const Report& report);

}  // namespace ngcma::harness
