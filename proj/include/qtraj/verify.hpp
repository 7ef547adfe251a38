#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace qtraj {

enum class CheckStatus { pass, fail, info };

/// One identity: closed form vs its brute-force reference. Grid checks report their worst
/// point; `info` rows document a known deviation and never fail the report.
struct VerifyRow {
    std::string group;
    std::string name;
    double closed_form = 0.0;
    double oracle = 0.0;
    double rel_error = 0.0;
    double tolerance = 0.0;
    CheckStatus status = CheckStatus::pass;
};

struct VerifyOptions {
    /// Check the minimum-mode rate with the 1/sigma^2 denominator instead of 1/(2 sigma^2).
    bool inject_printed_minimum = false;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;

    bool all_pass() const;
    nlohmann::ordered_json to_json() const;
    void print_table(std::ostream& out) const;
};

VerifyReport run_verification(const VerifyOptions& options = {});

}  // namespace qtraj
