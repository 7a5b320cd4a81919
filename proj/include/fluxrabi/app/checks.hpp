#pragma once

// Reference-number and property checks at the reference circuit. Used by the
// paper-regression task and by the acceptance binary.

#include "fluxrabi/parallel.hpp"

#include <string>
#include <vector>

namespace fluxrabi::app {

struct Check {
    std::string name;
    double Lc = 0.0;        // pH; NaN when not tied to one circuit
    double computed = 0.0;
    double expected = 0.0;  // target value or bound
    double tolerance = 0.0; // relative, only for kind "rel"
    std::string kind;       // rel, lt, le, gt, ge
    std::string unit;
    bool pass = false;
};

struct Criterion {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    bool pass() const;
};

inline constexpr int criterion_count = 12;

/// Evaluates the requested criteria (1-based ids) in order.
std::vector<Criterion> evaluate_criteria(const std::vector<int>& ids,
                                         ExecPolicy policy = ExecPolicy::parallel);

/// "PASS  C5  title | name=computed (expected) ..." on one line.
std::string summary_line(const Criterion& criterion);

}  // namespace fluxrabi::app
