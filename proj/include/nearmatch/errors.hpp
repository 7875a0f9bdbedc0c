#pragma once

#include <stdexcept>
#include <string>

namespace nearmatch {

// Graph file could not be parsed; `line` is 1-based.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what), line(line_) {}
};

// Exact enumeration refused because the instance exceeds the configured size cap.
struct ResourceLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Greedy phase plan is undefined for the given (p, eps), or a factorial
// argument in the closed-form bound went negative.
struct InvalidPlanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The greedy counter ran out of typical vertices mid-phase; the input was not
// eps-regular at density p. `phase` is 1-based, counting main then tail phases.
struct DegradedInstanceError : std::runtime_error {
    int phase;
    DegradedInstanceError(int phase_, const std::string& what)
        : std::runtime_error(what), phase(phase_) {}
};

// Objective maximization was asked for an infeasible polytope.
struct InfeasibleRegionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nearmatch
