#pragma once

#include <stdexcept>
#include <string>

namespace torusflow {

// Malformed measure descriptors, impossible restrictions, divergent integrals.
struct MeasureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive quadrature gave up before reaching the requested tolerance.
// Carries the error estimate it did achieve.
struct QuadratureError : std::runtime_error {
    double achieved_error;
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_error(achieved) {}
};

// State/torus mismatches, degenerate tori, divergent energies.
struct FlowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario validation failure; field_path names the offending entry
// (e.g. "measure.eta").
struct ValidationError : std::runtime_error {
    std::string field_path;
    ValidationError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), field_path(path) {}
};

}  // namespace torusflow
