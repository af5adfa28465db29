#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "torusflow/errors.hpp"

namespace torusflow {

// A scenario is the single reproducible unit of work: measure / frequency /
// torus descriptors plus one analysis request. Parsing and execution are
// pure (string in, strings out); only the CLI touches the filesystem.

struct ScenarioOutput {
    std::string json;                // result document with meta + result
    std::optional<std::string> csv;  // plot-ready table for ops that emit one
};

class Scenario {
  public:
    // throws ValidationError with a field path on malformed input
    static Scenario from_json_text(const std::string& text);

    const std::string& name() const { return name_; }
    const std::string& op() const { return op_; }
    const std::string& hash() const { return hash_; }
    const std::string& raw_text() const { return raw_; }
    // output paths requested by the scenario file (CLI decides what to do)
    const std::optional<std::string>& json_path() const { return json_path_; }
    const std::optional<std::string>& csv_path() const { return csv_path_; }

    ScenarioOutput run() const;

  private:
    Scenario() = default;
    std::string raw_;
    std::string hash_;
    std::string name_;
    std::string op_;
    std::optional<std::string> json_path_;
    std::optional<std::string> csv_path_;
    std::shared_ptr<const void> data_;  // parsed document (opaque)
};

// Re-parse an emitted result document and check its shape for the op it
// declares. Round-trip guard used by tests and the CLI self-check.
void validate_result_document(const std::string& json_text);

}  // namespace torusflow
