#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optstab/table.hpp"

namespace optstab::cli {

/// Malformed or incomplete experiment configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentResult {
  std::string kind;
  Table table;
  std::optional<Table> pairs;
  Json summary;
  bool pass = true;
};

/// Runs one experiment described by a parsed configuration document.
ExperimentResult run_experiment(const Json& config);

std::vector<std::string> experiment_kinds();

}  // namespace optstab::cli
