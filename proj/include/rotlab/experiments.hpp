#pragma once

// Named desk-scale experiments with CSV artifacts and a JSON summary.

#include <cstdint>
#include <string>
#include <vector>

#include "rotlab/error.hpp"

namespace rotlab {

struct UnknownExperiment : Error {
  using Error::Error;
};

inline constexpr int kConfigSchemaVersion = 1;

struct ExperimentConfig {
  std::string name;
  std::vector<std::string> alpha;
  std::vector<std::uint64_t> x;
  std::string roughness;
  std::vector<unsigned> k;
  std::vector<std::string> rect;
  double rho = 0.0;
  std::vector<std::uint64_t> d;
  unsigned l = 0;
  std::uint64_t seed = 0;
  std::string out = "out";
  unsigned workers = 1;

  std::string to_json() const;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
};

// Stable order.
const std::vector<ExperimentInfo>& list_experiments();
bool known_experiment(const std::string& name);

// Built-in parameters of a named experiment.
ExperimentConfig default_config(const std::string& name);
// Config file: {"schema_version": 1, "experiment": ..., optional overrides}.
// Unknown fields are rejected.
ExperimentConfig parse_config(const std::string& json_text);

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string expect;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::string> files;  // relative to config.out
  std::vector<Check> checks;
  std::uint64_t boundary_hits = 0;
  std::uint64_t uncertain = 0;
  double wall_time = 0.0;

  bool pass() const;
  std::string summary_json() const;
};

// Writes CSVs and summary.json into config.out. A precision-audit failure
// throws PrecisionError after the artifacts are written.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace rotlab
