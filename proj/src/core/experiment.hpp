#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace fkflow {

struct Artifact {
  std::string name;     // e.g. "densities.csv"
  std::string content;  // full payload; the CLI writes it to disk
};

// One verification check: pass is true when the measured value satisfies the
// check's comparison against the tolerance (less-than for residual-style
// checks, at-least for count and ratio checks).
struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ExperimentResult {
  std::string experiment;
  nlohmann::json config_echo;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  std::vector<Artifact> artifacts;
  std::string output_dir;  // echoed from the config; empty means cwd

  bool passed() const;
  nlohmann::json report_json() const;
  std::string report_text() const;  // one line per check plus a summary
};

inline constexpr std::uint64_t kDefaultSeed = 1234567;

// Runs the experiment described by the config document. Throws
// InvalidArgument with a field-by-field message for malformed configs.
// Recognized experiments: moments, functor, sewing, fk-backward, maxent,
// maxcal.
ExperimentResult run_experiment(const nlohmann::json& config);
ExperimentResult run_experiment_text(const std::string& config_json);

}  // namespace fkflow
