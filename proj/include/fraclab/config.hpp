#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/feynman_kac.hpp"
#include "fraclab/potentials.hpp"
#include "fraclab/spectral.hpp"
#include "fraclab/stable_core.hpp"

namespace fraclab {

enum class RunKind { sample, eigen, kernel, iu_check, counterexample, validate };
const char* to_string(RunKind k);
std::optional<RunKind> run_kind_from_string(const std::string& s);

// Declarative description of one experiment. Parsed from a sectioned
// key = value text file (sections [model], [potential], [paths], [grid],
// [run], [thresholds], [output]); serializes back losslessly in canonical
// field order.
struct ExperimentConfig {
  // [model]
  int d = 1;
  double alpha = 1.0;
  bool alpha_override = false;

  // [potential]
  std::string potential_kind = "const";  // power | exp | log | const | counterexample
  double beta = 0.0;
  double kappa = 0.0;
  double c = 0.0;
  int terms = -1;  // counterexample plateau count; required for that kind

  // [paths]
  PathConfig paths;

  // [grid]
  Grid1D grid{16.0, 1023};

  // [run]
  RunKind kind = RunKind::validate;
  double t = 1.0;
  double window = 8.0;                  // envelope window radius
  std::vector<double> radii{2, 4, 8};   // decay radii
  std::vector<double> probes{0.0};      // probe points / radii per run kind

  // [thresholds]
  double envelope_dispersion = 50.0;
  double gauge_band = 10.0;
  double slope_slack = 0.3;
  double iu_growth_min = 2.0;
  double iu_stable_max = 1.5;

  // [output]
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int jobs = 1;

  StableModel build_model() const;
  Potential build_potential() const;
  std::string serialize() const;
  std::uint64_t hash() const;  // FNV-1a64 of serialize()
};

struct ConfigViolation {
  int line = 0;  // 0 for cross-field invariants
  std::string message;
};

struct ParseOutcome {
  std::optional<ExperimentConfig> config;  // set iff violations is empty
  std::vector<ConfigViolation> violations;
};

// Parses and validates; reports every violation with its line number rather
// than stopping at the first.
ParseOutcome parse_config(const std::string& text);
ParseOutcome parse_config_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace fraclab
