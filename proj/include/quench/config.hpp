// Experiment configuration: a flat, sectioned key = value text file with
// strict key checking and line-referenced parse errors. All quantities are in
// the nondimensional units of the model equations.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "quench/dynamics.hpp"
#include "quench/params.hpp"
#include "quench/seed.hpp"
#include "quench/solver.hpp"

namespace quench {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SeedKind { well_prepared, flat };

struct ExperimentConfig {
  Parameters params;
  Forcing forcing;
  GridSpec grid;
  StepControl control;
  FinalProfileOptions profile;
  SeedKind seed_kind = SeedKind::well_prepared;
  SeedParams seed;
  double flat_h0 = 1.0;
  double h_stop = 5e-4;
  double snapshot_ds = 0.05;
  double s_end = 9.0;
  double audit_ds = 0.1;
  double C_q_agg = 4e-6;
  double C_R = 1.0;   // calibrated constant of the s ||R|| monitor
  double C_V = 2.0;   // calibrated constant of the |V| <= C (1+y^2)/s monitor
  double K_window = 1.0;  // K of the gradient-profile error window
  int shoot_levels = 8;
  double d0_min = -0.35, d0_max = 0.35;
  double d1_min = -0.35, d1_max = 0.35;
  SimilarityGridSpec sim_grid{50.0, 0.05};
  std::string out_dir = "out";
};

// Parses a config file. overrides are "section.key=value" strings applied
// after the file. Throws ConfigError with file:line references on unknown
// keys, bad values, or violated parameter constraints.
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});

// Parses config text (for tests); name is used in error messages.
ExperimentConfig parse_config(const std::string& text, const std::string& name,
                              const std::vector<std::string>& overrides = {});

// Applies "section.key=value" overrides to an existing config and re-validates.
void apply_overrides(ExperimentConfig& config,
                     const std::vector<std::string>& overrides);

// The built-in defaults, already validated.
ExperimentConfig default_config();

}  // namespace quench
