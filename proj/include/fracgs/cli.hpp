#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fracgs/error.hpp"
#include "fracgs/io.hpp"

namespace fracgs {

/// Everything a subcommand reads. NaN half-width selects the default rule
/// L = max(12, sqrt(5 (|lambda| + N + 1))).
struct RunConfig {
  int dim = 1;
  double s = 0.5;
  double q = 6.0;
  double lambda = -2.0;
  double half_width = std::numeric_limits<double>::quiet_NaN();
  int points = 512;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  double lambda_min = -40.0;
  int branch_points = 200;
  double delta0 = 1e-2;
  double fold_tol = 1e-4;
  double target_mass = std::numeric_limits<double>::quiet_NaN();
  double mass_tol = 1e-6;
  int homotopy_steps = 11;
  double dt = 1e-3;
  double horizon = 20.0;
  bool nonlinear = true;
  int sample_every = 100;
  double epsilon = 0.0;
  int starts = 20;
};

const std::vector<std::string>& config_keys();
void apply_config(RunConfig& cfg, const ConfigMap& map);
ConfigMap to_config_map(const RunConfig& cfg);

/// Half-width actually used for a run at the given lambda.
double effective_half_width(const RunConfig& cfg, double lambda);

/// Exit codes: 0 success, 2 usage, 3 non-convergence, 4 model regime.
int exit_code_for(ErrorCode code);

int run_command(int argc, char** argv);

}  // namespace fracgs
