#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracgs/groundstate.hpp"

namespace fracgs {

enum class Stability { kStable, kUnstable, kMarginal, kUnknown };

const char* to_string(Stability label);

struct BranchPoint {
  double lambda = 0.0;
  double mass = 0.0;
  double action = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double power_q = 0.0;
  double pohozaev_rel = 0.0;
  double slope = 0.0;  ///< d mass / d lambda
  Stability stability = Stability::kUnknown;
  double min_abs_eig = 0.0;
  double energy_lb_gap = 0.0;
  double k = 0.0;
  int newton_steps = 0;
};

struct BranchOptions {
  double delta0 = 1e-2;             ///< first point sits at lambda_1 - delta0
  double top_decade_fraction = 0.4; ///< share of points with lambda_1 - lambda < 10 delta0
  double slope_tol_factor = 1e-3;   ///< slope_tol = factor * max mass
  SolverOptions solver;
};

/// Sampled branch lambda -> u_lambda, ordered by decreasing lambda.
struct MassCurve {
  ModelParams family;  ///< N, s, q of the branch; lambda is unused
  Grid grid;
  double lambda1 = 0.0;
  std::vector<BranchPoint> points;
  std::vector<Field> states;  ///< solution at every point, kept for warm starts
  bool complete = true;
  std::string failure;
  double slope_tol = 0.0;
};

/// lambda_1 - d with d geometric on [delta0, 10 delta0) for the top share of the
/// points, then geometric from 10 delta0 down to lambda_1 - lambda_min.
std::vector<double> graded_lambda_mesh(double lambda1, double lambda_min, int points, double delta0,
                                       double top_fraction);

MassCurve trace_branch(const SolverContext& ctx, const ModelParams& family, double lambda_min,
                       int points, const BranchOptions& opts = {});
MassCurve trace_branch(const ModelParams& family, const Grid& grid, double lambda_min, int points,
                       const BranchOptions& opts = {});

/// Three-point slopes on the nonuniform mesh and the labels they imply.
void assign_slopes(MassCurve& curve, double slope_tol);

/// slope < -tol: stable; slope > tol: unstable; otherwise marginal.
Stability classify_stability(const BranchPoint& point, double slope_tol);

struct FoldResult {
  double lambda_star = 0.0;
  double c0 = 0.0;
  double bracket_width = 0.0;
  bool unimodal = true;
  int solves = 0;
  std::vector<double> bracket_history;  ///< width after each golden-section solve
};

using MassFunction = std::function<double(double lambda)>;

/// Argmax of the sampled masses refined by golden-section search on fresh
/// evaluations of `mass_at`. Throws kMaximumAtEndpoint when the largest sample is
/// an end of the curve.
FoldResult find_fold(const MassCurve& curve, const MassFunction& mass_at, double tol_lambda = 1e-4);

/// Fresh solves along a traced branch, warm-started from the nearest sample.
class BranchSolver {
 public:
  BranchSolver(const SolverContext& ctx, const MassCurve& curve, SolverOptions opts);

  GroundState solve(double lambda, bool with_spectrum = false) const;
  double mass(double lambda) const;
  MassFunction mass_function() const;

 private:
  const SolverContext& ctx_;
  const MassCurve& curve_;
  SolverOptions opts_;
};

using BranchSolve = std::function<GroundState(double lambda)>;

/// Ground states with prescribed mass c: two below c0 (ordered lambda < lambda~),
/// one at c0 and none above. Roots are bracketed on the samples and bisected on
/// fresh solves until the mass is within mass_tol relative of c.
std::vector<GroundState> solve_normalized(double c, const MassCurve& curve, const FoldResult& fold,
                                          const BranchSolve& solve, double mass_tol = 1e-6);

struct HomotopyStep {
  double s = 0.0;
  double lambda1 = 0.0;
  double min_eig = 0.0;
  double min_abs_eig = 0.0;
  double mass = 0.0;
  double residual_norm = 0.0;
  int newton_steps = 0;
};

struct HomotopyReport {
  std::vector<HomotopyStep> steps;
  GroundState final_state;
  GroundState direct;         ///< cold solve at the last s
  double endpoint_distance = 0.0;
  bool halted = false;        ///< min_abs_eig fell below 1e-6
  double halted_at_s = 0.0;
};

/// s_path(k) = 1 - k (1 - s_target)/(steps - 1).
std::vector<double> linear_s_path(double s_target, int steps);

/// Continuation in the fractional order from s = 1 with warm starts, tracking
/// the Jacobian's smallest |eigenvalue| at every step.
HomotopyReport s_homotopy(double lambda, double q, int dim, const std::vector<double>& s_path,
                          const Grid& grid, const SolverOptions& opts = {});

struct AsymptoticsReport {
  std::vector<double> bifurcation_lambda;
  std::vector<double> bifurcation_rel_err;  ///< vs ((lambda_1 - lambda)/||phi_1||_q^q)^{2/(q-2)}
  bool decay_ok = false;                    ///< strictly decreasing over the most negative 25%
  double min_energy_gap = 0.0;              ///< over lambda < 0
  bool energy_ok = false;                   ///< min_energy_gap >= -1e-8
  double smoothness_ratio = 0.0;            ///< max / median |second difference| on the tail
  bool smoothness_ok = false;               ///< ratio <= 10
};

AsymptoticsReport asymptotics_checks(const MassCurve& curve, const EigenPair& phi1);

/// Mass predicted by the bifurcation expansion near lambda_1.
double bifurcation_mass(const EigenPair& phi1, double lambda, double q);

}  // namespace fracgs
