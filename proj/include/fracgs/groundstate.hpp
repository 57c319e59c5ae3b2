#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fracgs/grid.hpp"
#include "fracgs/linear_spectrum.hpp"
#include "fracgs/model.hpp"
#include "fracgs/params.hpp"
#include "fracgs/spectral.hpp"

namespace fracgs {

struct SolverOptions {
  double tol = 1e-10;               ///< Newton target for ||F(u)||_2
  int max_newton = 40;
  int minimization_max_iter = 2000;
  double minimization_rel_decrease = 1e-12;
  bool compute_spectrum = true;     ///< populate GroundState::spectrum
  int max_restarts = 3;
  double initial_width = 1.0;       ///< width of the default Gaussian start
  int dense_limit = 512;            ///< dense Newton solves for N = 1, M <= dense_limit
};

struct SolverLog {
  int minimization_iterations = 0;
  double final_quotient = 0.0;
  double nehari_amplitude = 0.0;    ///< c from the ray rescale
  int newton_steps = 0;
  std::vector<double> residual_history;  ///< ||F|| before each Newton step and at the end
  double newton_tail_constant = 0.0;     ///< max ||F||_{k+1}/||F||_k^2 over the last three steps
  int restarts = 0;
  bool dense_newton = false;
  std::vector<std::string> warnings;
};

struct GroundState {
  Field u;
  ModelParams params;
  Observables observables;
  double action = 0.0;
  IdentityReport identities;
  double residual_norm = 0.0;
  SpectrumEdges spectrum;
  double boundary_ratio = 0.0;
  double spectral_tail = 0.0;
  bool converged = false;
  SolverLog log;
};

/// Everything that depends only on (grid, s): lambda_1, phi_1, |xi|^{2s} and,
/// for small 1D grids, the dense operator matrix. Immutable once built.
class SolverContext {
 public:
  SolverContext(const Grid& grid, double s);

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  double order() const { return s_; }
  const EigenPair& ground() const { return ground_; }
  double lambda1() const { return ground_.value; }
  const std::vector<double>& symbol() const { return symbol_; }
  /// Null unless N = 1 and M <= 512.
  const Eigen::MatrixXd* dense_operator() const { return dense_ ? &*dense_ : nullptr; }

 private:
  Grid grid_;
  double s_;
  EigenPair ground_;
  std::vector<double> symbol_;
  std::optional<Eigen::MatrixXd> dense_;
};

/// Positive ground state by Nehari-quotient minimization, ray rescale and Newton
/// polish. Throws kLambdaAboveThreshold when lambda >= lambda_1 - 1e-6 and
/// kRegime when q is outside (2, 2_s^*). A stagnating Newton returns the best
/// iterate with converged = false.
GroundState solve_ground_state(const ModelParams& params, const Grid& grid,
                               const SolverOptions& opts = {});
GroundState solve_ground_state(const SolverContext& ctx, const ModelParams& params,
                               const SolverOptions& opts = {}, const Field* initial = nullptr);

/// Gaussian exp(-|x - center|^2 / (2 width^2)) on the grid.
Field gaussian_bump(const Grid& grid, double width, std::span<const double> center = {});

/// min over the sign of ||a -+ b||_2.
double aligned_distance(const Field& a, const Field& b);

/// Bifurcation amplitude ((lambda_1 - lambda)/||phi_1||_q^q)^{1/(q-2)}.
double bifurcation_amplitude(const EigenPair& phi1, double lambda, double q);

struct UniquenessReport {
  std::vector<GroundState> solutions;      ///< by start index
  std::vector<std::string> errors;         ///< empty string when the start succeeded
  double max_distance = 0.0;               ///< max pairwise aligned L^2 distance
  std::size_t converged_count = 0;
  bool near_critical = false;              ///< q_upper - q < 0.2
};

/// Solves from every supplied start and compares the results.
UniquenessReport uniqueness_probe(const SolverContext& ctx, const ModelParams& params,
                                  const std::vector<Field>& starts, const SolverOptions& opts = {});
/// Random positive Gaussian starts: width in [0.3, 3], center in [-L/4, L/4].
UniquenessReport uniqueness_probe(const ModelParams& params, const Grid& grid, int n_starts,
                                  std::uint64_t seed, const SolverOptions& opts = {});
std::vector<Field> random_bump_starts(const Grid& grid, int n_starts, std::uint64_t seed);

}  // namespace fracgs
