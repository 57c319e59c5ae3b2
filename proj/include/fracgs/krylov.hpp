#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace fracgs::krylov {

using Vector = Eigen::VectorXd;
/// y = Op(x). Operators are symmetric in the Euclidean inner product.
using LinearMap = std::function<void(const Vector& x, Vector& y)>;

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients for SPD `op`; `precond` applies an SPD
/// approximation of op^{-1} (identity when empty). `x` holds the initial guess.
SolveStats conjugate_gradient(const LinearMap& op, const Vector& b, Vector& x, double rel_tol,
                              int max_iter, const LinearMap& precond = {});

/// Preconditioned MINRES for symmetric indefinite `op` with SPD `precond`.
SolveStats minres(const LinearMap& op, const Vector& b, Vector& x, double rel_tol, int max_iter,
                  const LinearMap& precond = {});

struct LanczosResult {
  std::vector<double> values;  ///< largest Ritz values, descending
  int steps = 0;
  bool converged = false;
};

/// Lanczos with full reorthogonalization for the `nev` largest eigenvalues of a
/// symmetric operator.
LanczosResult lanczos_largest(const LinearMap& op, Vector start, int nev, int max_steps,
                              double rel_tol);

}  // namespace fracgs::krylov
