#pragma once

#include <Eigen/Core>

#include "fracgs/grid.hpp"
#include "fracgs/params.hpp"

namespace fracgs {

/// L^2-normalized eigenpair; sign fixed so the value at the node nearest the
/// origin is positive.
struct EigenPair {
  double value = 0.0;
  Field vector;
  double residual = 0.0;  ///< ||A phi - value phi||_2
  int iterations = 0;
};

/// Lowest eigenpair of (-Delta)^s + |x|^2 by inverse iteration with a
/// preconditioned CG inner solve. Throws kNoConvergence after 500 outer steps.
EigenPair ground_eigenpair(double s, int dim, const Grid& grid);

struct DenseOperator {
  Eigen::MatrixXd matrix;      ///< symmetrized (B + B^T)/2
  double asymmetry = 0.0;      ///< max |B - B^T| before symmetrization
};

/// Nodal-basis matrix of (-Delta)^s + |x|^2, N = 1 and M <= 512 only.
DenseOperator dense_operator_matrix(const Grid& grid, double s);

struct SpectrumEdges {
  double min_eig = 0.0;
  double min_abs_eig = 0.0;
  int morse_index_le2 = 0;  ///< number of negative eigenvalues, capped at 2
  bool computed = false;
};

/// Low end of the spectrum of the Jacobian J(u), by Lanczos on (J + mu)^{-1}
/// with mu chosen so J + mu >= 1.
SpectrumEdges jacobian_spectrum_edges(const Field& u, const ModelParams& params);

}  // namespace fracgs
