#include "fracgs/linear_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fracgs/error.hpp"
#include "fracgs/krylov.hpp"
#include "fracgs/model.hpp"
#include "fracgs/spectral.hpp"

namespace fracgs {

using krylov::Vector;

namespace {

constexpr int kMaxOuter = 500;
constexpr double kInnerTol = 1e-12;
constexpr double kEigResidualTol = 1e-10;

// Fourier-diagonal approximation (|xi|^{2s} + shift)^{-1}.
krylov::LinearMap fourier_preconditioner(const Grid& grid, std::span<const double> symbol, double shift) {
  auto inv = std::make_shared<std::vector<double>>(symbol.size());
  for (std::size_t k = 0; k < symbol.size(); ++k) (*inv)[k] = 1.0 / (symbol[k] + shift);
  return [grid, inv](const Vector& x, Vector& y) {
    y.resize(x.size());
    apply_symbol(grid, *inv, std::span<const double>(x.data(), x.size()),
                 std::span<double>(y.data(), y.size()));
  };
}

}  // namespace

EigenPair ground_eigenpair(double s, int dim, const Grid& grid) {
  if (grid.dim() != dim) throw Error(ErrorCode::kInvalidDimension, "grid dimension mismatch");
  ModelParams params{dim, s, 4.0, 0.0};
  params.validate();
  const ModelOperator op(grid, params);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double w = grid.weight();

  krylov::LinearMap apply = [&op](const Vector& x, Vector& y) {
    y.resize(x.size());
    op.apply_trap(std::span<const double>(x.data(), x.size()), std::span<double>(y.data(), y.size()));
  };
  const auto precond = fourier_preconditioner(grid, op.symbol(), 1.0);

  auto r2 = grid.radius_squared();
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = std::exp(-0.5 * r2[i]);
  x /= std::sqrt(w) * x.norm();

  Vector y(n), ax(n);
  EigenPair pair;
  for (int it = 1; it <= kMaxOuter; ++it) {
    y = x;
    krylov::conjugate_gradient(apply, x, y, kInnerTol, 20000, precond);
    x = y / (std::sqrt(w) * y.norm());
    apply(x, ax);
    const double theta = w * x.dot(ax);
    const double resid = std::sqrt(w) * (ax - theta * x).norm();
    pair.value = theta;
    pair.residual = resid;
    pair.iterations = it;
    if (resid <= kEigResidualTol) break;
  }
  if (pair.residual > kEigResidualTol) {
    throw Error(ErrorCode::kNoConvergence, "inverse iteration did not reach the residual target");
  }
  if (x(static_cast<Eigen::Index>(grid.origin_index())) < 0.0) x = -x;
  pair.vector = Field::real(grid, std::vector<double>(x.data(), x.data() + n));
  return pair;
}

DenseOperator dense_operator_matrix(const Grid& grid, double s) {
  if (grid.dim() != 1 || grid.points_per_axis() > 512) {
    throw Error(ErrorCode::kSizeLimit, "dense operator is limited to N = 1 and M <= 512");
  }
  const int m = grid.points_per_axis();
  const auto symbol = fractional_symbol(grid, s);
  DenseOperator out;
  Eigen::MatrixXd b(m, m);
  std::vector<double> unit(m, 0.0), col(m);
  for (int l = 0; l < m; ++l) {
    unit[l] = 1.0;
    apply_symbol(grid, symbol, unit, col);
    unit[l] = 0.0;
    for (int j = 0; j < m; ++j) b(j, l) = col[j];
  }
  auto r2 = grid.radius_squared();
  for (int j = 0; j < m; ++j) b(j, j) += r2[j];
  out.asymmetry = (b - b.transpose()).cwiseAbs().maxCoeff();
  out.matrix = 0.5 * (b + b.transpose());
  return out;
}

SpectrumEdges jacobian_spectrum_edges(const Field& u, const ModelParams& params) {
  if (!u.is_real()) throw Error(ErrorCode::kTypeMismatch, "spectrum edges need a real field");
  const Grid& grid = u.grid();
  const ModelOperator op(grid, params);
  const auto n = static_cast<Eigen::Index>(grid.size());
  auto uv = u.values();

  // (-Delta)^s + |x|^2 >= 0, so J + mu >= 1 with this shift.
  double peak = 0.0;
  for (double v : uv) peak = std::max(peak, std::pow(std::abs(v), params.q - 2.0));
  const double mu = std::max(0.0, params.lambda + (params.q - 1.0) * peak) + 1.0;

  krylov::LinearMap shifted = [&](const Vector& x, Vector& y) {
    y.resize(x.size());
    op.jacobian(uv, std::span<const double>(x.data(), x.size()), std::span<double>(y.data(), y.size()));
    y += mu * x;
  };
  const auto precond = fourier_preconditioner(grid, op.symbol(), 1.0 + std::abs(mu - params.lambda));
  int inner_failures = 0;
  krylov::LinearMap inverse = [&](const Vector& x, Vector& y) {
    y = x / mu;
    const auto st = krylov::conjugate_gradient(shifted, x, y, 1e-13, 20000, precond);
    if (!st.converged && st.relative_residual > 1e-10) ++inner_failures;
  };

  // Fixed-seed start vector with both parities present.
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector start(n);
  for (Eigen::Index i = 0; i < n; ++i) start(i) = dist(rng);

  constexpr int kEigenvalues = 4;
  const auto lz = krylov::lanczos_largest(inverse, start, kEigenvalues, 200, 1e-12);
  if (!lz.converged || inner_failures > 0) {
    throw Error(ErrorCode::kNoConvergence, "Jacobian Lanczos iteration did not converge");
  }
  std::vector<double> eig;
  for (double theta : lz.values) eig.push_back(1.0 / theta - mu);
  std::sort(eig.begin(), eig.end());

  SpectrumEdges edges;
  edges.computed = true;
  edges.min_eig = eig.front();
  edges.min_abs_eig = std::abs(eig.front());
  for (double e : eig) {
    edges.min_abs_eig = std::min(edges.min_abs_eig, std::abs(e));
    if (e < 0.0 && edges.morse_index_le2 < 2) ++edges.morse_index_le2;
  }
  return edges;
}

}  // namespace fracgs
