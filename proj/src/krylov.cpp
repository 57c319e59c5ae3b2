#include "fracgs/krylov.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace fracgs::krylov {

SolveStats conjugate_gradient(const LinearMap& op, const Vector& b, Vector& x, double rel_tol,
                              int max_iter, const LinearMap& precond) {
  SolveStats stats;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    stats.converged = true;
    return stats;
  }
  Vector r(b.size());
  op(x, r);
  r = b - r;
  Vector z(b.size());
  if (precond) precond(r, z); else z = r;
  Vector p = z;
  Vector ap(b.size());
  double rz = r.dot(z);
  for (int it = 0; it < max_iter; ++it) {
    stats.relative_residual = r.norm() / bnorm;
    if (stats.relative_residual <= rel_tol) {
      stats.converged = true;
      stats.iterations = it;
      return stats;
    }
    op(p, ap);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    if (precond) precond(r, z); else z = r;
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
    stats.iterations = it + 1;
  }
  stats.relative_residual = r.norm() / bnorm;
  stats.converged = stats.relative_residual <= rel_tol;
  return stats;
}

SolveStats minres(const LinearMap& op, const Vector& b, Vector& x, double rel_tol, int max_iter,
                  const LinearMap& precond) {
  SolveStats stats;
  const Eigen::Index n = b.size();
  auto psolve = [&](const Vector& in, Vector& out) {
    if (precond) precond(in, out); else out = in;
  };
  Vector r1(n);
  op(x, r1);
  r1 = b - r1;
  Vector y(n);
  psolve(r1, y);
  const double beta1 = std::sqrt(std::max(r1.dot(y), 0.0));
  if (beta1 == 0.0) {
    stats.converged = true;
    return stats;
  }
  Vector r2 = r1;
  Vector v(n), w = Vector::Zero(n), w1(n), w2 = Vector::Zero(n);
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int itn = 1; itn <= max_iter; ++itn) {
    v = y / beta;
    op(v, y);
    if (itn >= 2) y -= (beta / oldb) * r1;
    const double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    psolve(r2, y);
    oldb = beta;
    beta = std::sqrt(std::max(r2.dot(y), 0.0));
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), eps);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;
    stats.iterations = itn;
    stats.relative_residual = phibar / beta1;
    if (stats.relative_residual <= rel_tol) {
      stats.converged = true;
      break;
    }
    if (beta == 0.0) break;
  }
  return stats;
}

LanczosResult lanczos_largest(const LinearMap& op, Vector start, int nev, int max_steps,
                              double rel_tol) {
  const Eigen::Index n = start.size();
  max_steps = static_cast<int>(std::min<Eigen::Index>(max_steps, n));
  Eigen::MatrixXd basis(n, max_steps + 1);
  std::vector<double> alpha;
  std::vector<double> beta;
  basis.col(0) = start / start.norm();
  LanczosResult result;
  Vector w(n);
  for (int j = 0; j < max_steps; ++j) {
    op(basis.col(j), w);
    alpha.push_back(basis.col(j).dot(w));
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      const Vector coeff = basis.leftCols(j + 1).transpose() * w;
      w -= basis.leftCols(j + 1) * coeff;
    }
    const double b = w.norm();
    beta.push_back(b);

    const int m = j + 1;
    if (m >= nev) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      bool done = true;
      for (int i = 0; i < nev; ++i) {
        const Eigen::Index col = m - 1 - i;
        const double theta = es.eigenvalues()(col);
        const double resid = std::abs(b * es.eigenvectors()(m - 1, col));
        if (resid > rel_tol * std::abs(theta)) done = false;
      }
      if (done || b < 1e-14 || m == max_steps) {
        result.values.clear();
        for (int i = 0; i < nev; ++i) result.values.push_back(es.eigenvalues()(m - 1 - i));
        result.steps = m;
        result.converged = done || b < 1e-14;
        return result;
      }
    }
    basis.col(j + 1) = w / b;
  }
  return result;
}

}  // namespace fracgs::krylov
