#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "fracgs/grid.hpp"
#include "fracgs/params.hpp"
#include "fracgs/spectral.hpp"

namespace fracgs {

/// Discrete (-Delta)^s + |x|^2 - lambda - |u|^{q-2} and its linearization on a
/// fixed grid. Holds the |xi|^{2s} table so repeated applications stay cheap.
class ModelOperator {
 public:
  ModelOperator(const Grid& grid, const ModelParams& params);

  const Grid& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }
  std::span<const double> symbol() const { return symbol_; }

  /// out = (-Delta)^s v + |x|^2 v.
  void apply_trap(std::span<const double> v, std::span<double> out) const;
  /// out = F(u) = (-Delta)^s u + |x|^2 u - lambda u - |u|^{q-2} u.
  void residual(std::span<const double> u, std::span<double> out) const;
  /// out = J(u) v = (-Delta)^s v + |x|^2 v - lambda v - (q-1)|u|^{q-2} v.
  void jacobian(std::span<const double> u, std::span<const double> v, std::span<double> out) const;

 private:
  Grid grid_;
  ModelParams params_;
  std::vector<double> symbol_;
};

/// sign(u)|u|^{q-1}, which equals |u|^{q-2}u for real u and is 0 at u = 0.
inline double power_nonlinearity(double u, double q);

/// Phi_lambda(u) = (K + P - lambda mass)/2 - Q/q.
double action(const Field& u, const ModelParams& params);
double action(const Observables& obs, const ModelParams& params);

struct Residual {
  Field field;
  double norm = 0.0;
};

Residual residual_field(const Field& u, const ModelParams& params);

Field jacobian_apply(const Field& u, const Field& v, const ModelParams& params);

/// Relative residuals of the scaling identities satisfied by every solution.
struct IdentityReport {
  /// (N-2s)K + (N+2)P = N lambda mass + (2N/q) Q.
  double pohozaev_rel = 0.0;
  /// s K = P + ((q-2)/(2q)) N Q.
  double id1_rel = 0.0;
  /// 2(1+s) P - 2 s lambda mass = (2N/q - (N-2s)) Q.
  double id2_rel = 0.0;
  /// Phi = ((q-2)/(2q)) Q.
  double action_simple_rel = 0.0;
  /// Phi + (1+k)(lambda/2) mass; nonnegative at solutions. NaN when k is undefined.
  double energy_lb_gap = 0.0;
  /// ((q-2)N - 4s)/(2N - (N-2s)q); NaN when the denominator vanishes.
  double k = 0.0;
  bool k_defined = true;
};

/// NaN when 2N = (N-2s)q.
double lower_bound_constant(int dim, double s, double q);

IdentityReport identity_residuals(const Field& u, const ModelParams& params);
IdentityReport identity_residuals(const Observables& obs, const ModelParams& params);

inline double power_nonlinearity(double u, double q) {
  if (u == 0.0) return 0.0;
  const double a = std::abs(u);
  const double v = q == 6.0 ? a * a * a * a * a : std::pow(a, q - 1.0);
  return u > 0.0 ? v : -v;
}

}  // namespace fracgs
