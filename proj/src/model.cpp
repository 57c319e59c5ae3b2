#include "fracgs/model.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>

#include "fracgs/error.hpp"

namespace fracgs {

CriticalExponents critical_exponents(int dim, double s) {
  const double n = dim;
  const double lower = 2.0 + 4.0 * s / n;
  const double upper =
      n > 2.0 * s ? 2.0 * n / (n - 2.0 * s) : std::numeric_limits<double>::infinity();
  return {lower, upper};
}

bool ModelParams::mass_supercritical() const { return q > critical_exponents(dim, s).lower; }

bool ModelParams::sobolev_subcritical() const { return q < critical_exponents(dim, s).upper; }

void ModelParams::validate() const {
  if (dim < 1) throw Error(ErrorCode::kRegime, "dimension must be at least 1");
  if (!(s > 0.0 && s <= 1.0)) throw Error(ErrorCode::kRegime, "fractional order s must lie in (0, 1]");
  if (!(q > 2.0)) throw Error(ErrorCode::kRegime, "exponent q must exceed 2");
  if (!std::isfinite(lambda)) throw Error(ErrorCode::kRegime, "lambda must be finite");
}

ModelOperator::ModelOperator(const Grid& grid, const ModelParams& params)
    : grid_(grid), params_(params), symbol_(fractional_symbol(grid, params.s)) {}

void ModelOperator::apply_trap(std::span<const double> v, std::span<double> out) const {
  apply_symbol(grid_, symbol_, v, out);
  auto r2 = grid_.radius_squared();
  for (std::size_t i = 0; i < v.size(); ++i) out[i] += r2[i] * v[i];
}

void ModelOperator::residual(std::span<const double> u, std::span<double> out) const {
  apply_trap(u, out);
  const double lambda = params_.lambda;
  const double q = params_.q;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] -= lambda * u[i] + power_nonlinearity(u[i], q);
  }
}

void ModelOperator::jacobian(std::span<const double> u, std::span<const double> v,
                             std::span<double> out) const {
  apply_trap(v, out);
  const double lambda = params_.lambda;
  const double q = params_.q;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] -= (lambda + (q - 1.0) * std::pow(std::abs(u[i]), q - 2.0)) * v[i];
  }
}

double action(const Observables& obs, const ModelParams& params) {
  return 0.5 * (obs.kinetic_s + obs.potential - params.lambda * obs.mass) - obs.power_q / params.q;
}

double action(const Field& u, const ModelParams& params) { return action(observables(u, params), params); }

Residual residual_field(const Field& u, const ModelParams& params) {
  if (!u.is_real()) throw Error(ErrorCode::kTypeMismatch, "residual needs a real field");
  ModelOperator op(u.grid(), params);
  std::vector<double> out(u.size());
  op.residual(u.values(), out);
  const double norm = l2_norm(u.grid(), out);
  return {Field::real(u.grid(), std::move(out)), norm};
}

Field jacobian_apply(const Field& u, const Field& v, const ModelParams& params) {
  if (!u.is_real() || !v.is_real()) {
    throw Error(ErrorCode::kTypeMismatch, "jacobian needs real fields");
  }
  if (!(u.grid() == v.grid())) throw Error(ErrorCode::kLengthMismatch, "fields live on different grids");
  ModelOperator op(u.grid(), params);
  std::vector<double> out(u.size());
  op.jacobian(u.values(), v.values(), out);
  return Field::real(u.grid(), std::move(out));
}

double lower_bound_constant(int dim, double s, double q) {
  const double n = dim;
  const double denom = 2.0 * n - (n - 2.0 * s) * q;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return ((q - 2.0) * n - 4.0 * s) / denom;
}

namespace {

// |lhs - rhs| relative to the largest single term.
double relative_gap(std::initializer_list<double> lhs, std::initializer_list<double> rhs) {
  double l = 0.0;
  double r = 0.0;
  double scale = 0.0;
  for (double t : lhs) {
    l += t;
    scale = std::max(scale, std::abs(t));
  }
  for (double t : rhs) {
    r += t;
    scale = std::max(scale, std::abs(t));
  }
  return scale > 0.0 ? std::abs(l - r) / scale : 0.0;
}

}  // namespace

IdentityReport identity_residuals(const Observables& obs, const ModelParams& params) {
  const double n = params.dim;
  const double s = params.s;
  const double q = params.q;
  const double lam = params.lambda;
  const double K = obs.kinetic_s;
  const double P = obs.potential;
  const double m = obs.mass;
  const double Q = obs.power_q;

  IdentityReport rep;
  rep.pohozaev_rel =
      relative_gap({(n - 2.0 * s) * K, (n + 2.0) * P}, {n * lam * m, (2.0 * n / q) * Q});
  rep.id1_rel = relative_gap({s * K}, {P, (q - 2.0) / (2.0 * q) * n * Q});
  rep.id2_rel =
      relative_gap({2.0 * (1.0 + s) * P, -2.0 * s * lam * m}, {(2.0 * n / q - (n - 2.0 * s)) * Q});

  const double phi = action(obs, params);
  const double simple = (q - 2.0) / (2.0 * q) * Q;
  const double scale = std::max(std::abs(phi), std::abs(simple));
  rep.action_simple_rel = scale > 0.0 ? std::abs(phi - simple) / scale : 0.0;

  rep.k = lower_bound_constant(params.dim, s, q);
  rep.k_defined = !std::isnan(rep.k);
  rep.energy_lb_gap = rep.k_defined ? phi + (1.0 + rep.k) * (lam / 2.0) * m
                                    : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

IdentityReport identity_residuals(const Field& u, const ModelParams& params) {
  return identity_residuals(observables(u, params), params);
}

}  // namespace fracgs
