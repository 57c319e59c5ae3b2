#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fracgs/error.hpp"
#include "fracgs/linear_spectrum.hpp"
#include "fracgs/model.hpp"

using namespace fracgs;

TEST_CASE("critical exponents") {
  const double inf = std::numeric_limits<double>::infinity();
  auto c = critical_exponents(1, 0.5);
  CHECK(c.lower == doctest::Approx(4.0));
  CHECK(c.upper == inf);
  c = critical_exponents(1, 1.0);
  CHECK(c.lower == doctest::Approx(6.0));
  CHECK(c.upper == inf);
  c = critical_exponents(2, 0.5);
  CHECK(c.lower == doctest::Approx(3.0));
  CHECK(c.upper == doctest::Approx(4.0));
  c = critical_exponents(2, 0.75);
  CHECK(c.upper == doctest::Approx(8.0));
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(ModelParams{1, 0.5, 6.0, -2.0}.validate());
  CHECK_THROWS_AS(ModelParams(1, 0.5, 2.0, 0.0).validate(), Error);
  CHECK_THROWS_AS(ModelParams(1, 1.5, 6.0, 0.0).validate(), Error);
  CHECK_THROWS_AS(ModelParams(1, 0.0, 6.0, 0.0).validate(), Error);
  try {
    ModelParams{1, 0.5, 1.5, 0.0}.validate();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRegime);
  }
  CHECK(ModelParams{2, 0.5, 3.5, 0.0}.sobolev_subcritical());
  CHECK_FALSE(ModelParams{2, 0.5, 4.5, 0.0}.sobolev_subcritical());
  CHECK(ModelParams{1, 0.5, 6.0, 0.0}.mass_supercritical());
  CHECK_FALSE(ModelParams{1, 0.5, 3.0, 0.0}.mass_supercritical());
}

TEST_CASE("k is positive across the mass-supercritical regime") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = unit(rng) < 0.5 ? 1 : 2;
    const double s = 0.05 + 0.95 * unit(rng);
    const double lower = 2.0 + 4.0 * s / n;
    const double upper = n > 2.0 * s ? 2.0 * n / (n - 2.0 * s) : lower + 20.0;
    const double q = lower + (upper - lower) * (0.001 + 0.998 * unit(rng));
    const double k = lower_bound_constant(n, s, q);
    const double expected = ((q - 2.0) * n - 4.0 * s) / (2.0 * n - (n - 2.0 * s) * q);
    REQUIRE(k > 0.0);
    CHECK(k == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(std::isnan(lower_bound_constant(2, 0.5, 4.0)));
}

TEST_CASE("power nonlinearity") {
  CHECK(power_nonlinearity(0.0, 6.0) == 0.0);
  CHECK(power_nonlinearity(2.0, 6.0) == doctest::Approx(32.0));
  CHECK(power_nonlinearity(-2.0, 6.0) == doctest::Approx(-32.0));
  CHECK(power_nonlinearity(-1.5, 3.5) == doctest::Approx(-std::pow(1.5, 2.5)));
}

TEST_CASE("Jacobian matches a central finite difference of the residual") {
  const Grid g = make_grid(1, 10.0, 128);
  const ModelParams p{1, 0.6, 5.0, -1.0};
  const auto r2 = g.radius_squared();
  const auto x = g.axis_nodes();
  std::vector<double> u(g.size()), v(g.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = 1.3 * std::exp(-r2[i] / 2.0);
    v[i] = std::sin(x[i]) * std::exp(-r2[i] / 3.0);
  }
  const ModelOperator op(g, p);
  const double eps = 1e-6;
  std::vector<double> up(u), um(u), fp(g.size()), fm(g.size()), jv(g.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    up[i] += eps * v[i];
    um[i] -= eps * v[i];
  }
  op.residual(up, fp);
  op.residual(um, fm);
  op.jacobian(u, v, jv);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    err = std::max(err, std::abs((fp[i] - fm[i]) / (2 * eps) - jv[i]));
    scale = std::max(scale, std::abs(jv[i]));
  }
  CHECK(err <= 1e-6 * scale);

  const Field jf = jacobian_apply(Field::real(g, u), Field::real(g, v), p);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(jf.values()[i] == doctest::Approx(jv[i]).epsilon(1e-14));
}

TEST_CASE("residual of a Gaussian at s = 1 has the closed form") {
  // F(e^{-x^2/2}) = (1 - x^2) g + x^2 g - lambda g - g^{q-1} = (1 - lambda) g - g^{q-1}.
  const Grid g = make_grid(1, 12.0, 256);
  const ModelParams p{1, 1.0, 4.0, 0.25};
  const auto r2 = g.radius_squared();
  std::vector<double> u(g.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(-r2[i] / 2.0);
  const Residual r = residual_field(Field::real(g, u), p);
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    err = std::max(err, std::abs(r.field.values()[i] - (0.75 * u[i] - u[i] * u[i] * u[i])));
  }
  CHECK(err < 1e-12);
  CHECK(r.norm == doctest::Approx(l2_norm(r.field)));
}

TEST_CASE("identity residuals vanish on observables built to satisfy them") {
  for (const auto& p : {ModelParams{1, 0.5, 6.0, -2.0}, ModelParams{2, 0.8, 3.7, 0.4}, ModelParams{1, 1.0, 8.0, -5.0}}) {
    Observables o;
    o.mass = 0.7;
    o.power_q = 1.9;
    const double c = (p.q - 2.0) / (2.0 * p.q) * p.dim * o.power_q;
    // Nehari: K + P = lambda m + Q; first identity: s K = P + c.
    o.kinetic_s = (p.lambda * o.mass + o.power_q + c) / (1.0 + p.s);
    o.potential = p.s * o.kinetic_s - c;
    const IdentityReport r = identity_residuals(o, p);
    CHECK(r.pohozaev_rel < 1e-14);
    CHECK(r.id1_rel < 1e-14);
    CHECK(r.id2_rel < 1e-14);
    CHECK(r.action_simple_rel < 1e-14);
    CHECK(action(o, p) == doctest::Approx((p.q - 2.0) / (2.0 * p.q) * o.power_q));
    const double k = lower_bound_constant(p.dim, p.s, p.q);
    CHECK(r.energy_lb_gap == doctest::Approx(action(o, p) + (1.0 + k) * p.lambda / 2.0 * o.mass));
  }
}

TEST_CASE("identity residuals flag a perturbed state") {
  const ModelParams p{1, 1.0, 6.0, 0.0};
  Observables o{1.0, 1.0, 1.0, 1.0};
  const IdentityReport r = identity_residuals(o, p);
  CHECK(r.pohozaev_rel > 0.1);
}

TEST_CASE("action of a normalized Gaussian") {
  const Grid g = make_grid(1, 12.0, 256);
  const auto r2 = g.radius_squared();
  std::vector<double> u(g.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::pow(std::numbers::pi, -0.25) * std::exp(-r2[i] / 2.0);
  const double expected = 0.5 * (0.5 + 0.5) - 0.25 / std::sqrt(2.0 * std::numbers::pi);
  CHECK(action(Field::real(g, u), ModelParams{1, 1.0, 4.0, 0.0}) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(action(Field::zeros(g), ModelParams{1, 0.5, 4.0, 0.0}) == 0.0);
}

TEST_CASE("residual at the linear ground state leaves only the nonlinear term") {
  const Grid g = make_grid(1, 12.0, 256);
  const EigenPair phi = ground_eigenpair(0.6, 1, g);
  const double q = 5.0;
  const Residual r = residual_field(phi.vector, ModelParams{1, 0.6, q, phi.value});
  double sum = 0.0;
  for (double v : phi.vector.values()) sum += std::pow(std::abs(v), 2.0 * (q - 1.0));
  const double expected = std::sqrt(sum * g.weight());
  CHECK(r.norm == doctest::Approx(expected).epsilon(1e-9));
  CHECK(residual_field(Field::zeros(g), ModelParams{}).norm == 0.0);
}
