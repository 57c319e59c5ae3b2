#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "doctest.h"
#include "fracgs/error.hpp"
#include "fracgs/groundstate.hpp"

using namespace fracgs;

namespace {

// Even solution of u'' = x^2 u - u^5 by bisection on u(0). Too large a start
// crosses zero; too small a start turns upward. State: (u, u', integral of u^2).
double shooting_mass() {
  using State = std::array<double, 3>;
  namespace odeint = boost::numeric::odeint;
  auto rhs = [](const State& y, State& dy, double x) {
    dy[0] = y[1];
    dy[1] = x * x * y[0] - y[0] * y[0] * y[0] * y[0] * y[0];
    dy[2] = y[0] * y[0];
  };
  const double xmax = 5.0;
  // +1: crossed zero, -1: turned upward, 0: reached xmax undecided.
  auto classify = [&](double u0, State& end) {
    State y{u0, 0.0, 0.0};
    auto stepper = odeint::make_controlled(1e-14, 1e-14, odeint::runge_kutta_dopri5<State>());
    double x = 0.0, dx = 1e-3;
    while (x < xmax) {
      if (x + dx > xmax) dx = xmax - x;
      if (stepper.try_step(rhs, y, x, dx) != odeint::success) continue;
      if (y[0] < 0.0) return 1;
      if (y[1] > 0.0) return -1;
    }
    end = y;
    return 0;
  };
  double lo = 0.5, hi = 3.0;
  State end{};
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const int c = classify(mid, end);
    if (c > 0) hi = mid;
    else lo = mid;
  }
  // Integrate the bracketed trajectory up to where it starts to separate.
  State y{0.5 * (lo + hi), 0.0, 0.0};
  double best = 0.0;
  auto stepper = odeint::make_controlled(1e-14, 1e-14, odeint::runge_kutta_dopri5<State>());
  double x = 0.0, dx = 1e-3;
  while (x < 4.5) {
    if (x + dx > 4.5) dx = 4.5 - x;
    if (stepper.try_step(rhs, y, x, dx) != odeint::success) continue;
    best = y[2];
  }
  return 2.0 * best;
}

}  // namespace

TEST_CASE("s = 1, q = 6, lambda = 0 mass matches the shooting oracle") {
  const double oracle = shooting_mass();
  const GroundState gs = solve_ground_state(ModelParams{1, 1.0, 6.0, 0.0}, make_grid(1, 12.0, 512));
  REQUIRE(gs.converged);
  CHECK(std::abs(gs.observables.mass - oracle) <= 1e-6 * oracle);
}

TEST_CASE("classical ground state satisfies every identity") {
  const GroundState gs = solve_ground_state(ModelParams{1, 1.0, 6.0, -1.0}, make_grid(1, 12.0, 512));
  REQUIRE(gs.converged);
  CHECK(gs.residual_norm <= 1e-10);
  CHECK(gs.identities.pohozaev_rel <= 1e-10);
  CHECK(gs.identities.id1_rel <= 1e-10);
  CHECK(gs.identities.id2_rel <= 1e-10);
  CHECK(gs.identities.action_simple_rel <= 1e-8);
  CHECK(gs.identities.energy_lb_gap >= -1e-8);
  CHECK(gs.spectrum.computed);
  CHECK(gs.spectrum.min_eig < 0.0);
  CHECK(gs.spectrum.morse_index_le2 == 1);
  CHECK(gs.spectrum.min_abs_eig > 1e-6);
  const auto u = gs.u.values();
  const double peak = *std::max_element(u.begin(), u.end());
  for (double v : u) {
    if (std::abs(v) > 1e-10 * peak) CHECK(v > 0.0);
  }
  CHECK(std::isfinite(gs.log.newton_tail_constant));

  // Nehari identity <F(u), u> = 0 up to the residual.
  const Residual r = residual_field(gs.u, gs.params);
  const double pairing = inner(gs.u.grid(), r.field.values(), u);
  CHECK(std::abs(pairing) <= 10.0 * gs.residual_norm * l2_norm(gs.u));
}

TEST_CASE("grid refinement changes the classical mass by at most 1e-8") {
  const ModelParams p{1, 1.0, 6.0, 0.0};
  SolverOptions opts;
  opts.compute_spectrum = false;
  const double coarse = solve_ground_state(p, make_grid(1, 12.0, 256), opts).observables.mass;
  const double fine = solve_ground_state(p, make_grid(1, 12.0, 512), opts).observables.mass;
  CHECK(std::abs(coarse - fine) <= 1e-8);
}

TEST_CASE("fractional ground state near lambda_1 follows the bifurcation law") {
  const Grid g = make_grid(1, 12.0, 512);
  const SolverContext ctx(g, 0.5);
  const ModelParams p{1, 0.5, 6.0, ctx.lambda1() - 0.05};
  const GroundState gs = solve_ground_state(ctx, p);
  REQUIRE(gs.converged);
  const double amp = bifurcation_amplitude(ctx.ground(), p.lambda, p.q);
  CHECK(std::abs(gs.observables.mass - amp * amp) <= 0.1 * amp * amp);
  CHECK(gs.identities.action_simple_rel <= 1e-8);
}

TEST_CASE("regime violations") {
  const Grid g = make_grid(1, 12.0, 256);
  try {
    solve_ground_state(ModelParams{1, 1.0, 6.0, 1.5}, g);
    FAIL("expected lambda-above-threshold");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLambdaAboveThreshold);
  }
  try {
    solve_ground_state(ModelParams{2, 0.5, 4.5, -1.0}, make_grid(2, 8.0, 32));
    FAIL("expected regime error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRegime);
  }
}

TEST_CASE("two-dimensional classical solve") {
  SolverOptions opts;
  opts.compute_spectrum = false;
  const GroundState gs = solve_ground_state(ModelParams{2, 1.0, 4.0, 0.0}, make_grid(2, 8.0, 128), opts);
  CHECK(gs.converged);
  CHECK(gs.identities.pohozaev_rel < 1e-8);
}

TEST_CASE("uniqueness probe on the classical problem") {
  SolverOptions opts;
  opts.compute_spectrum = false;
  const ModelParams p{1, 1.0, 6.0, -2.0};
  const Grid g = make_grid(1, 12.0, 256);
  const UniquenessReport rep = uniqueness_probe(p, g, 6, 42, opts);
  CHECK(rep.converged_count == 6);
  CHECK(rep.max_distance <= 1e-8);
  CHECK_FALSE(rep.near_critical);

  const SolverContext ctx(g, 1.0);
  const Field a = gaussian_bump(g, 1.0);
  std::vector<double> neg(a.values().begin(), a.values().end());
  for (double& v : neg) v = -v;
  const UniquenessReport pair = uniqueness_probe(ctx, p, {a, Field::real(g, neg)}, opts);
  CHECK(pair.max_distance <= 1e-10);
}

TEST_CASE("random starts are deterministic") {
  const Grid g = make_grid(1, 12.0, 128);
  const auto a = random_bump_starts(g, 4, 9);
  const auto b = random_bump_starts(g, 4, 9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::equal(a[i].values().begin(), a[i].values().end(), b[i].values().begin()));
  }
  const auto c = random_bump_starts(g, 4, 10);
  CHECK_FALSE(std::equal(a[0].values().begin(), a[0].values().end(), c[0].values().begin()));
}

TEST_CASE("aligned distance ignores the global sign") {
  const Grid g = make_grid(1, 6.0, 64);
  const Field a = gaussian_bump(g, 1.0);
  std::vector<double> neg(a.values().begin(), a.values().end());
  for (double& v : neg) v = -v;
  CHECK(aligned_distance(a, Field::real(g, neg)) == 0.0);
  const double c[] = {1.0};
  CHECK(aligned_distance(a, gaussian_bump(g, 1.0, c)) > 0.1);
}
