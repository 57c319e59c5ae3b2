#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "fracgs/error.hpp"
#include "fracgs/evolution.hpp"
#include "fracgs/linear_spectrum.hpp"

using namespace fracgs;

namespace {

double eigenstate_phase_error(const EigenPair& phi, const ModelParams& p, double dt) {
  EvolutionOptions opts;
  opts.dt = dt;
  opts.horizon = 1.0;
  opts.nonlinearity = false;
  opts.sample_every = 1000000;
  const Trajectory traj = evolve(phi.vector, p, opts);
  const auto psi = traj.final_state.complex_values();
  const auto v = phi.vector.values();
  const std::complex<double> rot = std::polar(1.0, -phi.value * 1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += std::norm(psi[i] - rot * v[i]);
  return std::sqrt(sum * phi.vector.grid().weight());
}

}  // namespace

TEST_CASE("linear eigenstate rotates with its eigenvalue") {
  const Grid g = make_grid(1, 12.0, 256);
  const EigenPair phi = ground_eigenpair(1.0, 1, g);
  const ModelParams p{1, 1.0, 6.0, 0.0};
  const double e1 = eigenstate_phase_error(phi, p, 1e-3);
  const double e2 = eigenstate_phase_error(phi, p, 5e-4);
  CHECK(e1 <= 1e-5);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("mass is conserved step by step and the flow is reversible") {
  const Grid g = make_grid(1, 12.0, 256);
  const ModelParams p{1, 0.5, 6.0, 0.0};
  const auto x = g.axis_nodes();
  std::vector<std::complex<double>> z(g.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::polar(0.8 * std::exp(-(x[i] - 1.0) * (x[i] - 1.0) / 2.0), 0.3 * x[i]);
  const Field psi0 = Field::complex(g, z);

  EvolutionOptions opts;
  opts.dt = 1e-3;
  opts.horizon = 0.2;
  opts.sample_every = 1;
  const Trajectory traj = evolve(psi0, p, opts);
  REQUIRE(traj.samples.size() == 201);
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    CHECK(std::abs(traj.samples[k].mass - traj.samples[k - 1].mass) <= 1e-12 * traj.samples[0].mass);
  }
  CHECK(std::isnan(traj.samples[0].deviation));

  EvolutionOptions fwd;
  fwd.dt = 1e-3;
  fwd.horizon = 1e-3;
  EvolutionOptions back = fwd;
  back.dt = -1e-3;
  const Field one = evolve(psi0, p, fwd).final_state;
  const Field home = evolve(one, p, back).final_state;
  double diff = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) diff += std::norm(home.complex_values()[i] - z[i]);
  CHECK(std::sqrt(diff * g.weight()) <= 1e-12 * l2_norm(psi0));
}

TEST_CASE("orbital distance removes the global phase") {
  const Grid g = make_grid(1, 8.0, 64);
  std::vector<double> u(g.size());
  const auto r2 = g.radius_squared();
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(-r2[i]);
  std::vector<std::complex<double>> z(u.begin(), u.end());
  for (auto& v : z) v *= std::polar(1.0, 1.234);
  CHECK(orbital_distance(Field::complex(g, z), Field::real(g, u)) < 1e-14);
  for (auto& v : z) v *= 1.1;
  CHECK(orbital_distance(Field::complex(g, z), Field::real(g, u)) ==
        doctest::Approx(0.1 * l2_norm(g, u)).epsilon(1e-12));
}

TEST_CASE("smooth random fields are unit-norm and seeded") {
  const Grid g = make_grid(1, 12.0, 256);
  const Field a = smooth_random_field(g, 5);
  const Field b = smooth_random_field(g, 5);
  CHECK(l2_norm(a) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  CHECK(spectral_tail_fraction(a) < 1e-8);
}

TEST_CASE("unperturbed probe stays at the splitting error") {
  const Grid g = make_grid(1, 12.0, 256);
  SolverOptions so;
  so.compute_spectrum = false;
  const GroundState gs = solve_ground_state(ModelParams{1, 1.0, 8.0, 0.9}, g, so);
  REQUIRE(gs.converged);
  const ProbeReport rep = stability_probe(gs, 0.0, 1.0, 1e-3, 3);
  CHECK(rep.max_deviation < 1e-6);
  CHECK_FALSE(rep.large_crossing);
  CHECK_FALSE(rep.blow_up);
  CHECK_THROWS_AS(stability_probe(gs, 0.2, 1.0, 1e-3, 3), Error);
}

TEST_CASE("evolution argument checks") {
  const Grid g = make_grid(1, 8.0, 64);
  const Field z = Field::zeros(g, FieldKind::kComplex);
  const ModelParams p{1, 1.0, 6.0, 0.0};
  EvolutionOptions opts;
  opts.dt = 0.0;
  CHECK_THROWS_AS(evolve(z, p, opts), Error);
  opts.dt = 0.1;
  opts.horizon = 0.01;
  CHECK_THROWS_AS(evolve(z, p, opts), Error);
}
