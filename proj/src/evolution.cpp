#include "fracgs/evolution.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "fracgs/error.hpp"
#include "fracgs/spectral.hpp"

namespace fracgs {

using cplx = std::complex<double>;

double orbital_distance(const Field& psi, const Field& u) {
  if (!(psi.grid() == u.grid())) throw Error(ErrorCode::kInvalidArgument, "fields live on different grids");
  const auto a = psi.to_complex();
  const auto b = u.to_complex();
  cplx overlap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) overlap += std::conj(b[i]) * a[i];
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::norm(a[i] - phase * b[i]);
  return std::sqrt(sum * psi.grid().weight());
}

namespace {

double hamiltonian_of(const Grid& grid, std::span<const double> symbol, std::span<const cplx> psi,
                      double q, bool nonlinearity) {
  const double kinetic = spectral_quadratic_form(grid, symbol, psi);
  const auto r2 = grid.radius_squared();
  double potential = 0.0;
  double power = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double a2 = std::norm(psi[i]);
    potential += r2[i] * a2;
    if (nonlinearity) power += std::pow(a2, 0.5 * q);
  }
  const double w = grid.weight();
  return 0.5 * kinetic + 0.5 * potential * w - power * w / q;
}

double mass_of(const Grid& grid, std::span<const cplx> psi) {
  double sum = 0.0;
  for (const cplx& z : psi) sum += std::norm(z);
  return sum * grid.weight();
}

}  // namespace

double hamiltonian(const Field& psi, const ModelParams& params, bool nonlinearity) {
  const auto symbol = fractional_symbol(psi.grid(), params.s);
  const auto values = psi.to_complex();
  return hamiltonian_of(psi.grid(), symbol, values, params.q, nonlinearity);
}

Trajectory evolve(const Field& psi0, const ModelParams& params, const EvolutionOptions& opts,
                  const Field* reference) {
  if (!psi0.grid().valid()) throw Error(ErrorCode::kInvalidArgument, "initial field has no grid");
  if (!(opts.dt != 0.0) || !std::isfinite(opts.dt)) throw Error(ErrorCode::kInvalidArgument, "dt must be nonzero");
  if (!(opts.horizon >= std::abs(opts.dt))) throw Error(ErrorCode::kInvalidArgument, "horizon must be at least |dt|");
  if (opts.sample_every < 1) throw Error(ErrorCode::kInvalidArgument, "sample cadence must be positive");
  if (reference && !(reference->grid() == psi0.grid())) {
    throw Error(ErrorCode::kInvalidArgument, "reference lives on a different grid");
  }

  const Grid& grid = psi0.grid();
  const double dt = opts.dt;
  const double q = params.q;
  const int steps = static_cast<int>(std::llround(opts.horizon / std::abs(dt)));
  const auto symbol = fractional_symbol(grid, params.s);
  std::vector<cplx> propagator(symbol.size());
  for (std::size_t k = 0; k < symbol.size(); ++k) propagator[k] = std::polar(1.0, -symbol[k] * dt);
  const auto r2 = grid.radius_squared();
  const double half = 0.5 * dt;

  std::vector<cplx> psi = psi0.to_complex();
  std::vector<cplx> scratch(psi.size());

  auto phase_step = [&]() {
    for (std::size_t i = 0; i < psi.size(); ++i) {
      double v = r2[i];
      if (opts.nonlinearity) v -= std::pow(std::norm(psi[i]), 0.5 * (q - 2.0));
      psi[i] *= std::polar(1.0, -v * half);
    }
  };

  Trajectory traj;
  auto record = [&](int step) {
    TrajectorySample sample;
    sample.t = step * dt;
    sample.mass = mass_of(grid, psi);
    sample.hamiltonian = hamiltonian_of(grid, symbol, psi, q, opts.nonlinearity);
    sample.deviation = std::numeric_limits<double>::quiet_NaN();
    if (reference) sample.deviation = orbital_distance(Field::complex(grid, psi), *reference);
    traj.samples.push_back(sample);
    if (opts.keep_snapshots) traj.snapshots.push_back(Field::complex(grid, psi));
  };

  record(0);
  for (int n = 1; n <= steps; ++n) {
    phase_step();
    apply_symbol(grid, std::span<const cplx>(propagator), std::span<const cplx>(psi), std::span<cplx>(scratch));
    psi.swap(scratch);
    phase_step();
    bool finite = true;
    for (const cplx& z : psi) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        finite = false;
        break;
      }
    }
    if (!finite) {
      traj.blow_up = true;
      traj.steps = n;
      return traj;
    }
    traj.steps = n;
    if (n % opts.sample_every == 0 || n == steps) record(n);
  }
  traj.final_state = Field::complex(grid, psi);
  return traj;
}

Field smooth_random_field(const Grid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double L = grid.half_width();
  std::uniform_real_distribution<double> center(-0.5 * L, 0.5 * L);
  std::uniform_real_distribution<double> width(0.5, 2.0);
  std::uniform_real_distribution<double> amplitude(-1.0, 1.0);
  const int dim = grid.dim();
  const int m = grid.points_per_axis();
  const auto nodes = grid.axis_nodes();
  std::vector<double> values(grid.size(), 0.0);
  for (int b = 0; b < 8; ++b) {
    double c[2] = {center(rng), dim == 2 ? center(rng) : 0.0};
    const double w = width(rng);
    const double a = amplitude(rng);
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
      double r2 = 0.0;
      if (dim == 1) {
        r2 = (nodes[idx] - c[0]) * (nodes[idx] - c[0]);
      } else {
        const double dx = nodes[idx / m] - c[0];
        const double dy = nodes[idx % m] - c[1];
        r2 = dx * dx + dy * dy;
      }
      values[idx] += a * std::exp(-r2 / (2.0 * w * w));
    }
  }
  const double norm = l2_norm(grid, values);
  for (double& v : values) v /= norm;
  return Field::real(grid, std::move(values));
}

ProbeReport stability_probe(const GroundState& gs, double epsilon, double horizon, double dt,
                            std::uint64_t seed, int sample_every) {
  if (!gs.converged) throw Error(ErrorCode::kInvalidArgument, "probe needs a converged ground state");
  if (!(epsilon >= 0.0 && epsilon <= 0.1)) throw Error(ErrorCode::kInvalidArgument, "epsilon must lie in [0, 0.1]");
  const Grid& grid = gs.u.grid();
  const auto u = gs.u.values();
  const Field eta = smooth_random_field(grid, seed);
  const auto e = eta.values();

  std::vector<double> ue(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) ue[i] = u[i] * e[i];
  const double unorm = l2_norm(grid, u);
  const double uenorm = l2_norm(grid, ue);
  const double scale = uenorm > 0.0 ? unorm / uenorm : 0.0;

  std::vector<cplx> psi0(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) psi0[i] = u[i] + epsilon * scale * ue[i];

  EvolutionOptions opts;
  opts.dt = dt;
  opts.horizon = horizon;
  opts.sample_every = sample_every;
  ProbeReport rep;
  rep.epsilon = epsilon;
  rep.reference_norm = unorm;
  rep.trajectory = evolve(Field::complex(grid, psi0), gs.params, opts, &gs.u);
  rep.blow_up = rep.trajectory.blow_up;
  for (const auto& s : rep.trajectory.samples) {
    rep.max_deviation = std::max(rep.max_deviation, s.deviation);
    if (!rep.small_crossing && s.deviation > 10.0 * epsilon * unorm) rep.small_crossing = s.t;
    if (!rep.large_crossing && s.deviation > 0.1 * unorm) rep.large_crossing = s.t;
  }
  if (rep.blow_up && !rep.large_crossing) {
    rep.large_crossing = rep.trajectory.steps * dt;
    rep.max_deviation = std::numeric_limits<double>::infinity();
  }
  return rep;
}

}  // namespace fracgs
