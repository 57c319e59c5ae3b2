#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fracgs/grid.hpp"
#include "fracgs/groundstate.hpp"
#include "fracgs/params.hpp"

namespace fracgs {

struct EvolutionOptions {
  double dt = 1e-3;
  double horizon = 20.0;
  bool nonlinearity = true;
  int sample_every = 100;       ///< steps between diagnostic samples
  bool keep_snapshots = false;  ///< store psi at every sample
};

struct TrajectorySample {
  double t = 0.0;
  double mass = 0.0;
  double hamiltonian = 0.0;  ///< K/2 + P/2 - Q/q (Q dropped in linear mode)
  double deviation = 0.0;    ///< min over theta of ||psi - e^{i theta} u_ref||_2; NaN without a reference
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<Field> snapshots;
  Field final_state;
  int steps = 0;
  bool blow_up = false;  ///< non-finite values met; samples stop there
};

/// Strang splitting for i psi_t = (-Delta)^s psi + |x|^2 psi - |psi|^{q-2} psi:
/// half pointwise phase step, full kinetic step exp(-i |xi|^{2s} dt), half phase step.
/// A negative dt runs the flow backwards.
Trajectory evolve(const Field& psi0, const ModelParams& params, const EvolutionOptions& opts,
                  const Field* reference = nullptr);

/// Phase-minimized L^2 distance inf_theta ||psi - e^{i theta} u||_2.
double orbital_distance(const Field& psi, const Field& u);

/// Hamiltonian K/2 + P/2 - Q/q of a complex field.
double hamiltonian(const Field& psi, const ModelParams& params, bool nonlinearity = true);

/// Smooth real field with unit L^2 norm: random Gaussian bumps from the seed.
Field smooth_random_field(const Grid& grid, std::uint64_t seed);

struct ProbeReport {
  double epsilon = 0.0;
  double reference_norm = 0.0;  ///< ||u||_2
  double max_deviation = 0.0;
  std::optional<double> small_crossing;  ///< first t with deviation > 10 eps ||u||_2
  std::optional<double> large_crossing;  ///< first t with deviation > 0.1 ||u||_2
  bool blow_up = false;
  Trajectory trajectory;
};

/// Evolves u (1 + eps eta), eta from smooth_random_field rescaled so that
/// ||u eta||_2 = ||u||_2, and tracks the orbital distance to u.
ProbeReport stability_probe(const GroundState& gs, double epsilon, double horizon, double dt,
                            std::uint64_t seed, int sample_every = 10);

}  // namespace fracgs
