#include "fracgs/cli.hpp"

#include <charconv>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fracgs/continuation.hpp"
#include "fracgs/error.hpp"
#include "fracgs/evolution.hpp"
#include "fracgs/groundstate.hpp"

namespace fracgs {

using Report = nlohmann::ordered_json;

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "model.N",          "model.s",         "model.q",          "model.lambda",
      "grid.L",           "grid.M",          "solver.tol",       "run.seed",
      "branch.lambda_min", "branch.points",  "branch.delta0",    "fold.tol",
      "normalized.c",     "normalized.mass_tol", "homotopy.steps", "evolve.dt",
      "evolve.T",         "evolve.nonlinear", "evolve.sample_every", "evolve.epsilon",
      "probe.starts"};
  return keys;
}

namespace {

double parse_double(const std::string& key, const std::string& text) {
  if (text == "nan" || text == "auto") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kUsage, "config key '" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kUsage, "config key '" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw Error(ErrorCode::kUsage, "config key '" + key + "' expects true or false, got '" + text + "'");
}

}  // namespace

void apply_config(RunConfig& cfg, const ConfigMap& map) {
  for (const auto& [k, v] : map) {
    if (k == "model.N") cfg.dim = parse_int<int>(k, v);
    else if (k == "model.s") cfg.s = parse_double(k, v);
    else if (k == "model.q") cfg.q = parse_double(k, v);
    else if (k == "model.lambda") cfg.lambda = parse_double(k, v);
    else if (k == "grid.L") cfg.half_width = parse_double(k, v);
    else if (k == "grid.M") cfg.points = parse_int<int>(k, v);
    else if (k == "solver.tol") cfg.tol = parse_double(k, v);
    else if (k == "run.seed") cfg.seed = parse_int<std::uint64_t>(k, v);
    else if (k == "branch.lambda_min") cfg.lambda_min = parse_double(k, v);
    else if (k == "branch.points") cfg.branch_points = parse_int<int>(k, v);
    else if (k == "branch.delta0") cfg.delta0 = parse_double(k, v);
    else if (k == "fold.tol") cfg.fold_tol = parse_double(k, v);
    else if (k == "normalized.c") cfg.target_mass = parse_double(k, v);
    else if (k == "normalized.mass_tol") cfg.mass_tol = parse_double(k, v);
    else if (k == "homotopy.steps") cfg.homotopy_steps = parse_int<int>(k, v);
    else if (k == "evolve.dt") cfg.dt = parse_double(k, v);
    else if (k == "evolve.T") cfg.horizon = parse_double(k, v);
    else if (k == "evolve.nonlinear") cfg.nonlinear = parse_bool(k, v);
    else if (k == "evolve.sample_every") cfg.sample_every = parse_int<int>(k, v);
    else if (k == "evolve.epsilon") cfg.epsilon = parse_double(k, v);
    else if (k == "probe.starts") cfg.starts = parse_int<int>(k, v);
    else throw Error(ErrorCode::kUsage, "unknown config key '" + k + "'");
  }
}

ConfigMap to_config_map(const RunConfig& cfg) {
  auto num = [](double v) { return std::isnan(v) ? std::string("auto") : format_double(v); };
  return {
      {"model.N", std::to_string(cfg.dim)},
      {"model.s", num(cfg.s)},
      {"model.q", num(cfg.q)},
      {"model.lambda", num(cfg.lambda)},
      {"grid.L", num(cfg.half_width)},
      {"grid.M", std::to_string(cfg.points)},
      {"solver.tol", num(cfg.tol)},
      {"run.seed", std::to_string(cfg.seed)},
      {"branch.lambda_min", num(cfg.lambda_min)},
      {"branch.points", std::to_string(cfg.branch_points)},
      {"branch.delta0", num(cfg.delta0)},
      {"fold.tol", num(cfg.fold_tol)},
      {"normalized.c", num(cfg.target_mass)},
      {"normalized.mass_tol", num(cfg.mass_tol)},
      {"homotopy.steps", std::to_string(cfg.homotopy_steps)},
      {"evolve.dt", num(cfg.dt)},
      {"evolve.T", num(cfg.horizon)},
      {"evolve.nonlinear", cfg.nonlinear ? "true" : "false"},
      {"evolve.sample_every", std::to_string(cfg.sample_every)},
      {"evolve.epsilon", num(cfg.epsilon)},
      {"probe.starts", std::to_string(cfg.starts)},
  };
}

double effective_half_width(const RunConfig& cfg, double lambda) {
  if (!std::isnan(cfg.half_width)) return cfg.half_width;
  return std::max(12.0, std::sqrt(5.0 * (std::abs(lambda) + cfg.dim + 1.0)));
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRegime:
    case ErrorCode::kLambdaAboveThreshold:
      return 4;
    case ErrorCode::kNoConvergence:
    case ErrorCode::kNondegeneracyLoss:
    case ErrorCode::kMaximumAtEndpoint:
    case ErrorCode::kRootOutOfRange:
      return 3;
    default:
      return 2;
  }
}

namespace {

struct Overrides {
  std::optional<int> dim;
  std::optional<double> s, q, lambda, half_width;
  std::optional<int> points;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda_min, delta0, fold_tol, target_mass, mass_tol, dt, horizon, epsilon;
  std::optional<int> branch_points, homotopy_steps, sample_every, starts;
  bool linear = false;
  std::string config_path;
  std::string out;
  std::string state;
  bool json = false;

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) apply_config(cfg, read_config(config_path, config_keys()));
    auto set = [](auto& dst, const auto& src) {
      if (src) dst = *src;
    };
    set(cfg.dim, dim);
    set(cfg.s, s);
    set(cfg.q, q);
    set(cfg.lambda, lambda);
    set(cfg.half_width, half_width);
    set(cfg.points, points);
    set(cfg.tol, tol);
    set(cfg.seed, seed);
    set(cfg.lambda_min, lambda_min);
    set(cfg.branch_points, branch_points);
    set(cfg.delta0, delta0);
    set(cfg.fold_tol, fold_tol);
    set(cfg.target_mass, target_mass);
    set(cfg.mass_tol, mass_tol);
    set(cfg.homotopy_steps, homotopy_steps);
    set(cfg.dt, dt);
    set(cfg.horizon, horizon);
    set(cfg.sample_every, sample_every);
    set(cfg.epsilon, epsilon);
    set(cfg.starts, starts);
    if (linear) cfg.nonlinear = false;
    return cfg;
  }
};

void add_shared(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--N", ov.dim, "spatial dimension (1 or 2)");
  cmd->add_option("--s", ov.s, "fractional order in (0, 1]");
  cmd->add_option("--q", ov.q, "nonlinearity exponent");
  cmd->add_option("--lambda", ov.lambda, "frequency lambda");
  cmd->add_option("--L", ov.half_width, "half-width of the box [-L, L)^N");
  cmd->add_option("--M", ov.points, "points per axis (even)");
  cmd->add_option("--tol", ov.tol, "Newton residual target");
  cmd->add_option("--seed", ov.seed, "random seed");
  cmd->add_option("--config", ov.config_path, "flat key = value config file");
  cmd->add_option("--out", ov.out, "primary output path");
  cmd->add_flag("--json", ov.json, "machine-readable summary");
}

void add_branch_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--lambda-min", ov.lambda_min, "most negative lambda of the sweep");
  cmd->add_option("--points", ov.branch_points, "number of branch points");
  cmd->add_option("--delta0", ov.delta0, "distance of the first point below lambda_1");
}

ModelParams model_of(const RunConfig& cfg) { return {cfg.dim, cfg.s, cfg.q, cfg.lambda}; }

SolverOptions solver_of(const RunConfig& cfg, bool spectrum) {
  SolverOptions opts;
  opts.tol = cfg.tol;
  opts.compute_spectrum = spectrum;
  return opts;
}

nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : to_config_map(cfg)) out[k] = v;
  return out;
}

Report state_summary(const GroundState& gs) {
  Report r;
  r["lambda"] = gs.params.lambda;
  r["converged"] = gs.converged;
  r["residual_norm"] = gs.residual_norm;
  r["mass"] = gs.observables.mass;
  r["action"] = gs.action;
  r["kinetic"] = gs.observables.kinetic_s;
  r["potential"] = gs.observables.potential;
  r["power_q"] = gs.observables.power_q;
  r["pohozaev_rel"] = gs.identities.pohozaev_rel;
  r["id1_rel"] = gs.identities.id1_rel;
  r["id2_rel"] = gs.identities.id2_rel;
  r["action_simple_rel"] = gs.identities.action_simple_rel;
  r["energy_lb_gap"] = gs.identities.energy_lb_gap;
  if (gs.spectrum.computed) {
    r["min_eig"] = gs.spectrum.min_eig;
    r["min_abs_eig"] = gs.spectrum.min_abs_eig;
    r["morse_index"] = gs.spectrum.morse_index_le2;
  }
  r["boundary_ratio"] = gs.boundary_ratio;
  r["spectral_tail"] = gs.spectral_tail;
  r["newton_steps"] = gs.log.newton_steps;
  r["warnings"] = gs.log.warnings;
  return r;
}

void render_text(std::ostream& os, const Report& r, const std::string& prefix) {
  for (auto it = r.begin(); it != r.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      render_text(os, *it, key);
    } else if (it->is_string()) {
      os << key << ": " << it->get<std::string>() << "\n";
    } else {
      os << key << ": " << it->dump() << "\n";
    }
  }
}

void print_report(const Report& r, bool json) {
  if (json) {
    std::cout << r.dump(2) << "\n";
  } else {
    render_text(std::cout, r, "");
  }
}

std::string dump_report(const Report& r) { return r.dump(2) + "\n"; }

Grid grid_for(const RunConfig& cfg, double lambda) {
  return make_grid(cfg.dim, effective_half_width(cfg, lambda), cfg.points);
}

int cmd_eig(const RunConfig& cfg, const Overrides& ov) {
  const Grid grid = grid_for(cfg, 0.0);
  ModelParams params = model_of(cfg);
  if (!(params.s > 0.0 && params.s <= 1.0)) throw Error(ErrorCode::kRegime, "s must lie in (0, 1]");
  const EigenPair pair = ground_eigenpair(cfg.s, cfg.dim, grid);
  params.lambda = pair.value;
  Report r;
  r["lambda1"] = pair.value;
  r["residual"] = pair.residual;
  r["iterations"] = pair.iterations;
  r["L"] = grid.half_width();
  r["M"] = grid.points_per_axis();
  r["config"] = config_json(cfg);
  if (!ov.out.empty()) {
    const auto config = config_json(cfg);
    write_state(ov.out, pair.vector, params, &config);
  }
  print_report(r, ov.json);
  return 0;
}

int cmd_solve(const RunConfig& cfg, const Overrides& ov) {
  const ModelParams params = model_of(cfg);
  params.validate();
  const Grid grid = grid_for(cfg, cfg.lambda);
  const SolverContext ctx(grid, cfg.s);
  const GroundState gs = solve_ground_state(ctx, params, solver_of(cfg, true));
  Report r = state_summary(gs);
  r["lambda1"] = ctx.lambda1();
  r["L"] = grid.half_width();
  r["M"] = grid.points_per_axis();
  r["config"] = config_json(cfg);
  print_report(r, ov.json);
  if (!gs.converged) {
    std::cerr << "error: Newton stopped at ||F|| = " << gs.residual_norm << " above tol " << cfg.tol << "\n";
    return 3;
  }
  if (!ov.out.empty()) {
    const auto config = config_json(cfg);
    write_state(ov.out, gs.u, params, &config);
  }
  return 0;
}

int cmd_probe(const RunConfig& cfg, const Overrides& ov) {
  const ModelParams params = model_of(cfg);
  params.validate();
  if (cfg.starts < 2) throw Error(ErrorCode::kUsage, "probe needs at least two starts");
  const Grid grid = grid_for(cfg, cfg.lambda);
  const UniquenessReport rep = uniqueness_probe(params, grid, cfg.starts, cfg.seed, solver_of(cfg, false));
  Report r;
  r["starts"] = cfg.starts;
  r["converged"] = rep.converged_count;
  r["max_distance"] = rep.max_distance;
  r["near_critical"] = rep.near_critical;
  Report masses = Report::array();
  Report errors = Report::array();
  for (std::size_t i = 0; i < rep.solutions.size(); ++i) {
    masses.push_back(rep.errors[i].empty() ? Report(rep.solutions[i].observables.mass) : Report(nullptr));
    if (!rep.errors[i].empty()) errors.push_back(Report{{"start", i}, {"error", rep.errors[i]}});
  }
  r["masses"] = masses;
  r["errors"] = errors;
  r["config"] = config_json(cfg);
  print_report(r, ov.json);
  if (!ov.out.empty()) write_file_atomic(ov.out, dump_report(r));
  return rep.converged_count == static_cast<std::size_t>(cfg.starts) ? 0 : 3;
}

struct BranchRun {
  std::unique_ptr<SolverContext> ctx;
  MassCurve curve;
};

BranchRun run_branch(const RunConfig& cfg, bool spectrum) {
  const ModelParams family = model_of(cfg);
  family.validate();
  const Grid grid = grid_for(cfg, 0.0);
  BranchRun run;
  run.ctx = std::make_unique<SolverContext>(grid, cfg.s);
  BranchOptions bopts;
  bopts.delta0 = cfg.delta0;
  bopts.solver = solver_of(cfg, spectrum);
  run.curve = trace_branch(*run.ctx, family, cfg.lambda_min, cfg.branch_points, bopts);
  return run;
}

Report curve_summary(const MassCurve& curve) {
  Report r;
  r["lambda1"] = curve.lambda1;
  r["points"] = curve.points.size();
  r["complete"] = curve.complete;
  if (!curve.complete) r["failure"] = curve.failure;
  double max_mass = 0.0;
  double arg = 0.0;
  for (const auto& p : curve.points) {
    if (p.mass > max_mass) {
      max_mass = p.mass;
      arg = p.lambda;
    }
  }
  r["max_sampled_mass"] = max_mass;
  r["argmax_sampled_lambda"] = arg;
  r["slope_tol"] = curve.slope_tol;
  return r;
}

int cmd_branch(const RunConfig& cfg, const Overrides& ov) {
  const BranchRun run = run_branch(cfg, true);
  Report r = curve_summary(run.curve);
  r["config"] = config_json(cfg);
  if (run.curve.points.empty()) {
    std::cerr << "error: no branch point converged: " << run.curve.failure << "\n";
    return 3;
  }
  if (ov.out.empty()) {
    std::cout << branch_csv(run.curve);
  } else {
    emit_branch_csv(run.curve, ov.out);
    write_file_atomic(ov.out + ".config", format_config(to_config_map(cfg)));
    print_report(r, ov.json);
  }
  if (!run.curve.complete) {
    std::cerr << "error: branch stopped early: " << run.curve.failure << "\n";
    return 3;
  }
  return 0;
}

Report fold_summary(const FoldResult& fold) {
  Report r;
  r["lambda_star"] = fold.lambda_star;
  r["c0"] = fold.c0;
  r["bracket_width"] = fold.bracket_width;
  r["unimodal"] = fold.unimodal;
  r["solves"] = fold.solves;
  return r;
}

int cmd_fold(const RunConfig& cfg, const Overrides& ov) {
  const BranchRun run = run_branch(cfg, false);
  if (!run.curve.complete) throw Error(ErrorCode::kNoConvergence, "branch stopped early: " + run.curve.failure);
  const BranchSolver solver(*run.ctx, run.curve, solver_of(cfg, false));
  const FoldResult fold = find_fold(run.curve, solver.mass_function(), cfg.fold_tol);
  Report r = fold_summary(fold);
  r["branch"] = curve_summary(run.curve);
  r["config"] = config_json(cfg);
  print_report(r, ov.json);
  if (!ov.out.empty()) write_file_atomic(ov.out, dump_report(r));
  return 0;
}

Stability label_near(const MassCurve& curve, double lambda) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    if (std::abs(curve.points[i].lambda - lambda) < std::abs(curve.points[best].lambda - lambda)) best = i;
  }
  return curve.points[best].stability;
}

int cmd_normalized(const RunConfig& cfg, const Overrides& ov) {
  if (!(cfg.target_mass > 0.0)) throw Error(ErrorCode::kUsage, "normalized needs --c with a positive mass");
  const BranchRun run = run_branch(cfg, false);
  if (!run.curve.complete) throw Error(ErrorCode::kNoConvergence, "branch stopped early: " + run.curve.failure);
  const BranchSolver solver(*run.ctx, run.curve, solver_of(cfg, false));
  const FoldResult fold = find_fold(run.curve, solver.mass_function(), cfg.fold_tol);
  const auto states = solve_normalized(
      cfg.target_mass, run.curve, fold, [&](double lambda) { return solver.solve(lambda); }, cfg.mass_tol);
  Report r;
  r["c"] = cfg.target_mass;
  r["fold"] = fold_summary(fold);
  Report sols = Report::array();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& gs = states[i];
    Stability label = label_near(run.curve, gs.params.lambda);
    if (states.size() == 1) label = Stability::kMarginal;
    sols.push_back(Report{{"lambda", gs.params.lambda},
                          {"mass", gs.observables.mass},
                          {"residual_norm", gs.residual_norm},
                          {"stability", to_string(label)}});
    if (!ov.out.empty()) {
      const auto config = config_json(cfg);
      write_state(ov.out + ".state" + std::to_string(i + 1) + ".json", gs.u, gs.params, &config);
    }
  }
  r["solutions"] = sols;
  r["config"] = config_json(cfg);
  print_report(r, ov.json);
  if (!ov.out.empty()) write_file_atomic(ov.out, dump_report(r));
  return 0;
}

int cmd_homotopy(const RunConfig& cfg, const Overrides& ov) {
  const Grid grid = grid_for(cfg, cfg.lambda);
  const auto path = linear_s_path(cfg.s, cfg.homotopy_steps);
  const HomotopyReport rep = s_homotopy(cfg.lambda, cfg.q, cfg.dim, path, grid, solver_of(cfg, true));
  Report r;
  Report steps = Report::array();
  for (const auto& st : rep.steps) {
    steps.push_back(Report{{"s", st.s},
                           {"lambda1", st.lambda1},
                           {"min_eig", st.min_eig},
                           {"min_abs_eig", st.min_abs_eig},
                           {"mass", st.mass},
                           {"residual_norm", st.residual_norm},
                           {"newton_steps", st.newton_steps}});
  }
  r["steps"] = steps;
  r["halted"] = rep.halted;
  if (rep.halted) r["halted_at_s"] = rep.halted_at_s;
  else r["endpoint_distance"] = rep.endpoint_distance;
  r["config"] = config_json(cfg);
  print_report(r, ov.json);
  if (!ov.out.empty()) write_file_atomic(ov.out, dump_report(r));
  if (rep.halted) {
    std::cerr << "error: Jacobian lost nondegeneracy at s = " << rep.halted_at_s << "\n";
    return 3;
  }
  return 0;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,mass,hamiltonian,deviation\n";
  for (const auto& s : traj.samples) {
    out += format_double(s.t) + "," + format_double(s.mass) + "," + format_double(s.hamiltonian) + "," +
           format_double(s.deviation) + "\n";
  }
  return out;
}

int cmd_evolve(const RunConfig& cfg, const Overrides& ov) {
  GroundState gs;
  if (!ov.state.empty()) {
    StateData data = read_state(ov.state);
    gs.u = data.field;
    gs.params = data.params;
    gs.converged = true;
  } else {
    const ModelParams params = model_of(cfg);
    params.validate();
    const Grid grid = grid_for(cfg, cfg.lambda);
    const SolverContext ctx(grid, cfg.s);
    gs = solve_ground_state(ctx, params, solver_of(cfg, false));
    if (!gs.converged) throw Error(ErrorCode::kNoConvergence, "initial ground state did not converge");
  }
  Trajectory traj;
  Report r;
  if (cfg.epsilon > 0.0) {
    if (!gs.u.is_real()) throw Error(ErrorCode::kUsage, "perturbation probes need a real state");
    ProbeReport probe = stability_probe(gs, cfg.epsilon, cfg.horizon, cfg.dt, cfg.seed, cfg.sample_every);
    r["epsilon"] = probe.epsilon;
    r["reference_norm"] = probe.reference_norm;
    r["max_deviation"] = probe.max_deviation;
    r["small_crossing"] = probe.small_crossing ? Report(*probe.small_crossing) : Report(nullptr);
    r["large_crossing"] = probe.large_crossing ? Report(*probe.large_crossing) : Report(nullptr);
    traj = std::move(probe.trajectory);
  } else {
    EvolutionOptions opts;
    opts.dt = cfg.dt;
    opts.horizon = cfg.horizon;
    opts.nonlinearity = cfg.nonlinear;
    opts.sample_every = cfg.sample_every;
    traj = evolve(gs.u, gs.params, opts, &gs.u);
    double max_dev = 0.0;
    for (const auto& s : traj.samples) max_dev = std::max(max_dev, s.deviation);
    r["max_deviation"] = max_dev;
  }
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  if (!traj.samples.empty()) {
    const auto& first = traj.samples.front();
    for (const auto& s : traj.samples) {
      mass_drift = std::max(mass_drift, std::abs(s.mass - first.mass) / first.mass);
      energy_drift = std::max(energy_drift, std::abs(s.hamiltonian - first.hamiltonian));
    }
  }
  r["steps"] = traj.steps;
  r["blow_up"] = traj.blow_up;
  r["mass_drift_rel"] = mass_drift;
  r["hamiltonian_drift"] = energy_drift;
  r["config"] = config_json(cfg);
  if (ov.out.empty()) {
    std::cout << trajectory_csv(traj);
  } else {
    write_file_atomic(ov.out, trajectory_csv(traj));
    write_file_atomic(ov.out + ".config", format_config(to_config_map(cfg)));
    print_report(r, ov.json);
  }
  return 0;
}

int cmd_check(const Overrides& ov) {
  if (ov.state.empty()) throw Error(ErrorCode::kUsage, "check needs --state <file>");
  const StateData data = read_state(ov.state);
  if (!data.field.is_real()) throw Error(ErrorCode::kUsage, "check needs a real state");
  const Residual res = residual_field(data.field, data.params);
  const IdentityReport id = identity_residuals(data.field, data.params);
  Report r;
  r["N"] = data.params.dim;
  r["s"] = data.params.s;
  r["q"] = data.params.q;
  r["lambda"] = data.params.lambda;
  r["residual_norm"] = res.norm;
  r["pohozaev_rel"] = id.pohozaev_rel;
  r["id1_rel"] = id.id1_rel;
  r["id2_rel"] = id.id2_rel;
  r["action_simple_rel"] = id.action_simple_rel;
  r["energy_lb_gap"] = id.energy_lb_gap;
  r["k"] = id.k_defined ? Report(id.k) : Report(nullptr);
  print_report(r, ov.json);
  if (!ov.out.empty()) write_file_atomic(ov.out, dump_report(r));
  return 0;
}

}  // namespace

int run_command(int argc, char** argv) {
  CLI::App app{"Ground states of the fractional NLS with a harmonic trap"};
  app.require_subcommand(1);
  Overrides ov;

  auto* eig = app.add_subcommand("eig", "lowest eigenpair of (-Delta)^s + |x|^2");
  auto* solve = app.add_subcommand("solve", "positive ground state at one lambda");
  auto* probe = app.add_subcommand("probe-unique", "multi-start uniqueness probe");
  auto* branch = app.add_subcommand("branch", "mass curve as CSV");
  auto* fold = app.add_subcommand("fold", "fold (lambda*, c0) of the mass curve");
  auto* normalized = app.add_subcommand("normalized", "ground states with prescribed mass");
  auto* homotopy = app.add_subcommand("homotopy", "continuation in s from s = 1");
  auto* evolvecmd = app.add_subcommand("evolve", "time-dependent flow from a ground state");
  auto* check = app.add_subcommand("check", "identity report for a state file");

  for (auto* cmd : {eig, solve, probe, branch, fold, normalized, homotopy, evolvecmd, check}) add_shared(cmd, ov);
  probe->add_option("--starts", ov.starts, "number of random starts");
  for (auto* cmd : {branch, fold, normalized}) add_branch_flags(cmd, ov);
  for (auto* cmd : {fold, normalized}) cmd->add_option("--fold-tol", ov.fold_tol, "lambda bracket target");
  normalized->add_option("--c", ov.target_mass, "prescribed mass");
  normalized->add_option("--mass-tol", ov.mass_tol, "relative mass tolerance");
  homotopy->add_option("--steps", ov.homotopy_steps, "points on the s path");
  evolvecmd->add_option("--dt", ov.dt, "time step");
  evolvecmd->add_option("--T", ov.horizon, "horizon");
  evolvecmd->add_option("--sample-every", ov.sample_every, "steps between samples");
  evolvecmd->add_option("--epsilon", ov.epsilon, "perturbation size for a stability probe");
  evolvecmd->add_flag("--linear", ov.linear, "drop the nonlinear term");
  evolvecmd->add_option("--state", ov.state, "initial state file");
  check->add_option("--state", ov.state, "state file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = ov.resolve();
    if (*eig) return cmd_eig(cfg, ov);
    if (*solve) return cmd_solve(cfg, ov);
    if (*probe) return cmd_probe(cfg, ov);
    if (*branch) return cmd_branch(cfg, ov);
    if (*fold) return cmd_fold(cfg, ov);
    if (*normalized) return cmd_normalized(cfg, ov);
    if (*homotopy) return cmd_homotopy(cfg, ov);
    if (*evolvecmd) return cmd_evolve(cfg, ov);
    if (*check) return cmd_check(ov);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace fracgs
