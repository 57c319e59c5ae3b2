#include "fracgs/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "fracgs/error.hpp"

namespace fracgs {

const char* to_string(Stability label) {
  switch (label) {
    case Stability::kStable: return "stable";
    case Stability::kUnstable: return "unstable";
    case Stability::kMarginal: return "marginal";
    case Stability::kUnknown: return "unknown";
  }
  return "unknown";
}

std::vector<double> graded_lambda_mesh(double lambda1, double lambda_min, int points, double delta0,
                                       double top_fraction) {
  if (points < 20) throw Error(ErrorCode::kInvalidArgument, "a branch needs at least 20 points");
  if (!(delta0 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta0 must be positive");
  if (!(lambda_min < lambda1 - 10.0 * delta0) || !(lambda_min < lambda1 - 0.1)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda_min must lie below lambda_1 - max(0.1, 10 delta0)");
  }
  const int top = std::clamp(static_cast<int>(std::lround(top_fraction * points)), 1, points - 2);
  const int rest = points - top;
  const double span = lambda1 - lambda_min;
  std::vector<double> mesh;
  mesh.reserve(points);
  for (int i = 0; i < top; ++i) {
    mesh.push_back(lambda1 - delta0 * std::pow(10.0, static_cast<double>(i) / top));
  }
  const double start = 10.0 * delta0;
  for (int j = 0; j < rest; ++j) {
    const double t = static_cast<double>(j) / (rest - 1);
    mesh.push_back(lambda1 - start * std::pow(span / start, t));
  }
  mesh.back() = lambda_min;
  return mesh;
}

double bifurcation_mass(const EigenPair& phi1, double lambda, double q) {
  const double eps = bifurcation_amplitude(phi1, lambda, q);
  return eps * eps;
}

namespace {

BranchPoint make_point(const GroundState& gs) {
  BranchPoint p;
  p.lambda = gs.params.lambda;
  p.mass = gs.observables.mass;
  p.action = gs.action;
  p.kinetic = gs.observables.kinetic_s;
  p.potential = gs.observables.potential;
  p.power_q = gs.observables.power_q;
  p.pohozaev_rel = gs.identities.pohozaev_rel;
  p.min_abs_eig = gs.spectrum.computed ? gs.spectrum.min_abs_eig : std::numeric_limits<double>::quiet_NaN();
  p.energy_lb_gap = gs.identities.energy_lb_gap;
  p.k = gs.identities.k;
  p.newton_steps = gs.log.newton_steps;
  return p;
}

// Derivative at `at` of the quadratic through three points.
double lagrange_slope(const double* x, const double* f, double at) {
  const double d0 = (2.0 * at - x[1] - x[2]) / ((x[0] - x[1]) * (x[0] - x[2]));
  const double d1 = (2.0 * at - x[0] - x[2]) / ((x[1] - x[0]) * (x[1] - x[2]));
  const double d2 = (2.0 * at - x[0] - x[1]) / ((x[2] - x[0]) * (x[2] - x[1]));
  return d0 * f[0] + d1 * f[1] + d2 * f[2];
}

}  // namespace

void assign_slopes(MassCurve& curve, double slope_tol) {
  auto& pts = curve.points;
  curve.slope_tol = slope_tol;
  const std::size_t n = pts.size();
  if (n < 3) {
    for (auto& p : pts) p.stability = Stability::kUnknown;
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = std::clamp<std::size_t>(i, 1, n - 2);
    const double x[3] = {pts[c - 1].lambda, pts[c].lambda, pts[c + 1].lambda};
    const double f[3] = {pts[c - 1].mass, pts[c].mass, pts[c + 1].mass};
    pts[i].slope = lagrange_slope(x, f, pts[i].lambda);
    pts[i].stability = classify_stability(pts[i], slope_tol);
  }
}

Stability classify_stability(const BranchPoint& point, double slope_tol) {
  if (!std::isfinite(point.slope)) return Stability::kUnknown;
  if (point.slope < -slope_tol) return Stability::kStable;
  if (point.slope > slope_tol) return Stability::kUnstable;
  return Stability::kMarginal;
}

MassCurve trace_branch(const SolverContext& ctx, const ModelParams& family, double lambda_min,
                       int points, const BranchOptions& opts) {
  MassCurve curve;
  curve.family = family;
  curve.grid = ctx.grid();
  curve.lambda1 = ctx.lambda1();
  const auto mesh =
      graded_lambda_mesh(ctx.lambda1(), lambda_min, points, opts.delta0, opts.top_decade_fraction);

  ModelParams params = family;
  params.lambda = mesh.front();
  // Cold start on the bifurcation direction eps * phi_1.
  const double eps = bifurcation_amplitude(ctx.ground(), mesh.front(), family.q);
  std::vector<double> seed(ctx.ground().vector.values().begin(), ctx.ground().vector.values().end());
  for (double& v : seed) v *= eps;
  Field previous = Field::real(ctx.grid(), std::move(seed));

  for (double lambda : mesh) {
    params.lambda = lambda;
    try {
      GroundState gs = solve_ground_state(ctx, params, opts.solver, &previous);
      if (!gs.converged) {
        std::ostringstream os;
        os.precision(10);
        os << "solve at lambda = " << lambda << " stopped at ||F|| = " << gs.residual_norm;
        curve.failure = os.str();
        curve.complete = false;
        break;
      }
      curve.points.push_back(make_point(gs));
      curve.states.push_back(gs.u);
      previous = gs.u;
    } catch (const Error& e) {
      curve.failure = e.what();
      curve.complete = false;
      break;
    }
  }
  double max_mass = 0.0;
  for (const auto& p : curve.points) max_mass = std::max(max_mass, p.mass);
  assign_slopes(curve, opts.slope_tol_factor * max_mass);
  return curve;
}

MassCurve trace_branch(const ModelParams& family, const Grid& grid, double lambda_min, int points,
                       const BranchOptions& opts) {
  family.validate();
  const SolverContext ctx(grid, family.s);
  return trace_branch(ctx, family, lambda_min, points, opts);
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;

struct GoldenOutcome {
  double lambda;
  double mass;
  double width;
};

GoldenOutcome golden_maximize(double lo, double hi, double best_lambda, double best_mass,
                              const MassFunction& mass_at, double tol, FoldResult& fold) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = mass_at(c);
  double fd = mass_at(d);
  fold.solves += 2;
  auto track = [&](double x, double fx) {
    if (fx > best_mass) {
      best_mass = fx;
      best_lambda = x;
    }
  };
  track(c, fc);
  track(d, fd);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = mass_at(c);
      track(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = mass_at(d);
      track(d, fd);
    }
    ++fold.solves;
    fold.bracket_history.push_back(b - a);
  }
  return {best_lambda, best_mass, b - a};
}

}  // namespace

FoldResult find_fold(const MassCurve& curve, const MassFunction& mass_at, double tol_lambda) {
  const auto& pts = curve.points;
  if (pts.size() < 3) throw Error(ErrorCode::kInvalidArgument, "fold search needs at least 3 samples");
  std::size_t arg = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].mass > pts[arg].mass) arg = i;
  }
  if (arg == 0 || arg + 1 == pts.size()) {
    std::ostringstream os;
    os.precision(10);
    os << "largest sampled mass sits at the curve end lambda = " << pts[arg].lambda
       << "; extend the lambda range";
    throw Error(ErrorCode::kMaximumAtEndpoint, os.str());
  }
  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    if (pts[i].mass >= pts[i - 1].mass && pts[i].mass >= pts[i + 1].mass) maxima.push_back(i);
  }

  FoldResult fold;
  fold.unimodal = maxima.size() == 1;
  double best_lambda = pts[arg].lambda;
  double best_mass = -1.0;
  for (std::size_t i : maxima) {
    const double lo = pts[i + 1].lambda;
    const double hi = pts[i - 1].lambda;
    FoldResult local;
    const auto out = golden_maximize(lo, hi, pts[i].lambda, pts[i].mass, mass_at, tol_lambda, local);
    fold.solves += local.solves;
    if (out.mass > best_mass) {
      best_mass = out.mass;
      best_lambda = out.lambda;
      fold.bracket_width = out.width;
      fold.bracket_history = local.bracket_history;
    }
  }
  fold.lambda_star = best_lambda;
  fold.c0 = best_mass;
  for (const auto& p : pts) fold.c0 = std::max(fold.c0, p.mass);
  return fold;
}

BranchSolver::BranchSolver(const SolverContext& ctx, const MassCurve& curve, SolverOptions opts)
    : ctx_(ctx), curve_(curve), opts_(opts) {}

GroundState BranchSolver::solve(double lambda, bool with_spectrum) const {
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < curve_.points.size(); ++i) {
    if (std::abs(curve_.points[i].lambda - lambda) < std::abs(curve_.points[nearest].lambda - lambda)) {
      nearest = i;
    }
  }
  ModelParams params = curve_.family;
  params.lambda = lambda;
  SolverOptions opts = opts_;
  opts.compute_spectrum = with_spectrum;
  const Field* warm = curve_.states.empty() ? nullptr : &curve_.states[nearest];
  GroundState gs = solve_ground_state(ctx_, params, opts, warm);
  if (!gs.converged) {
    std::ostringstream os;
    os.precision(12);
    os << "fresh solve at lambda = " << lambda << " did not converge";
    throw Error(ErrorCode::kNoConvergence, os.str());
  }
  return gs;
}

double BranchSolver::mass(double lambda) const { return solve(lambda).observables.mass; }

MassFunction BranchSolver::mass_function() const {
  return [this](double lambda) { return mass(lambda); };
}

namespace {

GroundState bisect_mass(double lo, double hi, double c, const BranchSolve& solve, double mass_tol) {
  // mass - c changes sign on [lo, hi]; which end is below c is read off the solves.
  GroundState glo = solve(lo);
  GroundState ghi = solve(hi);
  double flo = glo.observables.mass - c;
  GroundState best = std::abs(flo) < std::abs(ghi.observables.mass - c) ? glo : ghi;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(best.observables.mass - c) <= 0.5 * mass_tol * c) break;
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    GroundState gm = solve(mid);
    const double fm = gm.observables.mass - c;
    if (std::abs(fm) < std::abs(best.observables.mass - c)) best = gm;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  if (std::abs(best.observables.mass - c) > mass_tol * c) {
    throw Error(ErrorCode::kNoConvergence, "mass bisection stalled before reaching the tolerance");
  }
  return best;
}

}  // namespace

std::vector<GroundState> solve_normalized(double c, const MassCurve& curve, const FoldResult& fold,
                                          const BranchSolve& solve, double mass_tol) {
  if (!(c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "target mass must be positive");
  if (c > fold.c0 * (1.0 + mass_tol)) return {};
  if (std::abs(c - fold.c0) <= mass_tol * fold.c0) return {solve(fold.lambda_star)};

  const auto& pts = curve.points;
  // Sample masses with the refined fold inserted, as (lambda, mass) ascending in lambda.
  std::vector<std::pair<double, double>> left;   // lambda < lambda*
  std::vector<std::pair<double, double>> right;  // lambda > lambda*
  for (const auto& p : pts) {
    if (p.lambda < fold.lambda_star) left.emplace_back(p.lambda, p.mass);
    if (p.lambda > fold.lambda_star) right.emplace_back(p.lambda, p.mass);
  }
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  left.emplace_back(fold.lambda_star, fold.c0);
  right.insert(right.begin(), {fold.lambda_star, fold.c0});

  std::vector<GroundState> out;
  // Walk outward from the fold and take the first crossing on each side.
  bool found_left = false;
  for (std::size_t i = left.size() - 1; i > 0; --i) {
    if (left[i - 1].second <= c && c <= left[i].second) {
      out.push_back(bisect_mass(left[i - 1].first, left[i].first, c, solve, mass_tol));
      found_left = true;
      break;
    }
  }
  if (!found_left) {
    throw Error(ErrorCode::kRootOutOfRange,
                "no sampled crossing below lambda*; extend lambda_min so the mass falls below c");
  }
  bool found_right = false;
  for (std::size_t i = 0; i + 1 < right.size(); ++i) {
    if (right[i + 1].second <= c && c <= right[i].second) {
      out.push_back(bisect_mass(right[i].first, right[i + 1].first, c, solve, mass_tol));
      found_right = true;
      break;
    }
  }
  if (!found_right) {
    throw Error(ErrorCode::kRootOutOfRange,
                "no sampled crossing above lambda*; start the branch closer to lambda_1");
  }
  return out;
}

std::vector<double> linear_s_path(double s_target, int steps) {
  if (steps < 1) throw Error(ErrorCode::kInvalidArgument, "an s path needs at least one step");
  if (!(s_target > 0.0 && s_target <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target order must lie in (0, 1]");
  }
  if (steps == 1) return {1.0};
  std::vector<double> path(steps);
  for (int k = 0; k < steps; ++k) path[k] = 1.0 - k * (1.0 - s_target) / (steps - 1);
  path.back() = s_target;
  return path;
}

HomotopyReport s_homotopy(double lambda, double q, int dim, const std::vector<double>& s_path,
                          const Grid& grid, const SolverOptions& opts) {
  if (s_path.empty()) throw Error(ErrorCode::kInvalidArgument, "empty s path");
  if (s_path.front() != 1.0) throw Error(ErrorCode::kInvalidArgument, "s path must start at 1");
  for (std::size_t i = 1; i < s_path.size(); ++i) {
    if (!(s_path[i] < s_path[i - 1])) throw Error(ErrorCode::kInvalidArgument, "s path must decrease");
  }
  std::vector<std::unique_ptr<SolverContext>> contexts;
  for (double s : s_path) {
    ModelParams{dim, s, q, lambda}.validate();
    contexts.push_back(std::make_unique<SolverContext>(grid, s));
    if (!(lambda < contexts.back()->lambda1() - 1e-6)) {
      std::ostringstream os;
      os.precision(12);
      os << "lambda = " << lambda << " is not below lambda_1(s = " << s
         << ") = " << contexts.back()->lambda1();
      throw Error(ErrorCode::kLambdaAboveThreshold, os.str());
    }
  }

  HomotopyReport rep;
  SolverOptions step_opts = opts;
  step_opts.compute_spectrum = true;
  const Field* warm = nullptr;
  for (std::size_t i = 0; i < s_path.size(); ++i) {
    const ModelParams params{dim, s_path[i], q, lambda};
    GroundState gs = solve_ground_state(*contexts[i], params, step_opts, warm);
    HomotopyStep step;
    step.s = s_path[i];
    step.lambda1 = contexts[i]->lambda1();
    step.min_eig = gs.spectrum.min_eig;
    step.min_abs_eig = gs.spectrum.min_abs_eig;
    step.mass = gs.observables.mass;
    step.residual_norm = gs.residual_norm;
    step.newton_steps = gs.log.newton_steps;
    rep.steps.push_back(step);
    rep.final_state = std::move(gs);
    warm = &rep.final_state.u;
    if (step.min_abs_eig < 1e-6) {
      rep.halted = true;
      rep.halted_at_s = step.s;
      return rep;
    }
  }
  const ModelParams target{dim, s_path.back(), q, lambda};
  rep.direct = solve_ground_state(*contexts.back(), target, step_opts);
  rep.endpoint_distance = aligned_distance(rep.final_state.u, rep.direct.u);
  return rep;
}

AsymptoticsReport asymptotics_checks(const MassCurve& curve, const EigenPair& phi1) {
  AsymptoticsReport rep;
  const auto& pts = curve.points;
  const double q = curve.family.q;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, pts.size()); ++i) {
    const double predicted = bifurcation_mass(phi1, pts[i].lambda, q);
    rep.bifurcation_lambda.push_back(pts[i].lambda);
    rep.bifurcation_rel_err.push_back(std::abs(pts[i].mass - predicted) / predicted);
  }

  const std::size_t n = pts.size();
  const std::size_t tail = std::max<std::size_t>(2, n / 4);
  rep.decay_ok = n >= 2;
  for (std::size_t i = n - tail; i + 1 < n; ++i) {
    if (!(pts[i + 1].mass < pts[i].mass)) rep.decay_ok = false;
  }

  rep.min_energy_gap = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    if (p.lambda < 0.0) rep.min_energy_gap = std::min(rep.min_energy_gap, p.energy_lb_gap);
  }
  rep.energy_ok = rep.min_energy_gap >= -1e-8;

  // Second differences in index over the geometric (most negative) part.
  std::vector<double> second;
  for (std::size_t i = n - tail; i + 2 < n; ++i) {
    second.push_back(std::abs(pts[i + 2].mass - 2.0 * pts[i + 1].mass + pts[i].mass));
  }
  if (!second.empty()) {
    std::vector<double> sorted = second;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double peak = *std::max_element(second.begin(), second.end());
    rep.smoothness_ratio = median > 0.0 ? peak / median : (peak > 0.0 ? INFINITY : 1.0);
    rep.smoothness_ok = rep.smoothness_ratio <= 10.0;
  }
  return rep;
}

}  // namespace fracgs
