#include "fracgs/groundstate.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fracgs/error.hpp"
#include "fracgs/krylov.hpp"
#include "fracgs/parallel.hpp"

namespace fracgs {

using krylov::Vector;

SolverContext::SolverContext(const Grid& grid, double s)
    : grid_(grid), s_(s), ground_(ground_eigenpair(s, grid.dim(), grid)),
      symbol_(fractional_symbol(grid, s)) {
  if (grid.dim() == 1 && grid.points_per_axis() <= 512) {
    dense_ = dense_operator_matrix(grid, s).matrix;
  }
}

Field gaussian_bump(const Grid& grid, double width, std::span<const double> center) {
  const int m = grid.points_per_axis();
  auto x = grid.axis_nodes();
  const double c0 = center.size() > 0 ? center[0] : 0.0;
  const double c1 = center.size() > 1 ? center[1] : 0.0;
  std::vector<double> v(grid.size());
  const double inv = 1.0 / (2.0 * width * width);
  if (grid.dim() == 1) {
    for (int j = 0; j < m; ++j) v[j] = std::exp(-(x[j] - c0) * (x[j] - c0) * inv);
  } else {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double r2 = (x[i] - c0) * (x[i] - c0) + (x[j] - c1) * (x[j] - c1);
        v[static_cast<std::size_t>(i) * m + j] = std::exp(-r2 * inv);
      }
    }
  }
  return Field::real(grid, std::move(v));
}

double aligned_distance(const Field& a, const Field& b) {
  const Grid& g = a.grid();
  auto av = a.values();
  auto bv = b.values();
  double plus = 0.0;
  double minus = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    plus += (av[i] - bv[i]) * (av[i] - bv[i]);
    minus += (av[i] + bv[i]) * (av[i] + bv[i]);
  }
  return std::sqrt(std::min(plus, minus) * g.weight());
}

double bifurcation_amplitude(const EigenPair& phi1, double lambda, double q) {
  double lq = 0.0;
  for (double v : phi1.vector.values()) lq += std::pow(std::abs(v), q);
  lq *= phi1.vector.grid().weight();
  return std::pow((phi1.value - lambda) / lq, 1.0 / (q - 2.0));
}

namespace {

constexpr double kSignChangeRatio = 1e-6;
constexpr double kRippleRatio = 1e-10;

struct QuotientEval {
  Vector trap_w;  // ((-Delta)^s + |x|^2) w
  double bilinear = 0.0;  // <(A - lambda) w, w>
  double power = 0.0;     // int |w|^q
  double quotient = 0.0;
};

class GroundStateSolver {
 public:
  GroundStateSolver(const SolverContext& ctx, const ModelParams& params, const SolverOptions& opts)
      : ctx_(ctx), params_(params), opts_(opts), op_(ctx.grid(), params),
        n_(static_cast<Eigen::Index>(ctx.grid().size())), w_(ctx.grid().weight()) {
    std::vector<double> inv(ctx.symbol().size());
    const double shift = 1.0 + std::max(0.0, -params.lambda);
    for (std::size_t k = 0; k < inv.size(); ++k) inv[k] = 1.0 / (ctx.symbol()[k] + shift);
    fourier_inverse_ = std::move(inv);
  }

  GroundState run(const Field* initial) {
    SolverLog log;
    double width = opts_.initial_width;
    for (int attempt = 0; attempt <= opts_.max_restarts; ++attempt) {
      Vector w(n_);
      if (attempt == 0 && initial != nullptr) {
        auto v = initial->values();
        for (Eigen::Index i = 0; i < n_; ++i) w(i) = v[i];
      } else {
        const Field g = gaussian_bump(ctx_.grid(), width);
        for (Eigen::Index i = 0; i < n_; ++i) w(i) = g.values()[i];
      }
      if (!w.allFinite() || w.norm() == 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "initial guess must be finite and nonzero");
      }
      // Positive starts only: the minimizer of the quotient is attained at |w|.
      w = w.cwiseAbs();
      log.restarts = attempt;
      minimize_quotient(w, log);
      Vector u = nehari_rescale(w, log);
      const bool newton_ok = newton(u, log);
      if (!u.allFinite()) break;
      Eigen::Index imax = 0;
      u.cwiseAbs().maxCoeff(&imax);
      if (u(imax) < 0.0) u = -u;
      const double peak = u.maxCoeff();
      const double trough = u.minCoeff();
      // Ripples below 1e-6 of the peak come from the discretization, not from
      // convergence to a sign-changing state.
      const bool sign_changing = trough < -kSignChangeRatio * peak;
      if (!sign_changing || attempt == opts_.max_restarts) {
        if (sign_changing) {
          log.warnings.push_back("positivity violated after all restarts");
        } else if (trough < -kRippleRatio * peak) {
          std::ostringstream os;
          os << "negative ripple of relative size " << -trough / peak;
          log.warnings.push_back(os.str());
        }
        return finish(u, newton_ok && !sign_changing, std::move(log));
      }
      log.warnings.push_back("sign-changing iterate; restarting from a tighter Gaussian");
      width *= 0.5;
    }
    throw Error(ErrorCode::kNoConvergence, "ground-state solve produced non-finite values");
  }

 private:
  void trap(const Vector& x, Vector& y) const {
    y.resize(x.size());
    op_.apply_trap(std::span<const double>(x.data(), x.size()), std::span<double>(y.data(), y.size()));
  }

  void residual(const Vector& u, Vector& f) const {
    f.resize(u.size());
    op_.residual(std::span<const double>(u.data(), u.size()), std::span<double>(f.data(), f.size()));
  }

  double norm(const Vector& v) const { return std::sqrt(w_) * v.norm(); }

  void fourier_precond(const Vector& x, Vector& y) const {
    y.resize(x.size());
    apply_symbol(ctx_.grid(), fourier_inverse_, std::span<const double>(x.data(), x.size()),
                 std::span<double>(y.data(), y.size()));
  }

  QuotientEval evaluate(const Vector& w) const {
    QuotientEval e;
    trap(w, e.trap_w);
    e.bilinear = w_ * (w.dot(e.trap_w) - params_.lambda * w.squaredNorm());
    double p = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) p += std::pow(std::abs(w(i)), params_.q);
    e.power = p * w_;
    e.quotient = e.bilinear / std::pow(e.power, 2.0 / params_.q);
    return e;
  }

  // Preconditioned descent on (K + P - lambda mass)/Q^{2/q}; the quotient is
  // scale invariant so iterates are kept at unit L^2 norm.
  void minimize_quotient(Vector& w, SolverLog& log) const {
    const double lambda = params_.lambda;
    const double q = params_.q;
    w /= norm(w);
    QuotientEval cur = evaluate(w);
    krylov::LinearMap precond_op = [&](const Vector& x, Vector& y) {
      trap(x, y);
      y += (1.0 - lambda) * x;
    };
    krylov::LinearMap fourier = [this](const Vector& x, Vector& y) { fourier_precond(x, y); };
    Vector g(n_), d(n_), trial(n_);
    int it = 0;
    for (; it < opts_.minimization_max_iter; ++it) {
      const double ratio = cur.bilinear / cur.power;
      for (Eigen::Index i = 0; i < n_; ++i) {
        g(i) = cur.trap_w(i) - lambda * w(i) - ratio * power_nonlinearity(w(i), q);
      }
      d.setZero();
      krylov::conjugate_gradient(precond_op, g, d, 1e-8, 5000, fourier);
      d = -d;
      double tau = 1.0;
      bool accepted = false;
      QuotientEval next;
      for (int tries = 0; tries < 40; ++tries) {
        trial = w + tau * d;
        trial /= norm(trial);
        next = evaluate(trial);
        if (next.quotient < cur.quotient) {
          accepted = true;
          break;
        }
        tau *= 0.5;
      }
      if (!accepted) break;
      const double decrease = (cur.quotient - next.quotient) / std::abs(cur.quotient);
      w = trial;
      cur = std::move(next);
      if (decrease < opts_.minimization_rel_decrease) {
        ++it;
        break;
      }
    }
    log.minimization_iterations = it;
    log.final_quotient = cur.quotient;
  }

  // c^{q-2} = (K + P - lambda mass)/Q is the critical point of t -> Phi(t w).
  Vector nehari_rescale(const Vector& w, SolverLog& log) const {
    const QuotientEval e = evaluate(w);
    const double c = std::pow(e.bilinear / e.power, 1.0 / (params_.q - 2.0));
    log.nehari_amplitude = c;
    return c * w;
  }

  bool solve_linearized(const Vector& u, const Vector& rhs, Vector& delta, SolverLog& log) const {
    const double q = params_.q;
    const double lambda = params_.lambda;
    if (ctx_.dense_operator() != nullptr && ctx_.grid().points_per_axis() <= opts_.dense_limit) {
      log.dense_newton = true;
      Eigen::MatrixXd jac = *ctx_.dense_operator();
      for (Eigen::Index i = 0; i < n_; ++i) {
        jac(i, i) -= lambda + (q - 1.0) * std::pow(std::abs(u(i)), q - 2.0);
      }
      delta = jac.partialPivLu().solve(rhs);
      return delta.allFinite();
    }
    krylov::LinearMap jac = [&](const Vector& x, Vector& y) {
      y.resize(x.size());
      op_.jacobian(std::span<const double>(u.data(), u.size()), std::span<const double>(x.data(), x.size()),
                   std::span<double>(y.data(), y.size()));
    };
    krylov::LinearMap fourier = [this](const Vector& x, Vector& y) { fourier_precond(x, y); };
    delta.setZero(n_);
    const auto st = krylov::minres(jac, rhs, delta, 1e-12, 20000, fourier);
    return delta.allFinite() && st.relative_residual < 1e-6;
  }

  bool newton(Vector& u, SolverLog& log) const {
    Vector f(n_), delta(n_), trial(n_), f_trial(n_);
    residual(u, f);
    double fnorm = norm(f);
    log.residual_history.push_back(fnorm);
    int steps = 0;
    int stalls = 0;
    while (fnorm > opts_.tol && steps < opts_.max_newton) {
      if (!solve_linearized(u, -f, delta, log)) break;
      double t = 1.0;
      bool improved = false;
      for (int tries = 0; tries < 12; ++tries) {
        trial = u + t * delta;
        residual(trial, f_trial);
        const double tn = norm(f_trial);
        if (std::isfinite(tn) && tn < fnorm) {
          u = trial;
          f = f_trial;
          fnorm = tn;
          improved = true;
          break;
        }
        t *= 0.5;
      }
      ++steps;
      if (!improved) {
        if (++stalls >= 2) break;
      } else {
        stalls = 0;
        log.residual_history.push_back(fnorm);
      }
    }
    log.newton_steps = steps;
    const auto& h = log.residual_history;
    double c = 0.0;
    for (std::size_t k = h.size() >= 4 ? h.size() - 4 : 0; k + 1 < h.size(); ++k) {
      if (h[k] > 0.0) c = std::max(c, h[k + 1] / (h[k] * h[k]));
    }
    log.newton_tail_constant = c;
    return fnorm <= opts_.tol;
  }

  GroundState finish(const Vector& u, bool converged, SolverLog log) const {
    GroundState gs;
    const Grid& grid = ctx_.grid();
    gs.u = Field::real(grid, std::vector<double>(u.data(), u.data() + n_));
    gs.params = params_;
    gs.observables = observables(grid, ctx_.symbol(), params_.q, gs.u.values());
    gs.action = action(gs.observables, params_);
    gs.identities = identity_residuals(gs.observables, params_);
    Vector f(n_);
    residual(u, f);
    gs.residual_norm = norm(f);
    gs.converged = converged && gs.residual_norm <= opts_.tol;
    gs.boundary_ratio = fracgs::boundary_ratio(gs.u);
    gs.spectral_tail = spectral_tail_fraction(gs.u);
    if (gs.spectral_tail > 1e-8) {
      std::ostringstream os;
      os << "spectral tail fraction " << gs.spectral_tail << " exceeds 1e-8";
      log.warnings.push_back(os.str());
    }
    if (gs.boundary_ratio > 1e-8) {
      std::ostringstream os;
      os << "boundary ratio " << gs.boundary_ratio << " exceeds 1e-8";
      log.warnings.push_back(os.str());
    }
    if (critical_exponents(params_.dim, params_.s).upper - params_.q < 0.2) {
      log.warnings.push_back("q within 0.2 of the critical Sobolev exponent");
    }
    if (opts_.compute_spectrum) {
      gs.spectrum = jacobian_spectrum_edges(gs.u, params_);
      if (gs.spectrum.min_abs_eig <= 1e-6) log.warnings.push_back("Jacobian nearly singular");
    }
    gs.log = std::move(log);
    return gs;
  }

  const SolverContext& ctx_;
  ModelParams params_;
  SolverOptions opts_;
  ModelOperator op_;
  Eigen::Index n_;
  double w_;
  std::vector<double> fourier_inverse_;
};

void check_regime(const SolverContext& ctx, const ModelParams& params) {
  params.validate();
  if (params.dim != ctx.dim() || params.s != ctx.order()) {
    throw Error(ErrorCode::kInvalidArgument, "parameters do not match the solver context");
  }
  const auto crit = critical_exponents(params.dim, params.s);
  if (!(params.q < crit.upper)) {
    std::ostringstream os;
    os << "q = " << params.q << " is not below the critical exponent " << crit.upper;
    throw Error(ErrorCode::kRegime, os.str());
  }
  if (!(params.lambda < ctx.lambda1() - 1e-6)) {
    std::ostringstream os;
    os.precision(12);
    os << "lambda = " << params.lambda << " must lie below lambda_1 = " << ctx.lambda1();
    throw Error(ErrorCode::kLambdaAboveThreshold, os.str());
  }
}

}  // namespace

GroundState solve_ground_state(const SolverContext& ctx, const ModelParams& params,
                               const SolverOptions& opts, const Field* initial) {
  check_regime(ctx, params);
  if (initial != nullptr && !(initial->grid() == ctx.grid() && initial->is_real())) {
    throw Error(ErrorCode::kTypeMismatch, "initial guess must be a real field on the solver grid");
  }
  return GroundStateSolver(ctx, params, opts).run(initial);
}

GroundState solve_ground_state(const ModelParams& params, const Grid& grid, const SolverOptions& opts) {
  params.validate();
  const SolverContext ctx(grid, params.s);
  return solve_ground_state(ctx, params, opts);
}

std::vector<Field> random_bump_starts(const Grid& grid, int n_starts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> width_dist(0.3, 3.0);
  const double reach = grid.half_width() / 4.0;
  std::uniform_real_distribution<double> center_dist(-reach, reach);
  std::vector<Field> starts;
  for (int i = 0; i < n_starts; ++i) {
    const double width = width_dist(rng);
    double center[2] = {center_dist(rng), 0.0};
    if (grid.dim() == 2) center[1] = center_dist(rng);
    starts.push_back(gaussian_bump(grid, width, std::span<const double>(center, grid.dim())));
  }
  return starts;
}

UniquenessReport uniqueness_probe(const SolverContext& ctx, const ModelParams& params,
                                  const std::vector<Field>& starts, const SolverOptions& opts) {
  check_regime(ctx, params);
  UniquenessReport rep;
  rep.solutions.resize(starts.size());
  rep.errors.resize(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    try {
      rep.solutions[i] = solve_ground_state(ctx, params, opts, &starts[i]);
      if (!rep.solutions[i].converged) rep.errors[i] = "not converged";
    } catch (const Error& e) {
      rep.errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (rep.errors[i].empty()) ++rep.converged_count;
  }
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (!rep.solutions[i].u.grid().valid()) continue;
    for (std::size_t j = i + 1; j < starts.size(); ++j) {
      if (!rep.solutions[j].u.grid().valid()) continue;
      rep.max_distance =
          std::max(rep.max_distance, aligned_distance(rep.solutions[i].u, rep.solutions[j].u));
    }
  }
  rep.near_critical = critical_exponents(params.dim, params.s).upper - params.q < 0.2;
  return rep;
}

UniquenessReport uniqueness_probe(const ModelParams& params, const Grid& grid, int n_starts,
                                  std::uint64_t seed, const SolverOptions& opts) {
  if (n_starts < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one start");
  params.validate();
  const SolverContext ctx(grid, params.s);
  return uniqueness_probe(ctx, params, random_bump_starts(grid, n_starts, seed), opts);
}

}  // namespace fracgs
