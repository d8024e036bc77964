#include "restartagd/agd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "run_recorder.hpp"

namespace restartagd {

void SolverParams::validate() const {
  if (!(L_init > 0.0) || !std::isfinite(L_init)) throw ParamError("L_init must be positive");
  if (!(M_0 > 0.0) || !std::isfinite(M_0)) throw ParamError("M_0 must be positive");
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw ParamError("alpha must exceed 1");
  if (!(beta > 0.0 && beta <= 1.0)) throw ParamError("beta must lie in (0, 1]");
  termination.validate();
}

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    compensation_ += (sum_ - t) + v;
  } else {
    compensation_ += (v - t) + sum_;
  }
  sum_ = t;
}

EpochState initial_state(const Point& x, double f, const Point& grad, double L, double M) {
  EpochState s;
  s.x_prev = x;
  s.x_cur = x;
  s.y_cur = x;
  s.y_bar = x;
  s.Z = 1.0;
  s.f_x0 = s.f_x_prev = s.f_x_cur = s.f_y_cur = f;
  s.grad_x_prev = grad;
  s.grad_x_cur = grad;
  s.grad_y_cur = grad;
  s.L = L;
  s.M = M;
  return s;
}

double theta(std::int64_t k) {
  const auto kd = static_cast<double>(k);
  return kd / (kd + 1.0);
}

bool descent_condition_holds(const EpochState& s) {
  const auto kd = static_cast<double>(s.k);
  return !(s.f_x_cur > s.f_x0 - s.L * s.S_k() / (2.0 * (kd + 1.0)));
}

bool restart2_triggered(const EpochState& s) {
  const double k1 = static_cast<double>(s.k) + 1.0;
  const double k1_5 = k1 * k1 * k1 * k1 * k1;
  return k1_5 * s.M * s.M * s.S_k() > s.L * s.L;
}

namespace {

// Rounding-error allowance for a numerator assembled from terms whose
// magnitudes add up to `scale`.
double rounding_allowance(double scale) { return 8.0 * std::numeric_limits<double>::epsilon() * scale; }

}  // namespace

double update_M_practical(const EpochState& s, bool roundoff_guard) {
  double M = s.M;

  const Point d_yx = s.y_cur - s.x_cur;
  const double n_yx = d_yx.norm();
  if (n_yx > 0.0) {
    const double inner = 0.5 * (s.grad_y_cur + s.grad_x_cur).dot(d_yx);
    double gap = s.f_y_cur - s.f_x_cur - inner;
    if (roundoff_guard) gap -= rounding_allowance(std::abs(s.f_y_cur) + std::abs(s.f_x_cur) + std::abs(inner));
    M = std::max(M, 12.0 * gap / (n_yx * n_yx * n_yx));
  }

  const double th = theta(s.k);
  const double step_sq = (s.x_cur - s.x_prev).squaredNorm();
  if (step_sq > 0.0) {
    double resid = (s.grad_y_cur + th * s.grad_x_prev - (1.0 + th) * s.grad_x_cur).norm();
    if (roundoff_guard) {
      // Gradient magnitudes, plus the gradient shift caused by y_k being
      // stored rounded rather than exactly on the line through x_{k-1}, x_k.
      const double grads = s.grad_y_cur.norm() + th * s.grad_x_prev.norm() + (1.0 + th) * s.grad_x_cur.norm();
      const double points = s.y_cur.norm() + th * s.x_prev.norm() + (1.0 + th) * s.x_cur.norm();
      resid -= rounding_allowance(grads + s.L * points);
    }
    M = std::max(M, resid / (th * step_sq));
  }
  return M;
}

double update_M_theoretical(const EpochState& s, double grad_norm_ybar, double Z_k, bool roundoff_guard) {
  double M = update_M_practical(s, roundoff_guard);
  const double S = s.S_k();
  if (s.k >= 2 && S > 0.0) {
    const auto kd = static_cast<double>(s.k);
    const double step = (s.x_cur - s.x_prev).norm();
    const double num = 16.0 * (Z_k * Z_k * grad_norm_ybar - Z_k * s.L * step);
    const double den = (kd - 1.0) * (kd + 5.0) * (kd + 5.0) * S;
    M = std::max(M, num / den);
  }
  return M;
}

void update_average(EpochState& s) {
  const auto kd = static_cast<double>(s.k);
  const double theta_Z = kd * s.Z / (kd + 1.0);
  const double Z_next = 1.0 + theta_Z;
  s.y_bar = (s.y_cur + theta_Z * s.y_bar) / Z_next;
  s.Z = Z_next;
}

namespace {

void reset_epoch(EpochState& s) {
  s.k = 0;
  s.S.reset();
  s.Z = 1.0;
  s.y_bar = s.x_cur;
  s.f_x0 = s.f_x_cur;
  ++s.epoch;
}

}  // namespace

EpochState restart_unsuccessful(EpochState s, double alpha) {
  s.x_cur = s.x_prev;
  s.y_cur = s.x_prev;
  s.grad_x_cur = s.grad_x_prev;
  s.grad_y_cur = s.grad_x_prev;
  s.f_x_cur = s.f_x_prev;
  s.f_y_cur = s.f_x_prev;
  s.L *= alpha;
  reset_epoch(s);
  return s;
}

EpochState restart_successful(EpochState s, double beta) {
  s.x_prev = s.x_cur;
  s.y_cur = s.x_cur;
  s.grad_x_prev = s.grad_x_cur;
  s.grad_y_cur = s.grad_x_cur;
  s.f_x_prev = s.f_x_cur;
  s.f_y_cur = s.f_x_cur;
  s.L *= beta;
  reset_epoch(s);
  return s;
}

IterationOutcome agd_step(EpochState& state, Evaluator& eval, const SolverParams& params) {
  IterationOutcome out;
  const auto& policy = params.termination;
  const bool on_candidate = policy.certify_mode == CertifyMode::OnCandidate;

  if (state.grad_y_cur.norm() == 0.0) {
    // y_{k-1} is an exact stationary point; there is nowhere to step.
    out.kind = OutcomeKind::Terminated;
    out.stop = StopReason::Stationary;
    out.candidate_norm = 0.0;
    out.candidate = state.y_cur;
    out.trace = TraceRecord{state.K + 1, state.epoch, state.k + 1, eval.counter().n_oracle(), state.f_y_cur,
                            0.0, std::nullopt, state.L, state.M, state.S_k(), TraceEvent::Terminated};
    return out;
  }

  std::swap(state.x_prev, state.x_cur);
  std::swap(state.grad_x_prev, state.grad_x_cur);
  state.f_x_prev = state.f_x_cur;
  ++state.k;
  ++state.K;

  const double th = theta(state.k);
  state.x_cur = state.y_cur - state.grad_y_cur / state.L;
  state.y_cur = state.x_cur + th * (state.x_cur - state.x_prev);
  state.S.add((state.x_cur - state.x_prev).squaredNorm());

  state.f_x_cur = eval.value(state.x_cur);
  state.grad_x_cur = eval.gradient(state.x_cur);
  state.f_y_cur = eval.value(state.y_cur);
  state.grad_y_cur = eval.gradient(state.y_cur);

  const double gx_norm = state.grad_x_cur.norm();
  const double gy_norm = state.grad_y_cur.norm();
  const double monitor = std::min(gx_norm, gy_norm);

  std::optional<double> ybar_norm;
  const bool ybar_every_iter =
      params.m_variant == MVariant::Theoretical || policy.certify_mode == CertifyMode::EveryIter;
  if (ybar_every_iter) ybar_norm = eval.gradient(state.y_bar).norm();

  state.M = params.m_variant == MVariant::Practical
                ? update_M_practical(state, params.m_roundoff_guard)
                : update_M_theoretical(state, *ybar_norm, state.Z, params.m_roundoff_guard);

  const bool descent = descent_condition_holds(state);
  const bool restart2 = descent && restart2_triggered(state);
  const bool epoch_ends = !descent || restart2;

  // On-candidate certification: measure the average when the cheap monitor
  // is already below eps, or when the epoch closes. At k = 1 the average is
  // the anchor, whose gradient is already known.
  if (on_candidate && !ybar_norm && state.k >= 2 &&
      (epoch_ends || (policy.eps && monitor <= *policy.eps))) {
    ybar_norm = eval.gradient(state.y_bar).norm();
  }

  if (ybar_norm) {
    out.candidate_norm = *ybar_norm;
    out.candidate = state.y_bar;
  }
  if (on_candidate) {
    const bool x_better = gx_norm <= gy_norm;
    const double best = x_better ? gx_norm : gy_norm;
    if (!out.candidate_norm || best < *out.candidate_norm) {
      out.candidate_norm = best;
      out.candidate = x_better ? state.x_cur : state.y_cur;
    }
  }

  const bool done = policy.eps && out.candidate_norm && *out.candidate_norm <= *policy.eps;

  out.trace = TraceRecord{state.K,   state.epoch, state.k, eval.counter().n_oracle(), state.f_x_cur, monitor,
                          ybar_norm, state.L,     state.M, state.S_k(),               TraceEvent::Step};

  if (done) {
    out.kind = OutcomeKind::Terminated;
    out.stop = StopReason::EpsReached;
    out.trace.event = TraceEvent::Terminated;
  } else if (!descent) {
    out.kind = OutcomeKind::RestartUnsuccessful;
    out.trace.event = TraceEvent::RestartUnsuccessful;
    state = restart_unsuccessful(std::move(state), params.alpha);
  } else if (restart2) {
    out.kind = OutcomeKind::RestartSuccessful;
    out.trace.event = TraceEvent::RestartSuccessful;
    state = restart_successful(std::move(state), params.beta);
  } else {
    update_average(state);
  }
  return out;
}

RestartedAgd::RestartedAgd(const Objective& objective, SolverParams params)
    : objective_(&objective), params_(std::move(params)), eval_(objective) {
  params_.validate();
}

std::optional<StopReason> RestartedAgd::start(const Point& x_init) {
  if (x_init.size() != objective_->dim) throw DimensionMismatch("x_init dimension does not match objective");
  require_finite(x_init, "x_init");
  const double f0 = eval_.value(x_init);
  const Point g0 = eval_.gradient(x_init);
  state_ = initial_state(x_init, f0, g0, params_.L_init, params_.M_0);
  if (g0.norm() == 0.0) return StopReason::Stationary;
  return std::nullopt;
}

IterationOutcome RestartedAgd::step() { return agd_step(state_, eval_, params_); }

RunReport run(const Objective& objective, const Point& x_init, const SolverParams& params, const TraceSink& sink) {
  RestartedAgd solver(objective, params);
  // Bad inputs are configuration errors, not oracle failures mid-run.
  if (x_init.size() != objective.dim) throw DimensionMismatch("x_init dimension does not match objective");
  require_finite(x_init, "x_init");
  detail::RunRecorder rec("proposed", solver.params().termination, sink);
  // Worst case per iteration: f and grad at x_k and y_k plus one averaged gradient.
  constexpr std::int64_t kIterationCost = 5;

  auto fill_state = [&](RunReport& r) {
    const auto& s = solver.state();
    r.total_K = s.K;
    r.total_epochs = s.epoch + 1;
    r.final_L = s.L;
    r.final_M = s.M;
  };
  auto finish = [&](StopReason reason) {
    fill_state(rec.report());
    auto& r = rec.report();
    r.ledger.initial = 2;
    RunReport out = rec.finish(reason, solver.evaluator().counter());
    out.ledger.iteration = out.n_oracle() - out.ledger.initial - out.ledger.certification;
    return out;
  };

  try {
    const auto initial_stop = solver.start(x_init);
    const auto& s0 = solver.state();
    rec.anchor(s0.f_x0);
    rec.offer_value(s0.f_x0);
    const double g0 = s0.grad_x_cur.norm();
    rec.offer_candidate(g0, x_init);
    if (initial_stop || rec.eps_reached()) {
      rec.push(TraceRecord{0, 0, 0, solver.evaluator().counter().n_oracle(), s0.f_x0, g0, std::nullopt, s0.L,
                           s0.M, 0.0, TraceEvent::Terminated},
               true);
      return finish(initial_stop ? *initial_stop : StopReason::EpsReached);
    }

    while (true) {
      if (rec.out_of_time()) return finish(StopReason::TimeLimit);
      if (!rec.budget_allows(solver.evaluator().counter().n_oracle(), kIterationCost)) {
        return finish(StopReason::BudgetExhausted);
      }

      IterationOutcome out = solver.step();
      if (out.trace.grad_norm_ybar) {
        ++rec.report().ledger.certification;
      }
      if (out.stop != StopReason::Stationary) rec.offer_value(out.trace.f_x);
      if (out.candidate_norm) rec.offer_candidate(*out.candidate_norm, out.candidate);
      rec.push(out.trace, out.kind != OutcomeKind::Continued);

      switch (out.kind) {
        case OutcomeKind::Terminated:
          return finish(*out.stop);
        case OutcomeKind::RestartUnsuccessful:
        case OutcomeKind::RestartSuccessful:
          rec.anchor(solver.state().f_x0);
          break;
        case OutcomeKind::Continued:
          break;
      }
    }
  } catch (const RunAborted&) {
    throw;
  } catch (const Error& e) {
    auto& r = rec.report();
    fill_state(r);
    throw RunAborted(e.what(), rec.partial(solver.evaluator().counter()));
  }
}

}  // namespace restartagd
