#include "restartagd/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "run_recorder.hpp"

namespace restartagd {

void GdParams::validate() const {
  if (!(L_init > 0.0) || !std::isfinite(L_init)) throw ParamError("L_init must be positive");
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw ParamError("alpha must exceed 1");
  if (!(beta > 0.0 && beta <= 1.0)) throw ParamError("beta must lie in (0, 1]");
  termination.validate();
}

RunReport gd_run(const Objective& objective, const Point& x_init, const GdParams& params, const TraceSink& sink) {
  params.validate();
  if (x_init.size() != objective.dim) throw DimensionMismatch("x_init dimension does not match objective");
  require_finite(x_init, "x_init");

  Evaluator eval(objective);
  detail::RunRecorder rec("gd", params.termination, sink);
  // One trial value plus the gradient at an accepted point.
  constexpr std::int64_t kTrialCost = 2;

  double L = params.L_init;
  std::int64_t K = 0;
  std::int64_t accepted = 0;
  std::int64_t trials = 0;

  auto finish = [&](StopReason reason) {
    auto& r = rec.report();
    r.total_K = K;
    r.total_epochs = accepted + 1;
    r.final_L = L;
    r.final_M = 0.0;
    r.ledger.initial = 2;
    RunReport out = rec.finish(reason, eval.counter());
    out.ledger.iteration = out.n_oracle() - out.ledger.initial;
    return out;
  };

  try {
    Point x = x_init;
    double f = eval.value(x);
    Point g = eval.gradient(x);
    double g_norm = g.norm();
    rec.anchor(f);
    rec.offer_value(f);
    rec.offer_candidate(g_norm, x);
    if (g_norm == 0.0 || rec.eps_reached()) {
      rec.push(TraceRecord{0, 0, 0, eval.counter().n_oracle(), f, g_norm, std::nullopt, L, 0.0, 0.0,
                           TraceEvent::Terminated},
               true);
      return finish(g_norm == 0.0 ? StopReason::Stationary : StopReason::EpsReached);
    }

    Point trial(x.size());
    while (true) {
      if (rec.out_of_time()) return finish(StopReason::TimeLimit);
      if (!rec.budget_allows(eval.counter().n_oracle(), kTrialCost)) return finish(StopReason::BudgetExhausted);

      ++K;
      ++trials;
      trial = x - g / L;
      const double step_sq = (trial - x).squaredNorm();
      const double f_trial = eval.value(trial);
      const double L_used = L;

      if (f_trial <= f - g_norm * g_norm / (2.0 * L)) {
        x.swap(trial);
        f = f_trial;
        g = eval.gradient(x);
        g_norm = g.norm();
        ++accepted;
        rec.anchor(f);
        rec.offer_value(f);
        rec.offer_candidate(g_norm, x);
        L = params.beta * L;
        const bool done = rec.eps_reached() || g_norm == 0.0;
        rec.push(TraceRecord{K, accepted - 1, trials, eval.counter().n_oracle(), f, g_norm, std::nullopt, L_used,
                             0.0, step_sq, done ? TraceEvent::Terminated : TraceEvent::Step},
                 true);
        trials = 0;
        if (done) return finish(g_norm == 0.0 && !rec.eps_reached() ? StopReason::Stationary : StopReason::EpsReached);
      } else {
        L *= params.alpha;
        rec.push(TraceRecord{K, accepted, trials, eval.counter().n_oracle(), f, g_norm, std::nullopt, L_used, 0.0,
                             step_sq, TraceEvent::RestartUnsuccessful},
                 false);
      }
    }
  } catch (const Error& e) {
    auto& r = rec.report();
    r.total_K = K;
    r.final_L = L;
    throw RunAborted(e.what(), rec.partial(eval.counter()));
  }
}

void LL2022Params::validate() const {
  if (!(L_f > 0.0) || !(M_f > 0.0) || !(eps > 0.0)) throw ParamError("LL2022: L_f, M_f and eps must be positive");
  if (!(theta() > 0.0)) throw ParamError("LL2022: momentum 1 - 2 (M_f eps)^(1/4) / sqrt(L_f) is not positive");
  termination.validate();
}

double LL2022Params::theta() const { return 1.0 - 2.0 * std::pow(M_f * eps, 0.25) / std::sqrt(L_f); }

RunReport ll2022_run(const Objective& objective, const Point& x_init, const LL2022Params& params,
                     const TraceSink& sink) {
  params.validate();
  if (x_init.size() != objective.dim) throw DimensionMismatch("x_init dimension does not match objective");
  require_finite(x_init, "x_init");

  Evaluator eval(objective);
  detail::RunRecorder rec("ll2022", params.termination, sink);
  // f(x_k), grad f(y_k), and grad f(x_k) when the epoch restarts.
  constexpr std::int64_t kIterationCost = 3;
  const double theta = params.theta();
  const double inv_L = 1.0 / params.L_f;

  std::int64_t K = 0, k = 0, epoch = 0;
  double S = 0.0;

  auto finish = [&](StopReason reason) {
    auto& r = rec.report();
    r.total_K = K;
    r.total_epochs = epoch + 1;
    r.final_L = params.L_f;
    r.final_M = params.M_f;
    r.ledger.initial = 2;
    RunReport out = rec.finish(reason, eval.counter());
    out.ledger.iteration = out.n_oracle() - out.ledger.initial;
    return out;
  };

  try {
    Point x = x_init;
    Point y = x_init;
    const double f0 = eval.value(x);
    Point g_y = eval.gradient(y);
    rec.anchor(f0);
    rec.offer_value(f0);
    rec.offer_candidate(g_y.norm(), y);
    if (g_y.norm() == 0.0 || rec.eps_reached()) {
      rec.push(TraceRecord{0, 0, 0, eval.counter().n_oracle(), f0, g_y.norm(), std::nullopt, params.L_f, params.M_f,
                           0.0, TraceEvent::Terminated},
               true);
      return finish(g_y.norm() == 0.0 ? StopReason::Stationary : StopReason::EpsReached);
    }

    Point x_new(x.size());
    while (true) {
      if (rec.out_of_time()) return finish(StopReason::TimeLimit);
      if (!rec.budget_allows(eval.counter().n_oracle(), kIterationCost)) return finish(StopReason::BudgetExhausted);
      if (g_y.norm() == 0.0) return finish(StopReason::Stationary);

      ++k;
      ++K;
      x_new = y - inv_L * g_y;
      y = x_new + theta * (x_new - x);
      S += (x_new - x).squaredNorm();
      const double f_x = eval.value(x_new);
      g_y = eval.gradient(y);
      double monitor = g_y.norm();
      rec.offer_value(f_x);
      rec.offer_candidate(monitor, y);

      TraceRecord row{K,     epoch,        k,      eval.counter().n_oracle(), f_x, monitor, std::nullopt, params.L_f,
                      params.M_f, S, TraceEvent::Step};
      const bool restart = static_cast<double>(k) * params.M_f * S > params.eps;
      x.swap(x_new);
      if (restart) {
        y = x;
        g_y = eval.gradient(y);
        rec.offer_candidate(g_y.norm(), y);
        monitor = std::min(monitor, g_y.norm());
        row.n_oracle = eval.counter().n_oracle();
        row.grad_norm_monitor = monitor;
        row.event = TraceEvent::RestartSuccessful;
        k = 0;
        S = 0.0;
        ++epoch;
        rec.anchor(f_x);
      }
      if (rec.eps_reached()) {
        row.event = TraceEvent::Terminated;
        rec.push(row, true);
        return finish(StopReason::EpsReached);
      }
      rec.push(row, restart);
    }
  } catch (const Error& e) {
    auto& r = rec.report();
    r.total_K = K;
    r.final_L = params.L_f;
    r.final_M = params.M_f;
    throw RunAborted(e.what(), rec.partial(eval.counter()));
  }
}

}  // namespace restartagd
