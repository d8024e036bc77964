#pragma once

#include <cstdint>
#include <optional>

#include "restartagd/oracle.hpp"
#include "restartagd/report.hpp"

namespace restartagd {

/// Which rule updates the Hessian-Lipschitz estimate M_k. Practical uses the
/// three-term max; Theoretical adds the averaged-gradient term and costs one
/// extra gradient per iteration.
enum class MVariant { Practical, Theoretical };

struct SolverParams {
  double L_init = 1e-3;
  double M_0 = 1e-16;
  double alpha = 2.0;
  double beta = 0.9;
  MVariant m_variant = MVariant::Practical;
  /// Shrink the numerators of the M-update ratios by a rounding-error
  /// allowance (8 eps times the magnitudes of their terms). Without it the
  /// trapezoid ratio near a minimizer with f* != 0 is dominated by
  /// cancellation in f(y) - f(x).
  bool m_roundoff_guard = true;
  TerminationPolicy termination;

  void validate() const;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + compensation_; }
  void reset() { sum_ = compensation_ = 0.0; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Everything the restarted method carries between iterations.
///
/// After an iteration with epoch counter k: x_prev = x_{k-1}, x_cur = x_k,
/// y_cur = y_k, and Z / y_bar hold Z_{k+1} and the average of y_0..y_k.
/// At k = 0 all three points coincide with the epoch anchor x_0.
struct EpochState {
  std::int64_t k = 0;
  std::int64_t K = 0;
  std::int64_t epoch = 0;

  Point x_prev, x_cur, y_cur;
  CompensatedSum S;
  double f_x0 = 0.0;
  double L = 0.0;
  double M = 0.0;
  double Z = 1.0;
  Point y_bar;

  Point grad_x_prev, grad_x_cur, grad_y_cur;
  double f_x_prev = 0.0;
  double f_x_cur = 0.0;
  double f_y_cur = 0.0;

  double S_k() const { return S.value(); }
};

/// Epoch-start state anchored at x with cached f(x) and grad f(x).
EpochState initial_state(const Point& x, double f, const Point& grad, double L, double M);

/// Acceleration parameter k/(k+1), k >= 1.
double theta(std::int64_t k);

/// f(x_k) <= f(x_0) - L S_k / (2(k+1)).
bool descent_condition_holds(const EpochState& s);

/// (k+1)^5 M^2 S_k > L^2.
bool restart2_triggered(const EpochState& s);

/// max{M, trapezoid ratio, interpolation ratio}; terms with a zero
/// denominator are skipped.
double update_M_practical(const EpochState& s, bool roundoff_guard = true);

/// Practical terms plus the averaged-gradient term, which needs
/// |grad f(y_bar_k)| with y_bar_k / Z_k the average before this iteration's
/// update_average. The extra term is skipped at k = 1 and when S_k = 0.
double update_M_theoretical(const EpochState& s, double grad_norm_ybar, double Z_k, bool roundoff_guard = true);

/// Folds y_cur into the running average: Z <- 1 + theta_k Z,
/// y_bar <- (y_cur + theta_k Z_old y_bar) / Z. theta_k Z_k is formed as
/// k Z_k / (k+1) so that Z_k = (k+1)/2 is reproduced exactly.
void update_average(EpochState& s);

/// New epoch from x_{k-1} with L <- alpha L. M carries over.
EpochState restart_unsuccessful(EpochState s, double alpha);

/// New epoch from x_k with L <- beta L. M carries over.
EpochState restart_successful(EpochState s, double beta);

enum class OutcomeKind { Continued, RestartUnsuccessful, RestartSuccessful, Terminated };

struct IterationOutcome {
  OutcomeKind kind = OutcomeKind::Continued;
  std::optional<StopReason> stop;
  TraceRecord trace;
  /// Best genuinely evaluated gradient norm this iteration that counts as a
  /// certificate under the run's certify mode, with its point.
  std::optional<double> candidate_norm;
  Point candidate;
};

/// One iteration of the restarted method. Evaluates f and grad f at x_k and
/// y_k, plus grad f at the averaged point when the variant or certify mode
/// asks for it, then applies the descent test and the restart test in that
/// order.
IterationOutcome agd_step(EpochState& state, Evaluator& eval, const SolverParams& params);

/// Drives agd_step under a termination policy; exposes the state so callers
/// can inspect every iteration.
class RestartedAgd {
 public:
  RestartedAgd(const Objective& objective, SolverParams params);

  /// Evaluates f and grad f at x_init and opens the first epoch.
  /// Returns Stationary when the initial gradient is exactly zero.
  std::optional<StopReason> start(const Point& x_init);
  IterationOutcome step();

  const EpochState& state() const { return state_; }
  const Evaluator& evaluator() const { return eval_; }
  const SolverParams& params() const { return params_; }

 private:
  const Objective* objective_;
  SolverParams params_;
  Evaluator eval_;
  EpochState state_;
};

/// Runs the restarted method until the termination policy fires. Oracle
/// failures are rethrown as RunAborted with the partial report.
RunReport run(const Objective& objective, const Point& x_init, const SolverParams& params,
              const TraceSink& sink = {});

}  // namespace restartagd
