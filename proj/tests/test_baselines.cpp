#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "restartagd/baselines.hpp"
#include "restartagd/problems.hpp"

using namespace restartagd;

namespace {

Point pt(std::initializer_list<double> v) {
  Point x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

TerminationPolicy to_eps(double eps, std::int64_t calls) {
  TerminationPolicy t;
  t.eps = eps;
  t.max_oracle_calls = calls;
  return t;
}

}  // namespace

TEST(Gd, ExactStepHitsMinimizer) {
  GdParams p;
  p.L_init = 1.0;
  p.termination.max_oracle_calls = 100;
  const RunReport r = gd_run(quadratic(2, 1.0), pt({1, 0}), p);
  EXPECT_EQ(r.reason, StopReason::Stationary);
  EXPECT_EQ(r.solution, pt({0, 0}));
  EXPECT_EQ(r.n_oracle(), 4);
}

TEST(Gd, BacktrackingSequence) {
  // lambda = 1: trials at L = 0.4 and 0.8 overshoot the Armijo bound,
  // L = 1.6 is accepted and then shrinks by beta.
  GdParams p;
  p.L_init = 0.4;
  p.termination.max_oracle_calls = 7;
  const RunReport r = gd_run(quadratic(1, 1.0), pt({1}), p);
  ASSERT_GE(r.trace.size(), 3u);
  EXPECT_EQ(r.trace[0].event, TraceEvent::RestartUnsuccessful);
  EXPECT_EQ(r.trace[1].event, TraceEvent::RestartUnsuccessful);
  EXPECT_EQ(r.trace[2].event, TraceEvent::Step);
  EXPECT_DOUBLE_EQ(r.trace[0].L, 0.4);
  EXPECT_DOUBLE_EQ(r.trace[1].L, 0.8);
  EXPECT_DOUBLE_EQ(r.trace[2].L, 1.6);
  EXPECT_DOUBLE_EQ(r.trace[2].f_x, 0.5 * 0.375 * 0.375);
  EXPECT_EQ(r.trace[2].n_oracle, 2 + 3 + 1);
}

TEST(Gd, LStaysBelowBoundOnCosine) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  for (double L0 : {1e-3, 1.0, 1e3}) {
    GdParams p;
    p.L_init = L0;
    p.termination = to_eps(1e-8, 20000);
    const RunReport r = gd_run(cosine_sum(10), Point::NullaryExpr(10, [&](Eigen::Index) { return u(rng); }), p);
    for (const auto& row : r.trace) ASSERT_LE(row.L, std::max(L0, 2.0));
  }
}

TEST(Gd, RosenbrockConvergesFromEveryGridL) {
  for (double L0 : {1e2, 1e3, 1e4}) {
    GdParams p;
    p.L_init = L0;
    p.termination = to_eps(1e-6, 100000);
    const RunReport r = gd_run(rosenbrock(), pt({-1, 1}), p);
    EXPECT_EQ(r.reason, StopReason::EpsReached) << L0;
    EXPECT_LE(r.certified_grad_norm, 1e-6);
    EXPECT_EQ(rosenbrock().gradient(r.solution).norm(), r.certified_grad_norm);
  }
}

TEST(Gd, AnchorsNonincreasingAndLedger) {
  GdParams p;
  p.termination = to_eps(1e-6, 100000);
  const RunReport r = gd_run(rosenbrock(), pt({-1, 1}), p);
  for (std::size_t i = 1; i < r.anchor_values.size(); ++i) ASSERT_LE(r.anchor_values[i], r.anchor_values[i - 1]);
  std::int64_t accepted = 0;
  for (const auto& row : r.trace) accepted += row.event != TraceEvent::RestartUnsuccessful ? 1 : 0;
  EXPECT_EQ(r.n_oracle(), 2 + r.total_K + accepted);
  EXPECT_EQ(r.n_oracle(), r.trace.back().n_oracle);
}

TEST(Gd, ParamValidation) {
  GdParams p;
  p.termination.max_oracle_calls = 10;
  p.alpha = 1.0;
  EXPECT_THROW(gd_run(rosenbrock(), pt({0, 0}), p), ParamError);
  p.alpha = 2.0;
  p.beta = 1.5;
  EXPECT_THROW(gd_run(rosenbrock(), pt({0, 0}), p), ParamError);
  p.beta = 0.9;
  EXPECT_THROW(gd_run(rosenbrock(), pt({0, 0, 0}), p), DimensionMismatch);
}

TEST(Ll2022, MomentumFormula) {
  LL2022Params p;
  p.L_f = 1.0;
  p.M_f = 1.0;
  p.eps = 1e-16;
  EXPECT_NEAR(p.theta(), 1.0 - 2e-4, 1e-15);
  p.L_f = 100.0;
  p.M_f = 16.0;
  p.eps = 1e-4;
  EXPECT_NEAR(p.theta(), 1.0 - 2.0 * 0.2 / 10.0, 1e-15);
}

TEST(Ll2022, NonPositiveMomentumIsRejected) {
  LL2022Params p;
  p.L_f = 1e-8;
  p.M_f = 1.0;
  p.eps = 1.0;
  p.termination.max_oracle_calls = 10;
  EXPECT_THROW(p.validate(), ParamError);
  EXPECT_THROW(ll2022_run(cosine_sum(2), pt({1, 1}), p), ParamError);
}

TEST(Ll2022, RestartRuleMatchesTrace) {
  LL2022Params p;
  p.L_f = 1.0;
  p.M_f = 1.0;
  p.eps = 1e-6;
  p.termination = to_eps(1e-8, 50000);
  const RunReport r = ll2022_run(cosine_sum(5), Point::Constant(5, 1.0), p);
  EXPECT_EQ(r.reason, StopReason::EpsReached);
  std::int64_t restarts = 0;
  for (const auto& row : r.trace) {
    const bool over = static_cast<double>(row.k) * p.M_f * row.S_k > p.eps;
    if (row.event == TraceEvent::RestartSuccessful) {
      EXPECT_TRUE(over) << row.K;
      ++restarts;
    } else if (row.event == TraceEvent::Step) {
      EXPECT_FALSE(over) << row.K;
    }
  }
  EXPECT_GT(restarts, 0);
}

TEST(Ll2022, TooSmallLDivergesOnRosenbrock) {
  LL2022Params p;
  p.L_f = 1e2;
  p.M_f = 1.0;
  p.termination = to_eps(1e-6, 100000);
  bool failed = false;
  try {
    const RunReport r = ll2022_run(rosenbrock(), pt({-1, 1}), p);
    failed = r.reason != StopReason::EpsReached;
  } catch (const RunAborted& e) {
    failed = true;
    EXPECT_GT(e.partial().n_oracle(), 0);
  }
  EXPECT_TRUE(failed);
}
