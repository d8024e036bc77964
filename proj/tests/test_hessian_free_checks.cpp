#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "restartagd/hessian_free_checks.hpp"
#include "restartagd/problems.hpp"

using namespace restartagd;

namespace {

Point pt(std::initializer_list<double> v) {
  Point x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

Point uniform(std::mt19937_64& rng, Eigen::Index d, double half) {
  std::uniform_real_distribution<double> u(-half, half);
  return Point::NullaryExpr(d, [&](Eigen::Index) { return u(rng); });
}

Box cube_box(Eigen::Index d, double half) { return {Point::Constant(d, -half), Point::Constant(d, half)}; }

}  // namespace

TEST(Trapezoid, CubeExample) {
  const auto r = check_trapezoid(cubic_1d(), pt({1.0}), pt({0.0}), 6.0);
  EXPECT_DOUBLE_EQ(r.lhs, -0.5);
  EXPECT_DOUBLE_EQ(r.rhs, 0.5);
  EXPECT_DOUBLE_EQ(r.slack, 1.0);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.witness.size(), 2u);
}

TEST(Trapezoid, CoincidentPointsHaveZeroSlack) {
  const auto r = check_trapezoid(cosine_sum(3), pt({0.1, 0.2, 0.3}), pt({0.1, 0.2, 0.3}), 1.0);
  EXPECT_EQ(r.slack, 0.0);
  EXPECT_TRUE(r.holds);
}

TEST(Trapezoid, ExactOnQuadratics) {
  std::mt19937_64 rng(1);
  const auto f = quadratic(5, 3.0);
  for (int i = 0; i < 100; ++i) {
    const auto r = check_trapezoid(f, uniform(rng, 5, 4), uniform(rng, 5, 4), 0.0);
    EXPECT_NEAR(r.slack, 0.0, 1e-12 * (1.0 + std::abs(r.lhs)));
    EXPECT_TRUE(r.holds);
  }
}

TEST(Trapezoid, NegativeMIsRejected) {
  EXPECT_THROW(check_trapezoid(cubic_1d(), pt({1.0}), pt({0.0}), -1.0), ParamError);
}

TEST(DescentLemma, CoincidentPoints) {
  const auto r = check_descent_lemma(rosenbrock(), pt({0.5, 0.5}), pt({0.5, 0.5}), 1.0);
  EXPECT_EQ(r.slack, 0.0);
  EXPECT_TRUE(r.holds);
}

TEST(DescentLemma, EqualityOnUnitQuadratic) {
  std::mt19937_64 rng(2);
  const auto f = quadratic(4, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto r = check_descent_lemma(f, uniform(rng, 4, 5), uniform(rng, 4, 5), 1.0);
    EXPECT_NEAR(r.slack, 0.0, 1e-12 * (1.0 + r.rhs));
  }
}

TEST(DescentLemma, TooSmallLIsCaught) {
  // Exact Taylor: lhs = rhs(L = 1) > rhs(L = 0.5) for distinct points.
  const auto r = check_descent_lemma(quadratic(2, 1.0), pt({1, 0}), pt({0, 0}), 0.5);
  EXPECT_DOUBLE_EQ(r.lhs, 0.5);
  EXPECT_DOUBLE_EQ(r.rhs, 0.25);
  EXPECT_FALSE(r.holds);
  EXPECT_THROW(check_descent_lemma(quadratic(2, 1.0), pt({1, 0}), pt({0, 0}), -1.0), ParamError);
}

TEST(Jensen, SinglePointHasZeroLhs) {
  const auto r = check_jensen_gradient(cosine_sum(2), {pt({0.4, -1.0})}, {1.0}, 1.0);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_TRUE(r.holds);
}

TEST(Jensen, QuadraticGradientCommutesWithAveraging) {
  std::mt19937_64 rng(4);
  const auto f = quadratic(3, 2.0);
  const std::vector<Point> z = {uniform(rng, 3, 5), uniform(rng, 3, 5), uniform(rng, 3, 5)};
  const auto r = check_jensen_gradient(f, z, {0.2, 0.3, 0.5}, 0.0);
  EXPECT_LE(r.lhs, 1e-14);
  EXPECT_TRUE(r.holds);
}

TEST(Jensen, TwoPointCosineExample) {
  // z = 0 and pi in one dimension with equal weights: grad at pi/2 is -1,
  // average of grads is 0; rhs = 1/2 * 1/4 * pi^2.
  const auto r = check_jensen_gradient(cosine_sum(1), {pt({0.0}), pt({M_PI})}, {0.5, 0.5}, 1.0);
  EXPECT_NEAR(r.lhs, 1.0, 1e-15);
  EXPECT_NEAR(r.rhs, M_PI * M_PI / 8.0, 1e-15);
  EXPECT_TRUE(r.holds);
}

TEST(Jensen, WeightErrors) {
  const auto f = cosine_sum(1);
  const std::vector<Point> z = {pt({0.0}), pt({1.0})};
  EXPECT_THROW(check_jensen_gradient(f, z, {0.5, 0.6}, 1.0), WeightError);
  EXPECT_THROW(check_jensen_gradient(f, z, {1.5, -0.5}, 1.0), WeightError);
  EXPECT_THROW(check_jensen_gradient(f, z, {1.0}, 1.0), WeightError);
  EXPECT_THROW(check_jensen_gradient(f, {}, {}, 1.0), WeightError);
  EXPECT_NO_THROW(check_jensen_gradient(f, z, {0.5, 0.5 + 5e-13}, 1.0));
  EXPECT_THROW(check_jensen_gradient(f, z, {0.5, 0.5 + 5e-12}, 1.0), WeightError);
}

TEST(Tolerance, Scale) {
  EXPECT_DOUBLE_EQ(inequality_tolerance(0.0), 1e-9);
  EXPECT_DOUBLE_EQ(inequality_tolerance(-3.0), 4e-9);
}

TEST(BruteforceM, CosineOnTwoPiBox) {
  const double m = estimate_M_bruteforce(cosine_sum(2), cube_box(2, M_PI), 10000);
  EXPECT_GT(m, 0.5);
  EXPECT_LE(m, 1.0);
}

TEST(BruteforceM, CubeOnUnitInterval) {
  const double m = estimate_M_bruteforce(cubic_1d(), cube_box(1, 1.0), 10000);
  EXPECT_GT(m, 4.0);
  EXPECT_LE(m, 6.0);
}

TEST(BruteforceM, QuadraticIsNoise) {
  EXPECT_LE(estimate_M_bruteforce(quadratic(4, 10.0), cube_box(4, 10.0), 10000), 1e-6);
}

TEST(BruteforceM, RejectsTooFewSamples) {
  EXPECT_THROW(estimate_M_bruteforce(cubic_1d(), cube_box(1, 1.0), 1), ParamError);
}

TEST(BruteforceM, RosenbrockWithinSuiteConstant) {
  const double m = estimate_M_bruteforce(rosenbrock(), cube_box(2, 2.0), 20000, 3);
  EXPECT_GT(m, 1000.0);
  EXPECT_LE(m, 5300.0);
}

TEST(Potential, AnchorValue) {
  const auto f = rosenbrock();
  const Point x = pt({-1, 1});
  const Point g = f.gradient(x);
  const double L = 3.0;
  const double phi = potential({f.value(x), x, x, g, 0.25}, L);
  EXPECT_NEAR(phi - f.value(x), 0.0625 * g.squaredNorm() / (4.0 * L), 1e-12 * phi);
}

TEST(Potential, ZeroGradientAndStep) {
  EXPECT_EQ(potential({2.5, pt({1, 1}), pt({1, 1}), pt({0, 0}), 0.5}, 1.0), 2.5);
}

TEST(Potential, NeverBelowObjective) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> t(0.0, 1.0), l(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const PotentialSnapshot s{0.7, uniform(rng, 3, 2), uniform(rng, 3, 2), uniform(rng, 3, 5), t(rng)};
    EXPECT_GE(potential(s, l(rng)), 0.7 - 1e-12);
  }
}

TEST(GradNormBound, FormulaAndDomain) {
  EXPECT_DOUBLE_EQ(grad_norm_ybar_bound(2.0, 1.0, 1.0, 8.0, 2, true), 8.0);
  EXPECT_DOUBLE_EQ(grad_norm_ybar_bound(2.0, 4.0, 1.0, 8.0, 2, false), 32.0);
  EXPECT_THROW(grad_norm_ybar_bound(1.0, 1.0, 1.0, 1.0, 1, true), ParamError);
}

TEST(Suite, DefaultProblemsPassAtNominalConstants) {
  for (const auto& prob : default_suite()) {
    SuiteOptions opt;
    const auto results = run_inequality_suite(prob, opt);
    ASSERT_EQ(results.size(), 3u);
    for (const auto& r : results) {
      EXPECT_EQ(r.samples, 10000);
      EXPECT_TRUE(r.passed()) << r.problem << " " << r.check << ": " << r.violations << " violations, worst slack "
                              << r.worst_slack;
    }
  }
}

TEST(Suite, HalvedMIsCaught) {
  const auto suite = default_suite();
  SuiteOptions opt;
  opt.m_scale = 0.5;
  const auto results = run_inequality_suite(suite[1], opt);  // cosine_sum
  std::int64_t caught = 0;
  for (const auto& r : results) {
    if (r.check != "descent_lemma") caught += r.violations;
  }
  EXPECT_GT(caught, 0);
}

TEST(Suite, SeededRunsAreReproducible) {
  const auto prob = default_suite()[1];
  SuiteOptions opt;
  opt.samples = 500;
  opt.m_scale = 0.5;
  const auto a = run_inequality_suite(prob, opt);
  const auto b = run_inequality_suite(prob, opt);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].violations, b[i].violations);
    EXPECT_EQ(a[i].worst_slack, b[i].worst_slack);
  }
}

TEST(Suite, OptionValidation) {
  SuiteOptions opt;
  opt.samples = 0;
  EXPECT_THROW(opt.validate(), ParamError);
  opt.samples = 1;
  opt.m_scale = -1.0;
  EXPECT_THROW(opt.validate(), ParamError);
}
