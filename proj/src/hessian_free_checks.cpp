#include "restartagd/hessian_free_checks.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <random>

#include "restartagd/problems.hpp"

namespace restartagd {

double inequality_tolerance(double rhs) { return 1e-9 * (1.0 + std::abs(rhs)); }

namespace {

InequalityReport make_report(double lhs, double rhs, std::vector<Point> witness) {
  InequalityReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.holds = r.slack >= -inequality_tolerance(rhs);
  r.witness = std::move(witness);
  return r;
}

void require_same_dim(const Objective& obj, const Point& x) {
  if (x.size() != obj.dim) throw DimensionMismatch("point dimension does not match objective");
}

}  // namespace

InequalityReport check_descent_lemma(const Objective& obj, const Point& x, const Point& y, double L) {
  if (!(L >= 0.0)) throw ParamError("check_descent_lemma: L must be nonnegative");
  require_same_dim(obj, x);
  require_same_dim(obj, y);
  const Point d = x - y;
  const double lhs = obj.value(x) - obj.value(y) - obj.gradient(y).dot(d);
  return make_report(lhs, 0.5 * L * d.squaredNorm(), {x, y});
}

InequalityReport check_jensen_gradient(const Objective& obj, const std::vector<Point>& points,
                                       const std::vector<double>& weights, double M) {
  if (!(M >= 0.0)) throw ParamError("check_jensen_gradient: M must be nonnegative");
  if (points.empty()) throw WeightError("check_jensen_gradient: no points");
  if (points.size() != weights.size()) throw WeightError("check_jensen_gradient: one weight per point required");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw WeightError("check_jensen_gradient: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw WeightError("check_jensen_gradient: weights must sum to 1");
  for (const auto& z : points) require_same_dim(obj, z);

  Point mean = Point::Zero(obj.dim);
  Point mean_grad = Point::Zero(obj.dim);
  for (std::size_t i = 0; i < points.size(); ++i) {
    mean += weights[i] * points[i];
    mean_grad += weights[i] * obj.gradient(points[i]);
  }
  const double lhs = (obj.gradient(mean) - mean_grad).norm();

  double spread = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      spread += weights[i] * weights[j] * (points[i] - points[j]).squaredNorm();
  return make_report(lhs, 0.5 * M * spread, points);
}

InequalityReport check_trapezoid(const Objective& obj, const Point& x, const Point& y, double M) {
  if (!(M >= 0.0)) throw ParamError("check_trapezoid: M must be nonnegative");
  require_same_dim(obj, x);
  require_same_dim(obj, y);
  const Point d = x - y;
  const double lhs = obj.value(x) - obj.value(y) - 0.5 * (obj.gradient(x) + obj.gradient(y)).dot(d);
  const double n = d.norm();
  return make_report(lhs, M / 12.0 * n * n * n, {x, y});
}

void Box::validate() const {
  if (lo.size() == 0 || lo.size() != hi.size()) throw ParamError("box bounds must have equal, positive dimension");
  if (!((hi - lo).array() > 0.0).all()) throw ParamError("box must have hi > lo in every coordinate");
}

namespace {

/// Draws points and local pairs inside a box.
class Sampler {
 public:
  Sampler(const Box& box, std::uint64_t seed) : box_(box), rng_(seed) {
    half_width_ = 0.5 * (box.hi - box.lo).maxCoeff();
  }

  Point uniform() {
    Point x(box_.dim());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x[i] = std::uniform_real_distribution<double>(box_.lo[i], box_.hi[i])(rng_);
    }
    return x;
  }

  /// Unit vector: Gaussian half the time, otherwise a signed coordinate axis.
  /// Axis directions reach the extremes of separable third derivatives.
  Point direction() {
    Point u = Point::Zero(box_.dim());
    if (coin()) {
      const auto i = std::uniform_int_distribution<Eigen::Index>(0, u.size() - 1)(rng_);
      u[i] = coin() ? 1.0 : -1.0;
      return u;
    }
    while (true) {
      for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = normal_(rng_);
      const double n = u.norm();
      if (n > 0.0) return u / n;
    }
  }

  double radius() { return half_width_ * std::pow(10.0, std::uniform_real_distribution<double>(-3.0, 0.0)(rng_)); }

  Point clamp(Point x) const { return x.cwiseMax(box_.lo).cwiseMin(box_.hi); }

  Point near(const Point& x) { return clamp(x + radius() * direction()); }

  /// Global pair half the time, local pair otherwise.
  std::pair<Point, Point> pair() {
    Point x = uniform();
    Point y = coin() ? uniform() : near(x);
    return {std::move(x), std::move(y)};
  }

  bool coin() { return std::bernoulli_distribution(0.5)(rng_); }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double exponential() { return std::exponential_distribution<double>(1.0)(rng_); }

 private:
  const Box& box_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  double half_width_ = 1.0;
};

double rounding_allowance(double scale) { return 8.0 * DBL_EPSILON * scale; }

}  // namespace

double estimate_M_bruteforce(const Objective& obj, const Box& box, std::int64_t samples, std::uint64_t seed) {
  if (samples < 2) throw ParamError("estimate_M_bruteforce: samples must be at least 2");
  box.validate();
  if (box.dim() != obj.dim) throw DimensionMismatch("box dimension does not match objective");

  Sampler sampler(box, seed);
  double best = 0.0;
  for (std::int64_t n = 0; n < samples; ++n) {
    const Point a = sampler.uniform();
    const Point y = sampler.near(a);
    const Point d = y - a;
    const double h = d.norm();
    if (h == 0.0) continue;

    // Trapezoid ratio on (a, y).
    const double fa = obj.value(a), fy = obj.value(y);
    const Point ga = obj.gradient(a), gy = obj.gradient(y);
    const double inner = 0.5 * (ga + gy).dot(d);
    const double gap = std::abs(fy - fa - inner) - rounding_allowance(std::abs(fy) + std::abs(fa) + std::abs(inner));
    best = std::max(best, 12.0 * gap / (h * h * h));

    // Interpolation ratio: x between a and y with y = x + theta (x - a).
    const double th = std::max(sampler.unit(), 1e-3);
    const Point x = (y + th * a) / (1.0 + th);
    const Point gx = obj.gradient(x);
    const double step = (x - a).norm();
    if (step == 0.0) continue;
    const double secant_L = (gy - ga).norm() / h;
    double resid = (gy + th * ga - (1.0 + th) * gx).norm();
    resid -= rounding_allowance(gy.norm() + th * ga.norm() + (1.0 + th) * gx.norm() +
                                secant_L * (y.norm() + th * a.norm() + (1.0 + th) * x.norm()));
    best = std::max(best, resid / (th * step * step));
  }
  return best;
}

double potential(const PotentialSnapshot& s, double L) {
  if (!(L > 0.0)) throw ParamError("potential: L must be positive");
  const Point d = s.x - s.x_prev;
  return s.f_x + 0.5 * s.theta * s.theta *
                     (s.grad_x_prev.dot(d) + s.grad_x_prev.squaredNorm() / (2.0 * L) + L * d.squaredNorm());
}

double potential_decrease_bound(double theta_k, double theta_k1, double L, double M, double step_next,
                                double step_cur, double grad_norm_xk) {
  const double t2 = theta_k * theta_k;
  const double c2 = step_cur * step_cur;
  return (theta_k1 * theta_k1 + theta_k - 2.0) / 4.0 * L * step_next * step_next +
         7.0 * t2 / 12.0 * M * c2 * step_cur + t2 * theta_k / (4.0 * L) * M * M * c2 * c2 -
         t2 / (4.0 * L) * grad_norm_xk * grad_norm_xk;
}

double grad_norm_ybar_bound(double L, double M_bar, double M_prev, double S_prev, std::int64_t k, bool tight) {
  if (k < 2) throw ParamError("grad_norm_ybar_bound: k must be at least 2");
  const double kd = static_cast<double>(k);
  const double base = 4.0 * L * std::sqrt(S_prev / (kd * kd * kd));
  return tight ? base : base * M_bar / M_prev;
}

std::vector<SuiteProblem> default_suite(Eigen::Index cos_dim) {
  std::vector<SuiteProblem> out;
  const Eigen::Index qd = 10;
  out.push_back({"quadratic", quadratic(qd, 1.0), 1.0, 0.0, {Point::Constant(qd, -10.0), Point::Constant(qd, 10.0)}});
  out.push_back({"cosine_sum", cosine_sum(cos_dim), 1.0, 1.0,
                 {Point::Constant(cos_dim, -10.0), Point::Constant(cos_dim, 10.0)}});
  // Hessian eigenvalues stay below ~5720 and its Lipschitz constant below
  // ~4850 on [-2, 2]^2.
  out.push_back({"rosenbrock", rosenbrock(), 6000.0, 5300.0, {Point::Constant(2, -2.0), Point::Constant(2, 2.0)}});
  return out;
}

void SuiteOptions::validate() const {
  if (samples < 1) throw ParamError("suite: samples must be positive");
  if (!(l_scale >= 0.0) || !(m_scale >= 0.0)) throw ParamError("suite: scales must be nonnegative");
  if (max_jensen_points < 1) throw ParamError("suite: max_jensen_points must be positive");
}

namespace {

struct Tally {
  CheckSummary summary;
  double worst_rel = std::numeric_limits<double>::infinity();

  void add(InequalityReport r) {
    ++summary.samples;
    if (!r.holds) ++summary.violations;
    const double rel = r.slack / (1.0 + std::abs(r.rhs));
    if (rel < worst_rel) {
      worst_rel = rel;
      summary.worst_slack = r.slack;
      summary.worst = std::move(r);
    }
  }
};

}  // namespace

std::vector<CheckSummary> run_inequality_suite(const SuiteProblem& problem, const SuiteOptions& options) {
  options.validate();
  problem.box.validate();
  const Objective& obj = problem.objective;
  const double L = problem.L * options.l_scale;
  const double M = problem.M * options.m_scale;

  auto tally = [&](const char* check) {
    Tally t;
    t.summary.problem = problem.name;
    t.summary.check = check;
    return t;
  };
  Tally descent = tally("descent_lemma");
  Tally jensen = tally("jensen_gradient");
  Tally trapezoid = tally("trapezoid");

  // Independent streams so that changing one check's draws leaves the
  // others untouched.
  Sampler s_descent(problem.box, options.seed);
  Sampler s_jensen(problem.box, options.seed + 1);
  Sampler s_trapezoid(problem.box, options.seed + 2);

  for (std::int64_t n = 0; n < options.samples; ++n) {
    auto [x, y] = s_descent.pair();
    descent.add(check_descent_lemma(obj, x, y, L));
  }

  for (std::int64_t n = 0; n < options.samples; ++n) {
    const int m = s_jensen.integer(1, options.max_jensen_points);
    const bool local = s_jensen.coin();
    const Point center = s_jensen.uniform();
    std::vector<Point> points;
    std::vector<double> weights;
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      points.push_back(local ? s_jensen.near(center) : s_jensen.uniform());
      weights.push_back(s_jensen.exponential());
      total += weights.back();
    }
    for (double& w : weights) w /= total;
    jensen.add(check_jensen_gradient(obj, points, weights, M));
  }

  for (std::int64_t n = 0; n < options.samples; ++n) {
    auto [x, y] = s_trapezoid.pair();
    trapezoid.add(check_trapezoid(obj, x, y, M));
  }

  return {std::move(descent.summary), std::move(jensen.summary), std::move(trapezoid.summary)};
}

}  // namespace restartagd
