#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "restartagd/oracle.hpp"

namespace restartagd {

class WeightError : public Error {
 public:
  using Error::Error;
};

/// Outcome of one inequality lhs <= rhs evaluated at concrete points.
/// holds == (slack >= -inequality_tolerance(rhs)).
struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = true;
  std::vector<Point> witness;
};

/// 1e-9 (1 + |rhs|): the inequalities are non-strict, so anything within
/// this band is floating-point noise.
double inequality_tolerance(double rhs);

/// f(x) - f(y) - <grad f(y), x - y>  <=  (L/2) |x - y|^2.
InequalityReport check_descent_lemma(const Objective& obj, const Point& x, const Point& y, double L);

/// |grad f(sum l_i z_i) - sum l_i grad f(z_i)|  <=  (M/2) sum_{i<j} l_i l_j |z_i - z_j|^2.
/// Throws WeightError unless the weights are nonnegative and sum to 1
/// within 1e-12.
InequalityReport check_jensen_gradient(const Objective& obj, const std::vector<Point>& points,
                                       const std::vector<double>& weights, double M);

/// f(x) - f(y) - <grad f(x) + grad f(y), x - y>/2  <=  (M/12) |x - y|^3.
InequalityReport check_trapezoid(const Objective& obj, const Point& x, const Point& y, double M);

/// Axis-aligned sampling region.
struct Box {
  Point lo, hi;

  Eigen::Index dim() const { return lo.size(); }
  void validate() const;
};

/// Lower bound on the Hessian Lipschitz constant over a box: the maximum,
/// over sampled pairs, of the trapezoid ratio 12 |gap| / |x - y|^3 and the
/// interpolation ratio used by the practical M update (random theta in
/// (0, 1)). Ratios are reduced by a rounding allowance so that pure noise
/// never inflates the estimate. Pair radii are log-uniform between 1e-3
/// and 1 times the box half-width.
double estimate_M_bruteforce(const Objective& obj, const Box& box, std::int64_t samples, std::uint64_t seed = 0);

/// Inputs of the potential function at iteration k of an epoch. At k = 0
/// pass x_prev = x and theta = 1/4.
struct PotentialSnapshot {
  double f_x = 0.0;
  Point x;
  Point x_prev;
  Point grad_x_prev;
  double theta = 0.25;
};

/// f(x_k) + theta_k^2/2 (<g_{k-1}, x_k - x_{k-1}> + |g_{k-1}|^2/(2L) + L |x_k - x_{k-1}|^2).
double potential(const PotentialSnapshot& s, double L);

/// Upper bound on Phi_{k+1} - Phi_k:
///   (theta_{k+1}^2 + theta_k - 2)/4 L |x_{k+1} - x_k|^2
///   + 7 theta_k^2/12 M |x_k - x_{k-1}|^3 + theta_k^3/(4L) M^2 |x_k - x_{k-1}|^4
///   - theta_k^2/(4L) |grad f(x_k)|^2.
double potential_decrease_bound(double theta_k, double theta_k1, double L, double M, double step_next,
                                double step_cur, double grad_norm_xk);

/// Bound on min_{1<=i<k} |grad f(y_bar_i)| for k >= 2:
/// 4 L M_bar / M_{k-1} sqrt(S_{k-1}/k^3). With tight = true (averaged
/// gradient term in the M update) the factor M_bar / M_{k-1} is dropped.
double grad_norm_ybar_bound(double L, double M_bar, double M_prev, double S_prev, std::int64_t k, bool tight);

/// A problem with the constants its inequality checks are run against.
struct SuiteProblem {
  std::string name;
  Objective objective;
  double L = 0.0;
  double M = 0.0;
  Box box;
};

/// quadratic (d = 10, lambda = 1) and cosine_sum (d = cos_dim) on
/// [-10, 10]^d, rosenbrock with box-local constants L = 6000, M = 5300 on
/// [-2, 2]^2.
std::vector<SuiteProblem> default_suite(Eigen::Index cos_dim = 10);

struct SuiteOptions {
  std::int64_t samples = 10000;
  std::uint64_t seed = 0;
  /// Multiplies the constants fed to the checks; values below 1 are meant
  /// to provoke violations.
  double l_scale = 1.0;
  double m_scale = 1.0;
  int max_jensen_points = 5;

  void validate() const;
};

struct CheckSummary {
  std::string problem;
  std::string check;
  std::int64_t samples = 0;
  std::int64_t violations = 0;
  double worst_slack = 0.0;
  /// The draw with the smallest relative slack.
  InequalityReport worst;

  bool passed() const { return violations == 0; }
};

/// Runs descent_lemma, jensen_gradient and trapezoid on `samples` seeded
/// draws each. Draws mix uniform pairs over the box with local pairs whose
/// direction is either Gaussian or a coordinate axis.
std::vector<CheckSummary> run_inequality_suite(const SuiteProblem& problem, const SuiteOptions& options);

}  // namespace restartagd
