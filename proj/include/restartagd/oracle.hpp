#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace restartagd {

using Point = Eigen::VectorXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParamError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Raised when an objective returns NaN or Inf. Carries the offending point.
class NonFiniteValue : public Error {
 public:
  NonFiniteValue(const Point& x, double value);
  const Point& point() const { return x_; }
  double value() const { return value_; }

 private:
  Point x_;
  double value_;
};

class NonFiniteGradient : public Error {
 public:
  explicit NonFiniteGradient(const Point& x);
  const Point& point() const { return x_; }

 private:
  Point x_;
};

bool all_finite(const Point& x);

/// Throws ParamError if any entry of x is NaN or Inf.
void require_finite(const Point& x, const char* what);

/// A smooth objective f: R^d -> R with analytic gradient.
///
/// value_fn and grad_fn must be pure: an Objective is shared read-only between
/// concurrently running solvers. Known constants are global Lipschitz
/// constants of the gradient (known_L) and of the Hessian (known_M).
struct Objective {
  using ValueFn = std::function<double(const Point&)>;
  using GradFn = std::function<void(const Point&, Point&)>;

  std::string name;
  Eigen::Index dim = 0;
  ValueFn value_fn;
  GradFn grad_fn;
  std::optional<double> known_L;
  std::optional<double> known_M;
  std::optional<double> lower_bound;

  double value(const Point& x) const { return value_fn(x); }
  Point gradient(const Point& x) const;
};

struct EvalCounter {
  std::int64_t n_value = 0;
  std::int64_t n_grad = 0;
  std::int64_t n_memo_hits = 0;

  std::int64_t n_oracle() const { return n_value + n_grad; }
};

/// Per-run evaluation front end: counts oracle calls and serves an immediate
/// repeat at a bitwise-identical point from a one-entry memo per channel.
/// Not thread safe; one Evaluator belongs to one run.
class Evaluator {
 public:
  explicit Evaluator(const Objective& objective);

  double value(const Point& x);
  const Point& gradient(const Point& x);

  const EvalCounter& counter() const { return counter_; }
  const Objective& objective() const { return *objective_; }

 private:
  void check_dim(const Point& x) const;

  const Objective* objective_;
  EvalCounter counter_;

  bool value_slot_valid_ = false;
  Point value_slot_x_;
  double value_slot_ = 0.0;

  bool grad_slot_valid_ = false;
  Point grad_slot_x_;
  Point grad_slot_;
};

/// Bitwise equality of two points (distinguishes -0.0 from 0.0).
bool bitwise_equal(const Point& a, const Point& b);

/// Default finite-difference step, 1e-6 * (1 + |x|_inf).
double default_fd_step(const Point& x);

/// Central-difference gradient. Calls the objective directly and is never
/// counted as an oracle call; intended for verification only.
Point fd_gradient(const Objective& objective, const Point& x, std::optional<double> h = std::nullopt);

}  // namespace restartagd
