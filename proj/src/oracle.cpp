#include "restartagd/oracle.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace restartagd {

namespace {

std::string describe_point(const Point& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  const Eigen::Index shown = std::min<Eigen::Index>(x.size(), 8);
  for (Eigen::Index i = 0; i < shown; ++i) {
    if (i > 0) os << ", ";
    os << x[i];
  }
  if (x.size() > shown) os << ", ...";
  os << ")";
  return os.str();
}

}  // namespace

NonFiniteValue::NonFiniteValue(const Point& x, double value)
    : Error("objective value is not finite (" + std::to_string(value) + ") at " + describe_point(x)),
      x_(x),
      value_(value) {}

NonFiniteGradient::NonFiniteGradient(const Point& x)
    : Error("gradient is not finite at " + describe_point(x)), x_(x) {}

bool all_finite(const Point& x) { return x.allFinite(); }

void require_finite(const Point& x, const char* what) {
  if (!all_finite(x)) throw ParamError(std::string(what) + " has non-finite entries");
}

Point Objective::gradient(const Point& x) const {
  Point g(dim);
  grad_fn(x, g);
  return g;
}

bool bitwise_equal(const Point& a, const Point& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

Evaluator::Evaluator(const Objective& objective) : objective_(&objective) {
  if (objective.dim < 1) throw ParamError("objective dimension must be positive");
  grad_slot_.resize(objective.dim);
}

void Evaluator::check_dim(const Point& x) const {
  if (x.size() != objective_->dim) {
    throw DimensionMismatch("point has dimension " + std::to_string(x.size()) + ", objective expects " +
                            std::to_string(objective_->dim));
  }
}

double Evaluator::value(const Point& x) {
  check_dim(x);
  if (value_slot_valid_ && bitwise_equal(x, value_slot_x_)) {
    ++counter_.n_memo_hits;
    return value_slot_;
  }
  const double v = objective_->value_fn(x);
  ++counter_.n_value;
  if (!std::isfinite(v)) throw NonFiniteValue(x, v);
  value_slot_x_ = x;
  value_slot_ = v;
  value_slot_valid_ = true;
  return v;
}

const Point& Evaluator::gradient(const Point& x) {
  check_dim(x);
  if (grad_slot_valid_ && bitwise_equal(x, grad_slot_x_)) {
    ++counter_.n_memo_hits;
    return grad_slot_;
  }
  grad_slot_valid_ = false;
  objective_->grad_fn(x, grad_slot_);
  ++counter_.n_grad;
  if (grad_slot_.size() != objective_->dim) throw DimensionMismatch("gradient has wrong dimension");
  if (!grad_slot_.allFinite()) throw NonFiniteGradient(x);
  grad_slot_x_ = x;
  grad_slot_valid_ = true;
  return grad_slot_;
}

double default_fd_step(const Point& x) { return 1e-6 * (1.0 + x.lpNorm<Eigen::Infinity>()); }

Point fd_gradient(const Objective& objective, const Point& x, std::optional<double> h) {
  const double step = h.value_or(default_fd_step(x));
  if (!(step > 0.0)) throw ParamError("finite-difference step must be positive");
  Point g(x.size());
  Point probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double fp = objective.value(probe);
    probe[i] = x[i] - step;
    const double fm = objective.value(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw NonFiniteValue(probe, std::isfinite(fp) ? fm : fp);
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

}  // namespace restartagd
