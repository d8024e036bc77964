#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "restartagd/oracle.hpp"

namespace restartagd {

class IndexError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// (x - 1)^2 + 100 (y - x^2)^2.
Objective rosenbrock();

/// lambda/2 |x|^2 with known_L = lambda, known_M = 0.
Objective quadratic(Eigen::Index d, double lambda);

/// sum_i cos(x_i) with known_L = known_M = 1 and lower bound -d.
Objective cosine_sum(Eigen::Index d);

/// f(t) = t^3 in one dimension, third derivative 6. Not bounded below;
/// used to exercise the Hessian-free inequalities.
Objective cubic_1d();

struct Observation {
  std::int64_t i = 0;
  std::int64_t j = 0;
  double s = 0.0;
};

/// Partially observed p x q matrix; indices are 0-based.
struct MatrixCompletionInstance {
  std::int64_t p = 0;
  std::int64_t q = 0;
  std::vector<Observation> observations;

  std::size_t N() const { return observations.size(); }
  /// Throws IndexError on out-of-range or duplicate (i, j).
  void validate() const;
};

/// 1/(2N) sum ((U V^T)_ij - s)^2 + 1/(2N) |U^T U - V^T V|_F^2 over
/// x = [rows of U; rows of V] flattened row-major, dim = (p + q) r.
Objective matrix_completion(const MatrixCompletionInstance& instance, std::int64_t r);

/// Planted rank-r_true matrix A = U* V*^T with standard normal factors;
/// round(density p q) entries observed uniformly without replacement.
MatrixCompletionInstance synthetic_completion(std::int64_t p, std::int64_t q, std::int64_t r_true, double density,
                                              std::uint64_t seed);

/// Standard normal entries scaled by 1/sqrt(r).
Point completion_initial_point(std::int64_t p, std::int64_t q, std::int64_t r, std::uint64_t seed);

/// Reads the MovieLens-100K u.data layout: user \t item \t rating \t
/// timestamp, 1-based indices bounded by 943 users and 1682 items.
MatrixCompletionInstance load_movielens_100k(const std::string& path);

constexpr std::int64_t kMovieLensUsers = 943;
constexpr std::int64_t kMovieLensItems = 1682;

struct ProblemOptions {
  std::string name = "rosenbrock";
  Eigen::Index dim = 10;
  double lambda = 1.0;
  std::int64_t rows = 100;
  std::int64_t cols = 80;
  std::int64_t rank = 5;
  double density = 0.3;
  std::uint64_t seed = 0;
  std::string data_file;
};

struct ProblemSpec {
  std::string name;
  Objective objective;
  Point x_init;
  std::uint64_t seed = 0;
};

/// Built-in problems by name: rosenbrock, quadratic, cosine_sum,
/// matrix_completion (synthetic), movielens. Throws ParamError on an
/// unknown name.
ProblemSpec make_problem(const ProblemOptions& options);

std::vector<std::string> problem_names();

}  // namespace restartagd
