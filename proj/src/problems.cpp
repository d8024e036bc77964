#include "restartagd/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <utility>

namespace restartagd {

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

Objective rosenbrock() {
  Objective o;
  o.name = "rosenbrock";
  o.dim = 2;
  o.value_fn = [](const Point& x) {
    const double a = x[0] - 1.0;
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  o.grad_fn = [](const Point& x, Point& g) {
    const double b = x[1] - x[0] * x[0];
    g.resize(2);
    g[0] = 2.0 * (x[0] - 1.0) - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
  };
  o.lower_bound = 0.0;
  return o;
}

Objective quadratic(Eigen::Index d, double lambda) {
  if (d < 1) throw ParamError("quadratic: dimension must be positive");
  if (!(lambda > 0.0)) throw ParamError("quadratic: lambda must be positive");
  Objective o;
  o.name = "quadratic";
  o.dim = d;
  o.value_fn = [lambda](const Point& x) { return 0.5 * lambda * x.squaredNorm(); };
  o.grad_fn = [lambda](const Point& x, Point& g) { g = lambda * x; };
  o.known_L = lambda;
  o.known_M = 0.0;
  o.lower_bound = 0.0;
  return o;
}

Objective cosine_sum(Eigen::Index d) {
  if (d < 1) throw ParamError("cosine_sum: dimension must be positive");
  Objective o;
  o.name = "cosine_sum";
  o.dim = d;
  o.value_fn = [](const Point& x) { return x.array().cos().sum(); };
  o.grad_fn = [](const Point& x, Point& g) { g = -x.array().sin().matrix(); };
  o.known_L = 1.0;
  o.known_M = 1.0;
  o.lower_bound = -static_cast<double>(d);
  return o;
}

Objective cubic_1d() {
  Objective o;
  o.name = "cubic";
  o.dim = 1;
  o.value_fn = [](const Point& x) { return x[0] * x[0] * x[0]; };
  o.grad_fn = [](const Point& x, Point& g) {
    g.resize(1);
    g[0] = 3.0 * x[0] * x[0];
  };
  o.known_M = 6.0;
  return o;
}

void MatrixCompletionInstance::validate() const {
  if (p < 1 || q < 1) throw IndexError("matrix dimensions must be positive");
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  for (const auto& o : observations) {
    if (o.i < 0 || o.i >= p || o.j < 0 || o.j >= q) {
      throw IndexError("observation (" + std::to_string(o.i) + ", " + std::to_string(o.j) + ") out of range");
    }
    if (!std::isfinite(o.s)) throw IndexError("observation value is not finite");
    if (!seen.emplace(o.i, o.j).second) {
      throw IndexError("duplicate observation (" + std::to_string(o.i) + ", " + std::to_string(o.j) + ")");
    }
  }
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstFactor = Eigen::Map<const RowMatrix>;
using Factor = Eigen::Map<RowMatrix>;

struct CompletionData {
  std::int64_t p, q, r;
  std::vector<Observation> obs;
  double inv_N;
};

}  // namespace

Objective matrix_completion(const MatrixCompletionInstance& instance, std::int64_t r) {
  if (r < 1) throw ParamError("matrix_completion: rank must be positive");
  instance.validate();
  if (instance.N() == 0) throw ParamError("matrix_completion: no observations");

  auto data = std::make_shared<const CompletionData>(
      CompletionData{instance.p, instance.q, r, instance.observations, 1.0 / static_cast<double>(instance.N())});

  Objective o;
  o.name = "matrix_completion";
  o.dim = (instance.p + instance.q) * r;
  o.lower_bound = 0.0;
  o.value_fn = [data](const Point& x) {
    const ConstFactor U(x.data(), data->p, data->r);
    const ConstFactor V(x.data() + data->p * data->r, data->q, data->r);
    double fit = 0.0;
    for (const auto& ob : data->obs) {
      const double res = U.row(ob.i).dot(V.row(ob.j)) - ob.s;
      fit += res * res;
    }
    const Eigen::MatrixXd D = U.transpose() * U - V.transpose() * V;
    return 0.5 * data->inv_N * (fit + D.squaredNorm());
  };
  o.grad_fn = [data](const Point& x, Point& g) {
    g.setZero(x.size());
    const ConstFactor U(x.data(), data->p, data->r);
    const ConstFactor V(x.data() + data->p * data->r, data->q, data->r);
    Factor GU(g.data(), data->p, data->r);
    Factor GV(g.data() + data->p * data->r, data->q, data->r);
    for (const auto& ob : data->obs) {
      const double res = (U.row(ob.i).dot(V.row(ob.j)) - ob.s) * data->inv_N;
      GU.row(ob.i) += res * V.row(ob.j);
      GV.row(ob.j) += res * U.row(ob.i);
    }
    const Eigen::MatrixXd D = U.transpose() * U - V.transpose() * V;
    GU += (2.0 * data->inv_N) * (U * D);
    GV -= (2.0 * data->inv_N) * (V * D);
  };
  return o;
}

MatrixCompletionInstance synthetic_completion(std::int64_t p, std::int64_t q, std::int64_t r_true, double density,
                                              std::uint64_t seed) {
  if (p < 1 || q < 1 || r_true < 1) throw ParamError("synthetic_completion: sizes must be positive");
  if (!(density > 0.0 && density <= 1.0)) throw ParamError("synthetic_completion: density must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RowMatrix U(p, r_true), V(q, r_true);
  for (Eigen::Index i = 0; i < U.size(); ++i) U.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < V.size(); ++i) V.data()[i] = normal(rng);

  const auto total = static_cast<std::size_t>(p * q);
  const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(density * double(total))));
  std::vector<std::size_t> cells(total);
  std::iota(cells.begin(), cells.end(), 0);
  // Partial Fisher-Yates; std::shuffle's draw pattern is library specific.
  for (std::size_t n = 0; n < count; ++n) {
    std::uniform_int_distribution<std::size_t> pick(n, total - 1);
    std::swap(cells[n], cells[pick(rng)]);
  }
  cells.resize(count);
  std::sort(cells.begin(), cells.end());

  MatrixCompletionInstance inst;
  inst.p = p;
  inst.q = q;
  inst.observations.reserve(count);
  for (std::size_t c : cells) {
    const auto i = static_cast<std::int64_t>(c) / q;
    const auto j = static_cast<std::int64_t>(c) % q;
    inst.observations.push_back({i, j, U.row(i).dot(V.row(j))});
  }
  return inst;
}

Point completion_initial_point(std::int64_t p, std::int64_t q, std::int64_t r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Point x((p + q) * r);
  const double scale = 1.0 / std::sqrt(static_cast<double>(r));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = scale * normal(rng);
  return x;
}

MatrixCompletionInstance load_movielens_100k(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  MatrixCompletionInstance inst;
  inst.p = kMovieLensUsers;
  inst.q = kMovieLensItems;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string user, item, rating, stamp;
    if (!std::getline(fields, user, '\t') || !std::getline(fields, item, '\t') ||
        !std::getline(fields, rating, '\t') || !std::getline(fields, stamp, '\t')) {
      throw ParseError(lineno, "expected 4 tab-separated fields");
    }
    std::int64_t u = 0, m = 0;
    double s = 0.0;
    try {
      std::size_t pos = 0;
      u = std::stoll(user, &pos);
      if (pos != user.size()) throw std::invalid_argument(user);
      m = std::stoll(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      s = std::stod(rating, &pos);
      if (pos != rating.size() || !std::isfinite(s)) throw std::invalid_argument(rating);
    } catch (const std::logic_error&) {
      throw ParseError(lineno, "non-numeric field");
    }
    if (u < 1 || u > kMovieLensUsers || m < 1 || m > kMovieLensItems) {
      throw DimensionError("line " + std::to_string(lineno) + ": index (" + std::to_string(u) + ", " +
                           std::to_string(m) + ") outside 943 x 1682");
    }
    if (!seen.emplace(u - 1, m - 1).second) throw ParseError(lineno, "duplicate (user, item) pair");
    inst.observations.push_back({u - 1, m - 1, s});
  }
  return inst;
}

std::vector<std::string> problem_names() {
  return {"rosenbrock", "quadratic", "cosine_sum", "matrix_completion", "movielens"};
}

ProblemSpec make_problem(const ProblemOptions& opt) {
  ProblemSpec spec;
  spec.name = opt.name;
  spec.seed = opt.seed;
  if (opt.name == "rosenbrock") {
    spec.objective = rosenbrock();
    spec.x_init = Point(2);
    spec.x_init << -1.0, 1.0;
  } else if (opt.name == "quadratic") {
    spec.objective = quadratic(opt.dim, opt.lambda);
    spec.x_init = Point::Ones(opt.dim);
  } else if (opt.name == "cosine_sum") {
    spec.objective = cosine_sum(opt.dim);
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    spec.x_init.resize(opt.dim);
    for (Eigen::Index i = 0; i < opt.dim; ++i) spec.x_init[i] = unif(rng);
  } else if (opt.name == "matrix_completion") {
    const auto inst = synthetic_completion(opt.rows, opt.cols, opt.rank, opt.density, opt.seed);
    spec.objective = matrix_completion(inst, opt.rank);
    spec.x_init = completion_initial_point(opt.rows, opt.cols, opt.rank, opt.seed + 1);
  } else if (opt.name == "movielens") {
    if (opt.data_file.empty()) throw ParamError("movielens: no data file (set RESTARTAGD_DATA or --data-file)");
    const auto inst = load_movielens_100k(opt.data_file);
    spec.objective = matrix_completion(inst, opt.rank);
    spec.x_init = completion_initial_point(inst.p, inst.q, opt.rank, opt.seed + 1);
  } else {
    throw ParamError("unknown problem '" + opt.name + "'");
  }
  return spec;
}

}  // namespace restartagd
