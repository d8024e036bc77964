#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <Eigen/QR>
#include <gtest/gtest.h>

#include "restartagd/problems.hpp"

using namespace restartagd;
namespace fs = std::filesystem;

namespace {

Point pt(std::initializer_list<double> v) {
  Point x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

class TempFile {
 public:
  explicit TempFile(const std::string& contents) {
    path_ = fs::temp_directory_path() /
            ("restartagd_problems_" + std::to_string(std::random_device{}()) + ".data");
    std::ofstream(path_) << contents;
  }
  ~TempFile() { fs::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  fs::path path_;
};

}  // namespace

TEST(Quadratic, MinimizerAndConstants) {
  const auto f = quadratic(3, 2.0);
  EXPECT_EQ(f.value(Point::Zero(3)), 0.0);
  EXPECT_EQ(f.value(pt({1, 1, 1})), 3.0);
  ASSERT_TRUE(f.known_L && f.known_M);
  EXPECT_EQ(*f.known_L, 2.0);
  EXPECT_EQ(*f.known_M, 0.0);
  EXPECT_THROW(quadratic(0, 1.0), ParamError);
}

TEST(CosineSum, FloorAndStationaryMaximizer) {
  const auto f = cosine_sum(4);
  EXPECT_EQ(f.value(Point::Zero(4)), 4.0);
  EXPECT_EQ(f.gradient(Point::Zero(4)).norm(), 0.0);
  EXPECT_DOUBLE_EQ(f.value(Point::Constant(4, M_PI)), -4.0);
  ASSERT_TRUE(f.lower_bound);
  EXPECT_EQ(*f.lower_bound, -4.0);
}

TEST(Cubic, ValueAndGradient) {
  const auto f = cubic_1d();
  EXPECT_EQ(f.value(pt({2.0})), 8.0);
  EXPECT_EQ(f.gradient(pt({2.0}))[0], 12.0);
}

TEST(MatrixCompletion, HandComputedValue) {
  // U = [1; 2], V = [3; 4], observed (0,0) = 1 and (1,1) = 5:
  // residuals 2 and 3, U^T U - V^T V = 5 - 25.
  MatrixCompletionInstance inst{2, 2, {{0, 0, 1.0}, {1, 1, 5.0}}};
  const auto f = matrix_completion(inst, 1);
  EXPECT_EQ(f.dim, 4);
  EXPECT_DOUBLE_EQ(f.value(pt({1, 2, 3, 4})), (4.0 + 9.0) / 4.0 + 400.0 / 4.0);
}

TEST(MatrixCompletion, ZeroFactors) {
  MatrixCompletionInstance inst{3, 2, {{0, 0, 2.0}, {2, 1, -1.0}, {1, 0, 3.0}}};
  const auto f = matrix_completion(inst, 2);
  const Point z = Point::Zero(f.dim);
  EXPECT_DOUBLE_EQ(f.value(z), (4.0 + 1.0 + 9.0) / 6.0);
  EXPECT_EQ(f.gradient(z).norm(), 0.0);
}

TEST(MatrixCompletion, ExactBalancedRankOne) {
  // u = v = (1, 2): every entry of u v^T observed; balanced so the regularizer vanishes.
  MatrixCompletionInstance inst{2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 4.0}}};
  const auto f = matrix_completion(inst, 1);
  EXPECT_EQ(f.value(pt({1, 2, 1, 2})), 0.0);
  EXPECT_EQ(f.gradient(pt({1, 2, 1, 2})).norm(), 0.0);
}

TEST(MatrixCompletion, GradientMatchesFiniteDifferences) {
  const auto inst = synthetic_completion(20, 15, 3, 0.5, 9);
  const auto f = matrix_completion(inst, 3);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 20; ++i) {
    const Point x = Point::NullaryExpr(f.dim, [&](Eigen::Index) { return n01(rng); });
    const Point fd = fd_gradient(f, x);
    EXPECT_LE((f.gradient(x) - fd).norm(), 1e-4 * fd.norm());
  }
}

TEST(MatrixCompletion, RotationInvariance) {
  const std::int64_t p = 6, q = 5, r = 3;
  const auto inst = synthetic_completion(p, q, 2, 0.6, 1);
  const auto f = matrix_completion(inst, r);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n01;
  const Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(r, r, [&](Eigen::Index, Eigen::Index) { return n01(rng); });
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
  const Point x = completion_initial_point(p, q, r, 2);
  // Row-major layout: row i of U / V is x[i r .. i r + r).
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor W = Eigen::Map<const RowMajor>(x.data(), p + q, r) * Q;
  const Point xr = Eigen::Map<const Point>(W.data(), W.size());
  EXPECT_NEAR(f.value(xr), f.value(x), 1e-10 * (1.0 + std::abs(f.value(x))));
}

TEST(MatrixCompletion, SyntheticIsDeterministic) {
  const auto a = synthetic_completion(30, 20, 3, 0.3, 42);
  const auto b = synthetic_completion(30, 20, 3, 0.3, 42);
  ASSERT_EQ(a.N(), 180u);
  ASSERT_EQ(a.N(), b.N());
  for (std::size_t i = 0; i < a.N(); ++i) {
    EXPECT_EQ(a.observations[i].i, b.observations[i].i);
    EXPECT_EQ(a.observations[i].j, b.observations[i].j);
    EXPECT_EQ(a.observations[i].s, b.observations[i].s);
  }
  EXPECT_TRUE(bitwise_equal(completion_initial_point(30, 20, 3, 7), completion_initial_point(30, 20, 3, 7)));
  EXPECT_NO_THROW(a.validate());
}

TEST(MatrixCompletion, MalformedObservations) {
  MatrixCompletionInstance out_of_range{2, 2, {{0, 2, 1.0}}};
  EXPECT_THROW(out_of_range.validate(), IndexError);
  EXPECT_THROW(matrix_completion(out_of_range, 1), IndexError);
  MatrixCompletionInstance negative{2, 2, {{-1, 0, 1.0}}};
  EXPECT_THROW(negative.validate(), IndexError);
  MatrixCompletionInstance duplicate{2, 2, {{1, 1, 1.0}, {1, 1, 2.0}}};
  EXPECT_THROW(duplicate.validate(), IndexError);
}

TEST(MovieLens, ParsesTabSeparatedRows) {
  TempFile file("1\t1\t5\t874965758\n943\t1682\t3\t875071561\n2\t10\t2.5\t1\n");
  const auto inst = load_movielens_100k(file.path());
  EXPECT_EQ(inst.p, kMovieLensUsers);
  EXPECT_EQ(inst.q, kMovieLensItems);
  ASSERT_EQ(inst.N(), 3u);
  EXPECT_EQ(inst.observations[1].i, 942);
  EXPECT_EQ(inst.observations[1].j, 1681);
  EXPECT_EQ(inst.observations[2].s, 2.5);
}

TEST(MovieLens, EmptyFileIsDegenerate) {
  TempFile file("");
  EXPECT_EQ(load_movielens_100k(file.path()).N(), 0u);
}

TEST(MovieLens, MalformedLineReportsLineNumber) {
  std::string text;
  for (int i = 1; i <= 6; ++i) text += std::to_string(i) + "\t1\t4\t0\n";
  text += "7\tone\t4\t0\n";
  TempFile file(text);
  try {
    load_movielens_100k(file.path());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
  }
}

TEST(MovieLens, WrongFieldCount) {
  TempFile file("1\t1\t5\n");
  EXPECT_THROW(load_movielens_100k(file.path()), ParseError);
}

TEST(MovieLens, IndexBeyondBounds) {
  TempFile file("944\t1\t5\t0\n");
  EXPECT_THROW(load_movielens_100k(file.path()), DimensionError);
  TempFile zero("0\t1\t5\t0\n");
  EXPECT_THROW(load_movielens_100k(zero.path()), DimensionError);
}

TEST(MovieLens, DuplicatePair) {
  TempFile file("3\t4\t5\t0\n3\t4\t1\t9\n");
  EXPECT_THROW(load_movielens_100k(file.path()), ParseError);
}

TEST(MovieLens, MissingFile) {
  EXPECT_THROW(load_movielens_100k("/nonexistent/u.data"), Error);
}

TEST(MakeProblem, BuiltIns) {
  ProblemOptions opt;
  const auto rb = make_problem(opt);
  EXPECT_EQ(rb.x_init, pt({-1, 1}));
  opt.name = "cosine_sum";
  opt.dim = 7;
  const auto cs = make_problem(opt);
  EXPECT_EQ(cs.objective.dim, 7);
  EXPECT_TRUE(bitwise_equal(cs.x_init, make_problem(opt).x_init));
  opt.name = "matrix_completion";
  opt.rows = 10;
  opt.cols = 8;
  opt.rank = 2;
  const auto mc = make_problem(opt);
  EXPECT_EQ(mc.objective.dim, (10 + 8) * 2);
  EXPECT_EQ(mc.x_init.size(), mc.objective.dim);
  for (const auto& name : problem_names()) EXPECT_FALSE(name.empty());
}

TEST(MakeProblem, UnknownNameAndMissingData) {
  ProblemOptions opt;
  opt.name = "himmelblau";
  EXPECT_THROW(make_problem(opt), ParamError);
  opt.name = "movielens";
  opt.data_file.clear();
  EXPECT_THROW(make_problem(opt), ParamError);
}
