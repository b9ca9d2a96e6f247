#include <gtest/gtest.h>

#include "support.hpp"
#include "vnrg/error.hpp"
#include "vnrg/lanczos.hpp"

using namespace vnrg;
using namespace vnrg::test;

namespace {

LinearOperator dense_op(const Eigen::MatrixXd& h) {
  return [h](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) { out = h * in; };
}

}  // namespace

TEST(Lanczos, DenseFallback) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd h = random_symmetric(40, rng);
  LanczosOptions opt;
  opt.num = 5;
  const auto r = lowest_eigenpairs(dense_op(h), 40, opt);
  const auto ev = sorted_eigenvalues(h);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(r.values(i), ev[static_cast<std::size_t>(i)], 1e-12);
  EXPECT_TRUE(r.converged);
}

TEST(Lanczos, KrylovMatchesDense) {
  std::mt19937_64 rng(2);
  const Eigen::Index n = 600;
  const Eigen::MatrixXd h = random_symmetric(n, rng);
  LanczosOptions opt;
  opt.num = 6;
  opt.tol = 1e-10;
  opt.max_iters = 1000;
  const auto r = lowest_eigenpairs(dense_op(h), static_cast<std::size_t>(n), opt);
  ASSERT_TRUE(r.converged);
  const auto ev = sorted_eigenvalues(h);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(r.values(i), ev[static_cast<std::size_t>(i)], 1e-8);
  const Eigen::MatrixXd resid = h * r.vectors - r.vectors * r.values.asDiagonal();
  EXPECT_LT(resid.colwise().norm().maxCoeff(), 1e-8);
  EXPECT_LT((r.vectors.transpose() * r.vectors - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-10);
}

TEST(Lanczos, DegenerateSpectrum) {
  // Diagonal operator with a threefold degenerate ground level.
  const std::size_t n = 500;
  Eigen::VectorXd diag(n);
  for (std::size_t i = 0; i < n; ++i) diag(static_cast<Eigen::Index>(i)) = i < 3 ? -1.0 : double(i) / n;
  LinearOperator op = [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) { out = diag.asDiagonal() * in; };
  LanczosOptions opt;
  opt.num = 4;
  const auto r = lowest_eigenpairs(op, n, opt);
  ASSERT_TRUE(r.converged);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.values(i), -1.0, 1e-10);
  EXPECT_NEAR(r.values(3), 3.0 / n, 1e-10);
}

TEST(Lanczos, GuessIsUsedAndResultDeterministic) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd h = random_symmetric(400, rng);
  LanczosOptions opt;
  opt.num = 3;
  const auto a = lowest_eigenpairs(dense_op(h), 400, opt);
  const auto b = lowest_eigenpairs(dense_op(h), 400, opt);
  EXPECT_EQ(a.values, b.values);
  const auto warm = lowest_eigenpairs(dense_op(h), 400, opt, &a.vectors);
  EXPECT_LE(warm.applications, a.applications);
  EXPECT_LT((warm.values - a.values).norm(), 1e-9);
}

TEST(Lanczos, InvalidRequests) {
  const Eigen::MatrixXd h = Eigen::MatrixXd::Identity(4, 4);
  LanczosOptions opt;
  opt.num = 5;
  EXPECT_THROW(lowest_eigenpairs(dense_op(h), 4, opt), InvalidArgument);
  opt.num = 0;
  EXPECT_THROW(lowest_eigenpairs(dense_op(h), 4, opt), InvalidArgument);
}

TEST(Lanczos, NonConvergenceIsReported) {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd h = random_symmetric(800, rng);
  LanczosOptions opt;
  opt.num = 4;
  opt.max_iters = 1;
  opt.max_basis = 12;
  opt.tol = 1e-14;
  const auto r = lowest_eigenpairs(dense_op(h), 800, opt);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.max_residual, 1e-14);
}
