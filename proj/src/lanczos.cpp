#include "vnrg/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>
#include <string>

#include "vnrg/error.hpp"

namespace vnrg {

namespace {

using Mat = Eigen::MatrixXd;

/// Orthogonalizes the columns of `block` against `basis` (two passes) and
/// against each other; drops columns that become negligible.
Mat orthogonalize(const Mat& basis, Mat block) {
  Mat out(block.rows(), 0);
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    Eigen::VectorXd v = block.col(c);
    const double before = v.norm();
    if (before == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (basis.cols() > 0) v -= basis * (basis.transpose() * v);
      if (out.cols() > 0) v -= out * (out.transpose() * v);
    }
    const double after = v.norm();
    if (after <= 1e-10 * before || after < 1e-300) continue;
    out.conservativeResize(Eigen::NoChange, out.cols() + 1);
    out.col(out.cols() - 1) = v / after;
  }
  return out;
}

Mat random_block(std::size_t dim, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Mat m(dim, cols);
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = normal(rng);
  return m;
}

LanczosResult dense_solve(const LinearOperator& op, std::size_t dim, std::size_t num) {
  LanczosResult res;
  const Mat id = Mat::Identity(dim, dim);
  Mat h(dim, dim);
  op(id, h);
  res.applications = dim;
  h = 0.5 * (h + h.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> eig(h);
  if (eig.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
  res.values = eig.eigenvalues().head(num);
  res.vectors = eig.eigenvectors().leftCols(num);
  res.converged = true;
  return res;
}

}  // namespace

LanczosResult lowest_eigenpairs(const LinearOperator& op, std::size_t dim, const LanczosOptions& options,
                                const Eigen::MatrixXd* guess) {
  const std::size_t num = options.num;
  if (num == 0 || num > dim)
    throw InvalidArgument("eigensolver: requested " + std::to_string(num) + " eigenpairs of a " +
                          std::to_string(dim) + "-dimensional operator");
  if (guess && static_cast<std::size_t>(guess->rows()) != dim) throw InvalidArgument("eigensolver: guess has wrong dimension");

  const std::size_t block = std::min(dim, options.block_size ? options.block_size : num);
  std::size_t max_basis = options.max_basis ? options.max_basis : std::max(3 * num, num + 4 * block);
  max_basis = std::max(max_basis, num + block);
  if (dim <= std::max(options.dense_threshold, max_basis)) return dense_solve(op, dim, num);

  std::mt19937_64 rng(options.seed);
  LanczosResult res;

  Mat start = guess ? Mat(*guess) : Mat(dim, 0);
  Mat v = orthogonalize(Mat(dim, 0), start);
  if (static_cast<std::size_t>(v.cols()) > num) v.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(num));
  while (static_cast<std::size_t>(v.cols()) < block) {
    Mat extra = orthogonalize(v, random_block(dim, block - static_cast<std::size_t>(v.cols()), rng));
    Mat joined(dim, v.cols() + extra.cols());
    joined << v, extra;
    v = std::move(joined);
  }
  Mat hv(dim, v.cols());
  op(v, hv);
  res.applications += static_cast<std::size_t>(v.cols());

  // Columns [last_begin, cols) hold the newest block; its images seed the next one.
  Eigen::Index last_begin = 0;
  const std::size_t keep = std::min(max_basis - block, num + block);

  for (std::size_t cycle = 0; cycle < options.max_iters; ++cycle) {
    res.iterations = cycle + 1;
    while (static_cast<std::size_t>(v.cols()) + 1 <= max_basis) {
      const Eigen::Index room = static_cast<Eigen::Index>(max_basis) - v.cols();
      Mat next = orthogonalize(v, hv.middleCols(last_begin, v.cols() - last_begin));
      if (next.cols() > room) next.conservativeResize(Eigen::NoChange, room);
      if (next.cols() == 0) {
        next = orthogonalize(v, random_block(dim, std::min<std::size_t>(block, static_cast<std::size_t>(room)), rng));
        if (next.cols() == 0) break;
      }
      Mat hnext(dim, next.cols());
      op(next, hnext);
      res.applications += static_cast<std::size_t>(next.cols());
      last_begin = v.cols();
      Mat v2(dim, v.cols() + next.cols()), hv2(dim, v.cols() + next.cols());
      v2 << v, next;
      hv2 << hv, hnext;
      v = std::move(v2);
      hv = std::move(hv2);
    }

    Mat t = v.transpose() * hv;
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> eig(t);
    if (eig.info() != Eigen::Success) throw NumericalError("eigensolver: Rayleigh-Ritz step failed");
    const Eigen::Index k = std::min<Eigen::Index>(static_cast<Eigen::Index>(keep), v.cols());
    const Mat s = eig.eigenvectors().leftCols(k);
    Mat y = v * s;
    Mat hy = hv * s;
    const Eigen::VectorXd theta = eig.eigenvalues().head(k);

    Mat resid = hy.leftCols(static_cast<Eigen::Index>(num)) -
                y.leftCols(static_cast<Eigen::Index>(num)) * theta.head(static_cast<Eigen::Index>(num)).asDiagonal();
    bool all = true;
    double worst = 0.0;
    std::vector<Eigen::Index> open;
    for (std::size_t i = 0; i < num; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double rel = resid.col(ii).norm() / std::max(1.0, std::abs(theta(ii)));
      worst = std::max(worst, rel);
      if (rel >= options.tol) {
        all = false;
        open.push_back(ii);
      }
    }
    res.max_residual = worst;
    res.values = theta.head(static_cast<Eigen::Index>(num));
    res.vectors = y.leftCols(static_cast<Eigen::Index>(num));
    if (all) {
      res.converged = true;
      return res;
    }

    // Thick restart: keep the leading Ritz pairs (already orthonormal) and
    // continue the Krylov sequence from the open residuals.
    const Mat qr_y = orthogonalize(Mat(dim, 0), y);
    if (qr_y.cols() != y.cols()) {
      v = qr_y;
      hv.resize(dim, v.cols());
      op(v, hv);
      res.applications += static_cast<std::size_t>(v.cols());
    } else {
      v = std::move(y);
      hv = std::move(hy);
    }
    Mat r(dim, static_cast<Eigen::Index>(std::min(open.size(), block)));
    for (Eigen::Index c = 0; c < r.cols(); ++c) r.col(c) = resid.col(open[static_cast<std::size_t>(c)]);
    Mat next = orthogonalize(v, r);
    if (next.cols() == 0) next = orthogonalize(v, random_block(dim, block, rng));
    if (next.cols() == 0) break;
    Mat hnext(dim, next.cols());
    op(next, hnext);
    res.applications += static_cast<std::size_t>(next.cols());
    last_begin = v.cols();
    Mat v2(dim, v.cols() + next.cols()), hv2(dim, v.cols() + next.cols());
    v2 << v, next;
    hv2 << hv, hnext;
    v = std::move(v2);
    hv = std::move(hv2);
  }
  res.converged = false;
  return res;
}

}  // namespace vnrg
