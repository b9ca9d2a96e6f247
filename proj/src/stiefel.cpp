#include "vnrg/stiefel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vnrg/error.hpp"

namespace vnrg {

void CostData::validate() const {
  if (g.size() != r.size()) throw InvalidArgument("cost data: G and R lists differ in length");
  if (g.empty()) throw InvalidArgument("cost data is empty");
  const auto n = g.front().rows(), p = r.front().rows();
  for (std::size_t q = 0; q < g.size(); ++q) {
    if (g[q].rows() != n || g[q].cols() != n) throw InvalidArgument("cost data: inconsistent G dimensions");
    if (r[q].rows() != p || r[q].cols() != p) throw InvalidArgument("cost data: inconsistent R dimensions");
  }
}

namespace {

void check_shape(const Matrix& x, const CostData& data) {
  data.validate();
  if (static_cast<std::size_t>(x.rows()) != data.rows() || static_cast<std::size_t>(x.cols()) != data.cols())
    throw InvalidArgument("cost: X has shape " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                          ", expected " + std::to_string(data.rows()) + "x" + std::to_string(data.cols()));
}

double unchecked_cost(const Matrix& x, const CostData& data) {
  double f = 0.0;
  for (std::size_t q = 0; q < data.g.size(); ++q) {
    const Matrix gx = data.g[q] * x;
    f += (gx * data.r[q].transpose()).cwiseProduct(x).sum();
  }
  return f;
}

Matrix unchecked_gradient(const Matrix& x, const CostData& data, double* f) {
  Matrix grad = Matrix::Zero(x.rows(), x.cols());
  double value = 0.0;
  for (std::size_t q = 0; q < data.g.size(); ++q) {
    const Matrix hx = data.g[q] * x * data.r[q].transpose();
    value += hx.cwiseProduct(x).sum();
    grad += hx;
    if (!data.symmetric) grad.noalias() += data.g[q].transpose() * x * data.r[q];
  }
  if (data.symmetric) grad *= 2.0;
  if (f) *f = value;
  return grad;
}

double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

Matrix sub(const Matrix& m, const IsometryBlock& b) {
  Matrix out(b.rows.size(), b.cols.size());
  for (std::size_t i = 0; i < b.rows.size(); ++i)
    for (std::size_t k = 0; k < b.cols.size(); ++k) out(i, k) = m(b.rows[i], b.cols[k]);
  return out;
}

void scatter(Matrix& m, const IsometryBlock& b, const Matrix& block) {
  for (std::size_t i = 0; i < b.rows.size(); ++i)
    for (std::size_t k = 0; k < b.cols.size(); ++k) m(b.rows[i], b.cols[k]) = block(i, k);
}

Matrix project_dense(const Matrix& x, const Matrix& g) {
  const Matrix xtg = x.transpose() * g;
  return g - x * (0.5 * (xtg + xtg.transpose()));
}

Matrix retract(const Matrix& x, const Matrix& d, double t, std::span<const IsometryBlock> blocks) {
  if (blocks.empty()) return qr_isometrize(x + t * d);
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& b : blocks) scatter(out, b, qr_isometrize(sub(x, b) + t * sub(d, b)));
  return out;
}

double block_residual(const Matrix& x, std::span<const IsometryBlock> blocks) {
  if (blocks.empty()) return isometry_residual(x);
  double res = 0.0;
  Matrix mask = x;
  for (const auto& b : blocks) {
    res = std::max(res, isometry_residual(sub(x, b)));
    scatter(mask, b, Matrix::Zero(b.rows.size(), b.cols.size()));
  }
  return std::max(res, mask.cwiseAbs().maxCoeff());
}

}  // namespace

double cost(const Matrix& x, const CostData& data) {
  check_shape(x, data);
  return unchecked_cost(x, data);
}

Matrix euclidean_gradient(const Matrix& x, const CostData& data) {
  check_shape(x, data);
  return unchecked_gradient(x, data, nullptr);
}

Matrix project_tangent(const Matrix& x, const Matrix& egrad, std::span<const IsometryBlock> blocks) {
  if (blocks.empty()) return project_dense(x, egrad);
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& b : blocks) scatter(out, b, project_dense(sub(x, b), sub(egrad, b)));
  return out;
}

std::pair<Matrix, OptReport> minimize(const Matrix& x0, const CostData& data, const StiefelOptions& options) {
  check_shape(x0, data);
  const std::span<const IsometryBlock> blocks = options.blocks;
  for (const auto& b : blocks) {
    if (b.rows.size() < b.cols.size()) throw InvalidArgument("isometry block has more columns than rows");
    for (auto r : b.rows)
      if (r >= data.rows()) throw InvalidArgument("isometry block row out of range");
    for (auto c : b.cols)
      if (c >= data.cols()) throw InvalidArgument("isometry block column out of range");
  }
  const double drift = block_residual(x0, blocks);
  if (drift > 1e-8) throw InvalidArgument("minimize: starting point is not an isometry (residual " +
                                          std::to_string(drift) + ")");

  Matrix x = drift > 1e-12 ? retract(x0, Matrix::Zero(x0.rows(), x0.cols()), 0.0, blocks) : x0;

  OptReport rep;
  double f = 0.0;
  Matrix g = project_tangent(x, unchecked_gradient(x, data, &f), blocks);
  rep.initial_cost = f;
  rep.cost_trace.push_back(f);
  double gg = inner(g, g);
  Matrix d = -g;

  const std::size_t n = static_cast<std::size_t>(x.rows()), p = static_cast<std::size_t>(x.cols());
  const std::size_t manifold_dim = n * p > p * (p + 1) / 2 ? n * p - p * (p + 1) / 2 : 1;
  const std::size_t restart_every = std::max<std::size_t>(1, std::min<std::size_t>(50, manifold_dim));
  constexpr double kArmijo = 1e-4;
  double step = gg > 0.0 ? 1.0 / std::sqrt(gg) : 1.0;
  std::size_t since_restart = 0;
  int small_steps = 0;

  while (rep.iterations < options.max_iters) {
    if (std::sqrt(gg) < options.tol) {
      rep.converged = true;
      break;
    }
    double slope = inner(g, d);
    if (slope >= 0.0) {
      d = -g;
      slope = -gg;
      since_restart = 0;
    }
    double t = step;
    bool accepted = false;
    Matrix xn;
    double fn = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      xn = retract(x, d, t, blocks);
      fn = unchecked_cost(xn, data);
      if (std::isfinite(fn) && fn <= f + kArmijo * t * slope && fn <= f) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No representable descent left along d; the iterate is stationary to
      // working precision unless d was a poor CG direction.
      if (since_restart > 0) {
        d = -g;
        since_restart = 0;
        continue;
      }
      rep.converged = std::abs(slope) * step <= 1e-12 * std::max(1.0, std::abs(f));
      break;
    }
    ++rep.iterations;
    ++since_restart;
    const double rel = (f - fn) / std::max(1.0, std::abs(f));
    x = std::move(xn);
    const double f_old = f;
    Matrix gn = project_tangent(x, unchecked_gradient(x, data, &f), blocks);
    f = std::min(f, f_old);  // fn and the recomputed value agree to rounding
    rep.cost_trace.push_back(f);
    if (rel < options.tol) {
      g = std::move(gn);
      gg = inner(g, g);
      // A single short step can stall the decrease far from a minimum;
      // retry once along the fresh gradient before declaring convergence.
      if (++small_steps >= 2 || gg == 0.0) {
        rep.converged = true;
        break;
      }
      d = -g;
      since_restart = 0;
      step = 1.0 / std::sqrt(gg);
      continue;
    }
    small_steps = 0;
    const Matrix g_old = project_tangent(x, g, blocks);
    const Matrix d_old = project_tangent(x, d, blocks);
    double beta = std::max(0.0, inner(gn, gn - g_old) / gg);
    if (since_restart >= restart_every) {
      beta = 0.0;
      since_restart = 0;
    }
    d = -gn + beta * d_old;
    g = std::move(gn);
    gg = inner(g, g);
    step = 2.0 * t;
  }
  rep.final_cost = unchecked_cost(x, data);
  rep.gradient_norm = std::sqrt(gg);
  return {std::move(x), std::move(rep)};
}

}  // namespace vnrg
