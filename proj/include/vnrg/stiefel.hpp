#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "vnrg/tensor.hpp"

namespace vnrg {

/// f(X) = sum_q tr(G_q^T X R_q X^T), X of shape rows x cols.
struct CostData {
  std::vector<Matrix> g;  // rows x rows
  std::vector<Matrix> r;  // cols x cols
  /// Set when sum_q G_q (x) R_q is known to be a symmetric operator on X; the
  /// gradient is then 2 sum_q G_q X R_q^T.
  bool symmetric = false;

  std::size_t rows() const { return g.empty() ? 0 : static_cast<std::size_t>(g.front().rows()); }
  std::size_t cols() const { return r.empty() ? 0 : static_cast<std::size_t>(r.front().rows()); }
  void validate() const;
};

/// Evaluates the cost formula for any X of matching shape.
double cost(const Matrix& x, const CostData& data);

/// sum_q (G_q X R_q^T + G_q^T X R_q)
Matrix euclidean_gradient(const Matrix& x, const CostData& data);

/// One diagonal block of a block-structured isometry: X is zero outside its
/// blocks and every block is itself an isometry.
struct IsometryBlock {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
};

struct StiefelOptions {
  /// Stop when the relative cost decrease stays below tol for two consecutive
  /// iterations or the norm of the projected gradient drops below tol.
  double tol = 1e-9;
  std::size_t max_iters = 500;
  /// Empty means a single dense isometry.
  std::vector<IsometryBlock> blocks;
};

struct OptReport {
  std::size_t iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
  /// Cost after every accepted iterate, starting with the initial cost.
  std::vector<double> cost_trace;
};

/// Riemannian conjugate gradient (Polak-Ribiere+) on the set of isometries
/// with QR retraction and Armijo backtracking. Accepted iterates never
/// increase the cost.
std::pair<Matrix, OptReport> minimize(const Matrix& x0, const CostData& data, const StiefelOptions& options = {});

/// Tangent-space projection of a Euclidean gradient at x (per block).
Matrix project_tangent(const Matrix& x, const Matrix& egrad, std::span<const IsometryBlock> blocks = {});

}  // namespace vnrg
