#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace vnrg {

/// out = H * in for a block of column vectors. H must be symmetric.
using LinearOperator = std::function<void(const Eigen::MatrixXd& in, Eigen::MatrixXd& out)>;

struct LanczosOptions {
  /// Number of lowest eigenpairs wanted.
  std::size_t num = 1;
  /// Residual tolerance relative to max(1, |theta|).
  double tol = 1e-10;
  /// Maximum number of restart cycles.
  std::size_t max_iters = 200;
  /// Krylov block width; 0 means `num`.
  std::size_t block_size = 0;
  /// Largest basis before a thick restart; 0 picks a default.
  std::size_t max_basis = 0;
  /// Problems up to this dimension are solved by explicit diagonalization.
  std::size_t dense_threshold = 256;
  std::uint64_t seed = 0x5eed;
};

struct LanczosResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // dim x num, orthonormal columns
  bool converged = false;
  std::size_t iterations = 0;
  /// Number of single-vector operator applications.
  std::size_t applications = 0;
  double max_residual = 0.0;
};

/// Lowest eigenpairs by block Lanczos with full reorthogonalization and
/// thick restarts. `guess` (dim x k, any k) seeds the starting block.
LanczosResult lowest_eigenpairs(const LinearOperator& op, std::size_t dim, const LanczosOptions& options,
                                const Eigen::MatrixXd* guess = nullptr);

}  // namespace vnrg
