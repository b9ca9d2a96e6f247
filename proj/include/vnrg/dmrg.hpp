#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vnrg/environments.hpp"
#include "vnrg/lanczos.hpp"
#include "vnrg/mpo.hpp"
#include "vnrg/nrg_mps.hpp"

namespace vnrg {

struct TargetConfig {
  std::size_t M = 8;
  std::size_t D = 32;
  std::size_t sweeps = 4;
  /// Stop early once the summed window energies of two consecutive sweeps
  /// differ by less than this (relative).
  double sweep_tol = 1e-12;
  double eig_tol = 1e-10;
  std::size_t eig_max_iters = 300;
  bool track_truncation = true;
  std::uint64_t seed = 1;

  /// Needs the largest physical dimension to check M <= D d.
  void validate(std::size_t max_physical_dim) const;
};

struct TwoSiteBlock {
  /// (l, s_j, s_j+1, r) x M, orthonormal columns.
  Matrix g;
  Eigen::VectorXd energies;
  std::size_t iterations = 0;
  std::size_t applications = 0;
};

/// Matrix-free application of the two-site projected Hamiltonian to the
/// columns of `in` (each of length l * d_j * d_j+1 * r).
void apply_two_site(const EnvBlock& left, const EnvBlock& right, const Tensor& o_j, const Tensor& o_j1,
                    const Eigen::MatrixXd& in, Eigen::MatrixXd& out);

/// Lowest M eigenvectors of the two-site window. Throws NumericalError when
/// the eigensolver does not converge.
TwoSiteBlock two_site_ground_block(const EnvBlock& left, const EnvBlock& right, const Tensor& o_j, const Tensor& o_j1,
                                   std::size_t M, const LanczosOptions& options = {},
                                   const Eigen::MatrixXd* guess = nullptr);

enum class AbsorbSide { Left, Right };

struct SplitResult {
  /// Right: left isometry A(l, s_j, k). Left: right isometry B(k, s_j+1, r).
  Tensor site;
  /// Right: (k, s_j+1, r, alpha). Left: (l, s_j, alpha, k).
  Tensor carried;
  double discarded_weight = 0.0;
  std::size_t kept = 0;
};

/// SVD of the window G (l, s_j, s_j+1, r, alpha). With Right the singular
/// values go to the right factor and A^[j] is split off; with Left they go to
/// the left factor and B^[j+1] is split off. At most D values are kept.
SplitResult split_and_shift(const Tensor& g, AbsorbSide side, std::size_t D);

struct DmrgTraceEntry {
  std::size_t sweep = 0;
  std::size_t window = 0;
  double energy_sum = 0.0;
  double discarded_weight = 0.0;
  std::size_t eig_iterations = 0;
};

struct DmrgResult {
  NrgMps state;
  Spectrum spectrum;
  std::vector<DmrgTraceEntry> trace;
  std::size_t sweeps = 0;
  std::size_t two_site_solves = 0;
  std::size_t operator_applications = 0;
  std::size_t env_extends = 0;
  double max_discarded_weight = 0.0;
};

/// Two-site DMRG targeting the M lowest states. The input must carry its
/// external leg on the last site (an NRG result or a random state). The
/// output is an NRG-MPS with the external leg back on the last site, whose
/// last tensor holds the M lowest eigenvectors of that site's H_ext.
DmrgResult dmrg_sweep(const NrgMps& initial, const Mpo& mpo, const TargetConfig& cfg);

}  // namespace vnrg
