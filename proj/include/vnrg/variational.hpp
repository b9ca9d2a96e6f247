#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vnrg/environments.hpp"
#include "vnrg/lanczos.hpp"
#include "vnrg/mpo.hpp"
#include "vnrg/nrg_mps.hpp"
#include "vnrg/stiefel.hpp"

namespace vnrg {

struct SweepConfig {
  std::size_t max_sweeps = 10;
  /// Relative cost change that ends one site optimization.
  double site_tol = 1e-9;
  std::size_t site_max_iters = 500;
  /// Relative change of the uniform cost over one sweep that ends the run.
  double sweep_tol = 1e-10;
  WeightSpec weight;
  /// Bond cap used when the external leg is moved inward (bond variant).
  std::size_t D = 16;
  /// Expected number of states; 0 accepts whatever the input carries.
  std::size_t M = 0;
  bool optimize_bond_tensor = false;
  bool use_sectors = false;
  /// Eigensolver settings for the bond-tensor variant.
  double eig_tol = 1e-10;
  std::size_t eig_max_iters = 200;

  void validate() const;
};

/// One optimization step of the audit trail.
struct SiteVisit {
  std::size_t sweep = 0;
  /// Site index, or the bond index for bond-tensor solves.
  std::size_t site = 0;
  bool bond = false;
  double cost_before = 0.0;
  double cost_after = 0.0;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
};

struct SweepReport {
  std::vector<SiteVisit> visits;
  /// Uniform-weight cost of the input and after every completed sweep.
  std::vector<double> sweep_costs;
  std::size_t sweeps = 0;
  bool converged = false;
  /// Environment extensions and optimizer iterations spent.
  std::size_t env_extends = 0;
  std::size_t optimizer_iterations = 0;
  /// Index into `visits` where each fixed-weight phase starts.
  std::vector<std::size_t> phase_starts;
};

struct SweepResult {
  NrgMps state;
  Spectrum spectrum;
  SweepReport report;
};

/// G_q[(l,s),(l',s')] = sum_p L(l,p,l') O(p,s',s,q) and R_q[r,r'] = R(r,q,r').
CostData assemble_cost(const EnvBlock& left, const EnvBlock& right, const Tensor& mpo_site);

/// Cost for a right-isometric site viewed as X[(s,r),l] = B(l,s,r):
/// G_p[(s,r),(s',r')] = sum_q O(p,s',s,q) R(r,q,r') and R_p[l,l'] = L(l,p,l').
CostData assemble_cost_mirrored(const EnvBlock& left, const EnvBlock& right, const Tensor& mpo_site);

/// Block structure of site j's (l,s) x r matrix implied by the bond charges.
std::vector<IsometryBlock> sector_blocks(const NrgMps& state, const Mpo& mpo, std::size_t j);

/// Replaces the left-isometric site j by the minimizer of the summed cost with
/// the cache's current environments, then invalidates the cache at j. The
/// cache must read state.sites.
OptReport optimize_site(NrgMps& state, std::size_t j, const Mpo& mpo, EnvironmentCache& cache,
                        const SweepConfig& cfg);

/// Sweeps over an NRG-MPS whose external leg is on the last site (or, with
/// optimize_bond_tensor, moves it to the centre bond and back). The returned
/// state carries its external index in the energy eigenbasis, sorted.
SweepResult sweep(NrgMps state, const Mpo& mpo, const SweepConfig& cfg);

/// Sum of w_alpha <psi_alpha|H|psi_alpha> for the state's current basis.
double weighted_cost(const NrgMps& state, const Mpo& mpo, const std::vector<double>& weights);

/// Sets the bond tensor of a bond-external state to the lowest M eigenvectors
/// of H restricted to the bond space; left and right are the blocks at the
/// two sides of the bond. Returns the eigenvalues (ascending).
Eigen::VectorXd optimize_bond_tensor(NrgMps& state, const EnvBlock& left, const EnvBlock& right, std::size_t M,
                                     const LanczosOptions& options = {});

/// Rotates the external index into the eigenbasis of the projected
/// Hamiltonian (sector by sector when labelled) and returns the spectrum.
Spectrum rediagonalize(NrgMps& state, const Mpo& mpo);

enum class Direction { Left, Right };

/// Shifts the external index by one position along Bond(0) < ... <
/// Bond(n-2) < Site(n-1) using SVDs. Numerically zero singular values are
/// dropped; max_bond additionally caps the new bond.
NrgMps move_external_index(const NrgMps& state, Direction direction,
                           std::optional<std::size_t> max_bond = std::nullopt);

}  // namespace vnrg
