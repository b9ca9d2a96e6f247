#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vnrg/environments.hpp"
#include "vnrg/mpo.hpp"
#include "vnrg/nrg_mps.hpp"

namespace vnrg {

struct NrgStepResult {
  /// Isometry (l, s, r) whose columns are the kept eigenvectors of H_ext.
  Tensor site;
  Spectrum spectrum;
  /// Left block including the new site; empty tensor when not requested.
  EnvBlock env;
  /// Charges of the new bond (sector mode only).
  std::vector<Charge> charges;
  /// Set when a degenerate multiplet had to be split at the cut.
  bool split_multiplet = false;
};

/// Extended Hamiltonian of the chain ending at this site: the left block
/// combined with the site's MPO tensor at channel 0 of its right bond.
/// Rows are the bra (l', s'), columns the ket (l, s).
Matrix extended_hamiltonian(const EnvBlock& left, const Tensor& mpo_site);

/// One NRG step: diagonalize H_ext and keep the D lowest states.
NrgStepResult nrg_step(const EnvBlock& left, const Tensor& mpo_site, std::size_t D);

/// Sector-resolved step. Every (N_up, N_down) block is diagonalized
/// separately and capped at D states; then the lowest max_states are kept.
NrgStepResult nrg_step_sectors(const EnvBlock& left, const Tensor& mpo_site, const std::vector<Charge>& left_charges,
                               const std::vector<Charge>& site_charges, std::size_t D,
                               std::optional<std::size_t> max_states, bool build_env = true);

/// Number of states to keep from an ascending list under a cap: whole
/// degenerate multiplets are kept if they fit within floor(1.05 * cap),
/// otherwise the cut is exactly at cap and *split is set.
std::size_t truncation_count(const std::vector<double>& ascending, std::size_t cap, bool* split = nullptr);

struct NrgOptions {
  std::size_t D = 16;
  bool use_sectors = false;
  /// Global cap on kept states per step (M). Applied together with D in
  /// dense mode and after the per-sector caps in sector mode.
  std::optional<std::size_t> max_states;
};

struct NrgResult {
  NrgMps state;
  Spectrum spectrum;
  std::vector<std::string> warnings;
};

NrgResult run_nrg(const Mpo& mpo, const NrgOptions& options);

/// <psi_a|H|psi_b> over the external index (rows bra, columns ket).
Matrix projected_hamiltonian(const NrgMps& state, const Mpo& mpo);

/// Diagonal of the projected Hamiltonian as a sorted spectrum.
Spectrum energies_of(const NrgMps& state, const Mpo& mpo);

}  // namespace vnrg
