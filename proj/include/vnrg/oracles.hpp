#pragma once

#include <cstddef>
#include <vector>

#include "vnrg/models.hpp"
#include "vnrg/mpo.hpp"
#include "vnrg/nrg_mps.hpp"

namespace vnrg::oracle {

/// Largest Hilbert-space dimension the dense oracles accept (2^13).
inline constexpr std::size_t kDenseGuard = std::size_t{1} << 13;

/// Basis ordering for all dense objects: tensor product with site 0 slowest.
struct DenseSpectrum {
  Vector energies;  // ascending
  Matrix vectors;   // columns
};

/// Full matrix of an MPO (rows bra, columns ket).
Matrix dense_from_mpo(const Mpo& mpo);

/// Direct Kronecker construction of the tilted Ising Hamiltonian.
Matrix dense_tilted_ising(const IsingParams& p);

/// Fock-space Hamiltonian of the Anderson chain built from fermionic mode
/// operators with explicit Jordan-Wigner signs (modes ordered site-major, up
/// before down).
Matrix dense_siam(const SiamParams& p);

/// Fock-space annihilator of mode (site, spin) in the same basis.
Matrix dense_annihilator(std::size_t sites, std::size_t site, int spin);

/// (N_up, N_down) of every Fock basis state.
std::vector<Charge> fock_charges(std::size_t sites);

DenseSpectrum dense_spectrum(const Matrix& h);

struct SectorLevel {
  double energy;
  Charge sector;
};

/// Eigenvalues of h diagonalized block by block, sorted by energy.
std::vector<SectorLevel> dense_sector_spectrum(const Matrix& h, const std::vector<Charge>& basis_charges);

struct FreeFermionResult {
  /// Single-particle excitation energies (nonnegative, ascending).
  std::vector<double> modes;
  double ground_energy = 0.0;
};

/// Open chain H = sum sx_j sx_{j+1} + h sum sz_j via Majorana fermions.
FreeFermionResult free_fermion_transverse_ising(std::size_t n, double h);

/// The `count` smallest many-body energies ground + sum over excited modes.
std::vector<double> free_fermion_levels(const FreeFermionResult& r, std::size_t count);

/// Eigenvalues of the one-body (N+2) x (N+2) hopping matrix.
std::vector<double> siam_one_body_levels(const SiamParams& p);

/// The `count` lowest many-body energies of the U = 0 chain.
std::vector<double> noninteracting_siam_spectrum(const SiamParams& p, std::size_t count);

/// The `count` smallest sums over subsets of `levels` (each level may be
/// occupied or empty), ascending.
std::vector<double> smallest_subset_sums(const std::vector<double>& levels, std::size_t count);

/// Dense vectors (prod d) x M of the states of an NRG-MPS.
Matrix dense_states(const NrgMps& state);

}  // namespace vnrg::oracle
