#pragma once

#include <cstddef>
#include <vector>

#include "vnrg/mpo.hpp"

namespace vnrg {

/// H = sum_j sx_j sx_{j+1} + sum_j (hx sx_j + hz sz_j) on an open chain.
struct IsingParams {
  std::size_t n = 2;
  double hx = 0.0;
  double hz = 0.0;
};

enum class HoppingProfile { Wilson, Uniform };

/// Anderson impurity coupled to the first site of a tight-binding chain of
/// N+1 bath sites (N+2 sites in total, impurity first).
struct SiamParams {
  int N = 0;
  double lambda = 2.0;
  double xi0 = 0.0;
  double eps_f = 0.0;
  double U = 0.0;
  HoppingProfile profile = HoppingProfile::Wilson;
  /// Optional prefactors c_j (length N) in t_j = c_j * lambda^(-j/2).
  /// Empty means c_j = 1.
  std::vector<double> prefactors;

  std::size_t sites() const { return static_cast<std::size_t>(N) + 2; }
  /// sqrt(xi0 / pi)
  double hybridization() const;
};

Mpo build_tilted_ising_mpo(const IsingParams& p);

/// t_j, j = 0..N-1. The uniform profile ignores lambda.
std::vector<double> wilson_hoppings(const SiamParams& p);

/// Spinful chain with local basis |0>, |up>, |dn>, |up dn> and Jordan-Wigner
/// ordering impurity first, up before down within a site.
Mpo build_siam_mpo(const SiamParams& p);

struct OnsiteTerm {
  std::size_t site;
  Matrix op;
};

/// left acts on `site`, right on `site + 1`.
struct BondTerm {
  std::size_t site;
  Matrix left;
  Matrix right;
};

Mpo build_generic_nn_mpo(const std::vector<OnsiteTerm>& onsite, const std::vector<BondTerm>& bonds,
                         std::size_t n, std::size_t d);

Mpo identity_mpo(std::size_t n, std::size_t d);

namespace spin {
Matrix sigma_x();
Matrix sigma_z();
}  // namespace spin

/// Local operators on one spinful fermionic site (basis |0>,|up>,|dn>,|up dn>).
namespace fermion {
constexpr int kUp = 0;
constexpr int kDown = 1;
/// Local annihilator including the intra-site sign for the down mode.
Matrix annihilator(int spin);
Matrix creator(int spin);
Matrix number(int spin);
Matrix parity();
std::vector<Charge> site_charges();
}  // namespace fermion

}  // namespace vnrg
