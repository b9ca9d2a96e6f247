#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "vnrg/tensor.hpp"

namespace vnrg {

/// Particle numbers (N_up, N_down) labelling a basis state or a bond index.
using Charge = std::array<int, 2>;

inline Charge operator+(Charge a, Charge b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Charge operator-(Charge a, Charge b) { return {a[0] - b[0], a[1] - b[1]}; }

/// Matrix product operator. Site tensors are indexed (p, s', s, q): left
/// bond, outgoing physical, incoming physical, right bond, so that
/// O(p, s', s, q) is the matrix element <s'|O_pq|s>.
///
/// Channel convention on every bond: channel 0 collects completed terms and
/// the last channel carries the identity of a not-yet-started term. The
/// outermost bonds have extent 1. Selecting channel 0 on an interior bond
/// therefore yields the Hamiltonian of the chain truncated at that bond.
struct Mpo {
  std::vector<Tensor> sites;
  /// Optional (N_up, N_down) label of every physical basis state, per site.
  std::vector<std::vector<Charge>> physical_charges;

  std::size_t length() const { return sites.size(); }
  std::size_t physical_dim(std::size_t site) const { return sites.at(site).extent(1); }
  /// Extent of bond b, b = 0..length(); bond b sits left of site b.
  std::size_t bond_dim(std::size_t bond) const;
  std::vector<std::size_t> physical_dims() const;
  bool has_charges() const { return !physical_charges.empty(); }

  /// Throws InvalidArgument on inconsistent extents.
  void validate() const;
};

/// True when every nonzero MPO element is consistent with a single charge
/// per channel, i.e. the operator conserves (N_up, N_down).
bool conserves_charges(const Mpo& mpo);

}  // namespace vnrg
