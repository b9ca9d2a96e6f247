#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vnrg/mpo.hpp"
#include "vnrg/tensor.hpp"

namespace vnrg {

/// Where the state-enumerating index lives.
///
/// Site: on the right bond of the last site. Every site tensor is a left
/// isometry and the last one maps (l, s) onto the M states.
///
/// Bond: on a separate tensor C(l, r, alpha) between sites `position` and
/// `position + 1`. Sites up to `position` are left isometries, the remaining
/// sites are right isometries and C is an isometry from alpha into (l, r).
struct ExternalLeg {
  enum class Kind : std::uint32_t { Site = 0, Bond = 1 };
  Kind kind = Kind::Site;
  std::size_t position = 0;

  friend bool operator==(const ExternalLeg&, const ExternalLeg&) = default;
};

/// A set of M orthonormal matrix product states sharing all tensors except
/// for the external index.
struct NrgMps {
  /// Site tensors indexed (l, s, r).
  std::vector<Tensor> sites;
  ExternalLeg external;
  /// (l, r, alpha); only meaningful for a bond external leg.
  Tensor bond_tensor;
  /// Optional charges for bonds 0..n (bond j sits left of site j). For a site
  /// external leg the last entry labels the states.
  std::vector<std::vector<Charge>> bond_charges;

  std::size_t length() const { return sites.size(); }
  std::size_t num_states() const;
  std::size_t physical_dim(std::size_t j) const { return sites.at(j).extent(1); }
  std::vector<std::size_t> physical_dims() const;
  bool has_charges() const { return !bond_charges.empty(); }
  /// State labels when available (site external leg with charges).
  std::vector<Charge> state_charges() const;

  /// Throws InvalidArgument for inconsistent shapes.
  void validate() const;
};

/// Largest deviation from the isometry condition over all tensors.
double max_isometry_residual(const NrgMps& state);

/// Random state with left-isometric tensors: bond dims capped at D, M states.
NrgMps random_nrg_mps(const std::vector<std::size_t>& physical_dims, std::size_t D, std::size_t M,
                      std::uint64_t seed);

/// Effective energies with per-state weights, sorted ascending.
/// state_index[k] is the external index of the k-th entry.
struct Spectrum {
  std::vector<double> energies;
  std::vector<double> weights;
  std::vector<Charge> sectors;
  std::vector<std::size_t> state_index;

  std::size_t size() const { return energies.size(); }
  double sum() const;
};

/// Builds a sorted spectrum from per-state energies (ties keep index order).
Spectrum make_spectrum(const std::vector<double>& energies, const std::vector<Charge>& charges = {});

}  // namespace vnrg
