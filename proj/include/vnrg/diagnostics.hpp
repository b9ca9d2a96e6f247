#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vnrg/mpo.hpp"
#include "vnrg/nrg_mps.hpp"

namespace vnrg {

/// <psi_alpha|H|psi_alpha> for every external index alpha.
std::vector<double> expectation_values(const NrgMps& state, const Mpo& mpo);

/// <H^2> - <H>^2 for every external index, from a two-layer MPO contraction.
std::vector<double> variances(const NrgMps& state, const Mpo& mpo);
double variance(const NrgMps& state, std::size_t alpha, const Mpo& mpo);

/// 1 - sqrt(2) G / gap. Throws for gap <= 0 or G < 0.
double fidelity_bound(double G, double gap);

/// epsilon^2 * gap.
double energy_error_bound(double epsilon_sq, double gap);

/// |<psi_alpha(a)|psi_beta(b)>|
double state_fidelity(const NrgMps& a, std::size_t alpha, const NrgMps& b, std::size_t beta);

/// Single-site operator with an optional string operator on all sites to its
/// left (Jordan-Wigner parity for fermionic operators).
struct OperatorSpec {
  std::size_t site = 0;
  Matrix local;
  std::optional<Matrix> string_op;
};

struct MatrixElement {
  std::size_t state = 0;
  double value = 0.0;  // absolute value
  std::optional<Charge> sector;
};

/// All <psi_j|op|psi_ground> over the external index (signed).
std::vector<double> operator_column(const NrgMps& state, const OperatorSpec& op, std::size_t ground);

/// The `count` largest |<psi_j|op|psi_ground>|, sorted descending.
std::vector<MatrixElement> impurity_matrix_elements(const NrgMps& state, const OperatorSpec& op, std::size_t ground,
                                                    std::size_t count);

struct AccuracyRecord {
  std::size_t state = 0;
  double energy = 0.0;
  double variance = 0.0;
  double gap = 0.0;
  /// True when the gap comes from the computed spectrum rather than exact levels.
  bool gap_estimated = true;
  double fidelity_bound = 0.0;
  std::optional<double> exact_energy;
  std::optional<double> energy_error;
};

/// Per-state accuracy records, sorted by energy. With `exact` (ascending exact
/// levels, at least as many as states) the k-th lowest state is compared with
/// the k-th exact level and exact gaps are used.
std::vector<AccuracyRecord> accuracy_records(const NrgMps& state, const Mpo& mpo,
                                             const std::vector<double>* exact = nullptr);

}  // namespace vnrg
