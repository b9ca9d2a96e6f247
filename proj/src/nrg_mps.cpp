#include "vnrg/nrg_mps.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "vnrg/error.hpp"

namespace vnrg {

std::size_t NrgMps::num_states() const {
  if (sites.empty()) return 0;
  return external.kind == ExternalLeg::Kind::Site ? sites.back().extent(2) : bond_tensor.extent(2);
}

std::vector<std::size_t> NrgMps::physical_dims() const {
  std::vector<std::size_t> d;
  for (const auto& s : sites) d.push_back(s.extent(1));
  return d;
}

std::vector<Charge> NrgMps::state_charges() const {
  if (!has_charges() || external.kind != ExternalLeg::Kind::Site) return {};
  return bond_charges.back();
}

void NrgMps::validate() const {
  const std::size_t n = sites.size();
  if (n == 0) throw InvalidArgument("state has no sites");
  for (std::size_t j = 0; j < n; ++j)
    if (sites[j].rank() != 3) throw InvalidArgument("site tensor " + std::to_string(j) + " is not rank 3");
  if (sites.front().extent(0) != 1) throw InvalidArgument("left boundary bond must have extent 1");
  if (external.kind == ExternalLeg::Kind::Site) {
    if (external.position != n - 1) throw InvalidArgument("a site external leg must sit on the last site");
    for (std::size_t j = 0; j + 1 < n; ++j)
      if (sites[j].extent(2) != sites[j + 1].extent(0))
        throw InvalidArgument("bond mismatch between sites " + std::to_string(j) + " and " + std::to_string(j + 1));
  } else {
    const std::size_t b = external.position;
    if (b + 1 >= n) throw InvalidArgument("bond external leg out of range");
    if (bond_tensor.rank() != 3) throw InvalidArgument("bond tensor must be rank 3");
    if (sites.back().extent(2) != 1) throw InvalidArgument("right boundary bond must have extent 1");
    for (std::size_t j = 0; j + 1 < n; ++j) {
      if (j == b) {
        if (sites[j].extent(2) != bond_tensor.extent(0) || bond_tensor.extent(1) != sites[j + 1].extent(0))
          throw InvalidArgument("bond tensor does not match neighbouring sites");
      } else if (sites[j].extent(2) != sites[j + 1].extent(0)) {
        throw InvalidArgument("bond mismatch between sites " + std::to_string(j) + " and " + std::to_string(j + 1));
      }
    }
  }
  if (has_charges()) {
    if (bond_charges.size() != n + 1) throw InvalidArgument("bond charge table must have n+1 entries");
    for (std::size_t b = 0; b < n; ++b)
      if (bond_charges[b].size() != sites[b].extent(0)) throw InvalidArgument("bond charge table size mismatch");
    if (bond_charges[n].size() != sites.back().extent(2)) throw InvalidArgument("bond charge table size mismatch");
  }
}

double max_isometry_residual(const NrgMps& state) {
  double res = 0.0;
  const bool bond = state.external.kind == ExternalLeg::Kind::Bond;
  for (std::size_t j = 0; j < state.length(); ++j) {
    const auto& a = state.sites[j];
    const bool right_iso = bond && j > state.external.position;
    if (right_iso)
      res = std::max(res, isometry_residual(a.matrix(1).transpose()));
    else
      res = std::max(res, isometry_residual(a.matrix(2)));
  }
  if (bond) res = std::max(res, isometry_residual(state.bond_tensor.matrix(2)));
  return res;
}

NrgMps random_nrg_mps(const std::vector<std::size_t>& physical_dims, std::size_t D, std::size_t M,
                      std::uint64_t seed) {
  if (physical_dims.empty() || D == 0 || M == 0) throw InvalidArgument("random state needs sites, D >= 1, M >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  NrgMps state;
  std::size_t left = 1;
  const std::size_t n = physical_dims.size();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t d = physical_dims[j];
    const std::size_t rows = left * d;
    std::size_t right = j + 1 == n ? M : std::min(D, rows);
    if (right > rows) throw InvalidArgument("M exceeds the dimension reachable at the last site");
    Matrix m(rows, right);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    state.sites.push_back(Tensor::from_matrix(qr_isometrize(m)).reshaped({left, d, right}));
    left = right;
  }
  state.external = {ExternalLeg::Kind::Site, n - 1};
  return state;
}

double Spectrum::sum() const { return std::accumulate(energies.begin(), energies.end(), 0.0); }

Spectrum make_spectrum(const std::vector<double>& energies, const std::vector<Charge>& charges) {
  std::vector<std::size_t> order(energies.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return energies[a] < energies[b]; });
  Spectrum s;
  for (auto k : order) {
    s.energies.push_back(energies[k]);
    s.weights.push_back(1.0);
    s.state_index.push_back(k);
    if (!charges.empty()) s.sectors.push_back(charges.at(k));
  }
  return s;
}

}  // namespace vnrg
