#include "vnrg/nrg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "parallel.hpp"
#include "vnrg/error.hpp"

namespace vnrg {

namespace {

constexpr double kDegeneracyTol = 1e-10;

Tensor done_slice(const Tensor& o) {
  const std::size_t w = o.extent(0), d = o.extent(1);
  Tensor out({w, d, d});
  for (std::size_t p = 0; p < w; ++p)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) out(p, a, b) = o(p, a, b, 0);
  return out;
}

NrgStepResult dense_step(const EnvBlock& left, const Tensor& o, std::size_t cap, bool build_env) {
  if (cap == 0) throw InvalidArgument("NRG truncation dimension must be >= 1");
  const Matrix h = extended_hamiltonian(left, o);
  const EighResult eig = eigh(h);
  std::vector<double> values(eig.values.data(), eig.values.data() + eig.values.size());

  NrgStepResult res;
  const std::size_t keep = truncation_count(values, cap, &res.split_multiplet);
  const Matrix kept = eig.vectors.leftCols(keep);
  res.site = Tensor::from_matrix(kept).reshaped({left.ket_dim(), o.extent(1), keep});
  values.resize(keep);
  res.spectrum = make_spectrum(values);
  if (build_env) res.env = left_extend(left, res.site, o);
  return res;
}

}  // namespace

Matrix extended_hamiltonian(const EnvBlock& left, const Tensor& o) {
  if (o.rank() != 4 || left.tensor.rank() != 3) throw InvalidArgument("extended_hamiltonian: bad ranks");
  if (left.mpo_dim() != o.extent(0)) throw InvalidArgument("extended_hamiltonian: MPO bond extent mismatch");
  const std::size_t dim = left.ket_dim() * o.extent(1);
  const Tensor t = contract(left.tensor, {1}, done_slice(o), {0}).permuted({1, 2, 0, 3});  // (l', s', l, s)
  return t.view(dim, dim);
}

std::size_t truncation_count(const std::vector<double>& v, std::size_t cap, bool* split) {
  if (split) *split = false;
  if (v.size() <= cap) return v.size();
  if (cap == 0) return 0;
  auto same = [&](double a, double b) { return std::abs(a - b) <= kDegeneracyTol * std::max(1.0, std::abs(a)); };
  if (!same(v[cap - 1], v[cap])) return cap;
  std::size_t end = cap;
  while (end < v.size() && same(v[cap - 1], v[end])) ++end;
  const auto limit = static_cast<std::size_t>(std::floor(1.05 * static_cast<double>(cap)));
  if (end <= limit) return end;
  if (split) *split = true;
  return cap;
}

NrgStepResult nrg_step(const EnvBlock& left, const Tensor& mpo_site, std::size_t D) {
  return dense_step(left, mpo_site, D, true);
}

NrgStepResult nrg_step_sectors(const EnvBlock& left, const Tensor& o, const std::vector<Charge>& left_charges,
                               const std::vector<Charge>& site_charges, std::size_t D,
                               std::optional<std::size_t> max_states, bool build_env) {
  if (D == 0) throw InvalidArgument("NRG truncation dimension must be >= 1");
  const std::size_t dl = left.ket_dim(), d = o.extent(1);
  if (left_charges.size() != dl || site_charges.size() != d) throw InvalidArgument("charge table size mismatch");
  const Matrix h = extended_hamiltonian(left, o);

  std::map<Charge, std::vector<std::size_t>> sectors;
  for (std::size_t l = 0; l < dl; ++l)
    for (std::size_t s = 0; s < d; ++s) sectors[left_charges[l] + site_charges[s]].push_back(l * d + s);

  struct Block {
    Charge charge;
    std::vector<std::size_t> rows;
    std::vector<double> values;
    Matrix vectors;
    bool split = false;
  };
  std::vector<Block> blocks;
  for (auto& [c, rows] : sectors) blocks.push_back({c, std::move(rows), {}, {}, false});

  detail::parallel_for(blocks.size(), [&](std::size_t b) {
    auto& blk = blocks[b];
    const auto n = static_cast<Eigen::Index>(blk.rows.size());
    Matrix sub(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < n; ++k) sub(i, k) = h(blk.rows[i], blk.rows[k]);
    const EighResult eig = eigh(sub);
    std::vector<double> vals(eig.values.data(), eig.values.data() + n);
    const std::size_t keep = truncation_count(vals, D, &blk.split);
    vals.resize(keep);
    blk.values = std::move(vals);
    blk.vectors = eig.vectors.leftCols(keep);
  });

  std::vector<std::tuple<double, std::size_t, std::size_t>> all;
  bool split = false;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    split = split || blocks[b].split;
    for (std::size_t k = 0; k < blocks[b].values.size(); ++k) all.emplace_back(blocks[b].values[k], b, k);
  }
  std::sort(all.begin(), all.end());
  std::vector<double> energies;
  for (const auto& e : all) energies.push_back(std::get<0>(e));
  bool global_split = false;
  const std::size_t keep = truncation_count(energies, max_states.value_or(energies.size()), &global_split);

  NrgStepResult res;
  res.split_multiplet = split || global_split;
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(dl * d), static_cast<Eigen::Index>(keep));
  for (std::size_t c = 0; c < keep; ++c) {
    const auto& [e, b, k] = all[c];
    const auto& blk = blocks[b];
    for (std::size_t i = 0; i < blk.rows.size(); ++i) a(blk.rows[i], c) = blk.vectors(i, k);
    res.charges.push_back(blk.charge);
  }
  energies.resize(keep);
  res.site = Tensor::from_matrix(a).reshaped({dl, d, keep});
  res.spectrum = make_spectrum(energies, res.charges);
  if (build_env) res.env = left_extend(left, res.site, o);
  return res;
}

NrgResult run_nrg(const Mpo& mpo, const NrgOptions& options) {
  mpo.validate();
  if (options.D == 0) throw InvalidArgument("NRG truncation dimension must be >= 1");
  if (options.max_states && *options.max_states == 0) throw InvalidArgument("M must be >= 1");
  if (options.use_sectors && !conserves_charges(mpo))
    throw InvalidArgument("sector mode needs an MPO that conserves (N_up, N_down)");

  NrgResult out;
  const std::size_t n = mpo.length();
  EnvBlock left = trivial_env();
  std::vector<Charge> charges{{0, 0}};
  if (options.use_sectors) out.state.bond_charges.push_back(charges);
  const std::size_t dense_cap = std::min(options.D, options.max_states.value_or(options.D));

  for (std::size_t j = 0; j < n; ++j) {
    const bool last = j + 1 == n;
    NrgStepResult step = options.use_sectors
                             ? nrg_step_sectors(left, mpo.sites[j], charges, mpo.physical_charges[j], options.D,
                                                options.max_states, !last)
                             : dense_step(left, mpo.sites[j], dense_cap, !last);
    if (step.split_multiplet)
      out.warnings.push_back("site " + std::to_string(j) + ": truncation split a degenerate multiplet");
    out.state.sites.push_back(std::move(step.site));
    if (options.use_sectors) {
      charges = std::move(step.charges);
      out.state.bond_charges.push_back(charges);
    }
    if (last)
      out.spectrum = std::move(step.spectrum);
    else
      left = std::move(step.env);
  }
  out.state.external = {ExternalLeg::Kind::Site, n - 1};
  return out;
}

namespace {

void check_compatible(const NrgMps& state, const Mpo& mpo) {
  state.validate();
  mpo.validate();
  if (state.length() != mpo.length() || state.physical_dims() != mpo.physical_dims())
    throw InvalidArgument("shape mismatch between state and MPO");
}

}  // namespace

Matrix projected_hamiltonian(const NrgMps& state, const Mpo& mpo) {
  check_compatible(state, mpo);
  const std::size_t n = state.length();
  const std::size_t M = state.num_states();
  if (state.external.kind == ExternalLeg::Kind::Site) {
    EnvBlock left = trivial_env();
    for (std::size_t j = 0; j < n; ++j) left = left_extend(left, state.sites[j], mpo.sites[j]);
    return left.tensor.view(M, M).transpose();
  }
  const std::size_t b = state.external.position;
  EnvBlock left = trivial_env();
  for (std::size_t j = 0; j <= b; ++j) left = left_extend(left, state.sites[j], mpo.sites[j]);
  EnvBlock right = trivial_env();
  for (std::size_t j = n; j-- > b + 1;) right = right_extend(right, state.sites[j], mpo.sites[j]);
  const Tensor& c = state.bond_tensor;
  Tensor t = contract(left.tensor, {0}, c, {0});  // (p, l', r, a)
  t = contract(t, {0, 2}, right.tensor, {1, 0});  // (l', a, r')
  t = contract(t, {0, 2}, c, {0, 1});             // (a, a')
  return t.view(M, M).transpose();
}

Spectrum energies_of(const NrgMps& state, const Mpo& mpo) {
  const Matrix h = projected_hamiltonian(state, mpo);
  const Vector d = h.diagonal();
  std::vector<double> diag(d.data(), d.data() + d.size());
  return make_spectrum(diag, state.state_charges());
}

}  // namespace vnrg
