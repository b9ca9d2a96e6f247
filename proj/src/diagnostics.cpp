#include "vnrg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vnrg/environments.hpp"
#include "vnrg/error.hpp"
#include "vnrg/variational.hpp"

namespace vnrg {

namespace {

/// Same states with the external leg moved (exactly) onto the last site.
NrgMps at_last_site(const NrgMps& state) {
  state.validate();
  NrgMps s = state;
  while (s.external.kind == ExternalLeg::Kind::Bond) s = move_external_index(s, Direction::Right);
  return s;
}

void check_pair(const NrgMps& state, const Mpo& mpo) {
  mpo.validate();
  if (state.length() != mpo.length() || state.physical_dims() != mpo.physical_dims())
    throw InvalidArgument("state and MPO shapes differ");
}

Tensor left_extend_double(const Tensor& l2, const Tensor& a, const Tensor& o) {
  Tensor t = contract(l2, {0}, a, {0});  // (p, q, l', s, r)
  t = contract(t, {0, 3}, o, {0, 2});    // (q, l', r, s1, p')
  t = contract(t, {0, 3}, o, {0, 2});    // (l', r, p', s2, q')
  return contract(t, {0, 3}, a, {0, 1});  // (r, p', q', r')
}

/// Two-sided transfer through all sites with `op(j)` between ket and bra at
/// site j; the ket is restricted to column `ket_col` of the last site when
/// given. Returns E(ket, bra) at the last bond.
template <typename OpAt>
Matrix transfer(const NrgMps& ket, const NrgMps& bra, OpAt&& op, std::optional<std::size_t> ket_col) {
  const std::size_t n = ket.length();
  Matrix e = Matrix::Ones(1, 1);
  for (std::size_t j = 0; j < n; ++j) {
    Tensor a = ket.sites[j];
    if (j + 1 == n && ket_col) {
      const std::size_t l = a.extent(0), d = a.extent(1);
      Tensor col({l, d, 1});
      for (std::size_t x = 0; x < l; ++x)
        for (std::size_t s = 0; s < d; ++s) col(x, s, 0) = a(x, s, *ket_col);
      a = std::move(col);
    }
    const Tensor& b = bra.sites[j];
    // t(s, r, l') = sum_l e(l, l') a(l, s, r)
    Tensor t = contract(Tensor::from_matrix(e), {0}, a, {0});  // (l', s, r)
    if (const Matrix* m = op(j)) {
      t = contract(Tensor::from_matrix(*m), {1}, t, {1});  // (s', l', r)
      t = t.permuted({1, 0, 2});                           // (l', s', r)
    }
    const Tensor next = contract(t, {0, 1}, b, {0, 1});  // (r, r')
    e = next.view(next.extent(0), next.extent(1));
  }
  return e;
}

}  // namespace

std::vector<double> expectation_values(const NrgMps& state, const Mpo& mpo) {
  const NrgMps s = at_last_site(state);
  check_pair(s, mpo);
  EnvBlock l = trivial_env();
  for (std::size_t j = 0; j < s.length(); ++j) l = left_extend(l, s.sites[j], mpo.sites[j]);
  std::vector<double> out(s.num_states());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = l.tensor(a, 0, a);
  return out;
}

std::vector<double> variances(const NrgMps& state, const Mpo& mpo) {
  const NrgMps s = at_last_site(state);
  check_pair(s, mpo);
  Tensor l1 = trivial_env().tensor;
  Tensor l2({1, 1, 1, 1}, {1.0});
  for (std::size_t j = 0; j < s.length(); ++j) {
    l1 = left_extend({l1}, s.sites[j], mpo.sites[j]).tensor;
    l2 = left_extend_double(l2, s.sites[j], mpo.sites[j]);
  }
  std::vector<double> out(s.num_states());
  for (std::size_t a = 0; a < out.size(); ++a) {
    const double h = l1(a, 0, a);
    out[a] = l2(a, 0, 0, a) - h * h;
  }
  return out;
}

double variance(const NrgMps& state, std::size_t alpha, const Mpo& mpo) {
  if (alpha >= state.num_states()) throw InvalidArgument("variance: state index out of range");
  return variances(state, mpo)[alpha];
}

double fidelity_bound(double G, double gap) {
  if (!(gap > 0.0)) throw InvalidArgument("fidelity bound needs a positive gap");
  if (G < 0.0) throw InvalidArgument("fidelity bound needs G >= 0");
  return 1.0 - std::sqrt(2.0) * G / gap;
}

double energy_error_bound(double epsilon_sq, double gap) {
  if (epsilon_sq < 0.0 || gap < 0.0) throw InvalidArgument("energy error bound needs nonnegative inputs");
  return epsilon_sq * gap;
}

double state_fidelity(const NrgMps& a, std::size_t alpha, const NrgMps& b, std::size_t beta) {
  const NrgMps sa = at_last_site(a), sb = at_last_site(b);
  if (sa.length() != sb.length()) throw InvalidArgument("state_fidelity: chain lengths differ");
  if (sa.physical_dims() != sb.physical_dims()) throw InvalidArgument("state_fidelity: physical dimensions differ");
  if (alpha >= sa.num_states() || beta >= sb.num_states()) throw InvalidArgument("state_fidelity: state index out of range");
  const Matrix e = transfer(sa, sb, [](std::size_t) -> const Matrix* { return nullptr; }, alpha);
  return std::abs(e(0, static_cast<Eigen::Index>(beta)));
}

std::vector<double> operator_column(const NrgMps& state, const OperatorSpec& op, std::size_t ground) {
  const NrgMps s = at_last_site(state);
  const std::size_t n = s.length();
  if (op.site >= n) throw InvalidArgument("operator site out of range");
  const auto d = static_cast<Eigen::Index>(s.physical_dim(op.site));
  if (op.local.rows() != d || op.local.cols() != d) throw InvalidArgument("operator matrix does not match the site");
  if (op.string_op)
    for (std::size_t j = 0; j < op.site; ++j) {
      const auto dj = static_cast<Eigen::Index>(s.physical_dim(j));
      if (op.string_op->rows() != dj || op.string_op->cols() != dj)
        throw InvalidArgument("string operator does not match site " + std::to_string(j));
    }
  if (ground >= s.num_states()) throw InvalidArgument("ground state index out of range");
  const Matrix e = transfer(
      s, s,
      [&](std::size_t j) -> const Matrix* {
        if (j == op.site) return &op.local;
        if (j < op.site && op.string_op) return &*op.string_op;
        return nullptr;
      },
      ground);
  return std::vector<double>(e.data(), e.data() + e.size());
}

std::vector<MatrixElement> impurity_matrix_elements(const NrgMps& state, const OperatorSpec& op, std::size_t ground,
                                                    std::size_t count) {
  const std::vector<double> col = operator_column(state, op, ground);
  const std::vector<Charge> charges = state.state_charges();
  std::vector<std::size_t> order(col.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return std::abs(col[x]) > std::abs(col[y]); });
  std::vector<MatrixElement> out;
  for (std::size_t k = 0; k < std::min(count, order.size()); ++k) {
    MatrixElement m{order[k], std::abs(col[order[k]]), std::nullopt};
    if (!charges.empty()) m.sector = charges[order[k]];
    out.push_back(m);
  }
  return out;
}

namespace {

double nearest_gap(const std::vector<double>& levels, std::size_t k) {
  const double e = levels[k];
  const double tol = 1e-9 * std::max(1.0, std::abs(e));
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double g = std::abs(levels[i] - e);
    if (g > tol) gap = std::min(gap, g);
  }
  return gap;
}

}  // namespace

std::vector<AccuracyRecord> accuracy_records(const NrgMps& state, const Mpo& mpo, const std::vector<double>* exact) {
  const std::vector<double> h = expectation_values(state, mpo);
  const std::vector<double> var = variances(state, mpo);
  if (exact && exact->size() < h.size()) throw InvalidArgument("accuracy_records: too few exact levels");
  std::vector<std::size_t> order(h.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return h[a] < h[b]; });
  std::vector<double> sorted;
  for (auto a : order) sorted.push_back(h[a]);

  std::vector<AccuracyRecord> out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    AccuracyRecord r;
    r.state = order[k];
    r.energy = h[order[k]];
    r.variance = var[order[k]];
    if (exact) {
      r.gap = nearest_gap(*exact, k);
      r.gap_estimated = false;
      r.exact_energy = (*exact)[k];
      r.energy_error = std::abs(r.energy - (*exact)[k]);
    } else {
      r.gap = nearest_gap(sorted, k);
    }
    const double g = std::sqrt(std::max(0.0, r.variance));
    if (!std::isfinite(r.gap))
      r.fidelity_bound = 1.0;
    else
      r.fidelity_bound = r.gap > 0.0 ? fidelity_bound(g, r.gap) : -std::numeric_limits<double>::infinity();
    out.push_back(r);
  }
  return out;
}

}  // namespace vnrg
