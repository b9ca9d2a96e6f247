#include "vnrg/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <tuple>

#include "vnrg/error.hpp"
#include "vnrg/variational.hpp"

namespace vnrg::oracle {

namespace {

void guard(std::size_t dim) {
  if (dim > kDenseGuard)
    throw InvalidArgument("dense oracle: dimension " + std::to_string(dim) + " exceeds the guard of " +
                          std::to_string(kDenseGuard));
}

std::size_t total_dim(const std::vector<std::size_t>& dims) {
  std::size_t d = 1;
  for (auto x : dims) {
    if (d > kDenseGuard) break;
    d *= x;
  }
  return d;
}

/// out(a s', b s) += m(a, b) o(s', s)
void kron_add(Matrix& out, const Matrix& m, const Matrix& o) {
  const Eigen::Index d = o.rows();
  for (Eigen::Index a = 0; a < m.rows(); ++a)
    for (Eigen::Index b = 0; b < m.cols(); ++b) {
      const double v = m(a, b);
      if (v == 0.0) continue;
      out.block(a * d, b * d, d, d) += v * o;
    }
}

Matrix channel(const Tensor& o, std::size_t p, std::size_t q) {
  const auto d = static_cast<Eigen::Index>(o.extent(1));
  Matrix m(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) m(a, b) = o(p, a, b, q);
  return m;
}

}  // namespace

Matrix dense_from_mpo(const Mpo& mpo) {
  mpo.validate();
  const std::size_t n = mpo.length();
  guard(total_dim(mpo.physical_dims()));
  const std::size_t cut = n / 2;

  // Left operators for bond `cut`, per channel.
  std::vector<Matrix> left{Matrix::Ones(1, 1)};
  for (std::size_t j = 0; j < cut; ++j) {
    const Tensor& o = mpo.sites[j];
    const auto d = static_cast<Eigen::Index>(o.extent(1));
    std::vector<Matrix> next(o.extent(3), Matrix::Zero(left[0].rows() * d, left[0].cols() * d));
    for (std::size_t p = 0; p < o.extent(0); ++p)
      for (std::size_t q = 0; q < o.extent(3); ++q) kron_add(next[q], left[p], channel(o, p, q));
    left = std::move(next);
  }
  // Right operators for bond `cut`, per channel.
  std::vector<Matrix> right{Matrix::Ones(1, 1)};
  for (std::size_t j = n; j-- > cut;) {
    const Tensor& o = mpo.sites[j];
    const auto d = static_cast<Eigen::Index>(o.extent(1));
    std::vector<Matrix> next(o.extent(0), Matrix::Zero(d * right[0].rows(), d * right[0].cols()));
    for (std::size_t p = 0; p < o.extent(0); ++p)
      for (std::size_t q = 0; q < o.extent(3); ++q) kron_add(next[p], channel(o, p, q), right[q]);
    right = std::move(next);
  }
  const Eigen::Index dl = left[0].rows(), dr = right[0].rows();
  Matrix h = Matrix::Zero(dl * dr, dl * dr);
  for (std::size_t p = 0; p < left.size(); ++p) kron_add(h, left[p], right[p]);
  return h;
}

Matrix dense_tilted_ising(const IsingParams& p) {
  if (p.n < 1) throw InvalidArgument("Ising chain needs n >= 1");
  guard(p.n >= 63 ? kDenseGuard + 1 : std::size_t{1} << p.n);
  const std::size_t dim = std::size_t{1} << p.n;
  const auto bit = [&](std::size_t state, std::size_t site) { return (state >> (p.n - 1 - site)) & 1U; };
  const auto flip = [&](std::size_t state, std::size_t site) { return state ^ (std::size_t{1} << (p.n - 1 - site)); };
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    for (std::size_t j = 0; j < p.n; ++j) {
      h(col, col) += p.hz * (bit(s, j) ? -1.0 : 1.0);
      h(static_cast<Eigen::Index>(flip(s, j)), col) += p.hx;
      if (j + 1 < p.n) h(static_cast<Eigen::Index>(flip(flip(s, j), j + 1)), col) += 1.0;
    }
  }
  return h;
}

namespace {

// Fock basis index: site 0 slowest, local index n_up + 2 n_dn. Mode m = 2 site + spin.
struct Fock {
  std::size_t sites;
  std::size_t dim() const { return std::size_t{1} << (2 * sites); }
  bool occupied(std::size_t state, std::size_t mode) const { return (state >> bit_of(mode)) & 1U; }
  std::size_t bit_of(std::size_t mode) const {
    const std::size_t site = mode / 2, spin = mode % 2;
    return 2 * (sites - 1 - site) + spin;
  }
  /// Applies c_mode; returns false when the result vanishes.
  bool annihilate(std::size_t& state, double& sign, std::size_t mode) const {
    if (!occupied(state, mode)) return false;
    for (std::size_t m = 0; m < mode; ++m)
      if (occupied(state, m)) sign = -sign;
    state &= ~(std::size_t{1} << bit_of(mode));
    return true;
  }
  bool create(std::size_t& state, double& sign, std::size_t mode) const {
    if (occupied(state, mode)) return false;
    for (std::size_t m = 0; m < mode; ++m)
      if (occupied(state, m)) sign = -sign;
    state |= std::size_t{1} << bit_of(mode);
    return true;
  }
};

}  // namespace

Matrix dense_siam(const SiamParams& p) {
  const auto hops = wilson_hoppings(p);
  const std::size_t n = p.sites();
  guard(n >= 31 ? kDenseGuard + 1 : std::size_t{1} << (2 * n));
  const Fock f{n};
  const std::size_t dim = f.dim();
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const double chi = p.hybridization();
  for (std::size_t s = 0; s < dim; ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    const bool up = f.occupied(s, 0), dn = f.occupied(s, 1);
    h(col, col) += p.eps_f * (static_cast<double>(up) + static_cast<double>(dn)) + (up && dn ? p.U : 0.0);
    for (std::size_t b = 0; b + 1 < n; ++b) {
      const double amp = b == 0 ? chi : hops[b - 1];
      for (std::size_t spin = 0; spin < 2; ++spin) {
        const std::size_t mi = 2 * b + spin, mj = 2 * (b + 1) + spin;
        for (auto [from, to] : {std::pair{mj, mi}, std::pair{mi, mj}}) {
          std::size_t t = s;
          double sign = 1.0;
          if (!f.annihilate(t, sign, from)) continue;
          if (!f.create(t, sign, to)) continue;
          h(static_cast<Eigen::Index>(t), col) += amp * sign;
        }
      }
    }
  }
  return h;
}

Matrix dense_annihilator(std::size_t sites, std::size_t site, int spin) {
  if (site >= sites || (spin != 0 && spin != 1)) throw InvalidArgument("dense_annihilator: invalid mode");
  guard(sites >= 31 ? kDenseGuard + 1 : std::size_t{1} << (2 * sites));
  const Fock f{sites};
  const std::size_t dim = f.dim();
  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) {
    std::size_t t = s;
    double sign = 1.0;
    if (f.annihilate(t, sign, 2 * site + static_cast<std::size_t>(spin)))
      c(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) = sign;
  }
  return c;
}

std::vector<Charge> fock_charges(std::size_t sites) {
  const Fock f{sites};
  std::vector<Charge> out(f.dim());
  for (std::size_t s = 0; s < f.dim(); ++s)
    for (std::size_t m = 0; m < 2 * sites; ++m)
      if (f.occupied(s, m)) ++out[s][m % 2];
  return out;
}

DenseSpectrum dense_spectrum(const Matrix& h) {
  const EighResult e = eigh(h);
  return {e.values, e.vectors};
}

std::vector<SectorLevel> dense_sector_spectrum(const Matrix& h, const std::vector<Charge>& charges) {
  if (charges.size() != static_cast<std::size_t>(h.rows())) throw InvalidArgument("charge list does not match matrix");
  std::map<Charge, std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < charges.size(); ++i) blocks[charges[i]].push_back(i);
  std::vector<SectorLevel> out;
  for (const auto& [c, idx] : blocks) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    Matrix sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = h(idx[a], idx[b]);
    const EighResult e = eigh(sub);
    for (Eigen::Index a = 0; a < k; ++a) out.push_back({e.values(a), c});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.energy < b.energy; });
  return out;
}

FreeFermionResult free_fermion_transverse_ising(std::size_t n, double h) {
  if (n == 0) throw InvalidArgument("free-fermion chain needs n >= 1");
  // Majoranas a_j = 2j, b_j = 2j+1. A term c (-i g_k g_l) enters as
  // M_kl -= 2c, M_lk += 2c in H = (i/4) sum M_kl g_k g_l.
  const auto dim = static_cast<Eigen::Index>(2 * n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  const auto term = [&](Eigen::Index k, Eigen::Index l, double c) {
    m(k, l) -= 2.0 * c;
    m(l, k) += 2.0 * c;
  };
  for (std::size_t j = 0; j < n; ++j) {
    const auto a = static_cast<Eigen::Index>(2 * j);
    term(a, a + 1, h);                        // h sz_j = h (-i a_j b_j)
    if (j + 1 < n) term(a + 1, a + 2, 1.0);  // sx_j sx_j+1 = -i b_j a_j+1
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd sv = svd.singularValues();
  FreeFermionResult r;
  // Singular values come in equal pairs.
  for (Eigen::Index k = 0; k < dim; k += 2) r.modes.push_back(0.5 * (sv(k) + sv(k + 1)));
  std::sort(r.modes.begin(), r.modes.end());
  for (double e : r.modes) r.ground_energy -= 0.5 * e;
  return r;
}

std::vector<double> smallest_subset_sums(const std::vector<double>& levels, std::size_t count) {
  double base = 0.0;
  std::vector<double> cost;
  for (double e : levels) {
    if (e < 0.0) base += e;
    cost.push_back(std::abs(e));
  }
  std::sort(cost.begin(), cost.end());
  std::vector<double> out;
  if (count == 0) return out;
  out.push_back(base);
  using Item = std::pair<double, std::size_t>;  // (sum, index of last flipped level)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  if (!cost.empty()) heap.push({base + cost[0], 0});
  while (out.size() < count && !heap.empty()) {
    const auto [s, i] = heap.top();
    heap.pop();
    out.push_back(s);
    if (i + 1 < cost.size()) {
      heap.push({s + cost[i + 1], i + 1});
      heap.push({s - cost[i] + cost[i + 1], i + 1});
    }
  }
  return out;
}

std::vector<double> free_fermion_levels(const FreeFermionResult& r, std::size_t count) {
  std::vector<double> out = smallest_subset_sums(r.modes, count);
  for (double& e : out) e += r.ground_energy;
  return out;
}

std::vector<double> siam_one_body_levels(const SiamParams& p) {
  const auto hops = wilson_hoppings(p);
  const auto n = static_cast<Eigen::Index>(p.sites());
  Matrix t = Matrix::Zero(n, n);
  t(0, 0) = p.eps_f;
  for (Eigen::Index b = 0; b + 1 < n; ++b) {
    const double amp = b == 0 ? p.hybridization() : hops[static_cast<std::size_t>(b - 1)];
    t(b, b + 1) = t(b + 1, b) = amp;
  }
  const EighResult e = eigh(t);
  return {e.values.data(), e.values.data() + n};
}

std::vector<double> noninteracting_siam_spectrum(const SiamParams& p, std::size_t count) {
  if (p.U != 0.0) throw InvalidArgument("the non-interacting oracle needs U = 0");
  const std::vector<double> per_spin = smallest_subset_sums(siam_one_body_levels(p), count);
  // k smallest sums a_i + b_j of two sorted lists (both spins share the levels).
  std::vector<double> out;
  using Item = std::tuple<double, std::size_t, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  heap.push({per_spin[0] + per_spin[0], 0, 0});
  seen.insert({0, 0});
  while (out.size() < count && !heap.empty()) {
    const auto [s, i, j] = heap.top();
    heap.pop();
    out.push_back(s);
    for (auto [a, b] : {std::pair{i + 1, j}, std::pair{i, j + 1}})
      if (a < per_spin.size() && b < per_spin.size() && seen.insert({a, b}).second)
        heap.push({per_spin[a] + per_spin[b], a, b});
  }
  return out;
}

Matrix dense_states(const NrgMps& state) {
  state.validate();
  NrgMps s = state;
  while (s.external.kind == ExternalLeg::Kind::Bond) s = move_external_index(s, Direction::Right);
  guard(total_dim(s.physical_dims()));
  Matrix v = Matrix::Ones(1, 1);
  for (const auto& a : s.sites) {
    const std::size_t l = a.extent(0), d = a.extent(1), r = a.extent(2);
    Matrix next = v * a.view(l, d * r);  // (x, s r) in row-major is (x s, r)
    v = Eigen::Map<Matrix>(next.data(), static_cast<Eigen::Index>(next.rows() * static_cast<Eigen::Index>(d)),
                           static_cast<Eigen::Index>(r));
  }
  return v;
}

}  // namespace vnrg::oracle
