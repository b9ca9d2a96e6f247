#include "vnrg/models.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>

#include "vnrg/error.hpp"

namespace vnrg {

std::size_t Mpo::bond_dim(std::size_t bond) const {
  if (bond > sites.size()) throw InvalidArgument("bond index out of range");
  if (sites.empty()) return 1;
  return bond < sites.size() ? sites[bond].extent(0) : sites.back().extent(3);
}

std::vector<std::size_t> Mpo::physical_dims() const {
  std::vector<std::size_t> dims;
  for (const auto& s : sites) dims.push_back(s.extent(1));
  return dims;
}

void Mpo::validate() const {
  if (sites.empty()) throw InvalidArgument("MPO has no sites");
  for (std::size_t j = 0; j < sites.size(); ++j) {
    const auto& t = sites[j];
    if (t.rank() != 4) throw InvalidArgument("MPO site " + std::to_string(j) + " is not rank 4");
    if (t.extent(1) != t.extent(2)) throw InvalidArgument("MPO site " + std::to_string(j) + " is not square");
    if (j + 1 < sites.size() && t.extent(3) != sites[j + 1].extent(0))
      throw InvalidArgument("MPO bond mismatch between sites " + std::to_string(j) + " and " +
                            std::to_string(j + 1));
  }
  if (sites.front().extent(0) != 1 || sites.back().extent(3) != 1)
    throw InvalidArgument("MPO boundary bonds must have extent 1");
  if (!physical_charges.empty()) {
    if (physical_charges.size() != sites.size()) throw InvalidArgument("physical charge table length mismatch");
    for (std::size_t j = 0; j < sites.size(); ++j)
      if (physical_charges[j].size() != sites[j].extent(1))
        throw InvalidArgument("physical charge table size mismatch at site " + std::to_string(j));
  }
}

bool conserves_charges(const Mpo& mpo) {
  if (!mpo.has_charges()) return false;
  mpo.validate();
  std::vector<std::optional<Charge>> left(1, Charge{0, 0});
  for (std::size_t j = 0; j < mpo.length(); ++j) {
    const auto& t = mpo.sites[j];
    const auto& qs = mpo.physical_charges[j];
    const std::size_t wl = t.extent(0), d = t.extent(1), wr = t.extent(3);
    std::vector<std::optional<Charge>> right(wr);
    for (std::size_t p = 0; p < wl; ++p)
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          for (std::size_t q = 0; q < wr; ++q) {
            if (std::abs(t(p, a, b, q)) < 1e-14) continue;
            if (!left[p]) continue;  // unreachable channel
            // The channel records how far the partial operator moves the charge.
            const Charge c = *left[p] + (qs[a] - qs[b]);
            if (right[q] && *right[q] != c) return false;
            right[q] = c;
          }
    left = std::move(right);
  }
  return !left[0] || *left[0] == Charge{0, 0};
}

double SiamParams::hybridization() const { return std::sqrt(xi0 / std::numbers::pi); }

namespace spin {
Matrix sigma_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix sigma_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace spin

namespace fermion {
Matrix annihilator(int spin) {
  Matrix m = Matrix::Zero(4, 4);
  if (spin == kUp) {
    m(0, 1) = 1.0;  // |up> -> |0>
    m(2, 3) = 1.0;  // |up dn> -> |dn>
  } else if (spin == kDown) {
    m(0, 2) = 1.0;   // |dn> -> |0>
    m(1, 3) = -1.0;  // |up dn> -> -|up>, passes the up mode
  } else {
    throw InvalidArgument("spin must be 0 (up) or 1 (down)");
  }
  return m;
}
Matrix creator(int spin) { return annihilator(spin).transpose(); }
Matrix number(int spin) { return creator(spin) * annihilator(spin); }
Matrix parity() { return Eigen::Vector4d(1, -1, -1, 1).asDiagonal(); }
std::vector<Charge> site_charges() { return {{0, 0}, {1, 0}, {0, 1}, {1, 1}}; }
}  // namespace fermion

namespace {

void put(Tensor& t, std::size_t p, std::size_t q, const Matrix& op, double scale = 1.0) {
  for (Eigen::Index a = 0; a < op.rows(); ++a)
    for (Eigen::Index b = 0; b < op.cols(); ++b) t(p, a, b, q) += scale * op(a, b);
}

}  // namespace

Mpo build_tilted_ising_mpo(const IsingParams& p) {
  if (p.n < 2) throw InvalidArgument("tilted Ising chain needs n >= 2");
  const Matrix id = Matrix::Identity(2, 2);
  const Matrix sx = spin::sigma_x();
  const Matrix field = p.hx * sx + p.hz * spin::sigma_z();
  // Channels: 0 done, 1 sx pending, 2 identity.
  Mpo mpo;
  for (std::size_t j = 0; j < p.n; ++j) {
    const bool first = j == 0, last = j + 1 == p.n;
    const std::size_t wl = first ? 1 : 3, wr = last ? 1 : 3;
    const std::size_t start = first ? 0 : 2;
    Tensor t({wl, 2, 2, wr});
    put(t, start, 0, field);
    if (!last) {
      put(t, start, 2, id);
      put(t, start, 1, sx);
    }
    if (!first) {
      put(t, 1, 0, sx);
      put(t, 0, 0, id);
    }
    mpo.sites.push_back(std::move(t));
  }
  return mpo;
}

std::vector<double> wilson_hoppings(const SiamParams& p) {
  if (p.N < 0) throw InvalidArgument("SIAM N must be >= 0");
  if (p.profile == HoppingProfile::Wilson && !(p.lambda > 1.0))
    throw InvalidArgument("Wilson hoppings need lambda > 1");
  if (!p.prefactors.empty() && p.prefactors.size() != static_cast<std::size_t>(p.N))
    throw InvalidArgument("hopping prefactor list must have length N");
  std::vector<double> t(static_cast<std::size_t>(p.N));
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double c = p.prefactors.empty() ? 1.0 : p.prefactors[j];
    t[j] = p.profile == HoppingProfile::Wilson ? c * std::pow(p.lambda, -0.5 * static_cast<double>(j)) : c;
  }
  return t;
}

Mpo build_siam_mpo(const SiamParams& p) {
  if (!(p.xi0 >= 0.0)) throw InvalidArgument("SIAM xi0 must be >= 0");
  if (!std::isfinite(p.eps_f) || !std::isfinite(p.U)) throw InvalidArgument("SIAM eps_f and U must be finite");
  const auto hops = wilson_hoppings(p);
  const std::size_t n = p.sites();
  const double chi = p.hybridization();

  using namespace fermion;
  const Matrix id = Matrix::Identity(4, 4);
  const Matrix par = parity();
  const Matrix c[2] = {annihilator(kUp), annihilator(kDown)};
  const Matrix cd[2] = {creator(kUp), creator(kDown)};
  const Matrix n_up = number(kUp), n_dn = number(kDown);
  const Matrix onsite_imp = p.eps_f * (n_up + n_dn) + p.U * n_up * n_dn;

  // Channels on interior bonds: 0 done, 1-2 c+_s P pending, 3-4 P c_s pending,
  // 5 identity. A hopping t (c+_{i s} c_{i+1 s} + h.c.) becomes
  // t (c+_s P)_i (c_s)_{i+1} + t (P c_s)_i (c+_s)_{i+1}.
  Mpo mpo;
  for (std::size_t j = 0; j < n; ++j) {
    const bool first = j == 0, last = j + 1 == n;
    const std::size_t wl = first ? 1 : 6, wr = last ? 1 : 6;
    const std::size_t start = first ? 0 : 5;
    Tensor t({wl, 4, 4, wr});
    if (j == 0) put(t, start, 0, onsite_imp);
    if (!last) {
      const double amp = j == 0 ? chi : hops[j - 1];
      put(t, start, 5, id);
      for (int s = 0; s < 2; ++s) {
        put(t, start, 1 + s, cd[s] * par, amp);
        put(t, start, 3 + s, par * c[s], amp);
      }
    }
    if (!first) {
      put(t, 0, 0, id);
      for (int s = 0; s < 2; ++s) {
        put(t, 1 + s, 0, c[s]);
        put(t, 3 + s, 0, cd[s]);
      }
    }
    mpo.sites.push_back(std::move(t));
  }
  mpo.physical_charges.assign(n, site_charges());
  return mpo;
}

Mpo build_generic_nn_mpo(const std::vector<OnsiteTerm>& onsite, const std::vector<BondTerm>& bonds,
                         std::size_t n, std::size_t d) {
  if (n == 0 || d == 0) throw InvalidArgument("generic MPO needs n >= 1 and d >= 1");
  auto check = [&](const Matrix& m) {
    if (static_cast<std::size_t>(m.rows()) != d || static_cast<std::size_t>(m.cols()) != d)
      throw InvalidArgument("operator dimension does not match local dimension " + std::to_string(d));
  };
  std::vector<std::vector<const BondTerm*>> by_bond(n);
  for (const auto& b : bonds) {
    if (b.site + 1 >= n) throw InvalidArgument("bond term site out of range");
    check(b.left);
    check(b.right);
    by_bond[b.site].push_back(&b);
  }
  for (const auto& o : onsite) {
    if (o.site >= n) throw InvalidArgument("on-site term site out of range");
    check(o.op);
  }

  const Matrix id = Matrix::Identity(d, d);
  Mpo mpo;
  for (std::size_t j = 0; j < n; ++j) {
    const bool first = j == 0, last = j + 1 == n;
    const std::size_t pending_left = first ? 0 : by_bond[j - 1].size();
    const std::size_t pending_right = last ? 0 : by_bond[j].size();
    const std::size_t wl = first ? 1 : pending_left + 2;
    const std::size_t wr = last ? 1 : pending_right + 2;
    const std::size_t start = wl - 1;
    Tensor t({wl, d, d, wr});
    for (const auto& o : onsite)
      if (o.site == j) put(t, start, 0, o.op);
    if (!last) {
      put(t, start, wr - 1, id);
      for (std::size_t k = 0; k < pending_right; ++k) put(t, start, 1 + k, by_bond[j][k]->left);
    }
    if (!first) {
      put(t, 0, 0, id);
      for (std::size_t k = 0; k < pending_left; ++k) put(t, 1 + k, 0, by_bond[j - 1][k]->right);
    }
    mpo.sites.push_back(std::move(t));
  }
  return mpo;
}

Mpo identity_mpo(std::size_t n, std::size_t d) {
  if (n == 0 || d == 0) throw InvalidArgument("identity MPO needs n >= 1 and d >= 1");
  Mpo mpo;
  for (std::size_t j = 0; j < n; ++j) {
    Tensor t({1, d, d, 1});
    put(t, 0, 0, Matrix::Identity(d, d));
    mpo.sites.push_back(std::move(t));
  }
  return mpo;
}

}  // namespace vnrg
