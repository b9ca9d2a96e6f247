#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "vnrg/error.hpp"
#include "vnrg/models.hpp"
#include "vnrg/oracles.hpp"

using namespace vnrg;
using namespace vnrg::test;

namespace {

/// Jordan-Wigner Fock Hamiltonian from Kronecker products of two-level
/// factors. Factor order per site is (down, up) so the index matches
/// n_up + 2 n_dn with site 0 slowest; the fermionic order is up before down.
Matrix kron_siam(const SiamParams& p) {
  const std::size_t n = p.sites(), modes = 2 * n;
  Matrix a(2, 2), z(2, 2);
  a << 0, 1, 0, 0;
  z << 1, 0, 0, -1;
  auto factor_of = [](std::size_t mode) { return 2 * (mode / 2) + (1 - mode % 2); };
  std::vector<Matrix> c;
  for (std::size_t m = 0; m < modes; ++m) {
    Matrix op = Matrix::Identity(1, 1);
    for (std::size_t f = 0; f < modes; ++f) {
      Matrix local = Matrix::Identity(2, 2);
      for (std::size_t k = 0; k < m; ++k)
        if (factor_of(k) == f) local = z;
      if (factor_of(m) == f) local = a;
      op = kron(op, local);
    }
    c.push_back(op);
  }
  const auto hops = wilson_hoppings(p);
  const auto dim = c[0].rows();
  Matrix h = Matrix::Zero(dim, dim);
  const Matrix nu = c[0].transpose() * c[0], nd = c[1].transpose() * c[1];
  h += p.eps_f * (nu + nd) + p.U * nu * nd;
  for (std::size_t b = 0; b + 1 < n; ++b) {
    const double t = b == 0 ? p.hybridization() : hops[b - 1];
    for (std::size_t s = 0; s < 2; ++s) {
      const Matrix hop = c[2 * b + s].transpose() * c[2 * (b + 1) + s];
      h += t * (hop + hop.transpose());
    }
  }
  return h;
}

std::vector<double> brute_subset_sums(const std::vector<double>& levels) {
  std::vector<double> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << levels.size()); ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (mask >> i & 1U) s += levels[i];
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(DenseFromMpo, IdentityChain) {
  const Matrix h = oracle::dense_from_mpo(identity_mpo(3, 2));
  EXPECT_LT((h - Matrix::Identity(8, 8)).norm(), 1e-15);
}

TEST(DenseFromMpo, TwoSiteIsing) {
  const Matrix h = oracle::dense_from_mpo(build_tilted_ising_mpo({2, 0.0, 0.0}));
  EXPECT_LT((h - kron(pauli_x(), pauli_x())).norm(), 1e-15);
}

TEST(DenseSiam, MatchesKroneckerJordanWigner) {
  SiamParams p;
  p.N = 1;
  p.U = 0.7;
  p.eps_f = -0.3;
  p.xi0 = 0.2;
  p.lambda = 2.5;
  const Matrix h = oracle::dense_siam(p);
  EXPECT_LT((h - kron_siam(p)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((h - oracle::dense_from_mpo(build_siam_mpo(p))).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(DenseSiam, AnnihilatorsAnticommute) {
  const std::size_t sites = 2;
  std::vector<Matrix> c;
  for (std::size_t s = 0; s < sites; ++s)
    for (int spin : {0, 1}) c.push_back(oracle::dense_annihilator(sites, s, spin));
  const Matrix id = Matrix::Identity(c[0].rows(), c[0].cols());
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) {
      EXPECT_LT((c[i] * c[j] + c[j] * c[i]).norm(), 1e-15);
      const Matrix acomm = c[i] * c[j].transpose() + c[j].transpose() * c[i];
      EXPECT_LT((acomm - (i == j ? id : Matrix::Zero(id.rows(), id.cols()))).norm(), 1e-15);
    }
  const auto q = oracle::fock_charges(sites);
  EXPECT_EQ(q[0], (Charge{0, 0}));
  EXPECT_EQ(q[1], (Charge{1, 0}));
  EXPECT_EQ(q[2], (Charge{0, 1}));
  EXPECT_EQ(q.back(), (Charge{2, 2}));
}

TEST(FreeFermion, SingleSite) {
  const auto r = oracle::free_fermion_transverse_ising(1, 0.8);
  ASSERT_EQ(r.modes.size(), 1u);
  EXPECT_NEAR(r.modes[0], 1.6, 1e-14);
  EXPECT_LT(max_abs_diff(oracle::free_fermion_levels(r, 2), {-0.8, 0.8}), 1e-14);
}

TEST(FreeFermion, MatchesDenseTransverseIsing) {
  for (double h : {1.0, 0.4, 2.5}) {
    const std::size_t n = 10;
    const auto dense = sorted_eigenvalues(oracle::dense_tilted_ising({n, 0.0, h}));
    const auto ff = oracle::free_fermion_levels(oracle::free_fermion_transverse_ising(n, h), 64);
    const std::vector<double> low(dense.begin(), dense.begin() + 64);
    EXPECT_LT(max_abs_diff(ff, low), 1e-10) << "h = " << h;
  }
}

TEST(FreeFermion, StrongFieldLimit) {
  const std::size_t n = 40;
  const auto r = oracle::free_fermion_transverse_ising(n, 100.0);
  EXPECT_NEAR(r.ground_energy, -100.0 * n, 0.01 * 100.0 * n);
  for (double e : r.modes) EXPECT_NEAR(e, 200.0, 2.0);
}

TEST(SubsetSums, AllPositiveLevels) {
  const auto s = oracle::smallest_subset_sums({0.5, 1.0, 3.0}, 3);
  EXPECT_LT(max_abs_diff(s, {0.0, 0.5, 1.0}), 1e-15);
}

TEST(SubsetSums, MatchBruteForce) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> levels(1 + trial % 6);
    for (double& e : levels) e = dist(rng);
    const auto brute = brute_subset_sums(levels);
    EXPECT_LT(max_abs_diff(oracle::smallest_subset_sums(levels, brute.size()), brute), 1e-12);
    const auto few = oracle::smallest_subset_sums(levels, 3);
    EXPECT_LT(max_abs_diff(few, {brute.begin(), brute.begin() + std::min<std::ptrdiff_t>(3, brute.size())}), 1e-12);
  }
}

TEST(NonInteractingSiam, MatchesDense) {
  SiamParams p;
  p.N = 2;
  p.eps_f = -0.2;
  p.xi0 = 0.3;
  p.lambda = 2.0;
  const auto dense = sorted_eigenvalues(oracle::dense_siam(p));
  const auto exact = oracle::noninteracting_siam_spectrum(p, 20);
  EXPECT_LT(max_abs_diff(exact, {dense.begin(), dense.begin() + 20}), 1e-12);
  const auto all = oracle::noninteracting_siam_spectrum(p, dense.size());
  EXPECT_LT(max_abs_diff(all, dense), 1e-12);
}

TEST(NonInteractingSiam, RequiresZeroU) {
  SiamParams p;
  p.N = 2;
  p.U = 0.1;
  EXPECT_THROW(oracle::noninteracting_siam_spectrum(p, 4), InvalidArgument);
}

TEST(SectorSpectrum, SpinSwapSymmetry) {
  SiamParams p;
  p.N = 1;
  p.U = 0.4;
  p.eps_f = -0.2;
  p.xi0 = 0.3;
  const auto levels = oracle::dense_sector_spectrum(oracle::dense_siam(p), oracle::fock_charges(p.sites()));
  ASSERT_EQ(levels.size(), 64u);
  // E(Nu, Nd) and E(Nd, Nu) coincide.
  for (const auto& l : levels) {
    const Charge swapped{l.sector[1], l.sector[0]};
    const bool found = std::any_of(levels.begin(), levels.end(), [&](const auto& m) {
      return m.sector == swapped && std::abs(m.energy - l.energy) < 1e-12;
    });
    EXPECT_TRUE(found);
  }
  const auto full = sorted_eigenvalues(oracle::dense_siam(p));
  for (std::size_t k = 0; k < 64; ++k) EXPECT_NEAR(levels[k].energy, full[k], 1e-12);
}

TEST(DenseGuard, RejectsLargeSystems) {
  EXPECT_THROW(oracle::dense_tilted_ising({14, 1.0, 1.0}), InvalidArgument);
  SiamParams p;
  p.N = 5;
  EXPECT_THROW(oracle::dense_siam(p), InvalidArgument);
  EXPECT_NO_THROW(oracle::dense_annihilator(2, 1, 1));
  EXPECT_THROW(oracle::dense_annihilator(2, 2, 0), InvalidArgument);
}

TEST(DenseStates, SingleSiteState) {
  const NrgMps st = random_nrg_mps({2, 2, 2}, 4, 3, 9);
  const Matrix v = oracle::dense_states(st);
  EXPECT_EQ(v.rows(), 8);
  EXPECT_EQ(v.cols(), 3);
  EXPECT_LT((v.transpose() * v - Matrix::Identity(3, 3)).norm(), 1e-12);
}
