#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "vnrg/error.hpp"
#include "vnrg/models.hpp"
#include "vnrg/oracles.hpp"

using namespace vnrg;
using namespace vnrg::test;

namespace {

/// Tilted Ising by Kronecker sums, no MPO involved.
Matrix kron_ising(std::size_t n, double hx, double hz) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  Matrix h = Matrix::Zero(dim, dim);
  for (std::size_t j = 0; j + 1 < n; ++j) h += embed(pauli_x(), j, n) * embed(pauli_x(), j + 1, n);
  for (std::size_t j = 0; j < n; ++j) h += hx * embed(pauli_x(), j, n) + hz * embed(pauli_z(), j, n);
  return h;
}

}  // namespace

TEST(IsingMpo, TwoSitesNoField) {
  const Matrix h = oracle::dense_from_mpo(build_tilted_ising_mpo({2, 0.0, 0.0}));
  EXPECT_LT((h - kron(pauli_x(), pauli_x())).norm(), 1e-15);
  const auto ev = sorted_eigenvalues(h);
  EXPECT_LT(max_abs_diff(ev, {-1, -1, 1, 1}), 1e-14);
}

TEST(IsingMpo, FieldOnlyDiagonal) {
  const Matrix h = oracle::dense_from_mpo(build_tilted_ising_mpo({3, 0.0, 1.0}));
  EXPECT_NEAR(h(0, 0), 3.0, 1e-15);
}

TEST(IsingMpo, MatchesKroneckerConstruction) {
  const Matrix h = oracle::dense_from_mpo(build_tilted_ising_mpo({8, 1.0, 1.0}));
  EXPECT_LT((h - kron_ising(8, 1.0, 1.0)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((oracle::dense_tilted_ising({8, 1.0, 1.0}) - h).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(IsingMpo, RejectsSingleSite) { EXPECT_THROW(build_tilted_ising_mpo({1, 1.0, 1.0}), InvalidArgument); }

TEST(WilsonHoppings, Values) {
  SiamParams p;
  p.N = 3;
  p.lambda = 4.0;
  EXPECT_NEAR(wilson_hoppings(p)[2], 0.25, 1e-15);
  p.lambda = 1.7;
  const auto t = wilson_hoppings(p);
  EXPECT_NEAR(t[0], 1.0, 1e-15);
  EXPECT_NEAR(t[1], std::pow(1.7, -0.5), 1e-15);
  EXPECT_NEAR(t[1], 0.766964988847, 1e-11);
  EXPECT_NEAR(t[2], 0.588235294118, 1e-11);
  p.profile = HoppingProfile::Uniform;
  for (double x : wilson_hoppings(p)) EXPECT_EQ(x, 1.0);
}

TEST(WilsonHoppings, Prefactors) {
  SiamParams p;
  p.N = 2;
  p.lambda = 4.0;
  p.prefactors = {2.0, 3.0};
  const auto t = wilson_hoppings(p);
  EXPECT_NEAR(t[0], 2.0, 1e-15);
  EXPECT_NEAR(t[1], 1.5, 1e-15);
  p.prefactors = {1.0};
  EXPECT_THROW(wilson_hoppings(p), InvalidArgument);
}

TEST(SiamMpo, DecoupledEmptyChain) {
  SiamParams p;
  p.N = 0;
  const Matrix h = oracle::dense_from_mpo(build_siam_mpo(p));
  ASSERT_EQ(h.rows(), 16);
  EXPECT_LT(h.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SiamMpo, HybridizationLevels) {
  SiamParams p;
  p.N = 0;
  p.xi0 = 0.1;
  p.eps_f = -0.1;
  const double chi = std::sqrt(0.1 / std::numbers::pi);
  EXPECT_NEAR(p.hybridization(), 0.178412411615, 1e-11);
  // 2x2 one-body matrix in closed form.
  const double mid = -0.05, rad = std::sqrt(0.05 * 0.05 + chi * chi);
  const auto levels = oracle::siam_one_body_levels(p);
  ASSERT_EQ(levels.size(), 2u);
  EXPECT_NEAR(levels[0], mid - rad, 1e-14);
  EXPECT_NEAR(levels[1], mid + rad, 1e-14);
  // Many-body spectrum: every spin independently fills a subset of levels.
  std::vector<double> expect;
  for (int up = 0; up < 4; ++up)
    for (int dn = 0; dn < 4; ++dn) {
      double e = 0;
      for (int k = 0; k < 2; ++k) e += ((up >> k) & 1) * levels[static_cast<std::size_t>(k)] +
                                       ((dn >> k) & 1) * levels[static_cast<std::size_t>(k)];
      expect.push_back(e);
    }
  std::sort(expect.begin(), expect.end());
  EXPECT_LT(max_abs_diff(sorted_eigenvalues(oracle::dense_from_mpo(build_siam_mpo(p))), expect), 1e-13);
}

TEST(SiamMpo, MatchesFockSpaceConstruction) {
  SiamParams p;
  p.N = 2;
  p.U = 0.1;
  p.eps_f = -0.05;
  p.xi0 = 0.01;
  p.lambda = 2.0;
  const Matrix h = oracle::dense_from_mpo(build_siam_mpo(p));
  EXPECT_LT((h - oracle::dense_siam(p)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SiamMpo, ConservesParticleNumbers) {
  SiamParams p;
  p.N = 3;
  p.U = 0.3;
  p.xi0 = 0.05;
  const Mpo mpo = build_siam_mpo(p);
  EXPECT_TRUE(mpo.has_charges());
  EXPECT_TRUE(conserves_charges(mpo));
  EXPECT_FALSE(conserves_charges(Mpo{build_tilted_ising_mpo({3, 1, 1}).sites,
                                     std::vector<std::vector<Charge>>(3, {{0, 0}, {1, 0}})}));
}

TEST(SiamMpo, RejectsBadParameters) {
  SiamParams p;
  p.N = -1;
  EXPECT_THROW(build_siam_mpo(p), InvalidArgument);
  p.N = 2;
  p.lambda = 1.0;
  EXPECT_THROW(build_siam_mpo(p), InvalidArgument);
  p.lambda = 2.0;
  p.xi0 = -1.0;
  EXPECT_THROW(build_siam_mpo(p), InvalidArgument);
}

TEST(FermionOps, Anticommutation) {
  using namespace vnrg::fermion;
  const Matrix cu = annihilator(kUp), cd = annihilator(kDown);
  const Matrix id = Matrix::Identity(4, 4);
  EXPECT_LT((cu * creator(kUp) + creator(kUp) * cu - id).norm(), 1e-15);
  EXPECT_LT((cd * creator(kDown) + creator(kDown) * cd - id).norm(), 1e-15);
  EXPECT_LT((cu * cd + cd * cu).norm(), 1e-15);
  EXPECT_LT((cu * creator(kDown) + creator(kDown) * cu).norm(), 1e-15);
  EXPECT_LT((number(kUp) - creator(kUp) * cu).norm(), 1e-15);
}

TEST(GenericBuilder, SingleOnsiteTerm) {
  const Mpo mpo = build_generic_nn_mpo({{0, pauli_z()}}, {}, 2, 2);
  EXPECT_LT((oracle::dense_from_mpo(mpo) - kron(pauli_z(), Matrix::Identity(2, 2))).norm(), 1e-15);
}

TEST(GenericBuilder, RebuildsTiltedIsing) {
  std::vector<OnsiteTerm> onsite;
  std::vector<BondTerm> bonds;
  for (std::size_t j = 0; j < 6; ++j) onsite.push_back({j, Matrix(pauli_x() + pauli_z())});
  for (std::size_t j = 0; j + 1 < 6; ++j) bonds.push_back({j, pauli_x(), pauli_x()});
  const Matrix a = oracle::dense_from_mpo(build_generic_nn_mpo(onsite, bonds, 6, 2));
  const Matrix b = oracle::dense_from_mpo(build_tilted_ising_mpo({6, 1.0, 1.0}));
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GenericBuilder, EmptyIsZero) {
  const Matrix h = oracle::dense_from_mpo(build_generic_nn_mpo({}, {}, 3, 2));
  EXPECT_EQ(h.rows(), 8);
  EXPECT_EQ(h.cwiseAbs().maxCoeff(), 0.0);
}

TEST(IdentityMpo, IsIdentity) {
  EXPECT_LT((oracle::dense_from_mpo(identity_mpo(3, 2)) - Matrix::Identity(8, 8)).norm(), 1e-15);
}
