#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "vnrg/environments.hpp"
#include "vnrg/error.hpp"
#include "vnrg/models.hpp"
#include "vnrg/oracles.hpp"

using namespace vnrg;
using namespace vnrg::test;

namespace {

Tensor identity_site(std::size_t d) {
  Tensor o({1, d, d, 1});
  for (std::size_t s = 0; s < d; ++s) o(0, s, s, 0) = 1.0;
  return o;
}

Tensor isometry_site(std::size_t l, std::size_t d, std::size_t r, std::mt19937_64& rng) {
  const Matrix q = random_isometry(static_cast<Eigen::Index>(l * d), static_cast<Eigen::Index>(r), rng);
  Tensor t({l, d, r});
  t.view(l * d, r) = q;
  return t;
}

/// Full contraction <psi_a|H|psi_a> summed with the block built from the left.
Matrix left_assembled(const NrgMps& st, const Mpo& mpo) {
  EnvBlock env = trivial_env();
  for (std::size_t j = 0; j < st.length(); ++j) env = left_extend(env, st.sites[j], mpo.sites[j]);
  const std::size_t m = env.ket_dim();
  Matrix out(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) out(b, a) = env.tensor(a, 0, b);
  return out;
}

}  // namespace

TEST(Environments, IdentityExtensionIsDelta) {
  std::mt19937_64 rng(1);
  const Tensor a = isometry_site(1, 3, 3, rng);
  const EnvBlock l = left_extend(trivial_env(), a, identity_site(3));
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t rp = 0; rp < 3; ++rp) EXPECT_NEAR(l.tensor(r, 0, rp), r == rp ? 1.0 : 0.0, 1e-14);

  const Tensor b = isometry_site(3, 2, 4, rng);
  const EnvBlock l2 = left_extend(l, b, identity_site(2));
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t rp = 0; rp < 4; ++rp) EXPECT_NEAR(l2.tensor(r, 0, rp), r == rp ? 1.0 : 0.0, 1e-14);
}

TEST(Environments, ZeroMpoGivesZeroBlock) {
  std::mt19937_64 rng(2);
  const Tensor a = isometry_site(2, 2, 3, rng);
  EnvBlock l;
  l.tensor = random_tensor({2, 3, 2}, rng);
  const Tensor zero({3, 2, 2, 2});
  EXPECT_EQ(left_extend(l, a, zero).tensor.norm(), 0.0);
  EnvBlock r;
  r.tensor = random_tensor({3, 2, 3}, rng);
  EXPECT_EQ(right_extend(r, a, zero).tensor.norm(), 0.0);
}

TEST(Environments, ThreeSiteDenseExpansion) {
  const Mpo mpo = build_tilted_ising_mpo({3, 0.7, -0.4});
  const NrgMps st = random_nrg_mps(mpo.physical_dims(), 4, 3, 17);
  const Matrix v = oracle::dense_states(st);
  const Matrix h = oracle::dense_from_mpo(mpo);
  const Matrix ref = v.transpose() * h * v;
  EXPECT_LT((left_assembled(st, mpo) - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Environments, LeftAndRightAssemblyAgree) {
  const Mpo mpo = build_tilted_ising_mpo({4, 1.0, 0.5});
  const NrgMps st = random_nrg_mps(mpo.physical_dims(), 4, 3, 23);
  const std::vector<double> w{1.0, 0.5, 0.25};
  // From the right: weighted boundary on the external bond.
  EnvBlock r = weighted_boundary(w);
  for (std::size_t j = st.length(); j-- > 0;) r = right_extend(r, st.sites[j], mpo.sites[j]);
  const Matrix left = left_assembled(st, mpo);
  double ref = 0.0;
  for (std::size_t a = 0; a < 3; ++a) ref += w[a] * left(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a));
  EXPECT_NEAR(r.tensor(0, 0, 0), ref, 1e-12);
}

TEST(Environments, WeightStructureUnderIdentity) {
  // A maps (l, s) one-to-one onto r, so the block stays diagonal with the
  // weights summed over s.
  Tensor a({2, 2, 4});
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t s = 0; s < 2; ++s) a(l, s, 2 * l + s) = 1.0;
  const std::vector<double> w{1.0, 2.0, 3.0, 4.0};
  const EnvBlock r = right_extend(weighted_boundary(w), a, identity_site(2));
  EXPECT_NEAR(r.tensor(0, 0, 0), 3.0, 1e-15);
  EXPECT_NEAR(r.tensor(1, 0, 1), 7.0, 1e-15);
  EXPECT_NEAR(r.tensor(0, 0, 1), 0.0, 1e-15);
  EXPECT_NEAR(r.tensor(1, 0, 0), 0.0, 1e-15);
}

TEST(BoundaryWeights, Formulas) {
  auto u = boundary_weights(3, {WeightSpec::Kind::Uniform, 0.0});
  EXPECT_EQ(u, (std::vector<double>{1, 1, 1}));
  auto p = boundary_weights(3, {WeightSpec::Kind::Position, 0.0});
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_NEAR(p[1], std::exp(-1.0), 1e-15);
  EXPECT_NEAR(p[2], std::exp(-2.0), 1e-15);
  const Spectrum sp = make_spectrum({-1.0, 0.5});
  auto b = boundary_weights(2, {WeightSpec::Kind::Boltzmann, 1.0}, &sp);
  EXPECT_NEAR(b[0], 1.0, 1e-15);
  EXPECT_NEAR(b[1], std::exp(-1.5), 1e-15);
  EXPECT_THROW(boundary_weights(2, {WeightSpec::Kind::Boltzmann, 1.0}), InvalidArgument);

  const EnvBlock blk = init_right_boundary(3, {WeightSpec::Kind::Position, 0.0});
  ASSERT_EQ(blk.tensor.shape(), (Shape{3, 1, 3}));
  EXPECT_NEAR(blk.tensor(2, 0, 2), std::exp(-2.0), 1e-15);
  EXPECT_EQ(blk.tensor(1, 0, 2), 0.0);
}

TEST(EnvironmentCache, MatchesDirectExtensionAndInvalidates) {
  const Mpo mpo = build_tilted_ising_mpo({5, 1.0, 1.0});
  NrgMps st = random_nrg_mps(mpo.physical_dims(), 4, 2, 5);
  EnvironmentCache cache(st, mpo, init_right_boundary(2, {}));
  EnvBlock l = trivial_env();
  for (std::size_t j = 0; j < 3; ++j) l = left_extend(l, st.sites[j], mpo.sites[j]);
  EXPECT_LT((cache.left(3).tensor - l.tensor).norm(), 1e-14);

  std::mt19937_64 rng(9);
  st.sites[1] = isometry_site(st.sites[1].extent(0), 2, st.sites[1].extent(2), rng);
  cache.invalidate(1);
  l = trivial_env();
  for (std::size_t j = 0; j < 3; ++j) l = left_extend(l, st.sites[j], mpo.sites[j]);
  EXPECT_LT((cache.left(3).tensor - l.tensor).norm(), 1e-14);

  EnvBlock r = init_right_boundary(2, {});
  for (std::size_t j = 5; j-- > 2;) r = right_extend(r, st.sites[j], mpo.sites[j]);
  EXPECT_LT((cache.right(2).tensor - r.tensor).norm(), 1e-14);
}
