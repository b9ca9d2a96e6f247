#include <gtest/gtest.h>

#include "support.hpp"
#include "vnrg/dmrg.hpp"
#include "vnrg/error.hpp"
#include "vnrg/models.hpp"
#include "vnrg/nrg.hpp"
#include "vnrg/oracles.hpp"

using namespace vnrg;
using namespace vnrg::test;

namespace {

/// Explicit window Hamiltonian by loops over all indices.
Matrix dense_window(const EnvBlock& left, const EnvBlock& right, const Tensor& o1, const Tensor& o2) {
  const std::size_t l = left.ket_dim(), r = right.ket_dim(), d1 = o1.extent(1), d2 = o2.extent(1);
  const std::size_t w = o1.extent(0), w1 = o1.extent(3), w2 = o2.extent(3);
  const auto dim = static_cast<Eigen::Index>(l * d1 * d2 * r);
  Matrix h = Matrix::Zero(dim, dim);
  auto idx = [&](std::size_t a, std::size_t s, std::size_t t, std::size_t b) {
    return static_cast<Eigen::Index>(((a * d1 + s) * d2 + t) * r + b);
  };
  for (std::size_t a = 0; a < l; ++a)
    for (std::size_t ap = 0; ap < l; ++ap)
      for (std::size_t p = 0; p < w; ++p) {
        const double lv = left.tensor(a, p, ap);
        if (lv == 0.0) continue;
        for (std::size_t q = 0; q < w1; ++q)
          for (std::size_t u = 0; u < w2; ++u)
            for (std::size_t s = 0; s < d1; ++s)
              for (std::size_t sp = 0; sp < d1; ++sp)
                for (std::size_t t = 0; t < d2; ++t)
                  for (std::size_t tp = 0; tp < d2; ++tp) {
                    const double ov = lv * o1(p, sp, s, q) * o2(q, tp, t, u);
                    if (ov == 0.0) continue;
                    for (std::size_t b = 0; b < r; ++b)
                      for (std::size_t bp = 0; bp < r; ++bp)
                        h(idx(ap, sp, tp, bp), idx(a, s, t, b)) += ov * right.tensor(b, u, bp);
                  }
      }
  return h;
}

}  // namespace

TEST(TwoSite, MatrixFreeMatchesDense) {
  const Mpo mpo = build_tilted_ising_mpo({5, 1.0, 0.6});
  const NrgMps st = random_nrg_mps(mpo.physical_dims(), 4, 3, 1);
  EnvironmentCache cache(st, mpo, init_right_boundary(3, {}));
  const EnvBlock& l = cache.left(1);
  const EnvBlock& r = cache.right(3);
  const Matrix h = dense_window(l, r, mpo.sites[1], mpo.sites[2]);
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd in = random_matrix(h.rows(), 4, rng);
  Eigen::MatrixXd out;
  apply_two_site(l, r, mpo.sites[1], mpo.sites[2], in, out);
  EXPECT_LT((out - h * in).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(TwoSite, TrivialEnvironmentsGiveExactEigenvectors) {
  const IsingParams p{2, 0.4, 0.9};
  const Mpo mpo = build_tilted_ising_mpo(p);
  const Matrix h = oracle::dense_tilted_ising(p);
  const auto blk = two_site_ground_block(trivial_env(), trivial_env(), mpo.sites[0], mpo.sites[1], 2);
  const auto es = eigh(h);
  for (int k = 0; k < 2; ++k) {
    EXPECT_NEAR(blk.energies(k), es.values(k), 1e-12);
    EXPECT_NEAR(std::abs(blk.g.col(k).dot(es.vectors.col(k))), 1.0, 1e-10);
  }
  const auto all = two_site_ground_block(trivial_env(), trivial_env(), mpo.sites[0], mpo.sites[1], 4);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(all.energies(k), es.values(k), 1e-12);
}

TEST(SplitAndShift, ExactWithoutTruncation) {
  std::mt19937_64 rng(3);
  const Tensor g = random_tensor({2, 2, 2, 3, 2}, rng);
  const auto right = split_and_shift(g, AbsorbSide::Right, 100);
  const Tensor rec = contract(right.site, {2}, right.carried, {0});
  EXPECT_LT((rec - g).norm(), 1e-12);
  EXPECT_LT(isometry_residual(right.site.matrix(2)), 1e-12);

  const auto left = split_and_shift(g, AbsorbSide::Left, 100);
  const Tensor rec2 = contract(left.carried, {3}, left.site, {0}).permuted({0, 1, 3, 4, 2});
  EXPECT_LT((rec2 - g).norm(), 1e-12);
  EXPECT_LT(isometry_residual(left.site.matrix(1).transpose()), 1e-12);
}

TEST(SplitAndShift, DiscardedWeightEqualsReconstructionError) {
  std::mt19937_64 rng(4);
  const Tensor g = random_tensor({3, 2, 2, 3, 2}, rng);
  const auto sp = split_and_shift(g, AbsorbSide::Right, 3);
  EXPECT_EQ(sp.kept, 3u);
  const Tensor rec = contract(sp.site, {2}, sp.carried, {0});
  const double err = (rec - g).norm();
  EXPECT_NEAR(err * err, sp.discarded_weight, 1e-12);
}

TEST(SplitAndShift, SingleStateDecimation) {
  std::mt19937_64 rng(5);
  Tensor g = random_tensor({2, 2, 2, 2, 1}, rng);
  g *= 1.0 / g.norm();
  const auto sp = split_and_shift(g, AbsorbSide::Right, 2);
  // Kept weight plus discarded weight is the state norm.
  EXPECT_NEAR(sp.carried.norm() * sp.carried.norm() + sp.discarded_weight, 1.0, 1e-12);
}

TEST(Dmrg, EightSiteIsingMatchesDense) {
  const IsingParams p{8, 1.0, 1.0};
  const Mpo mpo = build_tilted_ising_mpo(p);
  TargetConfig cfg;
  cfg.M = 8;
  cfg.D = 64;
  const NrgMps start = run_nrg(mpo, {64, false, 8}).state;
  const auto r = dmrg_sweep(start, mpo, cfg);
  const auto exact = sorted_eigenvalues(oracle::dense_tilted_ising(p));
  for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(r.spectrum.energies[k], exact[k], 1e-8);
  EXPECT_LT(max_isometry_residual(r.state), 1e-10);
  EXPECT_EQ(r.state.external.kind, ExternalLeg::Kind::Site);
}

TEST(Dmrg, TruncatedImprovesOnNrg) {
  const Mpo mpo = build_tilted_ising_mpo({16, 1.0, 1.0});
  const NrgMps start = run_nrg(mpo, {8, false, 8}).state;
  const double nrg_sum = energies_of(start, mpo).sum();
  TargetConfig cfg;
  cfg.M = 8;
  cfg.D = 8;
  cfg.sweeps = 3;
  const auto r = dmrg_sweep(start, mpo, cfg);
  double best = INFINITY;
  for (const auto& e : r.trace) best = std::min(best, e.energy_sum);
  EXPECT_LE(best, nrg_sum + 1e-10);
  EXPECT_LE(r.spectrum.sum(), nrg_sum + 1e-10);
  EXPECT_LT(max_isometry_residual(r.state), 1e-10);
}

TEST(Dmrg, ExtraSweepIsFixedPointNearConvergence) {
  const Mpo mpo = build_tilted_ising_mpo({8, 1.0, 1.0});
  TargetConfig cfg;
  cfg.M = 4;
  cfg.D = 32;
  cfg.sweeps = 4;
  const auto a = dmrg_sweep(run_nrg(mpo, {32, false, 4}).state, mpo, cfg);
  cfg.sweeps = 1;
  const auto b = dmrg_sweep(a.state, mpo, cfg);
  EXPECT_NEAR(a.spectrum.sum(), b.spectrum.sum(), 1e-9);
}

TEST(Dmrg, ValidatesConfig) {
  TargetConfig cfg;
  cfg.M = 0;
  EXPECT_THROW(cfg.validate(2), InvalidArgument);
  cfg.M = 10;
  cfg.D = 4;
  EXPECT_THROW(cfg.validate(2), InvalidArgument);
  cfg.D = 5;
  EXPECT_NO_THROW(cfg.validate(2));
}
