#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "vnrg/diagnostics.hpp"
#include "vnrg/error.hpp"
#include "vnrg/models.hpp"
#include "vnrg/nrg.hpp"
#include "vnrg/oracles.hpp"
#include "vnrg/variational.hpp"

using namespace vnrg;
using namespace vnrg::test;

namespace {

/// Two-site NrgMps holding the given dense vectors (columns).
NrgMps two_site_state(const Matrix& vectors) {
  NrgMps st;
  Tensor a({1, 2, 2});
  a(0, 0, 0) = a(0, 1, 1) = 1.0;
  st.sites.push_back(a);
  const auto m = static_cast<std::size_t>(vectors.cols());
  Tensor b({2, 2, m});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < m; ++k) b(i / 2, i % 2, k) = vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  st.sites.push_back(b);
  st.external = {ExternalLeg::Kind::Site, 1};
  return st;
}

SiamParams six_site_siam() {
  SiamParams p;
  p.N = 4;
  p.U = 0.1;
  p.eps_f = -0.05;
  p.xi0 = 0.01;
  p.lambda = 2.0;
  return p;
}

}  // namespace

TEST(Variance, ExactEigenstatesVanish) {
  const Mpo mpo = build_tilted_ising_mpo({5, 1.0, 1.0});
  const auto r = run_nrg(mpo, {32, false, std::nullopt});
  for (double v : variances(r.state, mpo)) EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(Variance, EqualSuperposition) {
  const Mpo mpo = build_tilted_ising_mpo({2, 0.0, 0.0});
  const auto es = eigh(kron(pauli_x(), pauli_x()));
  Matrix psi(4, 1);
  psi.col(0) = (es.vectors.col(0) + es.vectors.col(3)) / std::sqrt(2.0);
  const NrgMps st = two_site_state(psi);
  EXPECT_NEAR(variance(st, 0, mpo), 1.0, 1e-14);
  EXPECT_NEAR(expectation_values(st, mpo)[0], 0.0, 1e-14);
}

TEST(Variance, RandomStateMatchesDense) {
  const Mpo mpo = build_tilted_ising_mpo({5, 1.0, 1.0});
  const NrgMps st = random_nrg_mps(mpo.physical_dims(), 3, 3, 12);
  const Matrix v = oracle::dense_states(st);
  const Matrix h = oracle::dense_from_mpo(mpo);
  const auto var = variances(st, mpo);
  const auto ev = expectation_values(st, mpo);
  for (Eigen::Index a = 0; a < 3; ++a) {
    const Eigen::VectorXd hv = h * v.col(a);
    const double e = v.col(a).dot(hv);
    EXPECT_NEAR(ev[static_cast<std::size_t>(a)], e, 1e-12);
    EXPECT_NEAR(var[static_cast<std::size_t>(a)], hv.squaredNorm() - e * e, 1e-10);
  }
  EXPECT_THROW(variance(st, 3, mpo), InvalidArgument);
}

TEST(Variance, BondExternalLeg) {
  const Mpo mpo = build_tilted_ising_mpo({6, 1.0, 1.0});
  const NrgMps st = random_nrg_mps(mpo.physical_dims(), 4, 2, 13);
  const NrgMps moved = move_external_index(move_external_index(st, Direction::Left), Direction::Left);
  const auto a = variances(st, mpo), b = variances(moved, mpo);
  EXPECT_LT(max_abs_diff(a, b), 1e-10);
}

TEST(FidelityBound, Formula) {
  EXPECT_EQ(fidelity_bound(0.0, 1.0), 1.0);
  EXPECT_NEAR(fidelity_bound(0.1, 1.0), 0.858578643762690, 1e-14);
  EXPECT_THROW(fidelity_bound(0.1, 0.0), InvalidArgument);
  EXPECT_THROW(fidelity_bound(-0.1, 1.0), InvalidArgument);
}

TEST(EnergyErrorBound, Formula) {
  EXPECT_EQ(energy_error_bound(0.0, 3.0), 0.0);
  EXPECT_NEAR(energy_error_bound(0.01, 2.0), 0.02, 1e-16);
}

TEST(EnergyError, SpectralWidthBoundHolds) {
  // <H> - E_j = eps^2 (<Phi|H|Phi> - E_j), so |<H> - E_j| <= eps^2 max_k |E_k - E_j|.
  const IsingParams p{6, 0.0, 1.0};
  const Mpo mpo = build_tilted_ising_mpo(p);
  const auto st = run_nrg(mpo, {3, false, 3}).state;
  const auto es = eigh(oracle::dense_tilted_ising(p));
  const Matrix v = oracle::dense_states(st);
  const auto ev = expectation_values(st, mpo);
  for (Eigen::Index a = 0; a < v.cols(); ++a) {
    const Eigen::VectorXd ov = es.vectors.transpose() * v.col(a);
    Eigen::Index j = 0;
    ov.cwiseAbs().maxCoeff(&j);
    const double eps2 = 1.0 - ov(j) * ov(j);
    const double width = std::max(std::abs(es.values(0) - es.values(j)), std::abs(es.values(es.values.size() - 1) - es.values(j)));
    EXPECT_LE(std::abs(ev[static_cast<std::size_t>(a)] - es.values(j)), eps2 * width + 1e-12);
  }
}

TEST(StateFidelity, OrthonormalStates) {
  const Mpo mpo = build_tilted_ising_mpo({6, 1.0, 1.0});
  const auto st = run_nrg(mpo, {4, false, 4}).state;
  EXPECT_NEAR(state_fidelity(st, 0, st, 0), 1.0, 1e-12);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      if (a != b) {
        EXPECT_NEAR(state_fidelity(st, a, st, b), 0.0, 1e-10);
      }
}

TEST(StateFidelity, NrgAndVnrgGroundStatesAreExact) {
  const IsingParams p{4, 1.0, 1.0};
  const Mpo mpo = build_tilted_ising_mpo(p);
  auto nrg = run_nrg(mpo, {16, false, std::nullopt});
  nrg.state = keep_lowest(nrg.state, 3);
  nrg.spectrum = energies_of(nrg.state, mpo);
  const auto vn = sweep(nrg.state, mpo, {});
  const auto es = eigh(oracle::dense_tilted_ising(p));
  for (const NrgMps* s : {static_cast<const NrgMps*>(&nrg.state), &vn.state}) {
    const auto idx = energies_of(*s, mpo).state_index[0];
    const Matrix v = oracle::dense_states(*s);
    EXPECT_NEAR(std::abs(v.col(static_cast<Eigen::Index>(idx)).dot(es.vectors.col(0))), 1.0, 1e-8);
  }
  EXPECT_NEAR(state_fidelity(nrg.state, nrg.spectrum.state_index[0], vn.state, vn.spectrum.state_index[0]), 1.0, 1e-8);
}

TEST(MatrixElements, SelectionRule) {
  const auto p = six_site_siam();
  const Mpo mpo = build_siam_mpo(p);
  const auto r = run_nrg(mpo, {64, true, 64});
  const OperatorSpec op{0, fermion::annihilator(fermion::kUp), std::nullopt};
  const std::size_t ground = r.spectrum.state_index[0];
  const auto col = operator_column(r.state, op, ground);
  const auto labels = r.state.state_charges();
  const Charge target = labels[ground] - Charge{1, 0};
  for (std::size_t j = 0; j < col.size(); ++j)
    if (labels[j] != target) {
      EXPECT_NEAR(col[j], 0.0, 1e-12);
    }
}

TEST(MatrixElements, MatchDenseFockSpace) {
  const auto p = six_site_siam();
  const Mpo mpo = build_siam_mpo(p);
  const auto r = run_nrg(mpo, {4096, true, std::nullopt});
  const Matrix h = oracle::dense_siam(p);
  const auto blocks = charge_blocks(h, oracle::fock_charges(p.sites()));
  const auto levels = block_levels(blocks);
  ASSERT_GT(levels[1] - levels[0], 1e-6) << "ground state must be unique";
  const Eigen::VectorXd g = block_ground_state(blocks, h.rows());
  std::vector<double> energy_of(r.spectrum.size());
  for (std::size_t k = 0; k < r.spectrum.size(); ++k) energy_of[r.spectrum.state_index[k]] = r.spectrum.energies[k];
  for (int spin : {fermion::kUp, fermion::kDown}) {
    const Eigen::VectorXd dg = oracle::dense_annihilator(p.sites(), 0, spin) * g;
    const OperatorSpec op{0, fermion::annihilator(spin), std::nullopt};
    const auto col = operator_column(r.state, op, r.spectrum.state_index[0]);
    ASSERT_EQ(col.size(), energy_of.size());
    std::vector<std::pair<double, double>> got;
    for (std::size_t j = 0; j < col.size(); ++j) got.emplace_back(energy_of[j], col[j] * col[j]);
    EXPECT_LT(level_weight_error(block_weights(blocks, dg), got), 1e-9);
    const auto top = impurity_matrix_elements(r.state, op, r.spectrum.state_index[0], 5);
    ASSERT_EQ(top.size(), 5u);
    for (std::size_t i = 1; i < top.size(); ++i) EXPECT_GE(top[i - 1].value, top[i].value);
    EXPECT_TRUE(top[0].sector.has_value());
  }
}

TEST(AccuracyRecords, WithExactLevels) {
  const IsingParams p{6, 1.0, 1.0};
  const Mpo mpo = build_tilted_ising_mpo(p);
  const auto st = keep_lowest(run_nrg(mpo, {64, false, std::nullopt}).state, 5);
  const auto exact = sorted_eigenvalues(oracle::dense_tilted_ising(p));
  const auto recs = accuracy_records(st, mpo, &exact);
  ASSERT_EQ(recs.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_FALSE(recs[k].gap_estimated);
    EXPECT_NEAR(*recs[k].energy_error, 0.0, 1e-10);
    EXPECT_NEAR(recs[k].gap, std::min(k ? exact[k] - exact[k - 1] : INFINITY, exact[k + 1] - exact[k]), 1e-10);
    EXPECT_NEAR(recs[k].fidelity_bound, 1.0, 1e-4);
  }
  const auto est = accuracy_records(st, mpo);
  EXPECT_TRUE(est[0].gap_estimated);
  std::vector<double> few(exact.begin(), exact.begin() + 3);
  EXPECT_THROW(accuracy_records(st, mpo, &few), InvalidArgument);
}
