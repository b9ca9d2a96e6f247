#pragma once
// Shared helpers for the test suites: seeded random objects and small dense
// reference constructions that do not go through the library's own code.

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "vnrg/nrg_mps.hpp"
#include "vnrg/tensor.hpp"

namespace vnrg::test {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

inline Matrix random_symmetric(Eigen::Index dim, std::mt19937_64& rng) {
  const Matrix a = random_matrix(dim, dim, rng);
  return 0.5 * (a + a.transpose());
}

/// Orthonormal columns via Householder QR, independent of qr_isometrize.
inline Matrix random_isometry(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  const Eigen::MatrixXd a = random_matrix(rows, cols, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  return q;
}

inline Tensor random_tensor(const Shape& shape, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Tensor t(shape);
  for (auto& v : t.data()) v = n(rng);
  return t;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Operator `op` on site j of an n-site chain of local dimension d.
inline Matrix embed(const Matrix& op, std::size_t j, std::size_t n) {
  const auto d = op.rows();
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < n; ++k) out = kron(out, k == j ? op : Matrix(Matrix::Identity(d, d)));
  return out;
}

inline std::vector<double> sorted_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(0.5 * (h + h.transpose())), Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Drops all but the first M external states of a site-leg state (NRG keeps
/// them in ascending energy order).
inline NrgMps keep_lowest(NrgMps st, std::size_t M) {
  Tensor& last = st.sites.back();
  const std::size_t l = last.extent(0), d = last.extent(1);
  Tensor cut({l, d, M});
  for (std::size_t a = 0; a < l; ++a)
    for (std::size_t s = 0; s < d; ++s)
      for (std::size_t k = 0; k < M; ++k) cut(a, s, k) = last(a, s, k);
  last = cut;
  if (st.has_charges()) st.bond_charges.back().resize(M);
  return st;
}

/// Dense Hamiltonian diagonalized one conserved-charge block at a time.
struct FockBlock {
  std::vector<Eigen::Index> rows;
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

inline std::vector<FockBlock> charge_blocks(const Matrix& h, const std::vector<Charge>& charges) {
  std::map<Charge, std::vector<Eigen::Index>> rows;
  for (std::size_t i = 0; i < charges.size(); ++i) rows[charges[i]].push_back(static_cast<Eigen::Index>(i));
  std::vector<FockBlock> out;
  for (auto& [c, r] : rows) {
    const auto n = static_cast<Eigen::Index>(r.size());
    Eigen::MatrixXd sub(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < n; ++k) sub(i, k) = h(r[i], r[k]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
    out.push_back({std::move(r), es.eigenvalues(), es.eigenvectors()});
  }
  return out;
}

inline std::vector<double> block_levels(const std::vector<FockBlock>& blocks) {
  std::vector<double> all;
  for (const auto& b : blocks) all.insert(all.end(), b.values.data(), b.values.data() + b.values.size());
  std::sort(all.begin(), all.end());
  return all;
}

/// Lowest eigenvector over all blocks, as a full Fock-space vector.
inline Eigen::VectorXd block_ground_state(const std::vector<FockBlock>& blocks, Eigen::Index dim) {
  const FockBlock* best = nullptr;
  for (const auto& b : blocks)
    if (!best || b.values(0) < best->values(0)) best = &b;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  for (std::size_t i = 0; i < best->rows.size(); ++i) v(best->rows[i]) = best->vectors(static_cast<Eigen::Index>(i), 0);
  return v;
}

/// (energy, |<E|v>|^2) for every eigenvector of every block.
inline std::vector<std::pair<double, double>> block_weights(const std::vector<FockBlock>& blocks, const Eigen::VectorXd& v) {
  std::vector<std::pair<double, double>> out;
  for (const auto& b : blocks) {
    Eigen::VectorXd part(static_cast<Eigen::Index>(b.rows.size()));
    for (std::size_t i = 0; i < b.rows.size(); ++i) part(static_cast<Eigen::Index>(i)) = v(b.rows[i]);
    const Eigen::VectorXd amp = b.vectors.transpose() * part;
    for (Eigen::Index k = 0; k < amp.size(); ++k) out.emplace_back(b.values(k), amp(k) * amp(k));
  }
  return out;
}

/// Largest difference of sqrt(summed weight) between two (energy, weight)
/// lists, with levels closer than tol merged. Basis choice inside degenerate
/// multiplets drops out.
inline double level_weight_error(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b,
                                 double tol = 1e-9) {
  std::vector<std::pair<double, int>> all;
  for (const auto& [e, w] : a) all.emplace_back(e, 0);
  for (const auto& [e, w] : b) all.emplace_back(e, 1);
  std::sort(all.begin(), all.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double worst = 0.0;
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 0; k < all.size();) {
    std::size_t e = k + 1;
    while (e < all.size() && all[e].first - all[e - 1].first < tol) ++e;
    const double hi = all[e - 1].first;
    double wa = 0.0, wb = 0.0;
    while (ia < a.size() && a[ia].first <= hi) wa += a[ia++].second;
    while (ib < b.size() && b[ib].first <= hi) wb += b[ib++].second;
    worst = std::max(worst, std::abs(std::sqrt(wa) - std::sqrt(wb)));
    k = e;
  }
  return worst;
}

}  // namespace vnrg::test
