#include "vnrg/dmrg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vnrg/error.hpp"
#include "vnrg/nrg.hpp"

namespace vnrg {

void TargetConfig::validate(std::size_t max_physical_dim) const {
  if (M == 0 || D == 0) throw InvalidArgument("DMRG needs M >= 1 and D >= 1");
  if (sweeps == 0) throw InvalidArgument("DMRG needs at least one sweep");
  if (M > D * max_physical_dim)
    throw InvalidArgument("DMRG window cannot hold M = " + std::to_string(M) + " states with D = " + std::to_string(D));
  if (!(eig_tol > 0.0) || eig_max_iters == 0) throw InvalidArgument("invalid eigensolver settings");
  if (!(sweep_tol > 0.0)) throw InvalidArgument("sweep_tol must be > 0");
}

void apply_two_site(const EnvBlock& left, const EnvBlock& right, const Tensor& oj, const Tensor& oj1,
                    const Eigen::MatrixXd& in, Eigen::MatrixXd& out) {
  const std::size_t l = left.ket_dim(), s = oj.extent(1), t = oj1.extent(1), r = right.ket_dim();
  const std::size_t dim = l * s * t * r, k = static_cast<std::size_t>(in.cols());
  if (static_cast<std::size_t>(in.rows()) != dim) throw InvalidArgument("apply_two_site: vector length mismatch");
  // Column-major (dim x k) data is the row-major tensor (k, l, s, t, r).
  const Tensor x({k, l, s, t, r}, std::vector<double>(in.data(), in.data() + in.size()));
  Tensor y = contract(x, {1}, left.tensor, {0});  // (k, s, t, r, p, l')
  y = contract(y, {4, 1}, oj, {0, 2});            // (k, t, r, l', s', q)
  y = contract(y, {5, 1}, oj1, {0, 2});           // (k, r, l', s', t', u)
  y = contract(y, {1, 5}, right.tensor, {0, 1});  // (k, l', s', t', r')
  out.resize(in.rows(), in.cols());
  std::copy(y.data().begin(), y.data().end(), out.data());
}

TwoSiteBlock two_site_ground_block(const EnvBlock& left, const EnvBlock& right, const Tensor& oj, const Tensor& oj1,
                                   std::size_t M, const LanczosOptions& options, const Eigen::MatrixXd* guess) {
  if (oj.rank() != 4 || oj1.rank() != 4) throw InvalidArgument("two_site_ground_block: MPO tensors must be rank 4");
  if (left.mpo_dim() != oj.extent(0) || oj.extent(3) != oj1.extent(0) || oj1.extent(3) != right.mpo_dim())
    throw InvalidArgument("two_site_ground_block: MPO bond extents do not match the blocks");
  const std::size_t dim = left.ket_dim() * oj.extent(1) * oj1.extent(1) * right.ket_dim();
  if (M == 0 || M > dim)
    throw InvalidArgument("two_site_ground_block: window dimension " + std::to_string(dim) + " cannot hold " +
                          std::to_string(M) + " states");
  LanczosOptions opt = options;
  opt.num = M;
  const LinearOperator op = [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) {
    apply_two_site(left, right, oj, oj1, in, out);
  };
  const LanczosResult res = lowest_eigenpairs(op, dim, opt, guess);
  if (!res.converged)
    throw NumericalError("two-site eigensolver did not converge (residual " + std::to_string(res.max_residual) + ")");
  TwoSiteBlock out;
  out.g = res.vectors;
  out.energies = res.values;
  out.iterations = res.iterations;
  out.applications = res.applications;
  return out;
}

SplitResult split_and_shift(const Tensor& g, AbsorbSide side, std::size_t D) {
  if (g.rank() != 5) throw InvalidArgument("split_and_shift: window tensor must be (l, s, s', r, alpha)");
  if (D == 0) throw InvalidArgument("split_and_shift: D must be >= 1");
  const std::size_t l = g.extent(0), s = g.extent(1), t = g.extent(2), r = g.extent(3), m = g.extent(4);
  const bool right = side == AbsorbSide::Right;
  const SvdResult f = svd(right ? g.matrix(2) : g.permuted({0, 1, 4, 2, 3}).matrix(3));
  const double s0 = f.s.size() ? f.s(0) : 0.0;
  std::size_t k = 0;
  while (k < static_cast<std::size_t>(f.s.size()) && f.s(static_cast<Eigen::Index>(k)) > 1e-13 * s0) ++k;
  k = std::clamp<std::size_t>(k, 1, D);
  const auto ki = static_cast<Eigen::Index>(k);
  SplitResult out;
  out.kept = k;
  for (Eigen::Index i = ki; i < f.s.size(); ++i) out.discarded_weight += f.s(i) * f.s(i);
  if (right) {
    out.site = Tensor::from_matrix(f.u.leftCols(ki)).reshaped({l, s, k});
    const Matrix sv = f.s.head(ki).asDiagonal() * f.vt.topRows(ki);
    out.carried = Tensor::from_matrix(sv).reshaped({k, t, r, m});
  } else {
    out.site = Tensor::from_matrix(f.vt.topRows(ki)).reshaped({k, t, r});
    const Matrix us = f.u.leftCols(ki) * f.s.head(ki).asDiagonal();
    out.carried = Tensor::from_matrix(us).reshaped({l, s, m, k});
  }
  return out;
}

namespace {

Eigen::MatrixXd as_columns(const Tensor& t) {
  // Last axis enumerates the columns.
  const std::size_t cols = t.extent(t.rank() - 1);
  return t.view(t.size() / cols, cols);
}

Tensor window_tensor(const Matrix& g, std::size_t l, std::size_t s, std::size_t t, std::size_t r) {
  return Tensor::from_matrix(g).reshaped({l, s, t, r, static_cast<std::size_t>(g.cols())});
}

}  // namespace

DmrgResult dmrg_sweep(const NrgMps& initial, const Mpo& mpo, const TargetConfig& cfg) {
  initial.validate();
  mpo.validate();
  if (initial.length() != mpo.length() || initial.physical_dims() != mpo.physical_dims())
    throw InvalidArgument("state and MPO shapes differ");
  if (initial.external.kind != ExternalLeg::Kind::Site)
    throw InvalidArgument("DMRG needs the external leg on the last site");
  const std::size_t n = initial.length();
  if (n < 2) throw InvalidArgument("DMRG needs at least two sites");
  const auto dims = mpo.physical_dims();
  cfg.validate(*std::max_element(dims.begin(), dims.end()));

  DmrgResult out;
  NrgMps state = initial;
  state.bond_charges.clear();
  EnvironmentCache cache(state.sites, mpo, trivial_env(), trivial_env(), 0, n);
  LanczosOptions eig;
  eig.tol = cfg.eig_tol;
  eig.max_iters = cfg.eig_max_iters;
  eig.seed = cfg.seed;

  {
    const Tensor g = contract(state.sites[n - 2], {2}, state.sites[n - 1], {0});  // (l, s, s', a)
    Eigen::MatrixXd guess = as_columns(g);
    if (static_cast<std::size_t>(guess.cols()) > cfg.M) guess.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(cfg.M));
    std::size_t j = n - 2;
    std::size_t sweep_no = 1;
    bool leftward = n > 2;
    double last_sum = 0.0;
    bool have_last = false;

    for (;;) {
      const EnvBlock& lb = cache.left(j);
      const EnvBlock& rb = cache.right(j + 2);
      const TwoSiteBlock blk = two_site_ground_block(lb, rb, mpo.sites[j], mpo.sites[j + 1], cfg.M, eig, &guess);
      ++out.two_site_solves;
      out.operator_applications += blk.applications;
      const std::size_t l = lb.ket_dim(), r = rb.ket_dim();
      const Tensor g = window_tensor(blk.g, l, dims[j], dims[j + 1], r);
      DmrgTraceEntry entry{sweep_no, j, blk.energies.sum(), 0.0, blk.iterations};

      if (j == n - 2 && !leftward) {
        // This solve closes a sweep.
        const bool finished =
            sweep_no >= cfg.sweeps ||
            (have_last && std::abs(entry.energy_sum - last_sum) / std::max(1.0, std::abs(entry.energy_sum)) < cfg.sweep_tol);
        last_sum = entry.energy_sum;
        have_last = true;
        if (finished) {
          // Carry the external index to the chain end.
          const SplitResult sp = split_and_shift(g, AbsorbSide::Right, cfg.D);
          entry.discarded_weight = sp.discarded_weight;
          out.max_discarded_weight = std::max(out.max_discarded_weight, sp.discarded_weight);
          out.trace.push_back(entry);
          state.sites[j] = sp.site;
          cache.invalidate(j);
          break;
        }
        ++sweep_no;
        if (n == 2) {
          out.trace.push_back(entry);
          guess = blk.g;
          continue;
        }
        leftward = true;
      }

      if (leftward) {
        const SplitResult sp = split_and_shift(g, AbsorbSide::Left, cfg.D);
        entry.discarded_weight = sp.discarded_weight;
        state.sites[j + 1] = sp.site;
        cache.invalidate(j + 1);
        guess = as_columns(contract(state.sites[j - 1], {2}, sp.carried, {0}).permuted({0, 1, 2, 4, 3}));
        --j;
        if (j == 0) leftward = false;
      } else {
        const SplitResult sp = split_and_shift(g, AbsorbSide::Right, cfg.D);
        entry.discarded_weight = sp.discarded_weight;
        state.sites[j] = sp.site;
        cache.invalidate(j);
        guess = as_columns(contract(sp.carried, {2}, state.sites[j + 2], {0}).permuted({0, 1, 3, 4, 2}));
        ++j;
      }
      out.max_discarded_weight = std::max(out.max_discarded_weight, entry.discarded_weight);
      out.trace.push_back(entry);
    }
    out.sweeps = sweep_no;
  }

  // Last tensor: the M lowest states of H_ext at the final site.
  const Matrix h = extended_hamiltonian(cache.left(n - 1), mpo.sites[n - 1]);
  if (static_cast<std::size_t>(h.rows()) < cfg.M)
    throw InvalidArgument("final site cannot hold M = " + std::to_string(cfg.M) + " states");
  const EighResult e = eigh(h);
  const auto mi = static_cast<Eigen::Index>(cfg.M);
  state.sites[n - 1] = Tensor::from_matrix(e.vectors.leftCols(mi)).reshaped({cache.left(n - 1).ket_dim(), dims[n - 1], cfg.M});
  std::vector<double> ev(e.values.data(), e.values.data() + mi);
  out.spectrum = make_spectrum(ev);
  out.env_extends = cache.extends();
  out.state = std::move(state);
  return out;
}

}  // namespace vnrg
