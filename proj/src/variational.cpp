#include "vnrg/variational.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "vnrg/error.hpp"
#include "vnrg/nrg.hpp"

namespace vnrg {

void SweepConfig::validate() const {
  if (max_sweeps == 0) throw InvalidArgument("max_sweeps must be >= 1");
  if (!(site_tol > 0.0) || !(sweep_tol > 0.0)) throw InvalidArgument("sweep tolerances must be > 0");
  if (site_max_iters == 0) throw InvalidArgument("site_max_iters must be >= 1");
  if (D == 0) throw InvalidArgument("D must be >= 1");
  if (!(eig_tol > 0.0) || eig_max_iters == 0) throw InvalidArgument("invalid eigensolver settings");
  if (weight.beta < 0.0) throw InvalidArgument("weight beta must be >= 0");
  if (optimize_bond_tensor && use_sectors) throw InvalidArgument("the bond-tensor variant does not support sectors");
}

namespace {

void check_env(const EnvBlock& e, std::size_t mpo_dim, const char* what) {
  if (e.tensor.rank() != 3) throw InvalidArgument(std::string(what) + " block must be rank 3");
  if (e.mpo_dim() != mpo_dim) throw InvalidArgument(std::string(what) + " block does not match the MPO bond");
  if (e.ket_dim() != e.bra_dim()) throw InvalidArgument(std::string(what) + " block is not square in its state bonds");
}

std::vector<Matrix> slices(const Tensor& t) {
  // t is (q, rows..., cols...) viewed as q blocks of rows x cols, rows == cols.
  const std::size_t w = t.extent(0);
  const std::size_t n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(t.size() / w))));
  std::vector<Matrix> out;
  out.reserve(w);
  const double* base = t.data().data();
  for (std::size_t q = 0; q < w; ++q)
    out.emplace_back(Eigen::Map<const Matrix>(base + q * n * n, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  return out;
}

}  // namespace

CostData assemble_cost(const EnvBlock& left, const EnvBlock& right, const Tensor& o) {
  if (o.rank() != 4) throw InvalidArgument("assemble_cost: MPO tensor must be rank 4");
  check_env(left, o.extent(0), "left");
  check_env(right, o.extent(3), "right");
  CostData cd;
  cd.g = slices(contract(left.tensor, {1}, o, {0}).permuted({4, 0, 3, 1, 2}));  // (q, l, s, l', s')
  cd.r = slices(right.tensor.permuted({1, 0, 2}));
  cd.symmetric = true;
  return cd;
}

CostData assemble_cost_mirrored(const EnvBlock& left, const EnvBlock& right, const Tensor& o) {
  if (o.rank() != 4) throw InvalidArgument("assemble_cost_mirrored: MPO tensor must be rank 4");
  check_env(left, o.extent(0), "left");
  check_env(right, o.extent(3), "right");
  CostData cd;
  cd.g = slices(contract(o, {3}, right.tensor, {1}).permuted({0, 2, 3, 1, 4}));  // (p, s, r, s', r')
  cd.r = slices(left.tensor.permuted({1, 0, 2}));
  cd.symmetric = true;
  return cd;
}

std::vector<IsometryBlock> sector_blocks(const NrgMps& state, const Mpo& mpo, std::size_t j) {
  if (!state.has_charges() || !mpo.has_charges()) throw InvalidArgument("sector blocks need charge labels");
  const auto& lc = state.bond_charges.at(j);
  const auto& rc = state.bond_charges.at(j + 1);
  const auto& pc = mpo.physical_charges.at(j);
  const std::size_t d = pc.size();
  std::map<Charge, IsometryBlock> by_charge;
  for (std::size_t r = 0; r < rc.size(); ++r) by_charge[rc[r]].cols.push_back(r);
  for (std::size_t l = 0; l < lc.size(); ++l)
    for (std::size_t s = 0; s < d; ++s) {
      auto it = by_charge.find(lc[l] + pc[s]);
      if (it != by_charge.end()) it->second.rows.push_back(l * d + s);
    }
  std::vector<IsometryBlock> out;
  for (auto& [c, b] : by_charge) {
    if (b.rows.size() < b.cols.size())
      throw InvalidArgument("site " + std::to_string(j) + ": sector (" + std::to_string(c[0]) + "," +
                            std::to_string(c[1]) + ") has more states than its block can hold");
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

StiefelOptions site_options(const SweepConfig& cfg) {
  StiefelOptions opt;
  opt.tol = cfg.site_tol;
  opt.max_iters = cfg.site_max_iters;
  return opt;
}

OptReport optimize_left_site(Tensor& site, const CostData& cd, const StiefelOptions& opt) {
  const Shape shape = site.shape();
  auto [x, rep] = minimize(site.matrix(2), cd, opt);
  site = Tensor::from_matrix(x).reshaped(shape);
  return rep;
}

OptReport optimize_right_site(Tensor& site, const CostData& cd, const StiefelOptions& opt) {
  const std::size_t l = site.extent(0), s = site.extent(1), r = site.extent(2);
  auto [x, rep] = minimize(site.permuted({1, 2, 0}).matrix(2), cd, opt);
  site = Tensor::from_matrix(x).reshaped({s, r, l}).permuted({2, 0, 1});
  return rep;
}

SiteVisit make_visit(std::size_t sweep, std::size_t site, bool bond, const OptReport& rep) {
  return {sweep, site, bond, rep.initial_cost, rep.final_cost, rep.gradient_norm, rep.iterations};
}

double trace_of(const EnvBlock& full) {
  double t = 0.0;
  for (std::size_t a = 0; a < full.ket_dim(); ++a) t += full.tensor(a, 0, a);
  return t;
}

/// Projected Hamiltonian at a site external leg, given the block left of the
/// last site. Rows bra, columns ket.
Matrix last_site_projection(const EnvBlock& left, const Tensor& last, const Tensor& o) {
  const EnvBlock full = left_extend(left, last, o);
  const std::size_t M = last.extent(2);
  return full.tensor.view(M, M).transpose();
}

Spectrum rediagonalize_with(NrgMps& state, const Matrix& h) {
  const std::size_t M = state.num_states();
  const bool labelled = state.has_charges();
  std::vector<std::vector<std::size_t>> groups;
  std::vector<Charge> group_charge;
  if (labelled) {
    std::map<Charge, std::vector<std::size_t>> by;
    for (std::size_t a = 0; a < M; ++a) by[state.bond_charges.back()[a]].push_back(a);
    for (auto& [c, idx] : by) {
      groups.push_back(std::move(idx));
      group_charge.push_back(c);
    }
  } else {
    groups.emplace_back(M);
    std::iota(groups.back().begin(), groups.back().end(), 0);
    group_charge.push_back({0, 0});
  }
  // (energy, group, column within group)
  std::vector<std::tuple<double, std::size_t, std::size_t>> all;
  std::vector<EighResult> eigs;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& idx = groups[g];
    const auto k = static_cast<Eigen::Index>(idx.size());
    Matrix sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index m = 0; m < k; ++m) sub(i, m) = h(idx[i], idx[m]);
    eigs.push_back(eigh(sub));
    for (Eigen::Index c = 0; c < k; ++c) all.emplace_back(eigs.back().values(c), g, c);
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });

  Matrix u = Matrix::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
  std::vector<double> energies;
  std::vector<Charge> charges;
  for (std::size_t col = 0; col < all.size(); ++col) {
    const auto& [e, g, c] = all[col];
    for (std::size_t i = 0; i < groups[g].size(); ++i)
      u(groups[g][i], static_cast<Eigen::Index>(col)) = eigs[g].vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    energies.push_back(e);
    charges.push_back(group_charge[g]);
  }
  Tensor& last = state.sites.back();
  const Shape shape = last.shape();
  last = Tensor::from_matrix(last.matrix(2) * u).reshaped(shape);
  if (labelled) {
    state.bond_charges.back() = charges;
    return make_spectrum(energies, charges);
  }
  return make_spectrum(energies);
}

std::vector<double> phase_weights(const WeightSpec& w, std::size_t M, const Spectrum& spec) {
  return boundary_weights(M, w, w.kind == WeightSpec::Kind::Boltzmann ? &spec : nullptr);
}

}  // namespace

OptReport optimize_site(NrgMps& state, std::size_t j, const Mpo& mpo, EnvironmentCache& cache, const SweepConfig& cfg) {
  if (j >= state.length()) throw InvalidArgument("optimize_site: site " + std::to_string(j) + " out of range");
  if (state.external.kind != ExternalLeg::Kind::Site)
    throw InvalidArgument("optimize_site needs the external leg on the last site");
  const CostData cd = assemble_cost(cache.left(j), cache.right(j + 1), mpo.sites[j]);
  StiefelOptions opt = site_options(cfg);
  if (cfg.use_sectors) opt.blocks = sector_blocks(state, mpo, j);
  const OptReport rep = optimize_left_site(state.sites[j], cd, opt);
  cache.invalidate(j);
  return rep;
}

double weighted_cost(const NrgMps& state, const Mpo& mpo, const std::vector<double>& weights) {
  const Matrix h = projected_hamiltonian(state, mpo);
  if (weights.size() != static_cast<std::size_t>(h.rows())) throw InvalidArgument("weight count mismatch");
  double f = 0.0;
  for (std::size_t a = 0; a < weights.size(); ++a) f += weights[a] * h(a, a);
  return f;
}

Spectrum rediagonalize(NrgMps& state, const Mpo& mpo) {
  if (state.external.kind != ExternalLeg::Kind::Site) throw InvalidArgument("rediagonalize needs a site external leg");
  return rediagonalize_with(state, projected_hamiltonian(state, mpo));
}

Eigen::VectorXd optimize_bond_tensor(NrgMps& state, const EnvBlock& left, const EnvBlock& right, std::size_t M,
                                     const LanczosOptions& options) {
  if (state.external.kind != ExternalLeg::Kind::Bond) throw InvalidArgument("optimize_bond_tensor needs a bond external leg");
  check_env(left, right.mpo_dim(), "left");
  const std::size_t dl = left.ket_dim(), dr = right.ket_dim();
  const Tensor& c = state.bond_tensor;
  if (c.extent(0) != dl || c.extent(1) != dr) throw InvalidArgument("optimize_bond_tensor: blocks do not match the bond");
  if (M == 0 || M > dl * dr)
    throw InvalidArgument("optimize_bond_tensor: M = " + std::to_string(M) + " exceeds the bond space dimension " +
                          std::to_string(dl * dr));
  const std::vector<Matrix> lp = slices(left.tensor.permuted({1, 0, 2}));
  const std::vector<Matrix> rp = slices(right.tensor.permuted({1, 0, 2}));
  const auto dli = static_cast<Eigen::Index>(dl), dri = static_cast<Eigen::Index>(dr);
  const LinearOperator op = [&](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) {
    out.resize(in.rows(), in.cols());
    for (Eigen::Index k = 0; k < in.cols(); ++k) {
      const Eigen::Map<const Matrix> x(in.col(k).data(), dli, dri);
      Matrix y = Matrix::Zero(dli, dri);
      for (std::size_t p = 0; p < lp.size(); ++p) y.noalias() += lp[p].transpose() * x * rp[p];
      out.col(k) = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
    }
  };
  LanczosOptions opt = options;
  opt.num = M;
  Eigen::MatrixXd guess = c.matrix(2);
  const LanczosResult res = lowest_eigenpairs(op, dl * dr, opt, &guess);
  if (!res.converged)
    throw NumericalError("bond eigensolver did not converge (residual " + std::to_string(res.max_residual) + ")");
  Matrix v = res.vectors;
  state.bond_tensor = Tensor::from_matrix(v).reshaped({dl, dr, M});
  return res.values;
}

namespace {

struct Split {
  Matrix u;
  Vector s;
  Matrix vt;
  bool truncated = false;
};

Split split(const Matrix& m, std::optional<std::size_t> cap) {
  SvdResult r = svd(m);
  std::size_t k = 0;
  const double s0 = r.s.size() ? r.s(0) : 0.0;
  while (k < static_cast<std::size_t>(r.s.size()) && r.s(static_cast<Eigen::Index>(k)) > 1e-13 * s0) ++k;
  k = std::max<std::size_t>(k, 1);
  Split out;
  if (cap && k > *cap) {
    k = *cap;
    out.truncated = true;
  }
  const auto ki = static_cast<Eigen::Index>(k);
  out.u = r.u.leftCols(ki);
  out.s = r.s.head(ki);
  out.vt = r.vt.topRows(ki);
  return out;
}

/// Closest isometry (rows >= cols) in Frobenius norm.
Matrix polar(const Matrix& m) {
  const SvdResult r = svd(m);
  return r.u * r.vt;
}

}  // namespace

NrgMps move_external_index(const NrgMps& state, Direction direction, std::optional<std::size_t> max_bond) {
  state.validate();
  if (state.has_charges()) throw InvalidArgument("moving the external leg of a sector-labelled state is not supported");
  if (max_bond && *max_bond == 0) throw InvalidArgument("max_bond must be >= 1");
  const std::size_t n = state.length();
  if (n < 2) throw InvalidArgument("a single-site chain has no bond to move to");
  NrgMps out = state;
  const bool at_site = state.external.kind == ExternalLeg::Kind::Site;
  const std::size_t b = state.external.position;
  const std::size_t M = state.num_states();

  if (direction == Direction::Left) {
    if (!at_site && b == 0) throw InvalidArgument("cannot move the external leg past the left end");
    const Tensor joined = at_site ? state.sites.back().reshaped({state.sites.back().extent(0), state.sites.back().extent(1), 1, M})
                                  : contract(state.sites[b], {2}, state.bond_tensor, {0});  // (l, s, r, a)
    const std::size_t j = at_site ? n - 1 : b;
    const std::size_t l = joined.extent(0), s = joined.extent(1), r = joined.extent(2);
    const Split sp = split(joined.permuted({0, 3, 1, 2}).matrix(2), max_bond);
    const std::size_t k = static_cast<std::size_t>(sp.s.size());
    out.sites[j] = Tensor::from_matrix(sp.vt).reshaped({k, s, r});
    Matrix us = sp.u * sp.s.asDiagonal();
    Tensor c = Tensor::from_matrix(us).reshaped({l, M, k}).permuted({0, 2, 1});
    if (sp.truncated) c = Tensor::from_matrix(polar(c.matrix(2))).reshaped({l, k, M});
    out.bond_tensor = std::move(c);
    out.external = {ExternalLeg::Kind::Bond, j - 1};
    return out;
  }

  if (at_site) throw InvalidArgument("cannot move the external leg past the right end");
  const Tensor& next = state.sites[b + 1];
  const Tensor joined = contract(state.bond_tensor, {1}, next, {0}).permuted({0, 2, 3, 1});  // (l, s, r, a)
  const std::size_t l = joined.extent(0), s = joined.extent(1), r = joined.extent(2);
  if (b + 2 == n) {
    out.sites[n - 1] = joined.reshaped({l, s, M});
    out.bond_tensor = Tensor();
    out.external = {ExternalLeg::Kind::Site, n - 1};
    return out;
  }
  const Split sp = split(joined.matrix(2), max_bond);
  const std::size_t k = static_cast<std::size_t>(sp.s.size());
  out.sites[b + 1] = Tensor::from_matrix(sp.u).reshaped({l, s, k});
  Matrix svt = sp.s.asDiagonal() * sp.vt;
  Tensor c = Tensor::from_matrix(svt).reshaped({k, r, M});
  if (sp.truncated) c = Tensor::from_matrix(polar(c.matrix(2))).reshaped({k, r, M});
  out.bond_tensor = std::move(c);
  out.external = {ExternalLeg::Kind::Bond, b + 1};
  return out;
}

namespace {

SweepResult cheap_sweep(NrgMps state, const Mpo& mpo, const SweepConfig& cfg) {
  const std::size_t n = state.length();
  const std::size_t M = state.num_states();
  const bool boltzmann = cfg.weight.kind == WeightSpec::Kind::Boltzmann;
  SweepResult out;
  SweepReport& rep = out.report;

  Spectrum spec;
  if (boltzmann) spec = rediagonalize(state, mpo);
  EnvironmentCache cache(state, mpo, weighted_boundary(phase_weights(cfg.weight, M, spec)));
  const StiefelOptions base = site_options(cfg);

  auto visit = [&](std::size_t sweep_no, std::size_t j) {
    const CostData cd = assemble_cost(cache.left(j), cache.right(j + 1), mpo.sites[j]);
    StiefelOptions opt = base;
    if (cfg.use_sectors) opt.blocks = sector_blocks(state, mpo, j);
    const OptReport r = optimize_left_site(state.sites[j], cd, opt);
    cache.invalidate(j);
    rep.optimizer_iterations += r.iterations;
    rep.visits.push_back(make_visit(sweep_no, j, false, r));
  };

  rep.phase_starts.push_back(0);
  rep.sweep_costs.push_back(trace_of(cache.left(n)));
  for (std::size_t sweep_no = 1; sweep_no <= cfg.max_sweeps; ++sweep_no) {
    for (std::size_t j = n - 1; j-- > 0;) visit(sweep_no, j);
    for (std::size_t j = 1; j < n; ++j) {
      if (j == n - 1 && boltzmann) {
        spec = rediagonalize_with(state, last_site_projection(cache.left(n - 1), state.sites[n - 1], mpo.sites[n - 1]));
        cache.invalidate(n - 1);
        cache.set_right_boundary(weighted_boundary(phase_weights(cfg.weight, M, spec)));
        rep.phase_starts.push_back(rep.visits.size());
      }
      visit(sweep_no, j);
    }
    if (n == 1) visit(sweep_no, 0);
    rep.sweeps = sweep_no;
    const double f = trace_of(cache.left(n));
    const double prev = rep.sweep_costs.back();
    rep.sweep_costs.push_back(f);
    if (std::abs(prev - f) / std::max(1.0, std::abs(f)) < cfg.sweep_tol) {
      rep.converged = true;
      break;
    }
  }
  out.spectrum = rediagonalize_with(state, last_site_projection(cache.left(n - 1), state.sites[n - 1], mpo.sites[n - 1]));
  rep.env_extends = cache.extends();
  out.state = std::move(state);
  return out;
}

double bond_cost(const Tensor& c, const EnvBlock& left, const EnvBlock& right, const std::vector<double>& w) {
  Tensor t = contract(left.tensor, {0}, c, {0});  // (p, l', r, a)
  t = contract(t, {0, 2}, right.tensor, {1, 0});  // (l', a, r')
  t = contract(t, {0, 2}, c, {0, 1});             // (a, a')
  double f = 0.0;
  for (std::size_t a = 0; a < w.size(); ++a) f += w[a] * t(a, a);
  return f;
}

Tensor weight_states(const Tensor& c, const std::vector<double>& w) {
  Tensor out = c;
  const std::size_t m = c.extent(2);
  auto data = out.data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= w[i % m];
  return out;
}

SweepResult bond_sweep(NrgMps state, const Mpo& mpo, const SweepConfig& cfg) {
  const std::size_t n = state.length();
  if (n < 2) throw InvalidArgument("the bond-tensor variant needs at least two sites");
  const std::size_t M = state.num_states();
  state.bond_charges.clear();
  const std::size_t b = n / 2 - 1;
  for (std::size_t pos = n - 1; pos > b; --pos) state = move_external_index(state, Direction::Left, cfg.D);

  SweepResult out;
  SweepReport& rep = out.report;
  EnvironmentCache left_cache(state.sites, mpo, trivial_env(), trivial_env(), 0, b + 1);
  EnvironmentCache right_cache(state.sites, mpo, trivial_env(), trivial_env(), b + 1, n);
  const StiefelOptions base = site_options(cfg);
  LanczosOptions eig;
  eig.tol = cfg.eig_tol;
  eig.max_iters = cfg.eig_max_iters;

  const std::vector<double> uniform(M, 1.0);
  rep.sweep_costs.push_back(bond_cost(state.bond_tensor, left_cache.left(b + 1), right_cache.right(b + 1), uniform));
  for (std::size_t sweep_no = 1; sweep_no <= cfg.max_sweeps; ++sweep_no) {
    const EnvBlock& lb = left_cache.left(b + 1);
    const EnvBlock& rb = right_cache.right(b + 1);

    // The eigenvector solve also defines the energies that fix Boltzmann
    // weights, so every sweep opens a new fixed-weight phase here.
    Spectrum before;
    std::vector<double> w = cfg.weight.kind == WeightSpec::Kind::Boltzmann ? uniform : phase_weights(cfg.weight, M, before);
    const double cost_before = bond_cost(state.bond_tensor, lb, rb, w);
    const Eigen::VectorXd vals = optimize_bond_tensor(state, lb, rb, M, eig);
    const std::vector<double> ev(vals.data(), vals.data() + vals.size());
    const Spectrum spec = make_spectrum(ev);
    w = phase_weights(cfg.weight, M, spec);
    rep.phase_starts.push_back(rep.visits.size());
    SiteVisit v{sweep_no, b, true, cost_before, 0.0, 0.0, 1};
    for (std::size_t a = 0; a < M; ++a) v.cost_after += w[a] * ev[a];
    if (cfg.weight.kind == WeightSpec::Kind::Boltzmann) v.cost_before = v.cost_after;
    rep.visits.push_back(v);

    const Tensor cw = weight_states(state.bond_tensor, w);
    {
      Tensor t = contract(cw, {1}, rb.tensor, {0});                     // (l, a, q, r')
      t = contract(t, {3, 1}, state.bond_tensor, {1, 2});               // (l, q, l')
      left_cache.set_right_boundary({std::move(t)});
    }
    for (std::size_t j = b + 1; j-- > 0;) {
      const OptReport r = optimize_left_site(
          state.sites[j], assemble_cost(left_cache.left(j), left_cache.right(j + 1), mpo.sites[j]), base);
      left_cache.invalidate(j);
      rep.optimizer_iterations += r.iterations;
      rep.visits.push_back(make_visit(sweep_no, j, false, r));
    }
    for (std::size_t j = 1; j <= b; ++j) {
      const OptReport r = optimize_left_site(
          state.sites[j], assemble_cost(left_cache.left(j), left_cache.right(j + 1), mpo.sites[j]), base);
      left_cache.invalidate(j);
      rep.optimizer_iterations += r.iterations;
      rep.visits.push_back(make_visit(sweep_no, j, false, r));
    }
    {
      Tensor t = contract(cw, {0}, left_cache.left(b + 1).tensor, {0});  // (r, a, p, l')
      t = contract(t, {3, 1}, state.bond_tensor, {0, 2});                // (r, p, r')
      right_cache.set_left_boundary({std::move(t)});
    }
    for (std::size_t j = b + 1; j < n; ++j) {
      const OptReport r = optimize_right_site(
          state.sites[j], assemble_cost_mirrored(right_cache.left(j), right_cache.right(j + 1), mpo.sites[j]), base);
      right_cache.invalidate(j);
      rep.optimizer_iterations += r.iterations;
      rep.visits.push_back(make_visit(sweep_no, j, false, r));
    }
    for (std::size_t j = n - 1; j-- > b + 1;) {
      const OptReport r = optimize_right_site(
          state.sites[j], assemble_cost_mirrored(right_cache.left(j), right_cache.right(j + 1), mpo.sites[j]), base);
      right_cache.invalidate(j);
      rep.optimizer_iterations += r.iterations;
      rep.visits.push_back(make_visit(sweep_no, j, false, r));
    }

    rep.sweeps = sweep_no;
    const double f = bond_cost(state.bond_tensor, left_cache.left(b + 1), right_cache.right(b + 1), uniform);
    const double prev = rep.sweep_costs.back();
    rep.sweep_costs.push_back(f);
    if (std::abs(prev - f) / std::max(1.0, std::abs(f)) < cfg.sweep_tol) {
      rep.converged = true;
      break;
    }
  }
  rep.env_extends = left_cache.extends() + right_cache.extends();
  for (std::size_t pos = b; pos + 1 < n; ++pos) state = move_external_index(state, Direction::Right);
  out.spectrum = rediagonalize(state, mpo);
  out.state = std::move(state);
  return out;
}

}  // namespace

SweepResult sweep(NrgMps state, const Mpo& mpo, const SweepConfig& cfg) {
  cfg.validate();
  state.validate();
  mpo.validate();
  if (state.length() != mpo.length() || state.physical_dims() != mpo.physical_dims())
    throw InvalidArgument("state and MPO shapes differ");
  if (state.external.kind != ExternalLeg::Kind::Site) throw InvalidArgument("sweep needs the external leg on the last site");
  if (cfg.M != 0 && cfg.M != state.num_states())
    throw InvalidArgument("configured M = " + std::to_string(cfg.M) + " but the state carries " +
                          std::to_string(state.num_states()) + " states");
  if (cfg.use_sectors) {
    if (!state.has_charges() || !mpo.has_charges()) throw InvalidArgument("sector mode needs charge-labelled inputs");
  } else {
    state.bond_charges.clear();
  }
  SweepResult res = cfg.optimize_bond_tensor ? bond_sweep(std::move(state), mpo, cfg) : cheap_sweep(std::move(state), mpo, cfg);
  const std::vector<double> w = phase_weights(cfg.weight, res.spectrum.size(), res.spectrum);
  for (std::size_t k = 0; k < res.spectrum.size(); ++k) res.spectrum.weights[k] = w[res.spectrum.state_index[k]];
  return res;
}

}  // namespace vnrg
