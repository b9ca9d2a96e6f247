#include "vnrg/environments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vnrg/error.hpp"

namespace vnrg {

namespace {

void check_site(const EnvBlock& env, const Tensor& a, const Tensor& o, bool left) {
  if (a.rank() != 3 || o.rank() != 4 || env.tensor.rank() != 3) throw InvalidArgument("environment extend: bad ranks");
  const std::size_t bond = left ? a.extent(0) : a.extent(2);
  const std::size_t chan = left ? o.extent(0) : o.extent(3);
  if (env.ket_dim() != bond || env.bra_dim() != bond)
    throw InvalidArgument("environment extend: bond extent mismatch (" + std::to_string(env.ket_dim()) + " vs " +
                          std::to_string(bond) + ")");
  if (env.mpo_dim() != chan) throw InvalidArgument("environment extend: MPO bond extent mismatch");
  if (o.extent(1) != a.extent(1) || o.extent(2) != a.extent(1))
    throw InvalidArgument("environment extend: physical extent mismatch");
}

}  // namespace

EnvBlock trivial_env() { return {Tensor({1, 1, 1}, {1.0})}; }

EnvBlock left_extend(const EnvBlock& left, const Tensor& a, const Tensor& o) {
  check_site(left, a, o, true);
  Tensor t = contract(left.tensor, {0}, a, {0});  // (p, l', s, r)
  t = contract(t, {0, 2}, o, {0, 2});             // (l', r, s', q)
  t = contract(t, {0, 2}, a, {0, 1});             // (r, q, r')
  return {std::move(t)};
}

EnvBlock right_extend(const EnvBlock& right, const Tensor& a, const Tensor& o) {
  check_site(right, a, o, false);
  Tensor t = contract(a, {2}, right.tensor, {0});  // (l, s, q, r')
  t = contract(t, {1, 2}, o, {2, 3});              // (l, r', p, s')
  t = contract(t, {1, 3}, a, {2, 1});              // (l, p, l')
  return {std::move(t)};
}

std::vector<double> boundary_weights(std::size_t M, const WeightSpec& w, const Spectrum* spectrum) {
  if (w.beta < 0.0) throw InvalidArgument("weight beta must be >= 0");
  std::vector<double> out(M, 1.0);
  switch (w.kind) {
    case WeightSpec::Kind::Uniform:
      break;
    case WeightSpec::Kind::Position:
      for (std::size_t r = 0; r < M; ++r) out[r] = std::exp(-static_cast<double>(r));
      break;
    case WeightSpec::Kind::Boltzmann: {
      if (!spectrum) throw InvalidArgument("Boltzmann weights need a spectrum");
      if (spectrum->size() != M || spectrum->state_index.size() != M)
        throw InvalidArgument("spectrum size does not match the number of states");
      const double e0 = *std::min_element(spectrum->energies.begin(), spectrum->energies.end());
      for (std::size_t k = 0; k < M; ++k)
        out.at(spectrum->state_index[k]) = std::exp(-w.beta * (spectrum->energies[k] - e0));
      break;
    }
  }
  return out;
}

EnvBlock weighted_boundary(const std::vector<double>& weights) {
  const std::size_t M = weights.size();
  Tensor t({M, 1, M});
  for (std::size_t r = 0; r < M; ++r) t(r, 0, r) = weights[r];
  return {std::move(t)};
}

EnvBlock init_right_boundary(std::size_t M, const WeightSpec& w, const Spectrum* spectrum) {
  return weighted_boundary(boundary_weights(M, w, spectrum));
}

EnvironmentCache::EnvironmentCache(const std::vector<Tensor>& sites, const Mpo& mpo, EnvBlock left_boundary,
                                   EnvBlock right_boundary, std::size_t begin, std::size_t end)
    : sites_(&sites), mpo_(&mpo), begin_(begin), end_(end) {
  if (begin > end || end > sites.size() || sites.size() != mpo.length())
    throw InvalidArgument("environment cache: invalid site range");
  left_.resize(end - begin + 1);
  right_.resize(end - begin + 1);
  left_.front() = std::move(left_boundary);
  right_.back() = std::move(right_boundary);
}

EnvironmentCache::EnvironmentCache(const NrgMps& state, const Mpo& mpo, EnvBlock right_boundary)
    : EnvironmentCache(state.sites, mpo, trivial_env(), std::move(right_boundary), 0, state.length()) {}

const EnvBlock& EnvironmentCache::left(std::size_t j) {
  if (j < begin_ || j > end_) throw InvalidArgument("environment cache: left index out of range");
  std::size_t k = j - begin_;
  std::size_t valid = k;
  while (!left_[valid]) --valid;
  for (; valid < k; ++valid) {
    const std::size_t site = begin_ + valid;
    left_[valid + 1] = left_extend(*left_[valid], (*sites_)[site], mpo_->sites[site]);
    ++extends_;
  }
  return *left_[k];
}

const EnvBlock& EnvironmentCache::right(std::size_t j) {
  if (j < begin_ || j > end_) throw InvalidArgument("environment cache: right index out of range");
  std::size_t k = j - begin_;
  std::size_t valid = k;
  while (!right_[valid]) ++valid;
  for (; valid > k; --valid) {
    const std::size_t site = begin_ + valid - 1;
    right_[valid - 1] = right_extend(*right_[valid], (*sites_)[site], mpo_->sites[site]);
    ++extends_;
  }
  return *right_[k];
}

void EnvironmentCache::invalidate(std::size_t j) {
  if (j < begin_ || j >= end_) throw InvalidArgument("environment cache: site out of range");
  const std::size_t k = j - begin_;
  for (std::size_t i = k + 1; i < left_.size(); ++i) left_[i].reset();
  for (std::size_t i = 0; i <= k; ++i) right_[i].reset();
}

void EnvironmentCache::set_left_boundary(EnvBlock b) {
  left_.front() = std::move(b);
  for (std::size_t i = 1; i < left_.size(); ++i) left_[i].reset();
}

void EnvironmentCache::set_right_boundary(EnvBlock b) {
  right_.back() = std::move(b);
  for (std::size_t i = 0; i + 1 < right_.size(); ++i) right_[i].reset();
}

}  // namespace vnrg
