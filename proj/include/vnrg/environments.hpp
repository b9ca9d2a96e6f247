#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vnrg/mpo.hpp"
#include "vnrg/nrg_mps.hpp"
#include "vnrg/tensor.hpp"

namespace vnrg {

/// Partial contraction of ket, MPO and bra layers on one side of a cut.
/// Left blocks are indexed (l, p, l') and right blocks (r, q, r'), with the
/// ket bond first and the bra bond last.
struct EnvBlock {
  Tensor tensor;

  std::size_t ket_dim() const { return tensor.extent(0); }
  std::size_t mpo_dim() const { return tensor.extent(1); }
  std::size_t bra_dim() const { return tensor.extent(2); }
};

/// The 1x1x1 unit block.
EnvBlock trivial_env();

/// L'(r,q,r') = sum L(l,p,l') A(l,s,r) A(l',s',r') O(p,s',s,q)
EnvBlock left_extend(const EnvBlock& left, const Tensor& site, const Tensor& mpo_site);

/// R'(l,p,l') = sum R(r,q,r') A(l,s,r) A(l',s',r') O(p,s',s,q)
EnvBlock right_extend(const EnvBlock& right, const Tensor& site, const Tensor& mpo_site);

struct WeightSpec {
  enum class Kind { Uniform, Position, Boltzmann };
  Kind kind = Kind::Uniform;
  double beta = 0.0;
};

/// Per-state weights w_alpha indexed by external index. Boltzmann weights are
/// exp(-beta (E_alpha - E_0)) and need the spectrum.
std::vector<double> boundary_weights(std::size_t M, const WeightSpec& w, const Spectrum* spectrum = nullptr);

/// M x 1 x M block with the weights on the diagonal.
EnvBlock init_right_boundary(std::size_t M, const WeightSpec& w, const Spectrum* spectrum = nullptr);
EnvBlock weighted_boundary(const std::vector<double>& weights);

/// Left and right blocks for the site range [begin, end) of a chain, computed
/// lazily and invalidated per site. left(j) covers sites [begin, j) and
/// right(j) covers [j, end); left(begin) and right(end) are the boundaries.
///
/// The cache reads the site tensors through a reference, so the vector must
/// outlive it and every in-place change must be followed by invalidate().
class EnvironmentCache {
 public:
  EnvironmentCache(const std::vector<Tensor>& sites, const Mpo& mpo, EnvBlock left_boundary,
                   EnvBlock right_boundary, std::size_t begin, std::size_t end);
  EnvironmentCache(const NrgMps& state, const Mpo& mpo, EnvBlock right_boundary);

  const EnvBlock& left(std::size_t j);
  const EnvBlock& right(std::size_t j);

  /// Marks blocks depending on site j as stale.
  void invalidate(std::size_t j);
  void set_left_boundary(EnvBlock b);
  void set_right_boundary(EnvBlock b);

  std::size_t begin() const { return begin_; }
  std::size_t end() const { return end_; }
  /// Number of extend operations performed so far.
  std::size_t extends() const { return extends_; }

 private:
  const std::vector<Tensor>* sites_;
  const Mpo* mpo_;
  std::size_t begin_, end_;
  std::vector<std::optional<EnvBlock>> left_, right_;
  std::size_t extends_ = 0;
};

}  // namespace vnrg
