#pragma once

// Dense real tensors and the matrix factorizations the rest of the library
// builds on. Storage is row-major: the last index runs fastest.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace vnrg {

using Shape = std::vector<std::size_t>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

class Tensor {
 public:
  /// Rank-0 tensor holding 0.
  Tensor();
  /// Zero-filled tensor. Every extent must be at least 1.
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double value);
  static Tensor from_matrix(const Matrix& m);

  std::size_t rank() const { return shape_.size(); }
  const Shape& shape() const { return shape_; }
  std::size_t extent(std::size_t axis) const;
  std::size_t size() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  template <typename... Is>
  double& operator()(Is... idx) {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }
  template <typename... Is>
  double operator()(Is... idx) const {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }

  /// Same data viewed with a new shape of equal total size.
  Tensor reshaped(Shape shape) const;
  /// Result axis k is source axis perm[k].
  Tensor permuted(std::span<const std::size_t> perm) const;
  Tensor permuted(std::initializer_list<std::size_t> perm) const {
    return permuted(std::span<const std::size_t>(perm.begin(), perm.size()));
  }

  /// Groups the first `row_axes` indices into rows and the rest into columns.
  Matrix matrix(std::size_t row_axes) const;
  Eigen::Map<const Matrix> view(std::size_t rows, std::size_t cols) const;
  Eigen::Map<Matrix> view(std::size_t rows, std::size_t cols);

  double norm() const;
  double scalar_value() const;

  Tensor& operator*=(double alpha);
  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t offset(std::initializer_list<std::size_t> idx) const;

  Shape shape_;
  std::vector<double> data_;
};

Tensor operator*(double alpha, Tensor t);
Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);

std::size_t shape_size(const Shape& shape);

/// Sums over paired axes. The result carries a's free indices (in order)
/// followed by b's free indices.
Tensor contract(const Tensor& a, std::span<const std::size_t> axes_a, const Tensor& b,
                std::span<const std::size_t> axes_b);
Tensor contract(const Tensor& a, std::initializer_list<std::size_t> axes_a, const Tensor& b,
                std::initializer_list<std::size_t> axes_b);

struct EighResult {
  Vector values;   // ascending
  Matrix vectors;  // column k belongs to values[k]
};

/// Symmetric eigendecomposition. The input is symmetrized first.
EighResult eigh(const Matrix& m);

struct SvdResult {
  Matrix u;   // rows x k, orthonormal columns
  Vector s;   // k = min(rows, cols), nonincreasing
  Matrix vt;  // k x cols, orthonormal rows
};

SvdResult svd(const Matrix& m);

/// Orthonormal basis of the column span of m (rows >= cols), with the sign of
/// each column fixed so that R in m = QR has a nonnegative diagonal.
Matrix qr_isometrize(const Matrix& m);

/// max |QᵀQ - 1| over entries.
double isometry_residual(const Matrix& q);

}  // namespace vnrg
