#include "vnrg/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "vnrg/error.hpp"

extern "C" void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda, double* w,
                        double* work, const int* lwork, int* iwork, const int* liwork, int* info);

namespace vnrg {

namespace {

std::string shape_string(const Shape& s) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ')';
  return os.str();
}

void check_extents(const Shape& shape) {
  for (auto e : shape)
    if (e == 0) throw InvalidArgument("tensor extents must be >= 1, got " + shape_string(shape));
}

}  // namespace

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor() : data_(1, 0.0) {}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  check_extents(shape_);
  data_.assign(shape_size(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  check_extents(shape_);
  if (data_.size() != shape_size(shape_))
    throw InvalidArgument("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                          shape_string(shape_));
}

Tensor Tensor::scalar(double value) {
  Tensor t;
  t.data_[0] = value;
  return t;
}

Tensor Tensor::from_matrix(const Matrix& m) {
  Tensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  t.view(m.rows(), m.cols()) = m;
  return t;
}

std::size_t Tensor::extent(std::size_t axis) const {
  if (axis >= shape_.size())
    throw InvalidArgument("axis " + std::to_string(axis) + " out of range for rank " + std::to_string(rank()));
  return shape_[axis];
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> idx) const {
  std::size_t off = 0;
  auto it = idx.begin();
  for (std::size_t k = 0; k < shape_.size(); ++k, ++it) off = off * shape_[k] + *it;
  return off;
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size())
    throw InvalidArgument("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  return Tensor(std::move(shape), data_);
}

Tensor Tensor::permuted(std::span<const std::size_t> perm) const {
  const std::size_t r = rank();
  if (perm.size() != r) throw InvalidArgument("permutation length does not match tensor rank");
  std::vector<bool> seen(r, false);
  for (auto p : perm) {
    if (p >= r || seen[p]) throw InvalidArgument("invalid permutation");
    seen[p] = true;
  }
  bool identity = true;
  for (std::size_t k = 0; k < r; ++k) identity = identity && perm[k] == k;
  if (identity) return *this;

  std::vector<std::size_t> src_stride(r, 1);
  for (std::size_t k = r; k-- > 1;) src_stride[k - 1] = src_stride[k] * shape_[k];

  Shape out_shape(r);
  std::vector<std::size_t> stride(r);
  for (std::size_t k = 0; k < r; ++k) {
    out_shape[k] = shape_[perm[k]];
    stride[k] = src_stride[perm[k]];
  }
  Tensor out(out_shape);

  // Odometer over the output; the innermost axis is copied as a strided run.
  const std::size_t inner = out_shape[r - 1];
  const std::size_t inner_stride = stride[r - 1];
  std::vector<std::size_t> counter(r, 0);
  std::size_t src = 0;
  double* dst = out.data_.data();
  const std::size_t outer = out.size() / inner;
  for (std::size_t o = 0; o < outer; ++o) {
    const double* s = data_.data() + src;
    for (std::size_t i = 0; i < inner; ++i) dst[i] = s[i * inner_stride];
    dst += inner;
    for (std::size_t k = r - 1; k-- > 0;) {
      src += stride[k];
      if (++counter[k] < out_shape[k]) break;
      src -= stride[k] * out_shape[k];
      counter[k] = 0;
    }
  }
  return out;
}

Matrix Tensor::matrix(std::size_t row_axes) const {
  if (row_axes > rank()) throw InvalidArgument("row axis count exceeds rank");
  std::size_t rows = 1;
  for (std::size_t k = 0; k < row_axes; ++k) rows *= shape_[k];
  return view(rows, data_.size() / rows);
}

Eigen::Map<const Matrix> Tensor::view(std::size_t rows, std::size_t cols) const {
  if (rows * cols != data_.size()) throw InvalidArgument("matrix view size mismatch");
  return {data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

Eigen::Map<Matrix> Tensor::view(std::size_t rows, std::size_t cols) {
  if (rows * cols != data_.size()) throw InvalidArgument("matrix view size mismatch");
  return {data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

double Tensor::norm() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

double Tensor::scalar_value() const {
  if (data_.size() != 1) throw InvalidArgument("scalar_value on a tensor with more than one element");
  return data_[0];
}

Tensor& Tensor::operator*=(double alpha) {
  for (double& x : data_) x *= alpha;
  return *this;
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (other.shape_ != shape_) throw InvalidArgument("shape mismatch in tensor addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  if (other.shape_ != shape_) throw InvalidArgument("shape mismatch in tensor subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor operator*(double alpha, Tensor t) { return t *= alpha; }
Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }

Tensor contract(const Tensor& a, std::span<const std::size_t> axes_a, const Tensor& b,
                std::span<const std::size_t> axes_b) {
  if (axes_a.size() != axes_b.size()) throw InvalidArgument("contract: axis lists differ in length");
  std::vector<bool> used_a(a.rank(), false), used_b(b.rank(), false);
  std::size_t k = 1;
  for (std::size_t i = 0; i < axes_a.size(); ++i) {
    if (axes_a[i] >= a.rank() || axes_b[i] >= b.rank()) throw InvalidArgument("contract: axis out of range");
    if (used_a[axes_a[i]] || used_b[axes_b[i]]) throw InvalidArgument("contract: duplicate axis");
    used_a[axes_a[i]] = used_b[axes_b[i]] = true;
    if (a.shape()[axes_a[i]] != b.shape()[axes_b[i]])
      throw InvalidArgument("contract: extent mismatch on paired axes (" + std::to_string(a.shape()[axes_a[i]]) +
                            " vs " + std::to_string(b.shape()[axes_b[i]]) + ")");
    k *= a.shape()[axes_a[i]];
  }

  std::vector<std::size_t> perm_a, perm_b;
  Shape out_shape;
  std::size_t free_a = 1, free_b = 1;
  for (std::size_t i = 0; i < a.rank(); ++i)
    if (!used_a[i]) {
      perm_a.push_back(i);
      out_shape.push_back(a.shape()[i]);
      free_a *= a.shape()[i];
    }
  perm_a.insert(perm_a.end(), axes_a.begin(), axes_a.end());
  perm_b.assign(axes_b.begin(), axes_b.end());
  for (std::size_t i = 0; i < b.rank(); ++i)
    if (!used_b[i]) {
      perm_b.push_back(i);
      out_shape.push_back(b.shape()[i]);
      free_b *= b.shape()[i];
    }

  const Tensor pa = a.permuted(perm_a);
  const Tensor pb = b.permuted(perm_b);
  Tensor out = out_shape.empty() ? Tensor() : Tensor(out_shape);
  out.view(free_a, free_b).noalias() = pa.view(free_a, k) * pb.view(k, free_b);
  return out;
}

Tensor contract(const Tensor& a, std::initializer_list<std::size_t> axes_a, const Tensor& b,
                std::initializer_list<std::size_t> axes_b) {
  return contract(a, std::span<const std::size_t>(axes_a.begin(), axes_a.size()), b,
                  std::span<const std::size_t>(axes_b.begin(), axes_b.size()));
}

namespace {

// Eigen's tridiagonalization is unblocked; above this size LAPACK's divide and conquer is several times faster.
constexpr Eigen::Index kLapackEighMin = 128;

EighResult lapack_eigh(Eigen::MatrixXd a) {  // column-major, as LAPACK expects
  int n = static_cast<int>(a.rows());
  char jobz = 'V', uplo = 'L';
  int info = 0;
  Vector w(n);
  double wq = 0.0;
  int iwq = 0, lwork = -1, liwork = -1;
  dsyevd_(&jobz, &uplo, &n, a.data(), &n, w.data(), &wq, &lwork, &iwq, &liwork, &info);
  if (info != 0) throw NumericalError("eigh: workspace query failed");
  lwork = static_cast<int>(wq);
  liwork = iwq;
  std::vector<double> work(static_cast<std::size_t>(lwork));
  std::vector<int> iwork(static_cast<std::size_t>(liwork));
  dsyevd_(&jobz, &uplo, &n, a.data(), &n, w.data(), work.data(), &lwork, iwork.data(), &liwork, &info);
  if (info != 0) throw NumericalError("eigh: LAPACK dsyevd failed (info " + std::to_string(info) + ")");
  return {std::move(w), Matrix(a)};
}

}  // namespace

EighResult eigh(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("eigh: matrix is not square");
  if (m.rows() == 0) return {};
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  if (!sym.allFinite()) throw NumericalError("eigh: matrix has non-finite entries");
  if (sym.rows() >= kLapackEighMin) return lapack_eigh(std::move(sym));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericalError("eigh: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SvdResult svd(const Matrix& m) {
  if (m.size() == 0) return {};
  Eigen::BDCSVD<Eigen::MatrixXd> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV().transpose()};
}

Matrix qr_isometrize(const Matrix& m) {
  if (m.rows() < m.cols()) throw InvalidArgument("qr_isometrize: matrix has fewer rows than columns");
  if (m.cols() == 0) return m;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Matrix q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  const auto& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

double isometry_residual(const Matrix& q) {
  if (q.cols() == 0) return 0.0;
  const Matrix g = q.transpose() * q;
  return (g - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

}  // namespace vnrg
