#pragma once

// Dense complex matrix kernel: structured products (Kronecker, Khatri-Rao),
// vec/unvec reshapes, the vec(A (x) B) permutation, rank-one approximation
// and the DFT / shift-and-modulate generators used by the training design.
//
// Storage is column-major and all indices are 0-based: entry (i, j) of a
// rows x cols matrix lives at j * rows + i.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdris {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class CMatrix {
public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, CVector data);

  // Row-major nested initializer, convenient for literals in tests.
  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix column(std::span<const cplx> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<const cplx> data() const noexcept { return data_; }
  std::span<cplx> data() noexcept { return data_; }

  std::span<const cplx> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }
  std::span<cplx> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }

  // Columns [first, first + count) as a new matrix.
  CMatrix columns(std::size_t first, std::size_t count) const;

  CMatrix transpose() const;
  CMatrix adjoint() const;
  CMatrix conj() const;

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(cplx s);

  bool operator==(const CMatrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  CVector data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(CMatrix a, cplx s);
CMatrix operator*(cplx s, CMatrix a);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CVector operator*(const CMatrix& a, std::span<const cplx> x);

double frobenius_norm(const CMatrix& a);
double norm2(std::span<const cplx> v);

// Horizontal concatenation; all blocks must share a row count.
CMatrix hcat(std::span<const CMatrix> blocks);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(std::span<const cplx> a, std::span<const cplx> b);

// Column-wise Kronecker product: column r is kron(x.col(r), y.col(r)).
CMatrix khatri_rao(const CMatrix& x, const CMatrix& y);

CVector vec(const CMatrix& a);
CMatrix unvec(std::span<const cplx> v, std::size_t rows, std::size_t cols);

CMatrix diag(std::span<const cplx> d);

// Index map stored as forward[source] = destination.
class PermutationMap {
public:
  explicit PermutationMap(std::vector<std::size_t> forward);

  static PermutationMap identity(std::size_t n);

  std::size_t size() const noexcept { return forward_.size(); }
  std::span<const std::size_t> forward() const noexcept { return forward_; }

  PermutationMap inverse() const;

  // out[forward[s]] = in[s]
  CVector apply(std::span<const cplx> in) const;

private:
  std::vector<std::size_t> forward_;
};

// Map P with P vec(A (x) B) = vec(A) (x) vec(B) for A: mt x nbar, B: mr x nbar.
PermutationMap kron_vec_permutation(std::size_t mt, std::size_t mr, std::size_t nbar);

struct RankOne {
  double sigma = 0.0;
  CVector u;
  CVector v;
  int iterations = 0;
  bool used_svd_fallback = false;
};

// Dominant singular triplet, m ~ sigma u v^H. Power iteration on m m^H from
// the largest-norm column of m; falls back to a full SVD when the singular
// value estimate has not settled after max_iterations. The first entry of u
// that is not numerically zero is made real and nonnegative.
RankOne rank_one_approx(const CMatrix& m, int max_iterations = 200, double rel_tol = 1e-12);

// F(j, k) = exp(-2 pi i j k / n), unnormalized.
CMatrix dft_matrix(std::size_t n);

// D^k Pi^p for k, p in [0, nbar), indexed as [k * nbar + p]. D is the
// diagonal of powers of exp(-2 pi i / nbar), Pi the cyclic down-shift.
std::vector<CMatrix> weyl_heisenberg_basis(std::size_t nbar);

}  // namespace bdris
