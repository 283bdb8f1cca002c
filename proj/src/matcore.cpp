#include "bdris/matcore.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace bdris {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols, CVector data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows * cols, "CMatrix: data length != rows * cols");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.resize(rows_ * cols_);
  std::size_t i = 0;
  for (const auto& r : rows) {
    require(r.size() == cols_, "CMatrix: ragged initializer");
    std::size_t j = 0;
    for (const auto& x : r) (*this)(i, j++) = x;
    ++i;
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::column(std::span<const cplx> v) {
  return CMatrix(v.size(), 1, CVector(v.begin(), v.end()));
}

CMatrix CMatrix::columns(std::size_t first, std::size_t count) const {
  require(first + count <= cols_, "CMatrix::columns: range out of bounds");
  auto begin = data_.begin() + static_cast<std::ptrdiff_t>(first * rows_);
  return CMatrix(rows_, count, CVector(begin, begin + static_cast<std::ptrdiff_t>(count * rows_)));
}

CMatrix CMatrix::transpose() const {
  CMatrix t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

CMatrix CMatrix::adjoint() const {
  CMatrix t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = std::conj((*this)(i, j));
  return t;
}

CMatrix CMatrix::conj() const {
  CMatrix c = *this;
  for (auto& x : c.data_) x = std::conj(x);
  return c;
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "CMatrix +=: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "CMatrix -=: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (auto& x : data_) x *= s;
  return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  require(a.cols() == b.rows(), "matrix product: inner dimension mismatch");
  CMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx bkj = b(k, j);
      if (bkj == cplx{}) continue;
      auto ak = a.col(k);
      for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += ak[i] * bkj;
    }
  }
  return c;
}

CVector operator*(const CMatrix& a, std::span<const cplx> x) {
  require(a.cols() == x.size(), "matrix-vector product: dimension mismatch");
  CVector y(a.rows());
  for (std::size_t k = 0; k < a.cols(); ++k) {
    auto ak = a.col(k);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += ak[i] * x[k];
  }
  return y;
}

double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

double frobenius_norm(const CMatrix& a) { return norm2(a.data()); }

CMatrix hcat(std::span<const CMatrix> blocks) {
  if (blocks.empty()) return {};
  const std::size_t rows = blocks.front().rows();
  CVector data;
  std::size_t cols = 0;
  for (const auto& b : blocks) {
    require(b.rows() == rows, "hcat: row count mismatch");
    data.insert(data.end(), b.data().begin(), b.data().end());
    cols += b.cols();
  }
  return CMatrix(rows, cols, std::move(data));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ja = 0; ja < a.cols(); ++ja)
    for (std::size_t jb = 0; jb < b.cols(); ++jb)
      for (std::size_t ia = 0; ia < a.rows(); ++ia) {
        const cplx s = a(ia, ja);
        for (std::size_t ib = 0; ib < b.rows(); ++ib)
          c(ia * b.rows() + ib, ja * b.cols() + jb) = s * b(ib, jb);
      }
  return c;
}

CVector kron(std::span<const cplx> a, std::span<const cplx> b) {
  CVector c(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) c[i * b.size() + k] = a[i] * b[k];
  return c;
}

CMatrix khatri_rao(const CMatrix& x, const CMatrix& y) {
  require(x.cols() == y.cols(), "khatri_rao: column count mismatch");
  CMatrix z(x.rows() * y.rows(), x.cols());
  for (std::size_t r = 0; r < x.cols(); ++r) {
    auto col = kron(x.col(r), y.col(r));
    std::copy(col.begin(), col.end(), z.col(r).begin());
  }
  return z;
}

CVector vec(const CMatrix& a) { return CVector(a.data().begin(), a.data().end()); }

CMatrix unvec(std::span<const cplx> v, std::size_t rows, std::size_t cols) {
  require(v.size() == rows * cols, "unvec: length != rows * cols");
  return CMatrix(rows, cols, CVector(v.begin(), v.end()));
}

CMatrix diag(std::span<const cplx> d) {
  CMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

PermutationMap::PermutationMap(std::vector<std::size_t> forward) : forward_(std::move(forward)) {
  std::vector<bool> seen(forward_.size(), false);
  for (auto d : forward_) {
    require(d < forward_.size() && !seen[d], "PermutationMap: not a bijection");
    seen[d] = true;
  }
}

PermutationMap PermutationMap::identity(std::size_t n) {
  std::vector<std::size_t> f(n);
  std::iota(f.begin(), f.end(), std::size_t{0});
  return PermutationMap(std::move(f));
}

PermutationMap PermutationMap::inverse() const {
  std::vector<std::size_t> inv(forward_.size());
  for (std::size_t s = 0; s < forward_.size(); ++s) inv[forward_[s]] = s;
  return PermutationMap(std::move(inv));
}

CVector PermutationMap::apply(std::span<const cplx> in) const {
  require(in.size() == forward_.size(), "PermutationMap::apply: length mismatch");
  CVector out(in.size());
  for (std::size_t s = 0; s < in.size(); ++s) out[forward_[s]] = in[s];
  return out;
}

PermutationMap kron_vec_permutation(std::size_t mt, std::size_t mr, std::size_t nbar) {
  const std::size_t rows = mt * mr;
  std::vector<std::size_t> f(rows * nbar * nbar);
  for (std::size_t ac = 0; ac < nbar; ++ac)
    for (std::size_t bc = 0; bc < nbar; ++bc)
      for (std::size_t ar = 0; ar < mt; ++ar)
        for (std::size_t br = 0; br < mr; ++br) {
          const std::size_t i = ar * mr + br;
          const std::size_t j = ac * nbar + bc;
          f[j * rows + i] = (ac * mt + ar) * (mr * nbar) + (bc * mr + br);
        }
  return PermutationMap(std::move(f));
}

namespace {

// Rotate (u, v) by a common phase so the first significant entry of u is
// real and nonnegative; sigma u v^H is unchanged.
void fix_phase(RankOne& r) {
  const double scale = norm2(r.u);
  for (std::size_t i = 0; i < r.u.size(); ++i) {
    const double mag = std::abs(r.u[i]);
    if (mag > 1e-12 * scale) {
      const cplx rot = std::conj(r.u[i]) / mag;
      for (auto& y : r.u) y *= rot;
      for (auto& y : r.v) y *= rot;
      r.u[i] = mag;
      return;
    }
  }
}

RankOne svd_rank_one(const CMatrix& m) {
  Eigen::Map<const Eigen::MatrixXcd> em(m.data().data(), Eigen::Index(m.rows()),
                                        Eigen::Index(m.cols()));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(em, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RankOne r;
  r.sigma = svd.singularValues()(0);
  r.u.assign(svd.matrixU().col(0).data(), svd.matrixU().col(0).data() + m.rows());
  r.v.assign(svd.matrixV().col(0).data(), svd.matrixV().col(0).data() + m.cols());
  r.used_svd_fallback = true;
  return r;
}

}  // namespace

RankOne rank_one_approx(const CMatrix& m, int max_iterations, double rel_tol) {
  RankOne r;
  if (m.rows() == 0 || m.cols() == 0) throw DimensionError("rank_one_approx: empty matrix");

  std::size_t best = 0;
  double best_norm = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const double nj = norm2(m.col(j));
    if (nj > best_norm) {
      best_norm = nj;
      best = j;
    }
  }
  if (best_norm == 0.0) {
    r.u.assign(m.rows(), cplx{});
    r.v.assign(m.cols(), cplx{});
    r.u[0] = 1.0;
    r.v[0] = 1.0;
    return r;
  }

  const CMatrix mh = m.adjoint();
  CVector u(m.col(best).begin(), m.col(best).end());
  for (auto& x : u) x /= best_norm;

  CVector w;  // m^H u
  double sigma = 0.0;
  bool converged = false;
  for (int it = 1; it <= max_iterations; ++it) {
    w = mh * u;
    const double next = norm2(w);
    r.iterations = it;
    if (std::abs(next - sigma) <= rel_tol * next) {
      sigma = next;
      converged = true;
      break;
    }
    sigma = next;
    u = m * w;
    const double nu = norm2(u);
    for (auto& x : u) x /= nu;
  }

  if (!converged) {
    r = svd_rank_one(m);
    r.iterations = max_iterations;
  } else {
    r.sigma = sigma;
    r.u = std::move(u);
    r.v = std::move(w);
    for (auto& x : r.v) x /= sigma;
  }
  fix_phase(r);
  return r;
}

CMatrix dft_matrix(std::size_t n) {
  CMatrix f(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      // reduce the exponent first so large n keeps full phase accuracy
      const double phase = -2.0 * std::numbers::pi * double((j * k) % n) / double(n);
      f(j, k) = std::polar(1.0, phase);
    }
  return f;
}

std::vector<CMatrix> weyl_heisenberg_basis(std::size_t nbar) {
  std::vector<CMatrix> basis;
  basis.reserve(nbar * nbar);
  for (std::size_t k = 0; k < nbar; ++k)
    for (std::size_t p = 0; p < nbar; ++p) {
      // (D^k Pi^p)(i, j) = omega^{k i} when i == (j + p) mod nbar
      CMatrix u(nbar, nbar);
      for (std::size_t j = 0; j < nbar; ++j) {
        const std::size_t i = (j + p) % nbar;
        const double phase = -2.0 * std::numbers::pi * double((k * i) % nbar) / double(nbar);
        u(i, j) = std::polar(1.0, phase);
      }
      basis.push_back(std::move(u));
    }
  return basis;
}

}  // namespace bdris
