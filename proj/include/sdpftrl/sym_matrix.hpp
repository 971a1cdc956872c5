#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdpftrl/error.hpp"

namespace sdpftrl {

// Dense row-major real matrix of arbitrary shape. Used for the m x n
// matrices of the matrix-prediction problems and for non-symmetric products.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Dense symmetric real matrix. Entries are stored in full; construction from
// arbitrary square data symmetrizes with (A + A^T) / 2 and rejects non-finite
// values, so entries(i, j) == entries(j, i) holds bit-exactly afterwards.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  SymMatrix(std::size_t n, std::vector<double> entries) : n_(n), data_(std::move(entries)) {
    if (data_.size() != n * n)
      throw DimensionError("SymMatrix: expected " + std::to_string(n * n) + " entries, got " +
                           std::to_string(data_.size()));
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        const double v = 0.5 * (data_[i * n_ + j] + data_[j * n_ + i]);
        if (!std::isfinite(v)) throw DomainError("SymMatrix: non-finite entry");
        data_[i * n_ + j] = v;
        data_[j * n_ + i] = v;
      }
    }
  }

  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    std::vector<double> flat;
    flat.reserve(n * n);
    for (const auto& r : rows) {
      if (r.size() != n) throw DimensionError("SymMatrix::from_rows: ragged input");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return SymMatrix(n, std::move(flat));
  }

  static SymMatrix identity(std::size_t n, double scale = 1.0) {
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = scale;
    return m;
  }

  static SymMatrix diagonal(std::span<const double> d) {
    SymMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.data_[i * d.size() + i] = d[i];
    return m;
  }

  std::size_t order() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  // Writes v to both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double v) {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }
  void add(std::size_t i, std::size_t j, double v) {
    data_[i * n_ + j] += v;
    if (i != j) data_[j * n_ + i] += v;
  }

  std::span<const double> data() const { return data_; }

  std::vector<double> diag() const {
    std::vector<double> d(n_);
    for (std::size_t i = 0; i < n_; ++i) d[i] = data_[i * n_ + i];
    return d;
  }

  SymMatrix& operator+=(const SymMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  SymMatrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }
  // this += s * o
  SymMatrix& axpy(double s, const SymMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * o.data_[k];
    return *this;
  }

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }

  bool operator==(const SymMatrix&) const = default;

  void check_same(const SymMatrix& o) const {
    if (o.n_ != n_)
      throw DimensionError("order mismatch: " + std::to_string(n_) + " vs " + std::to_string(o.n_));
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Eigendecomposition of a symmetric matrix. values are sorted descending and
// vector(i, k) is component i of the eigenvector belonging to values[k].
struct EigPair {
  std::vector<double> values;
  Matrix vectors;

  std::size_t order() const { return values.size(); }
  double vector(std::size_t i, std::size_t k) const { return vectors(i, k); }
};

inline double frobenius_inner(const SymMatrix& a, const SymMatrix& b) {
  a.check_same(b);
  const auto x = a.data();
  const auto y = b.data();
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

inline double trace(const SymMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.order(); ++i) s += a(i, i);
  return s;
}

inline double frobenius_norm(const SymMatrix& a) { return std::sqrt(frobenius_inner(a, a)); }

inline double max_abs_entry(const SymMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

// Sum of absolute entries, i.e. the l1 norm of vec(a).
inline double entrywise_l1(const SymMatrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += std::abs(v);
  return s;
}

struct EigOptions {
  int max_sweeps = 100;
  // Off-diagonal Frobenius norm target, relative to ||A||_Fr.
  double relative_tol = 1e-12;
};

// Cyclic Jacobi eigenvalue algorithm.
inline EigPair sym_eig(const SymMatrix& a, const EigOptions& opt = {}) {
  const std::size_t n = a.order();
  std::vector<double> A(a.data().begin(), a.data().end());
  Matrix V(n, n);
  for (std::size_t i = 0; i < n; ++i) V(i, i) = 1.0;

  auto at = [&](std::size_t i, std::size_t j) -> double& { return A[i * n + j]; };

  double fro2 = 0.0;
  for (double v : A) {
    if (!std::isfinite(v)) throw DomainError("sym_eig: non-finite entry");
    fro2 += v * v;
  }
  const double target = opt.relative_tol * std::sqrt(fro2);

  int sweep = 0;
  for (;; ++sweep) {
    double off2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off2 += 2.0 * at(i, j) * at(i, j);
    if (std::sqrt(off2) <= target || fro2 == 0.0) break;
    if (sweep >= opt.max_sweeps)
      throw NumericalError("sym_eig: Jacobi did not converge in " + std::to_string(opt.max_sweeps) +
                           " sweeps");

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double app = at(p, p);
        const double aqq = at(q, q);
        // Skip rotations that would not change the diagonal in floating point.
        if (sweep > 3 && std::abs(apq) * 1e18 < std::abs(app) && std::abs(apq) * 1e18 < std::abs(aqq)) {
          at(p, q) = at(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        at(p, p) = app - t * apq;
        at(q, q) = aqq + t * apq;
        at(p, q) = at(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = at(r, p);
          const double arq = at(r, q);
          const double np = c * arp - s * arq;
          const double nq = s * arp + c * arq;
          at(r, p) = at(p, r) = np;
          at(r, q) = at(q, r) = nq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = V(r, p);
          const double vrq = V(r, q);
          V(r, p) = c * vrp - s * vrq;
          V(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return at(x, x) > at(y, y); });

  EigPair out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = at(idx[k], idx[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = V(i, idx[k]);
  }
  return out;
}

// V diag(f(lambda)) V^T for an arbitrary list of new eigenvalues.
inline SymMatrix reconstruct(const EigPair& e, std::span<const double> values) {
  const std::size_t n = e.order();
  if (values.size() != n) throw DimensionError("reconstruct: eigenvalue count mismatch");
  std::vector<double> out(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = values[k];
    if (lam == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double vik = lam * e.vectors(i, k);
      for (std::size_t j = i; j < n; ++j) out[i * n + j] += vik * e.vectors(j, k);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) out[i * n + j] = out[j * n + i];
  return SymMatrix(n, std::move(out));
}

inline SymMatrix reconstruct(const EigPair& e) { return reconstruct(e, e.values); }

template <class F>
SymMatrix spectral_map(const EigPair& e, F&& f) {
  std::vector<double> v(e.values.size());
  std::transform(e.values.begin(), e.values.end(), v.begin(), f);
  return reconstruct(e, v);
}

template <class F>
SymMatrix spectral_map(const SymMatrix& a, F&& f) {
  return spectral_map(sym_eig(a), std::forward<F>(f));
}

struct Norms {
  double trace_norm;
  double spectral_norm;
  double frobenius_norm;
};

inline Norms norms(const EigPair& e) {
  Norms n{0.0, 0.0, 0.0};
  double sq = 0.0;
  for (double lam : e.values) {
    n.trace_norm += std::abs(lam);
    n.spectral_norm = std::max(n.spectral_norm, std::abs(lam));
    sq += lam * lam;
  }
  n.frobenius_norm = std::sqrt(sq);
  return n;
}

inline Norms norms(const SymMatrix& a) { return norms(sym_eig(a)); }

// Frobenius-nearest matrix whose eigenvalues are all >= floor.
inline SymMatrix psd_floor(const SymMatrix& a, double floor = 0.0) {
  if (floor < 0.0) throw DomainError("psd_floor: floor must be >= 0");
  const EigPair e = sym_eig(a);
  if (e.values.empty() || e.values.back() >= floor) return a;
  return spectral_map(e, [floor](double lam) { return std::max(lam, floor); });
}

inline double min_eigenvalue(const SymMatrix& a) {
  const EigPair e = sym_eig(a);
  return e.values.empty() ? 0.0 : e.values.back();
}

// a * b for symmetric operands; the product is in general not symmetric.
inline Matrix multiply(const SymMatrix& a, const SymMatrix& b) {
  a.check_same(b);
  const std::size_t n = a.order();
  Matrix c(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

// Block-diagonal matrix [[a, 0], [0, b]].
inline SymMatrix block_diagonal(const SymMatrix& a, const SymMatrix& b) {
  const std::size_t p = a.order();
  const std::size_t q = b.order();
  SymMatrix out(p + q);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) out.set(i, j, a(i, j));
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = i; j < q; ++j) out.set(p + i, p + j, b(i, j));
  return out;
}

}  // namespace sdpftrl
