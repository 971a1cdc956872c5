#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "sdpftrl/error.hpp"
#include "sdpftrl/sym_matrix.hpp"

namespace sdpftrl {

enum class RegularizerKind { frobenius, entropic, logdet, burg };

inline std::string_view to_string(RegularizerKind k) {
  switch (k) {
    case RegularizerKind::frobenius: return "frobenius";
    case RegularizerKind::entropic: return "entropic";
    case RegularizerKind::logdet: return "logdet";
    case RegularizerKind::burg: return "burg";
  }
  return "?";
}

inline RegularizerKind parse_regularizer(std::string_view s) {
  if (s == "frobenius") return RegularizerKind::frobenius;
  if (s == "entropic") return RegularizerKind::entropic;
  if (s == "logdet") return RegularizerKind::logdet;
  if (s == "burg") return RegularizerKind::burg;
  throw DomainError("unknown regularizer '" + std::string(s) + "'");
}

struct RegularizerSpec {
  RegularizerKind kind = RegularizerKind::logdet;
  // Shift for logdet and burg; ignored otherwise.
  double epsilon = 1.0;
  // Eigenvalue floor for the entropic gradient at singular matrices.
  double eigenvalue_floor = 1e-12;

  static RegularizerSpec frobenius() { return {RegularizerKind::frobenius}; }
  static RegularizerSpec entropic(double floor = 1e-12) { return {RegularizerKind::entropic, 1.0, floor}; }
  static RegularizerSpec logdet(double eps) { return {RegularizerKind::logdet, eps}; }
  static RegularizerSpec burg(double eps) { return {RegularizerKind::burg, eps}; }

  bool uses_epsilon() const { return kind == RegularizerKind::logdet || kind == RegularizerKind::burg; }

  void validate() const {
    if (uses_epsilon() && !(epsilon > 0.0 && std::isfinite(epsilon)))
      throw DomainError("regularizer epsilon must be > 0");
    if (kind == RegularizerKind::entropic && !(eigenvalue_floor >= 0.0))
      throw DomainError("entropic eigenvalue floor must be >= 0");
  }
};

struct RegValue {
  double value;
  SymMatrix gradient;
};

struct VecRegValue {
  double value;
  std::vector<double> gradient;
};

// R(X) = ||X||_Fr^2 / 2.
inline RegValue frobenius_reg(const SymMatrix& x) { return {0.5 * frobenius_inner(x, x), x}; }

// R(X) = Tr(X ln X - X) evaluated on max(lambda, floor); 0 ln 0 is taken as 0
// in the value so that singular matrices have a finite value.
inline RegValue entropic_reg(const SymMatrix& x, double eigenvalue_floor = 1e-12) {
  const EigPair e = sym_eig(x);
  if (!e.values.empty() && e.values.back() < -1e-10)
    throw DomainError("entropic_reg: matrix is not PSD (lambda_min = " + std::to_string(e.values.back()) + ")");
  double value = 0.0;
  std::vector<double> logs(e.order());
  for (std::size_t k = 0; k < e.order(); ++k) {
    const double lam = std::max(e.values[k], eigenvalue_floor);
    logs[k] = std::log(lam);
    if (lam > 0.0) value += lam * (logs[k] - 1.0);
  }
  return {value, reconstruct(e, logs)};
}

namespace detail {
inline EigPair shifted_eig(const SymMatrix& x, double epsilon, const char* who) {
  if (!(epsilon > 0.0)) throw DomainError(std::string(who) + ": epsilon must be > 0");
  EigPair e = sym_eig(x);
  if (!e.values.empty() && e.values.back() <= -epsilon + 1e-12)
    throw DomainError(std::string(who) + ": X + eps*I is singular or indefinite");
  return e;
}
}  // namespace detail

// R(X) = -ln det(X + eps I), gradient -(X + eps I)^{-1}.
inline RegValue logdet_reg(const SymMatrix& x, double epsilon) {
  const EigPair e = detail::shifted_eig(x, epsilon, "logdet_reg");
  double value = 0.0;
  std::vector<double> inv(e.order());
  for (std::size_t k = 0; k < e.order(); ++k) {
    const double s = e.values[k] + epsilon;
    value -= std::log(s);
    inv[k] = -1.0 / s;
  }
  return {value, reconstruct(e, inv)};
}

// vec(W)^T ((X+eps I)^{-1} kron (X+eps I)^{-1}) vec(W) = Tr(A W A W), A = (X+eps I)^{-1}.
// Evaluated in the eigenbasis of X: sum_{k,l} (v_k^T W v_l)^2 / ((l_k+eps)(l_l+eps)).
inline double logdet_hessian_quadform(const SymMatrix& x, const SymMatrix& w, double epsilon) {
  x.check_same(w);
  const EigPair e = detail::shifted_eig(x, epsilon, "logdet_hessian_quadform");
  const std::size_t n = e.order();
  // B = V^T W V
  Matrix wv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += w(i, j) * e.vectors(j, l);
      wv(i, l) = s;
    }
  double q = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double ak = 1.0 / (e.values[k] + epsilon);
    for (std::size_t l = 0; l < n; ++l) {
      double b = 0.0;
      for (std::size_t i = 0; i < n; ++i) b += e.vectors(i, k) * wv(i, l);
      q += ak * b * b / (e.values[l] + epsilon);
    }
  }
  return q;
}

// Shifted Burg entropy -sum ln(x_i + eps).
inline VecRegValue burg_reg(std::span<const double> x, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("burg_reg: epsilon must be > 0");
  VecRegValue out{0.0, std::vector<double>(x.size())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < -1e-12) throw DomainError("burg_reg: negative entry");
    const double s = x[i] + epsilon;
    out.value -= std::log(s);
    out.gradient[i] = -1.0 / s;
  }
  return out;
}

// Matrix regularizer value and gradient by spec. burg on a matrix argument is
// the log-determinant, which coincides with the Burg entropy on diagonals.
inline RegValue evaluate(const RegularizerSpec& spec, const SymMatrix& x) {
  switch (spec.kind) {
    case RegularizerKind::frobenius: return frobenius_reg(x);
    case RegularizerKind::entropic: return entropic_reg(x, spec.eigenvalue_floor);
    case RegularizerKind::logdet:
    case RegularizerKind::burg: return logdet_reg(x, spec.epsilon);
  }
  throw DomainError("evaluate: unknown regularizer");
}

// Per-eigenvalue view of a spectral regularizer R(X) = sum_k r(lambda_k).
// Besides r and r', it exposes the conjugate-side quantities the FTRL solvers
// need: for a linear coefficient m,
//   argmin(m)  = argmin_{x >= 0} r(x) + m x
//   dual(m)    = min_{x >= 0} r(x) + m x
//   dargmin(m) = d argmin / dm  (one-sided where argmin has a kink)
class ScalarRegularizer {
 public:
  explicit ScalarRegularizer(const RegularizerSpec& spec) : kind_(spec.kind), eps_(spec.epsilon) {
    spec.validate();
  }

  RegularizerKind kind() const { return kind_; }

  // Coefficients m with m <= domain_bound() make the inner minimum -infinity.
  double domain_bound() const {
    return is_log() ? 0.0 : -std::numeric_limits<double>::infinity();
  }

  double value(double x) const {
    switch (kind_) {
      case RegularizerKind::frobenius: return 0.5 * x * x;
      case RegularizerKind::entropic: return x > 0.0 ? x * (std::log(x) - 1.0) : 0.0;
      default: return -std::log(x + eps_);
    }
  }

  double derivative(double x) const {
    switch (kind_) {
      case RegularizerKind::frobenius: return x;
      case RegularizerKind::entropic:
        return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
      default: return -1.0 / (x + eps_);
    }
  }

  double argmin(double m) const {
    switch (kind_) {
      case RegularizerKind::frobenius: return m < 0.0 ? -m : 0.0;
      case RegularizerKind::entropic: return std::exp(-m);
      default:
        if (m <= 0.0) return std::numeric_limits<double>::infinity();
        return std::max(1.0 / m - eps_, 0.0);
    }
  }

  double dual(double m) const {
    switch (kind_) {
      case RegularizerKind::frobenius: return m < 0.0 ? -0.5 * m * m : 0.0;
      case RegularizerKind::entropic: return -std::exp(-m);
      default:
        if (m <= 0.0) return -std::numeric_limits<double>::infinity();
        return m * eps_ < 1.0 ? std::log(m) + 1.0 - m * eps_ : -std::log(eps_);
    }
  }

  double dargmin(double m) const {
    switch (kind_) {
      case RegularizerKind::frobenius: return m < 0.0 ? -1.0 : 0.0;
      case RegularizerKind::entropic: return -std::exp(-m);
      default: return m * eps_ < 1.0 ? -1.0 / (m * m) : 0.0;
    }
  }

  // Divided difference (argmin(a) - argmin(b)) / (a - b), derivative when a ~ b.
  double divided_difference(double a, double b) const {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    if (std::abs(a - b) <= 1e-9 * scale) return dargmin(0.5 * (a + b));
    return (argmin(a) - argmin(b)) / (a - b);
  }

  // Minimizer of r(x) + m x + (nu / 2) x^2 over [0, cap]; nu >= 0.
  double argmin_with_quadratic(double m, double nu, double cap) const {
    if (nu == 0.0) return std::min(argmin(m), cap);
    auto slope = [&](double x) { return derivative(x) + m + nu * x; };
    if (kind_ == RegularizerKind::frobenius) return std::clamp(-m / (1.0 + nu), 0.0, cap);
    if (slope(0.0) >= 0.0) return 0.0;
    double hi = std::isfinite(cap) ? cap : std::max(1.0, std::abs(m) / nu + 1.0);
    if (slope(hi) <= 0.0) {
      if (std::isfinite(cap)) return cap;
      while (slope(hi) <= 0.0) hi *= 2.0;
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  bool is_log() const { return kind_ == RegularizerKind::logdet || kind_ == RegularizerKind::burg; }

  RegularizerKind kind_;
  double eps_;
};

}  // namespace sdpftrl
