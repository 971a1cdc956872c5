#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "sdpftrl/error.hpp"
#include "sdpftrl/sym_matrix.hpp"

namespace sdpftrl {

enum class SetKind { trace_ball, spectral_ball, frobenius_ball, reduced, diag_reduced };

inline std::string_view to_string(SetKind k) {
  switch (k) {
    case SetKind::trace_ball: return "trace_ball";
    case SetKind::spectral_ball: return "spectral_ball";
    case SetKind::frobenius_ball: return "frobenius_ball";
    case SetKind::reduced: return "reduced";
    case SetKind::diag_reduced: return "diag_reduced";
  }
  return "?";
}

// Convex set of PSD matrices of a fixed order.
//   trace_ball(tau)     {X >= 0 : Tr X <= tau}
//   spectral_ball(sigma){X >= 0 : ||X||_Sp <= sigma}
//   frobenius_ball(rho) {X >= 0 : ||X||_Fr <= rho}
//   reduced(beta, tau)  {X >= 0 : Tr X <= tau, X_ii <= beta}
//   diag_reduced        diagonal members of reduced(beta, tau)
struct DecisionSet {
  SetKind kind = SetKind::reduced;
  std::size_t order = 1;
  double radius = 0.0;  // tau, sigma or rho for the ball kinds
  double beta = 0.0;
  double tau = 0.0;

  static DecisionSet trace_ball(std::size_t n, double tau) { return make({SetKind::trace_ball, n, tau, 0, tau}); }
  static DecisionSet spectral_ball(std::size_t n, double sigma) { return make({SetKind::spectral_ball, n, sigma}); }
  static DecisionSet frobenius_ball(std::size_t n, double rho) { return make({SetKind::frobenius_ball, n, rho}); }
  static DecisionSet reduced(std::size_t n, double beta, double tau) {
    return make({SetKind::reduced, n, 0.0, beta, tau});
  }
  static DecisionSet diag_reduced(std::size_t n, double beta, double tau) {
    return make({SetKind::diag_reduced, n, 0.0, beta, tau});
  }

  bool has_diagonal_cap() const { return kind == SetKind::reduced || kind == SetKind::diag_reduced; }

  // Upper bound on any diagonal entry of a member.
  double diagonal_cap() const {
    switch (kind) {
      case SetKind::reduced:
      case SetKind::diag_reduced: return std::min(beta, tau);
      default: return radius;
    }
  }

  // Upper bound on the trace of any member.
  double trace_cap() const {
    switch (kind) {
      case SetKind::trace_ball: return radius;
      case SetKind::spectral_ball: return radius * static_cast<double>(order);
      case SetKind::frobenius_ball: return radius * std::sqrt(static_cast<double>(order));
      default: return std::min(tau, beta * static_cast<double>(order));
    }
  }

  bool contains(const SymMatrix& x, double tol = 1e-9) const {
    if (x.order() != order) return false;
    if (kind == SetKind::diag_reduced) {
      for (std::size_t i = 0; i < order; ++i)
        for (std::size_t j = 0; j < order; ++j)
          if (i != j && std::abs(x(i, j)) > tol) return false;
    }
    const EigPair e = sym_eig(x);
    if (!e.values.empty() && e.values.back() < -tol) return false;
    const Norms nm = norms(e);
    switch (kind) {
      case SetKind::trace_ball: return trace(x) <= radius + tol;
      case SetKind::spectral_ball: return nm.spectral_norm <= radius + tol;
      case SetKind::frobenius_ball: return nm.frobenius_norm <= radius + tol;
      case SetKind::reduced:
      case SetKind::diag_reduced:
        if (trace(x) > tau + tol) return false;
        for (std::size_t i = 0; i < order; ++i)
          if (x(i, i) > beta + tol) return false;
        return true;
    }
    return false;
  }

 private:
  static DecisionSet make(DecisionSet s) {
    if (s.order == 0) throw DomainError("DecisionSet: order must be positive");
    const bool ball = s.kind == SetKind::trace_ball || s.kind == SetKind::spectral_ball ||
                      s.kind == SetKind::frobenius_ball;
    if (ball && !(s.radius > 0.0)) throw DomainError("DecisionSet: radius must be > 0");
    if (!ball && !(s.beta > 0.0 && s.tau > 0.0)) throw DomainError("DecisionSet: beta and tau must be > 0");
    return s;
  }
};

enum class LossSpaceKind { fro_ball, spectral_ball, trace_ball, vec_l1_ball };

struct LossSpace {
  LossSpaceKind kind = LossSpaceKind::vec_l1_ball;
  double radius = 1.0;

  static LossSpace fro_ball(double g) { return make({LossSpaceKind::fro_ball, g}); }
  static LossSpace spectral_ball(double g) { return make({LossSpaceKind::spectral_ball, g}); }
  static LossSpace trace_ball(double g) { return make({LossSpaceKind::trace_ball, g}); }
  static LossSpace vec_l1_ball(double g) { return make({LossSpaceKind::vec_l1_ball, g}); }

  double measure(const SymMatrix& l) const {
    switch (kind) {
      case LossSpaceKind::fro_ball: return frobenius_norm(l);
      case LossSpaceKind::spectral_ball: return norms(l).spectral_norm;
      case LossSpaceKind::trace_ball: return norms(l).trace_norm;
      case LossSpaceKind::vec_l1_ball: return entrywise_l1(l);
    }
    return 0.0;
  }

  bool contains(const SymMatrix& l, double tol = 1e-9) const { return measure(l) <= radius * (1.0 + tol) + tol; }

 private:
  static LossSpace make(LossSpace s) {
    if (!(s.radius > 0.0)) throw DomainError("LossSpace: radius must be > 0");
    return s;
  }
};

// Euclidean projection of y onto {x : 0 <= x_i <= cap, sum x <= total}.
// cap may be +infinity.
inline std::vector<double> project_capped_simplex(std::span<const double> y, double cap, double total) {
  auto clamp_shift = [&](double theta) {
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = std::clamp(y[i] - theta, 0.0, cap);
    return x;
  };
  auto sum_at = [&](double theta) {
    double s = 0.0;
    for (double v : y) s += std::clamp(v - theta, 0.0, cap);
    return s;
  };
  if (sum_at(0.0) <= total) return clamp_shift(0.0);
  double lo = 0.0;
  double hi = *std::max_element(y.begin(), y.end());
  // sum_at is continuous and nonincreasing in theta, sum_at(hi) == 0.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (sum_at(mid) > total ? lo : hi) = mid;
  }
  return clamp_shift(hi);
}

}  // namespace sdpftrl
