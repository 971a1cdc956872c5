#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sdpftrl/decision_set.hpp"
#include "sdpftrl/error.hpp"
#include "sdpftrl/regularizers.hpp"
#include "sdpftrl/sym_matrix.hpp"

namespace sdpftrl {

namespace detail {

// Solves (A) x = b in place for symmetric positive definite A (n x n, row-major).
inline bool cholesky_solve(std::vector<double>& A, std::vector<double>& b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = A[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= A[j * n + k] * A[j * n + k];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    A[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = A[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= A[i * n + k] * A[j * n + k];
      A[i * n + j] = s / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= A[i * n + k] * b[k];
    b[i] = s / A[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= A[k * n + i] * b[k];
    b[i] = s / A[i * n + i];
  }
  return true;
}

}  // namespace detail

// Multipliers of the trace cap (mu) and the diagonal caps (d) for
// min_{X >= 0, Tr X <= tau, X_ii <= beta} R(X) + G . X.
struct DualPoint {
  double mu = 0.0;
  std::vector<double> d;
};

// Dual projected Newton method for spectral regularizers on reduced(beta, tau).
//
// For multipliers z = (mu, d) >= 0 put M = G + mu I + diag(d) = V diag(m) V^T.
// The inner minimum over X >= 0 is attained at X = V diag(argmin(m_k)) V^T and
// gives the concave dual
//   g(z) = sum_k dual(m_k) - mu tau - beta sum_i d_i
// with gradient (Tr X - tau, X_ii - beta). The Hessian follows from the
// Daleckii-Krein formula with divided differences of argmin. Any primal
// iterate is made feasible by scaling, so weak duality gives a certified gap.
class CappedDualSolver {
 public:
  CappedDualSolver(const RegularizerSpec& reg, const DecisionSet& set) : reg_(reg), scalar_(reg), set_(set) {
    if (set.kind != SetKind::reduced) throw DomainError("CappedDualSolver: requires a reduced decision set");
  }

  struct Result {
    SymMatrix x;
    double primal = 0.0;
    double dual = 0.0;
    DualPoint point;
    int iterations = 0;
    double gap() const { return primal - dual; }
  };

  Result solve(const SymMatrix& g, double rel_tol, int max_iterations, const std::optional<DualPoint>& warm = {}) {
    const std::size_t n = set_.order;
    if (g.order() != n) throw DimensionError("CappedDualSolver: order mismatch");
    g_ = &g;

    std::vector<double> z(n + 1, 0.0);
    if (warm && warm->d.size() == n) {
      z[0] = warm->mu;
      std::copy(warm->d.begin(), warm->d.end(), z.begin() + 1);
    } else {
      const double x0 = 0.5 * std::min(set_.beta, set_.tau / static_cast<double>(n));
      z[0] = std::max(0.0, target_coefficient(x0) - min_eigenvalue(g));
    }
    Eval cur = eval(z);
    for (int bump = 0; !cur.in_domain; ++bump) {
      if (bump > 200) throw NumericalError("CappedDualSolver: cannot find a dual feasible start");
      z[0] = std::max(2.0 * z[0], 1.0) + std::max(0.0, -cur.min_m);
      cur = eval(z);
    }

    const double feas_tol = 1e-12 * (1.0 + set_.tau);
    Result res;
    std::optional<Result> best;
    double best_pg = std::numeric_limits<double>::infinity();
    int since_progress = 0;
    for (int it = 0;; ++it) {
      // Primal recovery and certificate.
      SymMatrix x = reconstruct(cur.eig, cur.x);
      double tr = 0.0;
      double maxdiag = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        tr += x(i, i);
        maxdiag = std::max(maxdiag, x(i, i));
      }
      double c = 1.0;
      if (tr > set_.tau) c = std::min(c, set_.tau / tr);
      if (maxdiag > set_.beta) c = std::min(c, set_.beta / maxdiag);
      double primal = c * frobenius_inner(g, x);
      for (double xk : cur.x) primal += scalar_.value(c * xk);
      if (c != 1.0) x *= c;
      res.x = std::move(x);
      res.primal = primal;
      res.dual = cur.value;
      res.point.mu = z[0];
      res.point.d.assign(z.begin() + 1, z.end());
      res.iterations = it;
      const double gap = primal - cur.value;
      const bool gap_ok = gap <= rel_tol * (1.0 + std::abs(primal));
      // Besides the objective gap, drive the dual gradient to working
      // precision: the gap alone only pins X down to O(sqrt(gap)).
      if (gap_ok && cur.pg <= feas_tol) return res;
      if (gap_ok && (!best || gap <= best->gap())) best = res;
      if (cur.pg < 0.5 * best_pg) {
        best_pg = cur.pg;
        since_progress = 0;
      } else {
        ++since_progress;
      }
      // The projected gradient has hit its rounding floor, which grows with
      // the magnitude of G.
      if (best && since_progress >= 10) return *best;
      if (it >= max_iterations) {
        if (best) return *best;
        throw NumericalError("CappedDualSolver: gap " + std::to_string(gap) + " after " + std::to_string(it) +
                             " iterations");
      }
      if (!newton_step(z, cur) && !gradient_step(z, cur)) {
        if (best) return *best;
        // No ascent left at working precision. For large |objective| the
        // gap cannot be resolved below ~1e-9 relative.
        if (gap <= std::max(rel_tol, 1e-9) * (1.0 + std::abs(primal))) return res;
        throw NumericalError("CappedDualSolver: stalled with gap " + std::to_string(gap));
      }
    }
  }

 private:
  struct Eval {
    EigPair eig;
    std::vector<double> x;
    double value = -std::numeric_limits<double>::infinity();
    std::vector<double> grad;
    double min_m = 0.0;
    // Infinity norm of the projected gradient max(0, z + grad) - z.
    double pg = std::numeric_limits<double>::infinity();
    bool in_domain = false;
  };

  double target_coefficient(double x0) const {
    switch (reg_.kind) {
      case RegularizerKind::frobenius: return -x0;
      case RegularizerKind::entropic: return -std::log(x0);
      default: return 1.0 / (x0 + reg_.epsilon);
    }
  }

  Eval eval(const std::vector<double>& z) const {
    const std::size_t n = set_.order;
    SymMatrix m = *g_;
    for (std::size_t i = 0; i < n; ++i) m.add(i, i, z[0] + z[i + 1]);
    Eval e;
    e.eig = sym_eig(m);
    e.min_m = e.eig.values.back();
    if (!(e.min_m > scalar_.domain_bound())) return e;
    e.x.resize(n);
    double value = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      e.x[k] = scalar_.argmin(e.eig.values[k]);
      value += scalar_.dual(e.eig.values[k]);
    }
    value -= z[0] * set_.tau;
    for (std::size_t i = 0; i < n; ++i) value -= set_.beta * z[i + 1];
    if (!std::isfinite(value)) return e;
    e.value = value;
    e.in_domain = true;
    e.grad.assign(n + 1, 0.0);
    double tr = 0.0;
    for (double xk : e.x) tr += xk;
    e.grad[0] = tr - set_.tau;
    for (std::size_t i = 0; i < n; ++i) {
      double xi = 0.0;
      for (std::size_t k = 0; k < n; ++k) xi += e.eig.vectors(i, k) * e.eig.vectors(i, k) * e.x[k];
      e.grad[i + 1] = xi - set_.beta;
    }
    e.pg = 0.0;
    for (std::size_t i = 0; i <= n; ++i) e.pg = std::max(e.pg, std::abs(std::max(0.0, z[i] + e.grad[i]) - z[i]));
    return e;
  }

  // Negated Hessian of g (positive semidefinite), (n+1) x (n+1).
  std::vector<double> neg_hessian(const Eval& e) const {
    const std::size_t n = set_.order;
    const std::size_t nv = n + 1;
    std::vector<double> h(nv * nv, 0.0);
    const auto& V = e.eig.vectors;
    const auto& m = e.eig.values;
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = k; l < n; ++l) {
        double f = -scalar_.divided_difference(m[k], m[l]);
        if (f == 0.0) continue;
        if (l != k) f *= 2.0;
        for (std::size_t i = 0; i < n; ++i) w[i] = V(i, k) * V(i, l);
        for (std::size_t i = 0; i < n; ++i) {
          const double fi = f * w[i];
          if (fi == 0.0) continue;
          for (std::size_t j = i; j < n; ++j) h[(i + 1) * nv + (j + 1)] += fi * w[j];
        }
        if (l == k) {
          h[0] += f;
          for (std::size_t i = 0; i < n; ++i) h[i + 1] += f * w[i];
        }
      }
    }
    for (std::size_t i = 0; i < nv; ++i)
      for (std::size_t j = 0; j < i; ++j) h[i * nv + j] = h[j * nv + i];
    return h;
  }

  // Projected line search along z + alpha p; accepts on the Armijo condition.
  bool line_search(std::vector<double>& z, Eval& cur, const std::vector<double>& p, const std::vector<bool>& active) {
    const std::size_t nv = z.size();
    double alpha = 1.0;
    std::vector<double> trial(nv);
    for (int k = 0; k < 80; ++k, alpha *= 0.5) {
      double lin = 0.0;
      bool moved = false;
      for (std::size_t i = 0; i < nv; ++i) {
        trial[i] = active[i] ? 0.0 : std::max(0.0, z[i] + alpha * p[i]);
        lin += cur.grad[i] * (trial[i] - z[i]);
        moved = moved || trial[i] != z[i];
      }
      if (!moved) return false;
      Eval next = eval(trial);
      if (!next.in_domain) continue;
      const bool armijo = next.value >= cur.value + 1e-4 * lin && next.value > cur.value;
      // Near the optimum the ascent drops below rounding; accept steps that
      // still shrink the projected gradient without losing value.
      const bool flat = next.value >= cur.value - 1e-14 * (1.0 + std::abs(cur.value)) && next.pg <= 0.5 * cur.pg;
      if (armijo || flat) {
        z = trial;
        cur = std::move(next);
        return true;
      }
    }
    return false;
  }

  bool newton_step(std::vector<double>& z, Eval& cur) {
    const std::size_t nv = z.size();
    std::vector<double> proj_grad(nv);
    double pg = 0.0;
    for (std::size_t i = 0; i < nv; ++i) {
      proj_grad[i] = std::max(0.0, z[i] + cur.grad[i]) - z[i];
      pg += proj_grad[i] * proj_grad[i];
    }
    const double eps_active = std::min(1e-8, std::sqrt(pg));
    std::vector<bool> active(nv, false);
    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < nv; ++i) {
      active[i] = z[i] <= eps_active && cur.grad[i] < 0.0;
      if (!active[i]) free_idx.push_back(i);
    }
    const std::vector<double> h = neg_hessian(cur);
    const std::size_t nf = free_idx.size();
    std::vector<double> p(nv, 0.0);
    if (nf > 0) {
      double diag_max = 0.0;
      for (std::size_t a : free_idx) diag_max = std::max(diag_max, h[a * nv + a]);
      double lambda = 1e-12 * std::max(diag_max, 1e-300);
      for (int attempt = 0; attempt < 8; ++attempt, lambda *= 100.0) {
        std::vector<double> A(nf * nf);
        std::vector<double> b(nf);
        for (std::size_t r = 0; r < nf; ++r) {
          for (std::size_t c = 0; c < nf; ++c) A[r * nf + c] = h[free_idx[r] * nv + free_idx[c]];
          A[r * nf + r] += lambda;
          b[r] = cur.grad[free_idx[r]];
        }
        if (detail::cholesky_solve(A, b, nf)) {
          for (std::size_t r = 0; r < nf; ++r) p[free_idx[r]] = b[r];
          break;
        }
      }
    }
    return line_search(z, cur, p, active);
  }

  bool gradient_step(std::vector<double>& z, Eval& cur) {
    std::vector<bool> active(z.size(), false);
    return line_search(z, cur, cur.grad, active);
  }

  RegularizerSpec reg_;
  ScalarRegularizer scalar_;
  DecisionSet set_;
  const SymMatrix* g_ = nullptr;
};

}  // namespace sdpftrl
