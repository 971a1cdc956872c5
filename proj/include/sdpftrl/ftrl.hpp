#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sdpftrl/capped_dual.hpp"
#include "sdpftrl/decision_set.hpp"
#include "sdpftrl/projection.hpp"
#include "sdpftrl/error.hpp"
#include "sdpftrl/regularizers.hpp"
#include "sdpftrl/sym_matrix.hpp"

namespace sdpftrl {

enum class SolverKind {
  // Closed form on eigenvalues for unitarily invariant sets, separable form
  // for diag_reduced, dual projected Newton for reduced.
  automatic,
  // Projected gradient descent with Armijo backtracking; works for every
  // set/regularizer pair but is slow on reduced sets (Dykstra projections).
  projected_gradient,
};

struct SolverOptions {
  SolverKind kind = SolverKind::automatic;
  // Relative accuracy: gap (or stationarity) <= tol * (1 + |objective|).
  double tol = 1e-8;
  int max_iterations = 5000;
};

struct StepResult {
  SymMatrix x;
  double objective = 0.0;
  // Duality gap for the dual route, projected-gradient residual for PGD, 0
  // for the closed-form routes.
  double certificate = 0.0;
  int iterations = 0;
};

// F(X) = R(X) + eta * C . X
inline double ftrl_objective(const SymMatrix& cumulative, const RegularizerSpec& reg, double eta, const SymMatrix& x) {
  return evaluate(reg, x).value + eta * frobenius_inner(cumulative, x);
}

// ||X - P(X - gamma grad F(X))||_Fr, zero exactly at the constrained minimizer.
inline double stationarity(const SymMatrix& cumulative, const RegularizerSpec& reg, const DecisionSet& set,
                           double eta, const SymMatrix& x, double gamma = 1.0) {
  SymMatrix g = evaluate(reg, x).gradient;
  g.axpy(eta, cumulative);
  SymMatrix trial = x;
  trial.axpy(-gamma, g);
  return frobenius_norm(x - project(trial, set));
}

// Minimizes sum_i r(x_i) + a_i x_i over 0 <= x_i <= cap with optional
// sum x_i <= total and ||x||_2 <= ball. At most one of total/ball is finite.
inline std::vector<double> solve_separable(const ScalarRegularizer& r, std::span<const double> a, double cap,
                                           double total, double ball) {
  const bool use_ball = std::isfinite(ball);
  auto at = [&](double nu) {
    std::vector<double> x(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      x[i] = use_ball ? r.argmin_with_quadratic(a[i], nu, cap) : std::min(r.argmin(a[i] + nu), cap);
    return x;
  };
  auto excess = [&](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += use_ball ? v * v : v;
    return s - (use_ball ? ball * ball : total);
  };
  if (!use_ball && !std::isfinite(total)) {
    std::vector<double> x = at(0.0);
    for (double v : x)
      if (!std::isfinite(v)) throw DomainError("solve_separable: unbounded problem");
    return x;
  }
  std::vector<double> x0 = at(0.0);
  if (excess(x0) <= 0.0) return x0;
  double lo = 0.0;
  double hi = 1.0;
  while (excess(at(hi)) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("solve_separable: could not bracket multiplier");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (excess(at(mid)) > 0.0 ? lo : hi) = mid;
  }
  return at(hi);
}

// Projected gradient descent on F(X) = R(X) + G . X over the set.
//
// The step size halves until F does not increase and gamma times the
// change in gradient is at most the change in X (a local Lipschitz test).
// The gradient test stays meaningful after F has converged to rounding
// level, which a pure function-value test does not. Stops when the gradient
// mapping ||X - P(X - gamma grad F(X))|| / gamma is below tol (1 + |F|).
inline StepResult solve_projected_gradient(const SymMatrix& g, const RegularizerSpec& reg, const DecisionSet& set,
                                           const SolverOptions& opt, const std::optional<SymMatrix>& warm = {}) {
  auto grad_at = [&](const SymMatrix& x) {
    RegValue r = evaluate(reg, x);
    r.gradient += g;
    r.value += frobenius_inner(g, x);
    return r;
  };
  SymMatrix x = project(warm ? *warm : SymMatrix::identity(set.order, 0.5 * set.diagonal_cap()), set);
  RegValue cur = grad_at(x);
  double gamma = 1.0;
  StepResult res;
  for (int it = 0; it < opt.max_iterations; ++it) {
    gamma *= 2.0;
    SymMatrix next;
    RegValue nv;
    for (int bt = 0;; ++bt) {
      if (bt > 100) throw NumericalError("projected gradient: backtracking failed");
      SymMatrix trial = x;
      trial.axpy(-gamma, cur.gradient);
      next = project(trial, set);
      bool ok = true;
      try {
        nv = grad_at(next);
      } catch (const DomainError&) {
        ok = false;
      }
      if (ok && nv.value <= cur.value + 1e-13 * (1.0 + std::abs(cur.value)) &&
          gamma * frobenius_norm(nv.gradient - cur.gradient) <= frobenius_norm(next - x))
        break;
      gamma *= 0.5;
    }
    const double residual = frobenius_norm(next - x) / gamma;
    x = std::move(next);
    cur = std::move(nv);
    res.iterations = it + 1;
    if (residual <= opt.tol * (1.0 + std::abs(cur.value))) {
      res.x = x;
      res.objective = cur.value;
      res.certificate = residual;
      return res;
    }
  }
  throw NumericalError("projected gradient: no convergence in " + std::to_string(opt.max_iterations) + " iterations");
}

// Exact minimizer for sets whose solution diagonalizes with G.
inline StepResult solve_closed_form(const SymMatrix& g, const RegularizerSpec& reg, const DecisionSet& set) {
  const ScalarRegularizer r(reg);
  const double inf = std::numeric_limits<double>::infinity();
  StepResult res;
  if (set.kind == SetKind::diag_reduced) {
    const std::vector<double> a = g.diag();
    const std::vector<double> x = solve_separable(r, a, set.beta, set.tau, inf);
    res.x = SymMatrix::diagonal(x);
    for (std::size_t i = 0; i < x.size(); ++i) res.objective += r.value(x[i]) + a[i] * x[i];
    return res;
  }
  const EigPair e = sym_eig(g);
  std::vector<double> x;
  switch (set.kind) {
    case SetKind::trace_ball: x = solve_separable(r, e.values, inf, set.radius, inf); break;
    case SetKind::spectral_ball: x = solve_separable(r, e.values, set.radius, inf, inf); break;
    case SetKind::frobenius_ball: x = solve_separable(r, e.values, inf, inf, set.radius); break;
    default: throw DomainError("solve_closed_form: set is not unitarily invariant");
  }
  res.x = reconstruct(e, x);
  for (std::size_t k = 0; k < x.size(); ++k) res.objective += r.value(x[k]) + e.values[k] * x[k];
  return res;
}

// Per-round FTRL minimizer with warm starts carried between calls.
class FtrlSolver {
 public:
  FtrlSolver(RegularizerSpec reg, DecisionSet set, double eta, SolverOptions opt = {})
      : reg_(reg), set_(set), eta_(eta), opt_(opt) {
    reg_.validate();
    if (!(eta > 0.0 && std::isfinite(eta))) throw DomainError("FtrlSolver: eta must be > 0");
  }

  const RegularizerSpec& regularizer() const { return reg_; }
  const DecisionSet& set() const { return set_; }
  double eta() const { return eta_; }

  // argmin_{X in set} R(X) + eta * C . X
  StepResult solve(const SymMatrix& cumulative) {
    if (cumulative.order() != set_.order) throw DimensionError("ftrl: loss order does not match the set");
    SymMatrix g = cumulative;
    g *= eta_;
    StepResult res;
    if (opt_.kind == SolverKind::projected_gradient) {
      res = solve_projected_gradient(g, reg_, set_, opt_, last_);
    } else if (set_.kind == SetKind::reduced) {
      if (!dual_) dual_.emplace(reg_, set_);
      auto r = dual_->solve(g, opt_.tol, opt_.max_iterations, warm_);
      warm_ = r.point;
      res.x = std::move(r.x);
      res.objective = r.primal;
      res.certificate = r.gap();
      res.iterations = r.iterations;
    } else {
      res = solve_closed_form(g, reg_, set_);
    }
    last_ = res.x;
    return res;
  }

 private:
  RegularizerSpec reg_;
  DecisionSet set_;
  double eta_;
  SolverOptions opt_;
  std::optional<CappedDualSolver> dual_;
  std::optional<DualPoint> warm_;
  std::optional<SymMatrix> last_;
};

inline SymMatrix ftrl_step(const SymMatrix& cumulative, const RegularizerSpec& reg, const DecisionSet& set, double eta,
                           const SolverOptions& opt = {}) {
  FtrlSolver solver(reg, set, eta, opt);
  return solver.solve(cumulative).x;
}

}  // namespace sdpftrl
