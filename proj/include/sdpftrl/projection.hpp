#pragma once

#include <algorithm>
#include <limits>
#include <string>

#include "sdpftrl/capped_dual.hpp"
#include "sdpftrl/decision_set.hpp"
#include "sdpftrl/error.hpp"
#include "sdpftrl/regularizers.hpp"
#include "sdpftrl/sym_matrix.hpp"

namespace sdpftrl {

struct ProjectionOptions {
  double tol = 1e-12;
  // Newton iterations for project(), cycles for project_dykstra().
  int max_iterations = 2000;
};

namespace detail {

inline SymMatrix project_psd_trace(const SymMatrix& x, double tau, double cap = std::numeric_limits<double>::infinity()) {
  const EigPair e = sym_eig(x);
  return reconstruct(e, project_capped_simplex(e.values, cap, tau));
}

inline SymMatrix clamp_diagonal(SymMatrix x, double beta) {
  for (std::size_t i = 0; i < x.order(); ++i)
    if (x(i, i) > beta) x.set(i, i, beta);
  return x;
}

}  // namespace detail

// Frobenius-norm projection onto the decision set. The ball kinds and
// diag_reduced are handled in closed form on eigenvalues / the diagonal.
// For reduced(beta, tau) the projection of Y is the minimizer of
// ||X||^2/2 - Y . X, solved by the dual Newton method; opt.tol is its
// relative gap tolerance.
inline SymMatrix project(const SymMatrix& x, const DecisionSet& set, const ProjectionOptions& opt = {}) {
  if (x.order() != set.order) throw DimensionError("project: order mismatch");
  switch (set.kind) {
    case SetKind::trace_ball: return detail::project_psd_trace(x, set.radius);
    case SetKind::spectral_ball: {
      const EigPair e = sym_eig(x);
      return spectral_map(e, [&](double lam) { return std::clamp(lam, 0.0, set.radius); });
    }
    case SetKind::frobenius_ball: {
      SymMatrix p = psd_floor(x, 0.0);
      const double nrm = frobenius_norm(p);
      if (nrm > set.radius) p *= set.radius / nrm;
      return p;
    }
    case SetKind::diag_reduced: {
      const std::vector<double> d = x.diag();
      return SymMatrix::diagonal(project_capped_simplex(d, set.beta, set.tau));
    }
    case SetKind::reduced: break;
  }
  if (set.contains(x, 0.0)) return x;
  CappedDualSolver solver(RegularizerSpec::frobenius(), set);
  return solver.solve(-x, opt.tol, opt.max_iterations).x;
}

// Dykstra's alternating projections between {X >= 0, Tr X <= tau} and
// {X_ii <= beta} for reduced(beta, tau). Stops when one cycle moves the
// iterate by at most tol * (1 + ||x||).
inline SymMatrix project_dykstra(const SymMatrix& x, const DecisionSet& set, const ProjectionOptions& opt = {}) {
  if (x.order() != set.order) throw DimensionError("project_dykstra: order mismatch");
  if (set.kind != SetKind::reduced) throw DomainError("project_dykstra: requires a reduced decision set");
  const double inf = std::numeric_limits<double>::infinity();
  if (set.contains(x, 0.0)) return x;
  const double scale = 1.0 + frobenius_norm(x);
  SymMatrix cur = x;
  SymMatrix p(x.order());
  SymMatrix q(x.order());
  for (int cycle = 0; cycle < opt.max_iterations; ++cycle) {
    const SymMatrix y = detail::project_psd_trace(cur + p, set.tau, inf);
    p = cur + p - y;
    SymMatrix next = detail::clamp_diagonal(y + q, set.beta);
    q = y + q - next;
    const double move = frobenius_norm(next - cur);
    const double gap = frobenius_norm(next - y);
    cur = std::move(next);
    if (move <= opt.tol * scale && gap <= opt.tol * scale) return cur;
  }
  throw NumericalError("project_dykstra: no convergence in " + std::to_string(opt.max_iterations) + " cycles");
}

}  // namespace sdpftrl
