#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "sdpftrl/capped_dual.hpp"
#include "sdpftrl/decision_set.hpp"
#include "sdpftrl/error.hpp"
#include "sdpftrl/sym_matrix.hpp"

namespace sdpftrl {

// min_{U in set} C . U with a certificate: value is C . U for the returned
// feasible U and lower_bound <= the true minimum.
struct OfflineResult {
  SymMatrix u;
  double value = 0.0;
  double lower_bound = 0.0;
  // Multipliers of the diagonal caps for reduced sets (scaled to C).
  std::vector<double> diag_multipliers;
  double gap() const { return value - lower_bound; }
};

namespace detail {

// Dual bound for min C . X over reduced(beta, tau) from diagonal multipliers
// d >= 0: -tau max(0, -lambda_min(C + diag(d))) - beta sum d.
inline double reduced_dual_bound(const SymMatrix& c, const DecisionSet& set, std::span<const double> d) {
  SymMatrix m = c;
  double sum_d = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    m.add(i, i, d[i]);
    sum_d += d[i];
  }
  return -set.tau * std::max(0.0, -min_eigenvalue(m)) - set.beta * sum_d;
}

// Minimizes sum c_i x_i over 0 <= x_i <= beta, sum x_i <= tau.
inline std::vector<double> knapsack_diag(std::span<const double> c, double beta, double tau) {
  std::vector<std::size_t> idx(c.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return c[a] < c[b]; });
  std::vector<double> x(c.size(), 0.0);
  double left = tau;
  for (std::size_t i : idx) {
    if (c[i] >= 0.0 || left <= 0.0) break;
    x[i] = std::min(beta, left);
    left -= x[i];
  }
  return x;
}

}  // namespace detail

struct OfflineOptions {
  // Duality gap target for reduced sets, relative to 1 + |value|.
  double tol = 1e-6;
  int max_stages = 40;
};

// Best fixed decision in hindsight for the summed loss C = sum_t L_t.
//
// Ball kinds and diag_reduced have closed forms. For reduced(beta, tau) the
// linear SDP is solved by path following on the log-barrier-like problem
//   min_{X in set} -ln det(X + beta I) + eta C/|C| . X
// with eta growing tenfold per stage (less after a failed stage). Each stage's diagonal multipliers give
// a dual bound, and the loop stops once the certified gap is below
// tol (1 + |value|).
inline OfflineResult best_offline_sdp(const SymMatrix& c, const DecisionSet& set, const OfflineOptions& opt = {}) {
  if (c.order() != set.order) throw DimensionError("best_offline_sdp: order mismatch");
  const std::size_t n = set.order;
  OfflineResult r;
  switch (set.kind) {
    case SetKind::trace_ball:
    case SetKind::spectral_ball:
    case SetKind::frobenius_ball: {
      const EigPair e = sym_eig(c);
      std::vector<double> x(n, 0.0);
      if (set.kind == SetKind::trace_ball) {
        if (e.values.back() < 0.0) x.back() = set.radius;
      } else if (set.kind == SetKind::spectral_ball) {
        for (std::size_t k = 0; k < n; ++k) x[k] = e.values[k] < 0.0 ? set.radius : 0.0;
      } else {
        double nrm = 0.0;
        for (double v : e.values) nrm += v < 0.0 ? v * v : 0.0;
        nrm = std::sqrt(nrm);
        if (nrm > 0.0)
          for (std::size_t k = 0; k < n; ++k) x[k] = e.values[k] < 0.0 ? -e.values[k] * set.radius / nrm : 0.0;
      }
      r.u = reconstruct(e, x);
      r.value = 0.0;
      for (std::size_t k = 0; k < n; ++k) r.value += e.values[k] * x[k];
      r.lower_bound = r.value;
      return r;
    }
    case SetKind::diag_reduced: {
      const std::vector<double> cd = c.diag();
      const std::vector<double> x = detail::knapsack_diag(cd, set.beta, set.tau);
      r.u = SymMatrix::diagonal(x);
      r.value = std::inner_product(cd.begin(), cd.end(), x.begin(), 0.0);
      r.lower_bound = r.value;
      return r;
    }
    case SetKind::reduced: break;
  }

  const double scale = max_abs_entry(c);
  if (scale == 0.0) {
    r.u = SymMatrix(n);
    r.diag_multipliers.assign(n, 0.0);
    return r;
  }
  const SymMatrix cn = (1.0 / scale) * c;
  CappedDualSolver solver(RegularizerSpec::logdet(set.beta), set);
  std::optional<DualPoint> last;
  double last_eta = 0.0, growth = 10.0, eta = 1.0;
  r.lower_bound = -std::numeric_limits<double>::infinity();
  r.value = std::numeric_limits<double>::infinity();
  for (int stage = 0; stage < opt.max_stages; ++stage) {
    const SymMatrix g = eta * cn;
    std::optional<DualPoint> warm = last;
    if (warm) {
      warm->mu *= eta / last_eta;
      for (double& v : warm->d) v *= eta / last_eta;
    }
    CappedDualSolver::Result res;
    try {
      res = solver.solve(g, 1e-10, 500, warm);
    } catch (const NumericalError&) {
      // Retry with a smaller step from the last solved stage; give up (keeping
      // the best certificate) once steps are short.
      if (!last || growth < 1.5) break;
      growth = std::sqrt(growth);
      eta = last_eta * growth;
      continue;
    }
    const double ub = frobenius_inner(cn, res.x) * scale;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = res.point.d[i] / eta;
    const double lb = detail::reduced_dual_bound(cn, set, d) * scale;
    if (ub < r.value) {
      r.value = ub;
      r.u = res.x;
    }
    if (lb > r.lower_bound) {
      r.lower_bound = lb;
      for (double& v : d) v *= scale;
      r.diag_multipliers = std::move(d);
    }
    if (r.gap() <= opt.tol * (1.0 + std::abs(r.value))) return r;
    last = res.point;
    last_eta = eta;
    eta *= growth;
  }
  if (r.gap() <= opt.tol * (1.0 + std::abs(r.value))) return r;
  throw NumericalError("best_offline_sdp: gap " + std::to_string(r.gap()) + " above tolerance");
}

template <class Range>
OfflineResult best_offline_sdp_sum(const Range& losses, const DecisionSet& set, const OfflineOptions& opt = {}) {
  SymMatrix c(set.order);
  for (const SymMatrix& l : losses) c += l;
  return best_offline_sdp(c, set, opt);
}

// Certified lower bounds on min_{U in set} C_t . U along a growing prefix sum
// C_t. Closed-form sets are exact. For reduced sets each call costs one
// eigenvalue computation using diagonal multipliers refreshed by a full
// solve every `refresh_every` calls.
class PrefixComparator {
 public:
  PrefixComparator(DecisionSet set, std::size_t refresh_every = 32, double tol = 1e-6)
      : set_(set), refresh_every_(refresh_every), tol_(tol), hint_(set.order, 0.0) {}

  double lower_bound(const SymMatrix& c) {
    if (set_.kind != SetKind::reduced) return best_offline_sdp(c, set_).value;
    if (calls_++ % refresh_every_ == 0) {
      const OfflineResult r = best_offline_sdp(c, set_, {tol_});
      hint_ = r.diag_multipliers;
      return r.lower_bound;
    }
    return std::max(detail::reduced_dual_bound(c, set_, hint_),
                    detail::reduced_dual_bound(c, set_, std::vector<double>(set_.order, 0.0)));
  }

 private:
  DecisionSet set_;
  std::size_t refresh_every_;
  double tol_;
  std::size_t calls_ = 0;
  std::vector<double> hint_;
};

}  // namespace sdpftrl
