#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sdpftrl/adversary.hpp"
#include "sdpftrl/bounds.hpp"
#include "sdpftrl/decision_set.hpp"
#include "sdpftrl/error.hpp"
#include "sdpftrl/game.hpp"
#include "sdpftrl/regularizers.hpp"
#include "sdpftrl/sym_matrix.hpp"

namespace sdpftrl {

// Outcome of one numerical check. Margins are rhs - lhs of the checked
// inequality (lhs <= rhs), so a negative worst margin beyond the tolerance is
// a violation.
struct CheckReport {
  std::string name;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  // Smallest observed actual/required ratio for the quantity a constant
  // guarantees; values far above 1 mean the constant is loose.
  double tightness = std::numeric_limits<double>::infinity();

  bool pass() const { return violations == 0; }

  void record(double margin) {
    worst_margin = std::min(worst_margin, margin);
    if (!(margin >= -tolerance)) ++violations;
  }
  void record_ratio(double actual, double required) {
    if (required > 0.0) tightness = std::min(tightness, actual / required);
  }
  // Failure of an identity or side condition that has no margin.
  void fail() { ++violations; }

  std::string line() const {
    std::ostringstream out;
    out.precision(6);
    out << name << " samples=" << samples << " violations=" << violations << " worst_margin=" << worst_margin
        << " tol=" << tolerance;
    if (std::isfinite(tightness)) out << " tightness=" << tightness;
    out << ' ' << (pass() ? "PASS" : "FAIL");
    return out.str();
  }
};

// max_{i,j} |X_ij - Y_ij| / (X_ii + X_jj + Y_ii + Y_jj), the largest delta
// with which the entry-gap condition holds.
inline double entry_gap_ratio(const SymMatrix& x, const SymMatrix& y) {
  x.check_same(y);
  double best = 0.0;
  for (std::size_t i = 0; i < x.order(); ++i)
    for (std::size_t j = i; j < x.order(); ++j) {
      const double den = x(i, i) + x(j, j) + y(i, i) + y(j, j);
      if (den > 0.0) best = std::max(best, std::abs(x(i, j) - y(i, j)) / den);
    }
  return best;
}

// Zero-mean Gaussian pair with covariances sigma, theta.
struct GaussianPair {
  SymMatrix sigma;
  SymMatrix theta;
  double alpha = 0.5;

  double delta() const { return entry_gap_ratio(sigma, theta); }
  void validate() const {
    sigma.check_same(theta);
    if (min_eigenvalue(sigma) <= 1e-10 || min_eigenvalue(theta) <= 1e-10)
      throw DomainError("GaussianPair: covariances must be positive definite");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("GaussianPair: alpha must lie in [0, 1]");
  }
};

namespace detail {

using CheckRng = std::mt19937_64;

// A^T A + shift I with a k x n Gaussian A, k drawn in [1, n + 2] and shift
// log-uniform in [1e-3, 1].
inline SymMatrix wishart(std::size_t n, CheckRng& rng) {
  std::normal_distribution<double> nd;
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, n + 2)(rng);
  const double shift = std::pow(10.0, std::uniform_real_distribution<double>(-3.0, 0.0)(rng));
  std::vector<double> a(k * n);
  for (double& v : a) v = nd(rng);
  SymMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < k; ++r) s += a[r * n + i] * a[r * n + j];
      out.set(i, j, s + (i == j ? shift : 0.0));
    }
  return out;
}

// PSD member of reduced(beta, tau), scaled by a uniform factor below the
// largest feasible one.
inline SymMatrix reduced_member(std::size_t n, double beta, double tau, CheckRng& rng, bool diagonal) {
  SymMatrix x = wishart(n, rng);
  if (diagonal) x = SymMatrix::diagonal(x.diag());
  double md = 0.0;
  for (double d : x.diag()) md = std::max(md, d);
  const double top = std::min(beta / md, tau / trace(x));
  return (top * std::uniform_real_distribution<double>(0.0, 1.0)(rng)) * x;
}

inline double log_det(const SymMatrix& x) {
  double s = 0.0;
  for (double v : sym_eig(x).values) {
    if (!(v > 0.0)) throw DomainError("log_det: matrix is not positive definite");
    s += std::log(v);
  }
  return s;
}

// Symmetric matrix with entrywise l1 norm exactly g, nonzero on a random
// subset of entries.
inline SymMatrix l1_loss(std::size_t n, double g, CheckRng& rng) {
  std::normal_distribution<double> nd;
  std::bernoulli_distribution keep(std::uniform_real_distribution<double>(0.1, 1.0)(rng));
  SymMatrix l(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (keep(rng)) l.set(i, j, nd(rng));
  const double s = entrywise_l1(l);
  if (s == 0.0) {
    l.set(0, 0, g);
    return l;
  }
  return (g / s) * l;
}

inline double adaptive_simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                                    double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (!std::isfinite(diff)) throw NumericalError("quadrature produced a non-finite value");
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson_step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50);
}

// P(c z^2 < r) for standard normal z.
inline double quadratic_cdf_1d(double c, double r) {
  if (c == 0.0) return r > 0.0 ? 1.0 : 0.0;
  const double q = r / c;
  if (c > 0.0) return q <= 0.0 ? 0.0 : std::erf(std::sqrt(0.5 * q));
  return q <= 0.0 ? 1.0 : std::erfc(std::sqrt(0.5 * q));
}

// P(sum_k c_k z_k^2 < r) for independent standard normals, integrating out
// the leading coordinates and using the closed form for the last one.
inline double quadratic_cdf(std::span<const double> c, double r, double tol) {
  if (c.size() == 1) return quadratic_cdf_1d(c[0], r);
  const std::span<const double> rest = c.subspan(1);
  const double c0 = c[0];
  const auto integrand = [&](double z) {
    return std::exp(-0.5 * z * z) * quadratic_cdf(rest, r - c0 * z * z, 0.1 * tol);
  };
  constexpr double cut = 9.0;
  const double norm = 2.0 / std::sqrt(2.0 * std::numbers::pi);
  // The inner probability has a kink where r - c0 z^2 changes sign.
  double kink = cut;
  if (c0 != 0.0 && r / c0 > 0.0) kink = std::min(cut, std::sqrt(r / c0));
  return norm * (adaptive_simpson(integrand, 0.0, kink, tol) + adaptive_simpson(integrand, kink, cut, tol));
}

}  // namespace detail

// Total variation (half L1) distance between N(0, sigma) and N(0, theta) for
// dimensions 1 to 3. After whitening by sigma and rotating, the pair becomes
// N(0, I) vs N(0, diag(m)); the set where the first density is larger is
// {sum (1 - 1/m_k) z_k^2 < sum ln m_k}, whose probabilities under both laws
// are quadratic-form CDFs.
inline double gaussian_tv(const SymMatrix& sigma, const SymMatrix& theta, double tol = 1e-10) {
  sigma.check_same(theta);
  const std::size_t d = sigma.order();
  if (d == 0 || d > 3) throw DomainError("gaussian_tv: dimension must be 1, 2 or 3");
  const EigPair es = sym_eig(sigma);
  std::vector<double> inv_sqrt(d);
  for (std::size_t k = 0; k < d; ++k) {
    if (!(es.values[k] > 0.0)) throw DomainError("gaussian_tv: sigma must be positive definite");
    inv_sqrt[k] = 1.0 / std::sqrt(es.values[k]);
  }
  const SymMatrix w = reconstruct(es, inv_sqrt);
  const Matrix wt = multiply(w, theta);
  SymMatrix m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += wt(i, k) * w(k, j);
      m.set(i, j, s);
    }
  const std::vector<double> mv = sym_eig(m).values;
  std::vector<double> c_p, c_q;
  double b = 0.0;
  for (double v : mv) {
    if (!(v > 0.0)) throw DomainError("gaussian_tv: theta must be positive definite");
    if (std::abs(v - 1.0) < 1e-15) continue;
    c_p.push_back(1.0 - 1.0 / v);
    c_q.push_back(v - 1.0);
    b += std::log(v);
  }
  if (c_p.empty()) return 0.0;
  return detail::quadratic_cdf(c_p, b, tol) - detail::quadratic_cdf(c_q, b, tol);
}

// Closed form in one dimension with standard deviations s1 < s2 (or s1 > s2):
// |erf(a / (s1 sqrt 2)) - erf(a / (s2 sqrt 2))| with a the crossing point.
inline double gaussian_tv_1d(double var1, double var2) {
  if (var1 == var2) return 0.0;
  const double s1 = std::sqrt(var1), s2 = std::sqrt(var2);
  const double a = std::sqrt(std::log(var2 / var1) / (1.0 / var1 - 1.0 / var2));
  return std::abs(std::erf(a / (s1 * std::numbers::sqrt2)) - std::erf(a / (s2 * std::numbers::sqrt2)));
}

// Shannon entropy with 0 ln 0 = 0.
inline double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

// Log-det Hessian lower bound on the spectral ball of radius sigma with
// eps = sigma: the quadratic form is at least ||W||_Sp^2 / (sigma + eps)^2,
// its minimum over unit-Frobenius W is (lambda_max + eps)^-2, attained at
// v v^T for the top eigenvector v, and eps^N <= det(X + eps I) <= (2 eps)^N.
inline CheckReport check_hessian(std::size_t samples, std::uint64_t seed, std::size_t n = 5, double sigma = 1.0) {
  CheckReport rep{"hessian", samples, 0, std::numeric_limits<double>::infinity(), 1e-12};
  detail::CheckRng rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double eps = sigma;
  for (std::size_t s = 0; s < samples; ++s) {
    SymMatrix g(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) g.set(i, j, nd(rng));
    const EigPair basis = sym_eig(g);
    std::vector<double> lam(n);
    for (double& v : lam) v = sigma * u(rng);
    if (s % 10 == 0) std::fill(lam.begin(), lam.end(), s % 20 == 0 ? 0.0 : sigma);
    const SymMatrix x = reconstruct(basis, lam);
    SymMatrix w(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) w.set(i, j, nd(rng));
    const double q = logdet_hessian_quadform(x, w, eps);
    const double sp = norms(w).spectral_norm;
    const double lower = sp * sp / ((sigma + eps) * (sigma + eps));
    rep.record((q - lower) / (1.0 + q));

    const EigPair ex = sym_eig(x);
    const double top = ex.values.front();
    SymMatrix vv(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) vv.set(i, j, ex.vectors(i, 0) * ex.vectors(j, 0));
    const double expected = 1.0 / ((top + eps) * (top + eps));
    if (std::abs(logdet_hessian_quadform(x, vv, eps) - expected) > 1e-8) rep.fail();
    const double wn = frobenius_norm(w);
    rep.record((logdet_hessian_quadform(x, (1.0 / wn) * w, eps) - expected) / (1.0 + expected));

    double ld = 0.0;
    for (double v : ex.values) ld += std::log(std::max(v, 0.0) + eps);
    const double nn = static_cast<double>(n);
    rep.record(ld - nn * std::log(eps) + 1e-12 * nn);
    rep.record(nn * std::log(2.0 * eps) - ld + 1e-12 * nn);
  }
  return rep;
}

// -ln det(a X + (1-a) Y) <= -a ln det X - (1-a) ln det Y
//                           - (a (1-a) / 2) delta^2 / (72 sqrt e)
// with delta the entry-gap ratio of (X, Y).
inline CheckReport check_logdet_strong_convexity(std::size_t samples, std::uint64_t seed) {
  CheckReport rep{"logdet-convexity", samples, 0, std::numeric_limits<double>::infinity(), 1e-10};
  detail::CheckRng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double c = 72.0 * std::sqrt(std::exp(1.0));
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t n = 2 + s % 5;
    const SymMatrix x = detail::wishart(n, rng);
    const SymMatrix y = s % 50 == 0 ? x : detail::wishart(n, rng);
    const double alpha = s % 37 == 0 ? static_cast<double>(s % 2) : u(rng);
    const double delta = entry_gap_ratio(x, y);
    const double lhs = -detail::log_det(alpha * x + (1.0 - alpha) * y);
    const double jensen = -alpha * detail::log_det(x) - (1.0 - alpha) * detail::log_det(y);
    const double required = 0.5 * alpha * (1.0 - alpha) * delta * delta / c;
    rep.record(jensen - required - lhs);
    rep.record_ratio(jensen - lhs, required);
  }
  return rep;
}

// Some (i, j) has |X_ij - Y_ij| >= |L . (X - Y)| / (4 g1 beta') (X_ii + X_jj + Y_ii + Y_jj)
// when every diagonal entry is at most beta' and ||vec L||_1 <= g1.
inline CheckReport check_entry_gap(std::size_t samples, std::uint64_t seed) {
  CheckReport rep{"entry-gap", samples, 0, std::numeric_limits<double>::infinity(), 1e-12};
  detail::CheckRng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t n = 2 + s % 6;
    const double beta = 0.1 + 2.0 * u(rng);
    const double g1 = 0.1 + 4.0 * u(rng);
    SymMatrix x, y;
    if (s % 3 == 2) {
      // General symmetric matrices with capped diagonals.
      x = SymMatrix(n);
      y = SymMatrix(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
          x.set(i, j, i == j ? beta * (2.0 * u(rng) - 1.0) : nd(rng));
          y.set(i, j, i == j ? beta * (2.0 * u(rng) - 1.0) : nd(rng));
        }
    } else {
      x = detail::reduced_member(n, beta, 1e300, rng, false);
      y = detail::reduced_member(n, beta, 1e300, rng, false);
    }
    const SymMatrix l = s % 100 == 0 ? SymMatrix(n) : u(rng) * detail::l1_loss(n, g1, rng);
    const SymMatrix d = x - y;
    const double scale = std::abs(frobenius_inner(l, d)) / (4.0 * g1 * beta);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double m = std::abs(d(i, j)) - scale * (x(i, i) + x(j, j) + y(i, i) + y(j, j));
        if (m > best) best = m, bi = i, bj = j;
      }
    rep.record(best);
    rep.record_ratio(std::abs(d(bi, bj)), scale * (x(bi, bi) + x(bj, bj) + y(bi, bi) + y(bj, bj)));
  }
  return rep;
}

// Strong convexity of R(X) = -ln det(X + eps I), eps = beta, on reduced(beta,
// tau) with respect to the l1 loss ball of radius g1, with
// s = 1 / (1152 sqrt(e) g1^2 (beta + eps)^2), in both the interpolation form
//   R(a X + (1-a) Y) <= a R(X) + (1-a) R(Y) - (s/2) a (1-a) |L . (X-Y)|^2
// and the first-order form
//   R(X) >= R(Y) + grad R(Y) . (X - Y) + (s/2) |L . (X-Y)|^2.
// L puts mass g1 on the largest entry of |X - Y|. Every fourth sample uses
// diagonal X, Y.
inline CheckReport check_strong_convexity(std::size_t samples, std::uint64_t seed, std::size_t n = 4,
                                          double beta = 1.0, double tau = 2.0, double g1 = 1.0) {
  CheckReport rep{"strong-convexity", samples, 0, std::numeric_limits<double>::infinity(), 1e-10};
  detail::CheckRng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double eps = beta;
  const double s_mod = 1.0 / (1152.0 * std::sqrt(std::exp(1.0)) * g1 * g1 * (beta + eps) * (beta + eps));
  for (std::size_t s = 0; s < samples; ++s) {
    const bool diagonal = s % 4 == 3;
    const SymMatrix x = detail::reduced_member(n, beta, tau, rng, diagonal);
    const SymMatrix y = s % 50 == 0 ? x : detail::reduced_member(n, beta, tau, rng, diagonal);
    const SymMatrix d = x - y;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        if (std::abs(d(i, j)) > std::abs(d(bi, bj))) bi = i, bj = j;
    SymMatrix l(n);
    l.set(bi, bj, bi == bj ? g1 : 0.5 * g1);
    const double q = frobenius_inner(l, d);
    const double alpha = u(rng);
    const RegValue rx = logdet_reg(x, eps), ry = logdet_reg(y, eps);
    const double rm = logdet_reg(alpha * x + (1.0 - alpha) * y, eps).value;
    const double scale = 1.0 + std::abs(rx.value) + std::abs(ry.value);
    const double mid_gap = alpha * rx.value + (1.0 - alpha) * ry.value - rm;
    const double mid_required = 0.5 * s_mod * alpha * (1.0 - alpha) * q * q;
    const double lin_gap = rx.value - ry.value - frobenius_inner(ry.gradient, d);
    const double lin_required = 0.5 * s_mod * q * q;
    rep.record((mid_gap - mid_required) / scale);
    rep.record((lin_gap - lin_required) / scale);
    rep.record_ratio(mid_gap, mid_required);
    rep.record_ratio(lin_gap, lin_required);
  }
  return rep;
}

// regret[t] <= H0 / eta + sum_{s<=t} L_s . (X_s - X_{s+1}) + 10 tol t on a
// transcript with decisions kept; H0 is the exact regularizer range.
inline CheckReport check_ftl_btl(const GameTranscript& tr, const RegularizerSpec& reg, const DecisionSet& set,
                                 double tol) {
  CheckReport rep{"ftl-btl", tr.rounds(), 0, std::numeric_limits<double>::infinity(), 0.0};
  if (tr.decisions.size() != tr.rounds()) throw DimensionError("check_ftl_btl: transcript has no decisions");
  const double h0 = regularizer_range(reg, set);
  double stability = 0.0;
  for (std::size_t t = 0; t < tr.rounds(); ++t) {
    const SymMatrix& next = t + 1 < tr.rounds() ? tr.decisions[t + 1] : tr.next_decision;
    stability += frobenius_inner(tr.losses[t], tr.decisions[t] - next);
    const double rhs = h0 / tr.eta + stability + 10.0 * tol * static_cast<double>(t + 1);
    rep.record(rhs - tr.regret[t]);
  }
  return rep;
}

// Seeded logdet runs on reduced(1, 2) of order 4, T = 256, alternating i.i.d.
// and adaptive adversaries, with an exact per-round comparator.
inline CheckReport check_ftl_btl_suite(std::size_t runs, std::uint64_t seed) {
  CheckReport rep{"ftl-btl", 0, 0, std::numeric_limits<double>::infinity(), 0.0};
  const ProblemConstants c{4, 0.0, 1.0, 2.0, 1.0};
  const std::size_t horizon = 256;
  const BoundParams bp = bound_params(BoundVariant::logdet_main, c, static_cast<double>(horizon));
  const RegularizerSpec reg = default_regularizer(BoundVariant::logdet_main, c);
  const DecisionSet set = default_set(BoundVariant::logdet_main, c);
  const LossSpace space = default_loss_space(BoundVariant::logdet_main, c);
  GameOptions opt;
  opt.comparator_refresh = 1;
  for (std::size_t r = 0; r < runs; ++r) {
    const Adversary adv =
        r % 2 == 0 ? iid_adversary(space, c.order, seed + r) : adaptive_adversary(space, c.order, seed + r);
    const GameTranscript tr = run_sdp_game(adv, horizon, reg, set, bp.eta, opt);
    const CheckReport one = check_ftl_btl(tr, reg, set, opt.solver.tol);
    rep.samples += one.samples;
    rep.violations += one.violations;
    rep.worst_margin = std::min(rep.worst_margin, one.worst_margin);
  }
  return rep;
}

// e^{-x/2} - e^{-(1-x)/2} >= (e^{-1/4} / 2)(1 - 2x) on a uniform grid of [0, 1/2].
inline CheckReport check_exp_tangent(std::size_t grid_points) {
  CheckReport rep{"exp-tangent", grid_points, 0, std::numeric_limits<double>::infinity(), 1e-12};
  const double c = 0.5 * std::exp(-0.25);
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double x = grid_points == 1 ? 0.0 : 0.5 * static_cast<double>(k) / static_cast<double>(grid_points - 1);
    const double f = std::exp(-0.5 * x) - std::exp(-0.5 * (1.0 - x));
    rep.record(f - c * (1.0 - 2.0 * x));
    if (x < 0.5) rep.record_ratio(f, c * (1.0 - 2.0 * x));
  }
  return rep;
}

// For seeded Gaussian pairs of dimension 1..max_dim:
//   TV >= delta / (12 e^{1/4}),
//   max_u |phi_P(u) - phi_Q(u)| <= 2 TV over sampled u,
// and for every 20th pair a Monte Carlo estimate of the differential entropy
// within 1e-2 of ln((2 pi e)^N det sigma) / 2.
inline CheckReport check_tv_bound(std::size_t samples, std::uint64_t seed, std::size_t max_dim = 2) {
  if (max_dim == 0 || max_dim > 3) throw DomainError("check_tv_bound: dimension must be 1, 2 or 3");
  CheckReport rep{"tv-bound", samples, 0, std::numeric_limits<double>::infinity(), 1e-9};
  detail::CheckRng rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double c = 12.0 * std::exp(0.25);
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t d = 1 + s % max_dim;
    const SymMatrix sigma = detail::wishart(d, rng);
    const GaussianPair gp{sigma, s % 100 == 0 ? sigma : detail::wishart(d, rng), u(rng)};
    gp.validate();
    const double tv = gaussian_tv(gp.sigma, gp.theta);
    rep.record(tv - gp.delta() / c);
    rep.record_ratio(tv, gp.delta() / c);

    double worst_phi = 0.0;
    for (int k = 0; k < 64; ++k) {
      std::vector<double> v(d);
      for (double& e : v) e = nd(rng);
      const double r = 3.0 * u(rng);
      double qs = 0.0, qt = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          qs += v[i] * gp.sigma(i, j) * v[j];
          qt += v[i] * gp.theta(i, j) * v[j];
        }
      // Scale u so that u^T sigma u = r^2.
      const double a = r * r / qs;
      worst_phi = std::max(worst_phi, std::abs(std::exp(-0.5 * a * qs) - std::exp(-0.5 * a * qt)));
    }
    rep.record(2.0 * tv - worst_phi);

    if (s % 20 == 0) {
      const EigPair e = sym_eig(gp.sigma);
      std::vector<double> inv(d);
      for (std::size_t k = 0; k < d; ++k) inv[k] = 1.0 / e.values[k];
      const SymMatrix prec = reconstruct(e, inv);
      const double ld = detail::log_det(gp.sigma);
      const double dd = static_cast<double>(d);
      const double log_norm = 0.5 * (dd * std::log(2.0 * std::numbers::pi) + ld);
      constexpr std::size_t draws = 400000;
      double acc = 0.0;
      std::vector<double> z(d), x(d);
      for (std::size_t m = 0; m < draws; ++m) {
        for (double& zk : z) zk = nd(rng);
        for (std::size_t i = 0; i < d; ++i) {
          x[i] = 0.0;
          for (std::size_t k = 0; k < d; ++k) x[i] += e.vectors(i, k) * std::sqrt(e.values[k]) * z[k];
        }
        double quad = 0.0;
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j) quad += x[i] * prec(i, j) * x[j];
        acc += log_norm + 0.5 * quad;
      }
      const double exact = 0.5 * (dd * std::log(2.0 * std::numbers::pi * std::exp(1.0)) + ld);
      rep.record(1e-2 - std::abs(acc / static_cast<double>(draws) - exact));
    }
  }
  return rep;
}

// Strong concavity of Shannon entropy in total variation:
//   H(a P + (1-a) Q) >= a H(P) + (1-a) H(Q) + a (1-a) delta^2,
// delta the half-l1 distance, on random distributions over at most 64 atoms.
inline CheckReport check_negentropy_convexity(std::size_t samples, std::uint64_t seed) {
  CheckReport rep{"negentropy", samples, 0, std::numeric_limits<double>::infinity(), 1e-12};
  detail::CheckRng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto draw = [&](std::size_t k) {
    const double shape = u(rng) < 0.5 ? 0.1 : 1.0;
    std::gamma_distribution<double> gd(shape);
    std::vector<double> p(k);
    double sum = 0.0;
    for (double& v : p) sum += (v = gd(rng));
    if (sum == 0.0) {
      p[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)] = 1.0;
      return p;
    }
    for (double& v : p) v /= sum;
    return p;
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 64)(rng);
    const std::vector<double> p = draw(k);
    const std::vector<double> q = s % 50 == 0 ? p : draw(k);
    const double alpha = s % 37 == 0 ? 0.0 : u(rng);
    std::vector<double> mix(k);
    double delta = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      mix[i] = alpha * p[i] + (1.0 - alpha) * q[i];
      delta += 0.5 * std::abs(p[i] - q[i]);
    }
    const double gap = shannon_entropy(mix) - alpha * shannon_entropy(p) - (1.0 - alpha) * shannon_entropy(q);
    const double required = alpha * (1.0 - alpha) * delta * delta;
    rep.record(gap - required);
    if (required > 1e-12) rep.record_ratio(gap, required);
  }
  return rep;
}

struct SuiteInfo {
  std::string_view name;
  std::size_t default_samples;
};

inline constexpr SuiteInfo validation_suites[] = {
    {"hessian", 1000},  {"logdet-convexity", 10000}, {"entry-gap", 10000}, {"strong-convexity", 10000},
    {"ftl-btl", 4},     {"exp-tangent", 1000000},    {"tv-bound", 1000},   {"negentropy", 100000},
};

inline std::string suite_names() {
  std::string out;
  for (const SuiteInfo& s : validation_suites) out += std::string(s.name) + ", ";
  return out + "all";
}

// Runs one suite, or every suite for "all". samples = 0 uses each suite's
// default count.
inline std::vector<CheckReport> run_validation(std::string_view suite, std::size_t samples, std::uint64_t seed) {
  std::vector<CheckReport> out;
  bool known = false;
  for (const SuiteInfo& s : validation_suites) {
    if (suite != "all" && suite != s.name) continue;
    known = true;
    const std::size_t n = samples ? samples : s.default_samples;
    if (s.name == "hessian") out.push_back(check_hessian(n, seed));
    else if (s.name == "logdet-convexity") out.push_back(check_logdet_strong_convexity(n, seed));
    else if (s.name == "entry-gap") out.push_back(check_entry_gap(n, seed));
    else if (s.name == "strong-convexity") out.push_back(check_strong_convexity(n, seed));
    else if (s.name == "ftl-btl") out.push_back(check_ftl_btl_suite(n, seed));
    else if (s.name == "exp-tangent") out.push_back(check_exp_tangent(n));
    else if (s.name == "tv-bound") out.push_back(check_tv_bound(n, seed));
    else if (s.name == "negentropy") out.push_back(check_negentropy_convexity(n, seed));
  }
  if (!known) throw DomainError("unknown suite '" + std::string(suite) + "'; valid suites: " + suite_names());
  return out;
}

}  // namespace sdpftrl
