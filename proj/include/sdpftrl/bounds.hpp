#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "sdpftrl/decision_set.hpp"
#include "sdpftrl/error.hpp"
#include "sdpftrl/regularizers.hpp"

namespace sdpftrl {

// eta = sqrt(s H0 / T)
inline double learning_rate(double s, double h0, double horizon) {
  if (!(s > 0.0 && h0 > 0.0 && horizon > 0.0)) throw DomainError("learning_rate: arguments must be > 0");
  return std::sqrt(s * h0 / horizon);
}

// Regret of FTRL tuned with learning_rate(s, H0, T): 2 sqrt(H0 T / s).
inline double ftrl_regret_bound(double s, double h0, double horizon) {
  if (!(s > 0.0 && h0 > 0.0 && horizon > 0.0)) throw DomainError("ftrl_regret_bound: arguments must be > 0");
  return 2.0 * std::sqrt(h0 * horizon / s);
}

// Guarantee at round t for a fixed eta: H0 / eta + eta t / s.
inline double fixed_rate_regret_bound(double s, double h0, double eta, double t) {
  return h0 / eta + eta * t / s;
}

// Regret guarantees and the (decision set, loss set, regularizer) they hold for.
//   frobenius         Frobenius ball rho, loss Fr-ball gamma, 1/2||X||^2:  rho gamma sqrt(2T)
//   entropic          trace ball tau, loss Sp-ball gamma, entropic:       2 tau gamma sqrt(T ln N)
//   logdet_spectral   Sp-ball sigma, loss Tr-ball gamma, logdet(sigma):   4 sigma gamma sqrt(T N ln 2)
//   entropic_reduced  reduced(beta, tau), entropic, Tr(L^2) <= gamma with
//                     L^2 diagonal:                                       2 sqrt(beta tau gamma T ln N)
//   logdet_main       reduced(beta, tau), loss l1-ball g, logdet(beta):   175 g sqrt(beta tau T)
//   burg_vector       diag_reduced(beta, tau), loss l1-ball g, burg(beta): 4 g sqrt(beta tau T)
enum class BoundVariant { frobenius, entropic, logdet_spectral, entropic_reduced, logdet_main, burg_vector };

inline std::string_view to_string(BoundVariant v) {
  switch (v) {
    case BoundVariant::frobenius: return "frobenius";
    case BoundVariant::entropic: return "entropic";
    case BoundVariant::logdet_spectral: return "logdet-spectral";
    case BoundVariant::entropic_reduced: return "entropic-reduced";
    case BoundVariant::logdet_main: return "logdet-main";
    case BoundVariant::burg_vector: return "burg-vector";
  }
  return "?";
}

inline BoundVariant parse_bound_variant(std::string_view s) {
  for (BoundVariant v : {BoundVariant::frobenius, BoundVariant::entropic, BoundVariant::logdet_spectral,
                         BoundVariant::entropic_reduced, BoundVariant::logdet_main, BoundVariant::burg_vector})
    if (s == to_string(v)) return v;
  throw DomainError("unknown bound variant '" + std::string(s) + "'");
}

// Constants of a bound instance. radius is rho, tau or sigma for the ball
// variants; beta/tau describe reduced sets; loss_radius is gamma_2,
// gamma_inf, gamma_1, gamma or g_1 as appropriate.
struct ProblemConstants {
  std::size_t order = 1;
  double radius = 0.0;
  double beta = 0.0;
  double tau = 0.0;
  double loss_radius = 0.0;
};

struct BoundParams {
  double s = 0.0;
  double h0 = 0.0;
  double eta = 0.0;
  double horizon = 0.0;
};

// Strong-convexity modulus with respect to the loss space and regularizer
// range used by each guarantee.
inline BoundParams bound_params(BoundVariant v, const ProblemConstants& c, double horizon) {
  const double n = static_cast<double>(c.order);
  const double g = c.loss_radius;
  if (!(g > 0.0)) throw DomainError("bound_params: loss radius must be > 0");
  BoundParams p;
  switch (v) {
    case BoundVariant::frobenius:
      p.s = 1.0 / (g * g);
      p.h0 = 0.5 * c.radius * c.radius;
      break;
    case BoundVariant::entropic:
      if (c.order < 2) throw DomainError("bound_params: entropic bound needs N >= 2");
      p.s = 1.0 / (c.radius * g * g);
      p.h0 = c.radius * std::log(n);
      break;
    case BoundVariant::logdet_spectral:
      p.s = 1.0 / (4.0 * c.radius * c.radius * g * g);
      p.h0 = n * std::log(2.0);
      break;
    case BoundVariant::entropic_reduced:
      if (c.order < 2) throw DomainError("bound_params: entropic bound needs N >= 2");
      p.s = 1.0 / (c.beta * g);
      p.h0 = c.tau * std::log(n);
      break;
    case BoundVariant::logdet_main: {
      const double b = 2.0 * c.beta;  // beta + epsilon with epsilon = beta
      p.s = 1.0 / (1152.0 * std::sqrt(std::exp(1.0)) * g * g * b * b);
      p.h0 = c.tau / c.beta;
      break;
    }
    case BoundVariant::burg_vector:
      p.s = 1.0 / (4.0 * c.beta * c.beta * g * g);
      p.h0 = c.tau / c.beta;
      break;
  }
  if (!(p.s > 0.0 && p.h0 > 0.0 && std::isfinite(p.s) && std::isfinite(p.h0)))
    throw DomainError("bound_params: constants must be positive");
  p.horizon = horizon;
  p.eta = learning_rate(p.s, p.h0, horizon);
  return p;
}

// Closed-form value of each guarantee at horizon T.
inline double theoretical_bound(BoundVariant v, const ProblemConstants& c, double horizon) {
  if (!(horizon > 0.0)) throw DomainError("theoretical_bound: horizon must be > 0");
  const double n = static_cast<double>(c.order);
  const double g = c.loss_radius;
  switch (v) {
    case BoundVariant::frobenius: return c.radius * g * std::sqrt(2.0 * horizon);
    case BoundVariant::entropic: return 2.0 * c.radius * g * std::sqrt(horizon * std::log(n));
    case BoundVariant::logdet_spectral: return 4.0 * c.radius * g * std::sqrt(horizon * n * std::log(2.0));
    case BoundVariant::entropic_reduced: return 2.0 * std::sqrt(c.beta * c.tau * g * horizon * std::log(n));
    case BoundVariant::logdet_main: return 175.0 * g * std::sqrt(c.beta * c.tau * horizon);
    case BoundVariant::burg_vector: return 4.0 * g * std::sqrt(c.beta * c.tau * horizon);
  }
  throw DomainError("theoretical_bound: unknown variant");
}

// Regularizer the guarantee is stated for, with its automatic epsilon.
inline RegularizerSpec default_regularizer(BoundVariant v, const ProblemConstants& c) {
  switch (v) {
    case BoundVariant::frobenius: return RegularizerSpec::frobenius();
    case BoundVariant::entropic:
    case BoundVariant::entropic_reduced: return RegularizerSpec::entropic();
    case BoundVariant::logdet_spectral: return RegularizerSpec::logdet(c.radius);
    case BoundVariant::logdet_main: return RegularizerSpec::logdet(c.beta);
    case BoundVariant::burg_vector: return RegularizerSpec::burg(c.beta);
  }
  throw DomainError("default_regularizer: unknown variant");
}

inline DecisionSet default_set(BoundVariant v, const ProblemConstants& c) {
  switch (v) {
    case BoundVariant::frobenius: return DecisionSet::frobenius_ball(c.order, c.radius);
    case BoundVariant::entropic: return DecisionSet::trace_ball(c.order, c.radius);
    case BoundVariant::logdet_spectral: return DecisionSet::spectral_ball(c.order, c.radius);
    case BoundVariant::entropic_reduced:
    case BoundVariant::logdet_main: return DecisionSet::reduced(c.order, c.beta, c.tau);
    case BoundVariant::burg_vector: return DecisionSet::diag_reduced(c.order, c.beta, c.tau);
  }
  throw DomainError("default_set: unknown variant");
}

inline LossSpace default_loss_space(BoundVariant v, const ProblemConstants& c) {
  switch (v) {
    case BoundVariant::frobenius: return LossSpace::fro_ball(c.loss_radius);
    case BoundVariant::entropic: return LossSpace::spectral_ball(c.loss_radius);
    case BoundVariant::logdet_spectral: return LossSpace::trace_ball(c.loss_radius);
    // Tr(L^2) = ||L||_Fr^2; the L^2-diagonal pattern is checked separately.
    case BoundVariant::entropic_reduced: return LossSpace::fro_ball(std::sqrt(c.loss_radius));
    case BoundVariant::logdet_main:
    case BoundVariant::burg_vector: return LossSpace::vec_l1_ball(c.loss_radius);
  }
  throw DomainError("default_loss_space: unknown variant");
}

// max - min of the regularizer over the set, where it has a closed form.
// For logdet/burg on reduced sets this is N ln((min(beta, tau/N) + eps) / eps),
// which is at most tau / eps.
inline double regularizer_range(const RegularizerSpec& reg, const DecisionSet& set) {
  const double n = static_cast<double>(set.order);
  switch (reg.kind) {
    case RegularizerKind::logdet:
    case RegularizerKind::burg: {
      double top = 0.0;
      switch (set.kind) {
        case SetKind::reduced:
        case SetKind::diag_reduced: top = std::min(set.beta, set.tau / n); break;
        case SetKind::spectral_ball: top = set.radius; break;
        case SetKind::trace_ball: top = set.radius / n; break;
        case SetKind::frobenius_ball: top = set.radius / std::sqrt(n); break;
      }
      return n * std::log1p(top / reg.epsilon);
    }
    case RegularizerKind::frobenius: {
      // max 1/2 ||X||^2 over the set, minimum 0 at X = 0.
      switch (set.kind) {
        case SetKind::frobenius_ball: return 0.5 * set.radius * set.radius;
        case SetKind::spectral_ball: return 0.5 * n * set.radius * set.radius;
        case SetKind::trace_ball: return 0.5 * set.radius * set.radius;
        case SetKind::reduced:
        case SetKind::diag_reduced: {
          // ||X||_Fr^2 <= sum_ij X_ii X_jj bounded by the diagonal caps.
          const double full = std::floor(set.tau / set.beta);
          const double rest = set.tau - full * set.beta;
          const double diag2 = std::min(full, n) * set.beta * set.beta + (full < n ? rest * rest : 0.0);
          if (set.kind == SetKind::diag_reduced) return 0.5 * diag2;
          const double tr = std::min(set.tau, n * set.beta);
          return 0.5 * std::min(tr * tr, tr * set.beta * n);
        }
      }
      break;
    }
    case RegularizerKind::entropic: {
      // x ln x - x is convex with minimum -1 at x = 1. The maximum over a
      // trace-capped set is at a vertex: 0 or a single eigenvalue tau.
      double tr = 0.0;
      double cap = 0.0;
      switch (set.kind) {
        case SetKind::trace_ball: tr = set.radius; cap = set.radius; break;
        case SetKind::spectral_ball: tr = n * set.radius; cap = set.radius; break;
        case SetKind::frobenius_ball: tr = std::sqrt(n) * set.radius; cap = set.radius; break;
        case SetKind::reduced:
        case SetKind::diag_reduced:
          tr = std::min(set.tau, n * set.beta);
          cap = std::min(set.beta, set.tau);
          break;
      }
      auto h = [](double x) { return x > 0.0 ? x * (std::log(x) - 1.0) : 0.0; };
      // min: spread the trace evenly up to 1 per eigenvalue.
      const double lo = tr >= n ? -n : n * h(tr / n);
      // max: h is convex, so it is attained at a vertex of
      // {0 <= x_i <= cap, sum x_i <= tr}: k entries at cap and at most one
      // partial entry.
      const double full = std::min(std::floor(tr / cap), n);
      double hi = std::max(0.0, full * h(cap));
      if (full < n) hi = std::max(hi, full * h(cap) + h(tr - full * cap));
      return hi - lo;
    }
  }
  throw DomainError("regularizer_range: unsupported combination");
}

}  // namespace sdpftrl
