#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sdpftrl/bounds.hpp"
#include "sdpftrl/decision_set.hpp"
#include "sdpftrl/error.hpp"
#include "sdpftrl/game.hpp"
#include "sdpftrl/regularizers.hpp"
#include "sdpftrl/sym_matrix.hpp"

namespace sdpftrl {

// Online matrix prediction over a (beta, tau)-decomposable class of m x n
// matrices with G-Lipschitz convex losses on [-1, 1].
struct OmpProblem {
  std::size_t rows = 1;
  std::size_t cols = 1;
  double lipschitz = 1.0;
  double beta = 1.0;
  double tau = 1.0;
  bool symmetric = false;

  void validate() const {
    if (rows == 0 || cols == 0) throw DomainError("OmpProblem: dimensions must be positive");
    if (!(lipschitz > 0.0 && beta > 0.0 && tau > 0.0)) throw DomainError("OmpProblem: G, beta, tau must be > 0");
    if (symmetric && rows != cols) throw DomainError("OmpProblem: a symmetric class needs m == n");
  }
};

// p is the order of sym(W); the SDP works on blockdiag(P, Q) of order N = 2p.
struct EmbedDims {
  std::size_t p = 0;
  std::size_t n = 0;
};

inline EmbedDims embed_dims(const OmpProblem& problem) {
  const std::size_t p = problem.symmetric ? problem.cols : problem.rows + problem.cols;
  return {p, 2 * p};
}

// Constants of the reduced SDP: order N, (beta, tau) and g1 = 4G.
inline ProblemConstants reduced_constants(const OmpProblem& problem) {
  return {embed_dims(problem).n, 0.0, problem.beta, problem.tau, 4.0 * problem.lipschitz};
}

// [[0, W], [W^T, 0]] for general classes, W itself for symmetric ones.
inline SymMatrix sym_embed(const Matrix& w, bool symmetric) {
  if (symmetric) {
    if (w.rows() != w.cols()) throw DimensionError("sym_embed: symmetric class needs a square matrix");
    SymMatrix s(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = i; j < w.cols(); ++j) {
        if (w(i, j) != w(j, i)) throw DomainError("sym_embed: matrix is not symmetric");
        s.set(i, j, w(i, j));
      }
    return s;
  }
  const std::size_t m = w.rows();
  SymMatrix s(m + w.cols());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < w.cols(); ++j) s.set(i, m + j, w(i, j));
  return s;
}

// sym(W) = P - Q with P, Q the positive and negative eigenparts.
struct Decomposition {
  SymMatrix p;
  SymMatrix q;

  double witness_beta() const {
    double b = 0.0;
    for (std::size_t i = 0; i < p.order(); ++i) b = std::max({b, p(i, i), q(i, i)});
    return b;
  }
  double witness_tau() const { return trace(p) + trace(q); }
};

inline Decomposition decompose_sym(const Matrix& w, bool symmetric) {
  for (double v : w.data())
    if (!(std::abs(v) <= 1.0)) throw DomainError("decompose_sym: entries must lie in [-1, 1]");
  const EigPair e = sym_eig(sym_embed(w, symmetric));
  std::vector<double> pos(e.order()), neg(e.order());
  for (std::size_t k = 0; k < e.order(); ++k) {
    pos[k] = std::max(e.values[k], 0.0);
    neg[k] = std::max(-e.values[k], 0.0);
  }
  return {reconstruct(e, pos), reconstruct(e, neg)};
}

inline SymMatrix embed(const Decomposition& d) { return block_diagonal(d.p, d.q); }

// Position of W_ij inside sym(W).
inline std::pair<std::size_t, std::size_t> sym_position(const OmpProblem& problem, std::size_t i, std::size_t j) {
  if (i >= problem.rows || j >= problem.cols)
    throw DimensionError("index (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
  if (problem.symmetric) {
    if (i == j) throw DomainError("sym_position: diagonal entries are not predicted in symmetric classes");
    return {i, j};
  }
  return {i, problem.rows + j};
}

// X_rc - X_{p+r, p+c} before clamping.
inline double prediction_difference(const SymMatrix& x, std::size_t i, std::size_t j, const OmpProblem& problem) {
  const EmbedDims dims = embed_dims(problem);
  if (x.order() != dims.n) throw DimensionError("extract_prediction: decision order does not match the problem");
  const auto [r, c] = sym_position(problem, i, j);
  return x(r, c) - x(dims.p + r, dims.p + c);
}

inline double extract_prediction(const SymMatrix& x, std::size_t i, std::size_t j, const OmpProblem& problem) {
  return std::clamp(prediction_difference(x, i, j, problem), -1.0, 1.0);
}

struct SparseEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

// Symmetric loss with at most four nonzeros.
struct SparseLoss {
  std::size_t order = 0;
  std::vector<SparseEntry> entries;

  SymMatrix dense() const {
    SymMatrix l(order);
    for (const SparseEntry& e : entries) l.set(e.row, e.col, e.value);
    return l;
  }
  double l1() const {
    double s = 0.0;
    for (const SparseEntry& e : entries) s += std::abs(e.value);
    return s;
  }
  double max_abs() const {
    double s = 0.0;
    for (const SparseEntry& e : entries) s = std::max(s, std::abs(e.value));
    return s;
  }
};

// g at (r, c), (c, r) and -g at (p+r, p+c), (p+c, p+r), so that
// L . X = 2 g (X_rc - X_{p+r, p+c}).
inline SparseLoss build_sparse_loss(std::size_t i, std::size_t j, double g, const OmpProblem& problem) {
  if (!(std::abs(g) <= problem.lipschitz * (1.0 + 1e-12)))
    throw DomainError("build_sparse_loss: |g| exceeds the Lipschitz constant");
  const EmbedDims dims = embed_dims(problem);
  const auto [r, c] = sym_position(problem, i, j);
  SparseLoss l{dims.n, {}};
  if (g == 0.0) return l;
  l.entries = {{r, c, g}, {c, r, g}, {dims.p + r, dims.p + c, -g}, {dims.p + c, dims.p + r, -g}};
  return l;
}

enum class LossKind {
  sign,      // |y_hat - y| / 2 with y in {-1, +1}
  absolute,  // |y_hat - y|
  squared,   // (y_hat - y)^2
};

inline std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::sign: return "sign";
    case LossKind::absolute: return "absolute";
    case LossKind::squared: return "squared";
  }
  return "?";
}

// Lipschitz constant on [-1, 1] for targets in [-1, 1].
inline double lipschitz_constant(LossKind k) {
  switch (k) {
    case LossKind::sign: return 0.5;
    case LossKind::absolute: return 1.0;
    case LossKind::squared: return 4.0;
  }
  return 0.0;
}

// Round t of a matrix-prediction stream: the queried entry and its loss.
struct RoundEvent {
  std::size_t i = 0;
  std::size_t j = 0;
  double y = 0.0;
  LossKind kind = LossKind::sign;

  double loss(double y_hat) const {
    switch (kind) {
      case LossKind::sign: return 0.5 * std::abs(y_hat - y);
      case LossKind::absolute: return std::abs(y_hat - y);
      case LossKind::squared: return (y_hat - y) * (y_hat - y);
    }
    return 0.0;
  }

  // Kinks take the subgradient 0.
  double subgradient(double y_hat) const {
    const double d = y_hat - y;
    switch (kind) {
      case LossKind::sign: return d > 0.0 ? 0.5 : (d < 0.0 ? -0.5 : 0.0);
      case LossKind::absolute: return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
      case LossKind::squared: return 2.0 * d;
    }
    return 0.0;
  }

  bool operator==(const RoundEvent&) const = default;
};

// Subgradient at the clamped prediction, pushed to the side that keeps
// l(y_hat) - l(u) <= g (raw - u) for all u in [-1, 1] when raw was clamped.
inline double boundary_subgradient(double g, double raw) {
  if (raw > 1.0) return std::max(g, 0.0);
  if (raw < -1.0) return std::min(g, 0.0);
  return g;
}

struct OmpTranscript {
  std::vector<double> raw;         // X_rc - X_{p+r, p+c}
  std::vector<double> prediction;  // clamp(raw)
  std::vector<double> subgradient;
  std::vector<double> omp_loss;
  std::vector<double> omp_cum;
  std::vector<double> omp_comparator_prefix;
  std::vector<double> omp_regret;
  GameTranscript sdp;
  // Witness of the fixed comparator W, when one was supplied.
  std::optional<Decomposition> witness;
  bool witness_violation = false;
  std::vector<double> sdp_regret_vs_witness;

  std::size_t rounds() const { return omp_loss.size(); }
};

struct OmpGameOptions {
  GameOptions sdp;
  // Per-prefix OMP comparator losses (e.g. exact minima). When absent the
  // linearized certified bound is used.
  std::optional<std::vector<double>> comparator_prefix;
  // Fixed comparator in the class; its decomposition is embedded and
  // checked against the declared (beta, tau).
  std::optional<Matrix> comparator;
};

// Runs FTRL on the reduced SDP: predict from X_t, receive l_t, feed the
// sparse loss built from the subgradient at the prediction.
inline OmpTranscript run_omp_game(const OmpProblem& problem, const std::vector<RoundEvent>& events,
                                  const RegularizerSpec& reg, double eta, const OmpGameOptions& opt = {}) {
  problem.validate();
  const EmbedDims dims = embed_dims(problem);
  const DecisionSet set = DecisionSet::reduced(dims.n, problem.beta, problem.tau);
  OmpTranscript tr;
  tr.raw.reserve(events.size());
  GameOptions sdp_opt = opt.sdp;
  if (!sdp_opt.loss_space) sdp_opt.loss_space = LossSpace::vec_l1_ball(4.0 * problem.lipschitz);
  const Adversary adversary = [&](std::size_t t, const SymMatrix& x) {
    const RoundEvent& ev = events[t - 1];
    if (std::abs(ev.y) > 1.0) throw DomainError("run_omp_game: target outside [-1, 1]");
    const double raw = prediction_difference(x, ev.i, ev.j, problem);
    const double y_hat = std::clamp(raw, -1.0, 1.0);
    const double g = boundary_subgradient(ev.subgradient(y_hat), raw);
    tr.raw.push_back(raw);
    tr.prediction.push_back(y_hat);
    tr.subgradient.push_back(g);
    tr.omp_loss.push_back(ev.loss(y_hat));
    return build_sparse_loss(ev.i, ev.j, g, problem).dense();
  };
  tr.sdp = run_sdp_game(adversary, events.size(), reg, set, eta, sdp_opt);

  const std::size_t horizon = events.size();
  double cum = 0.0;
  for (double l : tr.omp_loss) {
    cum += l;
    tr.omp_cum.push_back(cum);
  }
  if (opt.comparator_prefix) {
    if (opt.comparator_prefix->size() != horizon) throw DimensionError("run_omp_game: comparator length mismatch");
    tr.omp_comparator_prefix = *opt.comparator_prefix;
  } else if (opt.comparator) {
    double c = 0.0;
    for (const RoundEvent& ev : events) {
      c += ev.loss((*opt.comparator)(ev.i, ev.j));
      tr.omp_comparator_prefix.push_back(c);
    }
  } else if (sdp_opt.comparator == ComparatorMode::per_prefix) {
    // sum l(u) >= sum l(y_hat) + g (u - y_hat) and sum g u >= LB_SDP / 2.
    double lin = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      lin += tr.omp_loss[t] - tr.subgradient[t] * tr.prediction[t];
      tr.omp_comparator_prefix.push_back(lin + 0.5 * tr.sdp.comparator_prefix[t]);
    }
  } else {
    tr.omp_comparator_prefix.assign(horizon, 0.0);
  }
  for (std::size_t t = 0; t < horizon; ++t) tr.omp_regret.push_back(tr.omp_cum[t] - tr.omp_comparator_prefix[t]);

  if (opt.comparator) {
    tr.witness = decompose_sym(*opt.comparator, problem.symmetric);
    tr.witness_violation =
        tr.witness->witness_beta() > problem.beta + 1e-6 || tr.witness->witness_tau() > problem.tau + 1e-6;
    const SymMatrix xu = embed(*tr.witness);
    double c = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      c += frobenius_inner(tr.sdp.losses[t], xu);
      tr.sdp_regret_vs_witness.push_back(tr.sdp.cum_loss[t] - c);
    }
  }
  return tr;
}

}  // namespace sdpftrl
