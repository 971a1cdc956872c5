#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>

#include "sdpftrl/decision_set.hpp"
#include "sdpftrl/error.hpp"
#include "sdpftrl/game.hpp"
#include "sdpftrl/sym_matrix.hpp"

namespace sdpftrl {

using Rng = std::mt19937_64;

// One entry of mass g (split g/2, g/2 over a mirrored off-diagonal pair)
// with random position and sign, so ||vec(L)||_1 = g.
inline SymMatrix random_sparse_loss(std::size_t n, double g, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::bernoulli_distribution coin(0.5);
  const std::size_t i = pick(rng);
  const std::size_t j = pick(rng);
  const double v = coin(rng) ? g : -g;
  SymMatrix l(n);
  l.set(i, j, i == j ? v : 0.5 * v);
  return l;
}

// Gaussian symmetric matrix rescaled to the boundary of the loss space.
inline SymMatrix random_loss(const LossSpace& space, std::size_t n, Rng& rng) {
  if (space.kind == LossSpaceKind::vec_l1_ball) return random_sparse_loss(n, space.radius, rng);
  std::normal_distribution<double> nd;
  SymMatrix l(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) l.set(i, j, nd(rng));
  const double m = space.measure(l);
  if (m > 0.0) l *= space.radius / m;
  return l;
}

// Loss in the space maximizing L . X for PSD X.
inline SymMatrix worst_case_loss(const LossSpace& space, const SymMatrix& x) {
  const std::size_t n = x.order();
  SymMatrix l(n);
  switch (space.kind) {
    case LossSpaceKind::vec_l1_ball: {
      std::size_t bi = 0, bj = 0;
      double best = -1.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
          if (std::abs(x(i, j)) > best) {
            best = std::abs(x(i, j));
            bi = i;
            bj = j;
          }
      const double v = x(bi, bj) >= 0.0 ? space.radius : -space.radius;
      l.set(bi, bj, bi == bj ? v : 0.5 * v);
      return l;
    }
    case LossSpaceKind::fro_ball: {
      const double nrm = frobenius_norm(x);
      return nrm > 0.0 ? (space.radius / nrm) * x : l;
    }
    case LossSpaceKind::spectral_ball: return SymMatrix::identity(n, space.radius);
    case LossSpaceKind::trace_ball: {
      const EigPair e = sym_eig(x);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) l.set(i, j, space.radius * e.vectors(i, 0) * e.vectors(j, 0));
      return l;
    }
  }
  return l;
}

inline Adversary iid_adversary(LossSpace space, std::size_t n, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [space, n, rng](std::size_t, const SymMatrix&) { return random_loss(space, n, *rng); };
}

// Maximizes L . X_t; falls back to an i.i.d. draw while X_t = 0.
inline Adversary adaptive_adversary(LossSpace space, std::size_t n, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [space, n, rng](std::size_t, const SymMatrix& x) {
    if (max_abs_entry(x) == 0.0) return random_loss(space, n, *rng);
    return worst_case_loss(space, x);
  };
}

}  // namespace sdpftrl
