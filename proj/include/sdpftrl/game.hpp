#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdpftrl/bounds.hpp"
#include "sdpftrl/decision_set.hpp"
#include "sdpftrl/error.hpp"
#include "sdpftrl/ftrl.hpp"
#include "sdpftrl/offline.hpp"
#include "sdpftrl/regularizers.hpp"
#include "sdpftrl/sym_matrix.hpp"

namespace sdpftrl {

enum class ComparatorMode {
  none,
  // U minimizing the full-horizon loss, evaluated on every prefix.
  horizon,
  // min over the set of each prefix loss; a certified lower bound of it for
  // reduced sets, so regret[t] is an upper estimate there.
  per_prefix,
};

struct GameTranscript {
  std::vector<SymMatrix> decisions;  // X_1 .. X_T
  SymMatrix next_decision;           // X_{T+1}
  std::vector<SymMatrix> losses;     // L_1 .. L_T
  std::vector<double> round_loss;    // L_t . X_t
  std::vector<double> cum_loss;
  std::vector<double> comparator_prefix;
  std::vector<double> regret;
  std::vector<double> bound;
  std::vector<double> solver_certificate;
  double eta = 0.0;
  ComparatorMode comparator_mode = ComparatorMode::none;
  // Horizon comparator and its loss (horizon and per_prefix modes).
  SymMatrix comparator;
  double comparator_value = 0.0;
  // Certified lower bound on the horizon minimum (equals comparator_value
  // for closed-form sets).
  double comparator_lower_bound = 0.0;

  std::size_t rounds() const { return round_loss.size(); }
  double final_regret() const { return regret.empty() ? 0.0 : regret.back(); }
};

// Per-round guarantee: given t, returns the bound on regret[t].
using BoundSeries = std::function<double(std::size_t)>;

// H0 / eta + eta t / s, which equals 2 sqrt(H0 T / s) at t = T for the tuned eta.
inline BoundSeries fixed_rate_bound_series(const BoundParams& p, double eta) {
  return [p, eta](std::size_t t) { return fixed_rate_regret_bound(p.s, p.h0, eta, static_cast<double>(t)); };
}

struct GameOptions {
  ComparatorMode comparator = ComparatorMode::per_prefix;
  std::optional<LossSpace> loss_space;
  BoundSeries bound;
  SolverOptions solver;
  std::size_t comparator_refresh = 32;
  bool keep_decisions = true;
};

// regret[t] = sum_{s<=t} round_loss[s] - comparator_prefix[t]
inline std::vector<double> regret_series(std::span<const double> round_loss, std::span<const double> comparator_prefix) {
  if (round_loss.size() != comparator_prefix.size()) throw DimensionError("regret_series: length mismatch");
  std::vector<double> out(round_loss.size());
  double cum = 0.0;
  for (std::size_t t = 0; t < round_loss.size(); ++t) {
    cum += round_loss[t];
    out[t] = cum - comparator_prefix[t];
  }
  return out;
}

// Loss chosen after seeing X_t (1-based round t).
using Adversary = std::function<SymMatrix(std::size_t t, const SymMatrix& x)>;

inline GameTranscript run_sdp_game(const Adversary& adversary, std::size_t horizon, const RegularizerSpec& reg,
                                   const DecisionSet& set, double eta, const GameOptions& opt = {}) {
  FtrlSolver solver(reg, set, eta, opt.solver);
  GameTranscript tr;
  tr.eta = eta;
  tr.comparator_mode = opt.comparator;
  tr.round_loss.reserve(horizon);
  SymMatrix cum(set.order);
  StepResult step = solver.solve(cum);
  PrefixComparator prefix(set, opt.comparator_refresh);
  double total = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    SymMatrix l = adversary(t, step.x);
    if (l.order() != set.order) throw DimensionError("run_sdp_game: loss order does not match the set");
    if (opt.loss_space && !opt.loss_space->contains(l))
      throw DomainError("run_sdp_game: loss at round " + std::to_string(t) + " is outside the loss space");
    const double f = frobenius_inner(l, step.x);
    total += f;
    tr.round_loss.push_back(f);
    tr.cum_loss.push_back(total);
    tr.solver_certificate.push_back(step.certificate);
    cum += l;
    if (opt.comparator == ComparatorMode::per_prefix) tr.comparator_prefix.push_back(prefix.lower_bound(cum));
    if (opt.keep_decisions) tr.decisions.push_back(std::move(step.x));
    tr.losses.push_back(std::move(l));
    step = solver.solve(cum);
  }
  tr.next_decision = std::move(step.x);

  if (opt.comparator != ComparatorMode::none) {
    const OfflineResult best = best_offline_sdp(cum, set);
    tr.comparator = best.u;
    tr.comparator_value = best.value;
    tr.comparator_lower_bound = best.lower_bound;
    if (opt.comparator == ComparatorMode::per_prefix && !tr.comparator_prefix.empty())
      tr.comparator_prefix.back() = std::max(tr.comparator_prefix.back(), best.lower_bound);
    if (opt.comparator == ComparatorMode::horizon) {
      double c = 0.0;
      for (const SymMatrix& l : tr.losses) {
        c += frobenius_inner(l, best.u);
        tr.comparator_prefix.push_back(c);
      }
    }
  } else {
    tr.comparator_prefix.assign(horizon, 0.0);
  }
  tr.regret = regret_series(tr.round_loss, tr.comparator_prefix);
  if (opt.bound)
    for (std::size_t t = 1; t <= horizon; ++t) tr.bound.push_back(opt.bound(t));
  return tr;
}

inline GameTranscript run_sdp_game(const std::vector<SymMatrix>& losses, const RegularizerSpec& reg,
                                   const DecisionSet& set, double eta, const GameOptions& opt = {}) {
  return run_sdp_game([&](std::size_t t, const SymMatrix&) { return losses.at(t - 1); }, losses.size(), reg, set,
                      eta, opt);
}

}  // namespace sdpftrl
