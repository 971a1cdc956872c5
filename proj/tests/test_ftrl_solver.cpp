#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sdpftrl/decision_set.hpp"
#include "sdpftrl/ftrl.hpp"
#include "test_util.hpp"

using namespace sdpftrl;

namespace {

// Random member of the set: a random PSD matrix scaled into it.
SymMatrix random_member(const DecisionSet& set, std::mt19937_64& rng) {
  SymMatrix x = testutil::random_pd(set.order, rng, 0.0);
  if (set.kind == SetKind::diag_reduced) x = SymMatrix::diagonal(x.diag());
  const Norms nm = norms(x);
  double c = 1.0;
  switch (set.kind) {
    case SetKind::trace_ball: c = set.radius / nm.trace_norm; break;
    case SetKind::spectral_ball: c = set.radius / nm.spectral_norm; break;
    case SetKind::frobenius_ball: c = set.radius / nm.frobenius_norm; break;
    default: {
      double md = 0.0;
      for (double d : x.diag()) md = std::max(md, d);
      c = std::min(set.tau / trace(x), set.beta / md);
    }
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return (c * u(rng)) * x;
}

std::vector<DecisionSet> sample_sets(std::size_t n) {
  return {DecisionSet::trace_ball(n, 2.0), DecisionSet::spectral_ball(n, 0.7), DecisionSet::frobenius_ball(n, 1.5),
          DecisionSet::reduced(n, 1.0, 0.5 * static_cast<double>(n)), DecisionSet::reduced(n, 0.6, 5.0),
          DecisionSet::diag_reduced(n, 1.0, 0.5 * static_cast<double>(n))};
}

}  // namespace

TEST(Project, Examples) {
  const DecisionSet k = DecisionSet::reduced(3, 1.0, 3.0);
  const SymMatrix feas = SymMatrix::identity(3, 0.5);
  EXPECT_LE(testutil::max_abs_diff(project(feas, k), feas), 1e-10);
  EXPECT_LE(max_abs_entry(project(-SymMatrix::identity(3), k)), 1e-12);
  EXPECT_LE(testutil::max_abs_diff(project(SymMatrix::identity(3, 2.0), k), SymMatrix::identity(3)), 1e-10);
}

TEST(Project, VariationalInequalityAllKinds) {
  std::mt19937_64 rng(31);
  for (std::size_t n : {2u, 4u, 6u}) {
    for (const DecisionSet& set : sample_sets(n)) {
      for (int s = 0; s < 20; ++s) {
        const SymMatrix x = testutil::random_sym(n, rng, 1.5);
        const SymMatrix p = project(x, set);
        EXPECT_TRUE(set.contains(p)) << to_string(set.kind);
        for (int k = 0; k < 20; ++k) {
          const SymMatrix z = random_member(set, rng);
          EXPECT_LE(frobenius_inner(x - p, z - p), 1e-9) << to_string(set.kind);
        }
      }
    }
  }
}

TEST(Project, ReducedMatchesDykstra) {
  std::mt19937_64 rng(32);
  for (int s = 0; s < 30; ++s) {
    const DecisionSet set = DecisionSet::reduced(5, 0.8, 2.0);
    const SymMatrix y = testutil::random_sym(5, rng);
    const SymMatrix dyk = project_dykstra(y, set, {1e-14, 200000});
    EXPECT_LE(testutil::max_abs_diff(project(y, set), dyk), 1e-8);
  }
}

TEST(SolveSeparable, ScalarClosedForm) {
  // min eta c x - ln(x + eps) over [0, beta] is clamp(1/(eta c) - eps, 0, beta).
  for (double c : {0.1, 0.5, 2.0, 10.0}) {
    const double eta = 0.7, eps = 0.3, beta = 1.2;
    const SymMatrix x = ftrl_step(SymMatrix::identity(1, c), RegularizerSpec::logdet(eps),
                                  DecisionSet::diag_reduced(1, beta, beta), eta);
    EXPECT_NEAR(x(0, 0), std::clamp(1.0 / (eta * c) - eps, 0.0, beta), 1e-12);
  }
}

TEST(FtrlStep, ZeroLossLogdetGivesIdentity) {
  const DecisionSet set = DecisionSet::reduced(3, 1.0, 3.0);
  const SymMatrix x = ftrl_step(SymMatrix(3), RegularizerSpec::logdet(1.0), set, 1.0);
  EXPECT_LE(testutil::max_abs_diff(x, SymMatrix::identity(3)), 1e-7);
}

TEST(FtrlStep, EntropicTraceBallClosedForm) {
  std::mt19937_64 rng(33);
  for (int s = 0; s < 20; ++s) {
    const std::size_t n = 4;
    const double eta = 0.8, tau = 1.5;
    const SymMatrix c = testutil::random_sym(n, rng);
    // exp(-eta C) scaled by e^{-mu} with the smallest mu >= 0 giving trace <= tau.
    const SymMatrix ex = spectral_map(-eta * c, [](double v) { return std::exp(v); });
    const double mu = std::max(0.0, std::log(trace(ex) / tau));
    const SymMatrix oracle = std::exp(-mu) * ex;
    const SymMatrix x = ftrl_step(c, RegularizerSpec::entropic(), DecisionSet::trace_ball(n, tau), eta);
    EXPECT_LE(testutil::max_abs_diff(x, oracle), 1e-6);
  }
}

TEST(FtrlStep, DualRouteMatchesProjectedGradient) {
  std::mt19937_64 rng(34);
  for (auto reg : {RegularizerSpec::logdet(1.0), RegularizerSpec::logdet(0.2), RegularizerSpec::entropic(),
                   RegularizerSpec::frobenius()}) {
    for (int s = 0; s < 6; ++s) {
      const std::size_t n = 3 + s % 3;
      const DecisionSet set = DecisionSet::reduced(n, 1.0, 0.5 * static_cast<double>(n));
      const SymMatrix c = testutil::random_sym(n, rng, 2.0);
      const double eta = 0.5;
      FtrlSolver fast(reg, set, eta);
      FtrlSolver slow(reg, set, eta, {SolverKind::projected_gradient, 1e-11, 200000});
      const StepResult a = fast.solve(c);
      const StepResult b = slow.solve(c);
      EXPECT_TRUE(set.contains(a.x));
      EXPECT_LE(a.objective, b.objective + 1e-8 * (1.0 + std::abs(b.objective))) << to_string(reg.kind);
      EXPECT_LE(testutil::max_abs_diff(a.x, b.x), 1e-7) << to_string(reg.kind);
    }
  }
}

TEST(FtrlStep, ClosedFormsMatchProjectedGradient) {
  std::mt19937_64 rng(35);
  for (auto reg : {RegularizerSpec::logdet(0.7), RegularizerSpec::entropic(), RegularizerSpec::frobenius()}) {
    for (const DecisionSet& set : sample_sets(4)) {
      if (set.kind == SetKind::reduced) continue;
      const SymMatrix c = testutil::random_sym(4, rng);
      const StepResult a = FtrlSolver(reg, set, 0.9).solve(c);
      const StepResult b = FtrlSolver(reg, set, 0.9, {SolverKind::projected_gradient, 1e-11, 200000}).solve(c);
      EXPECT_TRUE(set.contains(a.x));
      EXPECT_LE(a.objective, b.objective + 1e-8 * (1.0 + std::abs(b.objective)))
          << to_string(reg.kind) << " " << to_string(set.kind);
      EXPECT_LE(testutil::max_abs_diff(a.x, b.x), 1e-7) << to_string(reg.kind) << " " << to_string(set.kind);
      EXPECT_LE(stationarity(c, reg, set, 0.9, a.x, 1e-2), 1e-6) << to_string(reg.kind) << " " << to_string(set.kind);
    }
  }
}

TEST(FtrlStep, DualCertificateAndStationarity) {
  std::mt19937_64 rng(36);
  const DecisionSet set = DecisionSet::reduced(8, 1.0, 4.0);
  FtrlSolver solver(RegularizerSpec::logdet(1.0), set, 0.3);
  SymMatrix c(8);
  for (int t = 0; t < 50; ++t) {
    c += testutil::random_sym(8, rng, 0.5);
    const StepResult r = solver.solve(c);
    EXPECT_TRUE(set.contains(r.x, 1e-8));
    EXPECT_LE(r.certificate, 1e-8 * (1.0 + std::abs(r.objective)));
    EXPECT_LE(stationarity(c, solver.regularizer(), set, 0.3, r.x, 0.1), 1e-4);
  }
}

TEST(FtrlStep, BurgDiagonalEqualsLogdetReducedOnDiagonalLosses) {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> nd;
  const std::size_t n = 5;
  FtrlSolver vec(RegularizerSpec::burg(1.0), DecisionSet::diag_reduced(n, 1.0, 2.5), 0.4);
  FtrlSolver mat(RegularizerSpec::logdet(1.0), DecisionSet::reduced(n, 1.0, 2.5), 0.4);
  std::vector<double> d(n, 0.0);
  for (int t = 0; t < 30; ++t) {
    for (double& v : d) v += nd(rng);
    const SymMatrix c = SymMatrix::diagonal(d);
    EXPECT_LE(testutil::max_abs_diff(vec.solve(c).x, mat.solve(c).x), 1e-8);
  }
}

TEST(FtrlStep, RejectsBadArguments) {
  EXPECT_THROW(FtrlSolver(RegularizerSpec::logdet(1.0), DecisionSet::reduced(2, 1, 1), 0.0), DomainError);
  EXPECT_THROW(FtrlSolver(RegularizerSpec::logdet(-1.0), DecisionSet::reduced(2, 1, 1), 1.0), DomainError);
  FtrlSolver s(RegularizerSpec::logdet(1.0), DecisionSet::reduced(2, 1, 1), 1.0);
  EXPECT_THROW(s.solve(SymMatrix(3)), DimensionError);
}
