#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "sdpftrl/regularizers.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace sdpftrl;
using namespace oracles;

TEST(FrobeniusReg, Examples) {
  const RegValue z = frobenius_reg(SymMatrix(3));
  EXPECT_EQ(z.value, 0.0);
  EXPECT_EQ(max_abs_entry(z.gradient), 0.0);
  const RegValue i = frobenius_reg(SymMatrix::identity(2));
  EXPECT_DOUBLE_EQ(i.value, 1.0);
  EXPECT_EQ(i.gradient, SymMatrix::identity(2));
}

TEST(FrobeniusReg, FiniteDifferences) {
  std::mt19937_64 rng(21);
  for (int s = 0; s < 100; ++s) {
    const SymMatrix x = testutil::random_sym(4, rng);
    const SymMatrix fd = fd_gradient([](const SymMatrix& y) { return frobenius_reg(y).value; }, x);
    EXPECT_LE(rel_err(frobenius_reg(x).gradient, fd), 1e-6);
  }
}

TEST(EntropicReg, Examples) {
  const RegValue a = entropic_reg(SymMatrix::identity(3), 1e-12);
  EXPECT_NEAR(a.value, -3.0, 1e-14);
  EXPECT_LE(max_abs_entry(a.gradient), 1e-14);
  const double e = std::exp(1.0);
  const RegValue b = entropic_reg(SymMatrix::diagonal(std::vector<double>{e, e}), 1e-12);
  EXPECT_NEAR(b.value, 0.0, 1e-14);
  EXPECT_LE(testutil::max_abs_diff(b.gradient, SymMatrix::identity(2)), 1e-14);
}

TEST(EntropicReg, SingularUsesFloorAndRejectsIndefinite) {
  const RegValue z = entropic_reg(SymMatrix(2), 1e-12);
  EXPECT_NEAR(z.value, 2e-12 * (std::log(1e-12) - 1.0), 1e-24);
  EXPECT_NEAR(z.gradient(0, 0), std::log(1e-12), 1e-9);
  EXPECT_THROW(entropic_reg(SymMatrix::identity(2, -1e-6)), DomainError);
}

TEST(EntropicReg, FiniteDifferences) {
  std::mt19937_64 rng(22);
  for (int s = 0; s < 100; ++s) {
    const SymMatrix x = testutil::random_pd(4, rng, 0.2);
    const SymMatrix fd = fd_gradient([](const SymMatrix& y) { return entropic_reg(y).value; }, x);
    EXPECT_LE(rel_err(entropic_reg(x).gradient, fd), 1e-5);
  }
}

TEST(LogdetReg, Examples) {
  const RegValue a = logdet_reg(SymMatrix(3), 1.0);
  EXPECT_EQ(a.value, 0.0);
  EXPECT_LE(testutil::max_abs_diff(a.gradient, -SymMatrix::identity(3)), 1e-15);
  const RegValue b = logdet_reg(SymMatrix::diagonal(std::vector<double>{1.0, 3.0}), 1.0);
  EXPECT_NEAR(b.value, -std::log(8.0), 1e-14);
  EXPECT_NEAR(b.gradient(0, 0), -0.5, 1e-15);
  EXPECT_NEAR(b.gradient(1, 1), -0.25, 1e-15);
  EXPECT_EQ(b.gradient(0, 1), 0.0);
}

TEST(LogdetReg, SingularShiftSignalled) {
  EXPECT_THROW(logdet_reg(SymMatrix::identity(2, -1.0), 1.0), DomainError);
  EXPECT_THROW(logdet_reg(SymMatrix(2), 0.0), DomainError);
}

TEST(LogdetReg, FiniteDifferences) {
  std::mt19937_64 rng(23);
  for (int s = 0; s < 100; ++s) {
    const SymMatrix x = testutil::random_pd(5, rng, 0.0);
    const SymMatrix fd = fd_gradient([](const SymMatrix& y) { return logdet_reg(y, 0.7).value; }, x);
    EXPECT_LE(rel_err(logdet_reg(x, 0.7).gradient, fd), 1e-5);
  }
}

TEST(LogdetHessian, Examples) {
  EXPECT_NEAR(logdet_hessian_quadform(SymMatrix(2), SymMatrix::identity(2), 1.0), 2.0, 1e-15);
  EXPECT_NEAR(logdet_hessian_quadform(SymMatrix::diagonal(std::vector<double>{1.0, 0.0}), SymMatrix::identity(2), 1.0),
              1.25, 1e-15);
}

TEST(LogdetHessian, SecondDifference) {
  std::mt19937_64 rng(24);
  for (int s = 0; s < 50; ++s) {
    const SymMatrix x = testutil::random_pd(4, rng, 0.0);
    const SymMatrix w = testutil::random_sym(4, rng);
    const double eps = 0.5;
    const double h = 1e-3 / (1.0 + frobenius_norm(w));
    const double f0 = logdet_reg(x, eps).value;
    const double fp = logdet_reg(x + h * w, eps).value;
    const double fm = logdet_reg(x - h * w, eps).value;
    const double fd = (fp - 2.0 * f0 + fm) / (h * h);
    const double q = logdet_hessian_quadform(x, w, eps);
    EXPECT_LE(std::abs(q - fd), 1e-4 * q);
  }
}

TEST(LogdetHessian, SpectralLowerBoundAndMinimumDirection) {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < 1000; ++s) {
    const std::size_t n = 2 + s % 4;
    const double eps = 0.1 + u(rng);
    const SymMatrix x = testutil::random_pd(n, rng, 0.0);
    const SymMatrix w = testutil::random_sym(n, rng);
    const double lmax = sym_eig(x).values.front();
    const double sp = norms(w).spectral_norm;
    EXPECT_GE(logdet_hessian_quadform(x, w, eps), sp * sp / ((lmax + eps) * (lmax + eps)) * (1.0 - 1e-12));
    if (s % 10 == 0) {
      const EigPair e = sym_eig(x);
      SymMatrix vv(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) vv.set(i, j, e.vectors(i, 0) * e.vectors(j, 0));
      const double target = 1.0 / ((lmax + eps) * (lmax + eps));
      EXPECT_NEAR(logdet_hessian_quadform(x, vv, eps), target, 1e-8 * std::max(1.0, target));
    }
  }
}

TEST(BurgReg, Examples) {
  const VecRegValue a = burg_reg(std::vector<double>{0.0, 0.0, 0.0}, 1.0);
  EXPECT_EQ(a.value, 0.0);
  for (double g : a.gradient) EXPECT_EQ(g, -1.0);
  const VecRegValue b = burg_reg(std::vector<double>{1.0, 3.0}, 1.0);
  EXPECT_NEAR(b.value, -std::log(8.0), 1e-14);
  EXPECT_EQ(b.gradient[0], -0.5);
  EXPECT_EQ(b.gradient[1], -0.25);
  EXPECT_THROW(burg_reg(std::vector<double>{-1e-6}, 1.0), DomainError);
}

TEST(BurgReg, MatchesLogdetOnDiagonals) {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int s = 0; s < 100; ++s) {
    std::vector<double> x(1 + s % 6);
    for (double& v : x) v = u(rng);
    const VecRegValue b = burg_reg(x, 0.3);
    const RegValue m = logdet_reg(SymMatrix::diagonal(x), 0.3);
    EXPECT_NEAR(b.value, m.value, 1e-12);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(b.gradient[i], m.gradient(i, i), 1e-12);
  }
}

TEST(Regularizers, DiagonalConsistencyWithScalarForm) {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (auto spec : {RegularizerSpec::frobenius(), RegularizerSpec::entropic(), RegularizerSpec::logdet(0.4),
                    RegularizerSpec::burg(0.4)}) {
    const ScalarRegularizer r(spec);
    for (int s = 0; s < 20; ++s) {
      std::vector<double> x(4);
      for (double& v : x) v = u(rng);
      double expect = 0.0;
      for (double v : x) expect += r.value(v);
      EXPECT_NEAR(evaluate(spec, SymMatrix::diagonal(x)).value, expect, 1e-12);
    }
  }
}

TEST(ScalarRegularizer, ConjugateQuantities) {
  std::mt19937_64 rng(28);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (auto spec : {RegularizerSpec::frobenius(), RegularizerSpec::entropic(), RegularizerSpec::logdet(0.5)}) {
    const ScalarRegularizer r(spec);
    for (int s = 0; s < 200; ++s) {
      const double m = spec.kind == RegularizerKind::frobenius ? u(rng) - 1.5 : u(rng);
      const double x = r.argmin(m);
      // x minimizes r(x) + m x over x >= 0
      const double f = r.value(x) + m * x;
      EXPECT_NEAR(r.dual(m), f, 1e-12 * (1.0 + std::abs(f)));
      for (double dx : {1e-4, -1e-4}) {
        const double y = x + dx;
        if (y < 0.0) continue;
        EXPECT_GE(r.value(y) + m * y, f - 1e-12);
      }
      const double h = 1e-6;
      const double fd = (r.argmin(m + h) - r.argmin(m - h)) / (2.0 * h);
      if (std::abs(r.argmin(m + h) - x) > 0.0 && std::abs(r.argmin(m - h) - x) > 0.0)
        EXPECT_NEAR(r.dargmin(m), fd, 1e-4 * (1.0 + std::abs(fd)));
    }
  }
}
