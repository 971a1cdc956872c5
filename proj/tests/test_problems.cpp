#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sdpftrl/problems.hpp"

using namespace sdpftrl;
using namespace oracles;

namespace {

double total_loss(const Matrix& w, const std::vector<RoundEvent>& events) {
  double c = 0.0;
  for (const RoundEvent& e : events) c += e.loss(w(e.i, e.j));
  return c;
}

}  // namespace

TEST(MaxcutStream, NoiselessTwoNodeLabels) {
  StreamConfig cfg;
  cfg.n = 2;
  cfg.horizon = 50;
  cfg.planted_cut = std::vector<bool>{true, false};
  const Stream s = maxcut_stream(cfg);
  for (const RoundEvent& e : s.events) {
    EXPECT_EQ(e.y, 1.0);
    EXPECT_NE(e.i, e.j);
    EXPECT_EQ(e.kind, LossKind::sign);
  }
  EXPECT_EQ(s.problem.lipschitz, 0.5);
  EXPECT_EQ(s.problem.beta, 1.0);
  EXPECT_EQ(s.problem.tau, 2.0);
  EXPECT_TRUE(s.problem.symmetric);
}

TEST(MaxcutStream, HalfNoiseGivesZeroMeanLabels) {
  StreamConfig cfg;
  cfg.n = 6;
  cfg.horizon = 10000;
  cfg.noise = 0.5;
  const Stream s = maxcut_stream(cfg);
  double mean = 0.0;
  for (const RoundEvent& e : s.events) mean += e.y;
  mean /= 10000.0;
  EXPECT_LT(std::abs(mean), 0.05);
}

TEST(MaxcutStream, PairsAreUniformOrderedPairs) {
  StreamConfig cfg;
  cfg.n = 4;
  cfg.horizon = 24000;
  const Stream s = maxcut_stream(cfg);
  std::vector<int> count(16, 0);
  for (const RoundEvent& e : s.events) ++count[e.i * 4 + e.j];
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) EXPECT_EQ(count[i * 4 + j], 0);
      else EXPECT_NEAR(count[i * 4 + j], 2000, 200);
    }
}

TEST(MaxcutStream, RejectsBadConfig) {
  StreamConfig cfg;
  cfg.n = 1;
  EXPECT_THROW(maxcut_stream(cfg), DomainError);
  cfg.n = 3;
  cfg.noise = 0.6;
  EXPECT_THROW(maxcut_stream(cfg), DomainError);
  cfg.noise = 0.0;
  cfg.planted_cut = std::vector<bool>{true};
  EXPECT_THROW(maxcut_stream(cfg), DimensionError);
}

TEST(Streams, SameSeedIsBitIdentical) {
  for (ProblemKind k : {ProblemKind::maxcut, ProblemKind::gambling, ProblemKind::cf}) {
    StreamConfig cfg;
    cfg.kind = k;
    cfg.noise = 0.3;
    cfg.seed = 99;
    const Stream a = make_stream(cfg);
    const Stream b = make_stream(cfg);
    EXPECT_EQ(a.events, b.events);
    cfg.seed = 100;
    EXPECT_NE(make_stream(cfg).events, a.events);
  }
}

TEST(GamblingStream, IdentityAndReversal) {
  StreamConfig cfg;
  cfg.kind = ProblemKind::gambling;
  cfg.n = 5;
  cfg.horizon = 300;
  cfg.planted_order = std::vector<std::size_t>{0, 1, 2, 3, 4};
  for (const RoundEvent& e : gambling_stream(cfg).events) EXPECT_EQ(e.y, e.i < e.j ? 1.0 : -1.0);
  cfg.planted_order = std::vector<std::size_t>{4, 3, 2, 1, 0};
  for (const RoundEvent& e : gambling_stream(cfg).events) EXPECT_EQ(e.y, e.i > e.j ? 1.0 : -1.0);
}

TEST(GamblingStream, FlipRate) {
  StreamConfig cfg;
  cfg.kind = ProblemKind::gambling;
  cfg.n = 6;
  cfg.horizon = 10000;
  cfg.noise = 0.2;
  const Stream s = gambling_stream(cfg);
  int flips = 0;
  for (const RoundEvent& e : s.events) flips += e.y != s.planted(e.i, e.j);
  EXPECT_NEAR(flips / 10000.0, 0.2, 0.02);
}

TEST(GamblingStream, DefaultConstants) {
  StreamConfig cfg;
  cfg.kind = ProblemKind::gambling;
  cfg.n = 6;
  cfg.c1 = 2.0;
  const Stream s = gambling_stream(cfg);
  EXPECT_DOUBLE_EQ(s.problem.beta, 2.0 * std::log(6.0));
  EXPECT_DOUBLE_EQ(s.problem.tau, 6.0 * std::log(6.0));
  EXPECT_FALSE(s.problem.symmetric);
  EXPECT_EQ(s.problem.lipschitz, 0.5);
  cfg.planted_order = std::vector<std::size_t>{0, 0, 1, 2, 3, 4};
  EXPECT_THROW(gambling_stream(cfg), DomainError);
}

TEST(GamblingWitness, SameConstantsForEveryPermutation) {
  const Decomposition ref = gambling_witness(5);
  std::vector<std::size_t> order{0, 1, 2, 3, 4};
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    const Decomposition d = decompose_sym(permutation_matrix(order), false);
    EXPECT_NEAR(d.witness_beta(), ref.witness_beta(), 1e-9);
    EXPECT_NEAR(d.witness_tau(), ref.witness_tau(), 1e-9);
  }
}

TEST(CutMatrix, DecomposabilityWitness) {
  std::mt19937_64 rng(8);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t n : {2u, 5u, 9u}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<bool> in_a(n);
      for (std::size_t i = 0; i < n; ++i) in_a[i] = coin(rng);
      const Decomposition d = decompose_sym(cut_matrix(in_a), true);
      EXPECT_LE(d.witness_beta(), 1.0 + 1e-9);
      EXPECT_LE(d.witness_tau(), static_cast<double>(n) + 1e-9);
    }
  }
}

TEST(CfStream, RealizableRankOneHasZeroLoss) {
  StreamConfig cfg;
  cfg.kind = ProblemKind::cf;
  cfg.m = 4;
  cfg.n = 5;
  cfg.horizon = 200;
  cfg.cf_loss = LossKind::absolute;
  const Stream s = cf_stream(cfg);
  EXPECT_EQ(total_loss(s.planted, s.events), 0.0);
  EXPECT_EQ(s.problem.lipschitz, 1.0);
  EXPECT_DOUBLE_EQ(s.problem.beta, 3.0);
  EXPECT_NEAR(s.problem.tau, 2.0 * trace_norm(s.planted), 1e-12);
  EXPECT_NEAR(max_abs_entry(sym_embed(s.planted, false)), 1.0, 1e-15);
  // W0 is in the class: its witness fits the declared constants.
  const Decomposition d = decompose_sym(s.planted, false);
  EXPECT_LE(d.witness_beta(), s.problem.beta);
  EXPECT_LE(d.witness_tau(), s.problem.tau + 1e-9);
}

TEST(CfStream, NoiseIsTruncatedAndClamped) {
  StreamConfig cfg;
  cfg.kind = ProblemKind::cf;
  cfg.noise = 0.3;
  cfg.horizon = 2000;
  cfg.cf_loss = LossKind::squared;
  const Stream s = cf_stream(cfg);
  EXPECT_EQ(s.problem.lipschitz, 4.0);
  for (const RoundEvent& e : s.events) {
    EXPECT_LE(std::abs(e.y), 1.0);
    EXPECT_LE(std::abs(e.y - s.planted(e.i, e.j)), 0.6 + 1e-15);
    EXPECT_EQ(e.kind, LossKind::squared);
  }
}

TEST(TraceNorm, MatchesSingularValues) {
  Matrix w(2, 2);
  w(0, 0) = 3.0;
  w(1, 1) = -2.0;
  EXPECT_NEAR(trace_norm(w), 5.0, 1e-12);
  Matrix r(2, 3, 1.0);  // rank one, singular value sqrt(6)
  EXPECT_NEAR(trace_norm(r), std::sqrt(6.0), 1e-12);
}

TEST(Ratings, RoundTripIsExact) {
  StreamConfig cfg;
  cfg.kind = ProblemKind::cf;
  cfg.noise = 0.1;
  cfg.horizon = 300;
  const Stream s = cf_stream(cfg);
  std::stringstream io;
  write_ratings(io, s.events);
  EXPECT_EQ(read_ratings(io, LossKind::absolute), s.events);
}

TEST(Ratings, ParsesCommentsAndBlankLines) {
  std::istringstream in("# header\n\n1,2,3,0.5\n  # note\n2,1,1,-1\r\n");
  const std::vector<RoundEvent> ev = read_ratings(in, LossKind::squared);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0], (RoundEvent{1, 2, 0.5, LossKind::squared}));
  EXPECT_EQ(ev[1], (RoundEvent{0, 0, -1.0, LossKind::squared}));
}

TEST(Ratings, ErrorsReportTheLine) {
  const auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_ratings(in, LossKind::absolute);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("1,1,1,0.5\n2,1,x,0.5\n"), 2u);
  EXPECT_EQ(line_of("# c\n1,1,1,1.5\n"), 2u);
  EXPECT_EQ(line_of("1,1,1,0.5\n3,1,1,0.5\n"), 2u);
  EXPECT_EQ(line_of("1,0,1,0.5\n"), 1u);
  EXPECT_EQ(line_of("1,1,1\n"), 1u);
  EXPECT_EQ(line_of("1,1,1,0.5 junk\n"), 1u);
  EXPECT_EQ(line_of("1,1,1,0.5\n"), 0u);
}

TEST(CfStream, FileSourceChecksDimensions) {
  const std::string path = ::testing::TempDir() + "ratings_dims.csv";
  {
    std::ofstream out(path);
    out << "1,1,1,0.5\n2,3,2,-0.25\n";
  }
  StreamConfig cfg;
  cfg.kind = ProblemKind::cf;
  cfg.ratings_path = path;
  cfg.m = 3;
  cfg.n = 2;
  const Stream s = cf_stream(cfg);
  ASSERT_EQ(s.events.size(), 2u);
  EXPECT_EQ(s.events[1].i, 2u);
  EXPECT_DOUBLE_EQ(s.problem.tau, 2.0 * std::sqrt(12.0));
  cfg.m = 2;
  EXPECT_THROW(cf_stream(cfg), DimensionError);
  cfg.ratings_path = path + ".missing";
  EXPECT_THROW(cf_stream(cfg), DomainError);
}

TEST(MaxcutExact, Examples) {
  const std::vector<RoundEvent> ev{{0, 1, 1.0, LossKind::sign}, {0, 1, -1.0, LossKind::sign}};
  EXPECT_DOUBLE_EQ(maxcut_exact(2, ev).value, 1.0);
  StreamConfig cfg;
  cfg.n = 7;
  cfg.horizon = 400;
  const Stream s = maxcut_stream(cfg);
  const ExactComparator ex = maxcut_exact(7, s.events);
  EXPECT_EQ(ex.value, 0.0);
  EXPECT_EQ(ex.witness, s.planted);
  EXPECT_THROW(maxcut_exact(15, ev), DomainError);
}

TEST(MaxcutExact, MatchesWeightGraphIdentity) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    StreamConfig cfg;
    cfg.n = 8;
    cfg.horizon = 200;
    cfg.noise = 0.3;
    cfg.seed = seed;
    const Stream s = maxcut_stream(cfg);
    const std::vector<double> w = edge_weights(8, s.events);
    double wtot = 0.0;
    for (const RoundEvent& e : s.events) wtot += e.y;
    const double expected = 0.5 * 200.0 + 0.5 * wtot - max_cut_weight(8, w);
    EXPECT_NEAR(maxcut_exact(8, s.events).value, expected, 1e-9) << seed;
  }
}

TEST(MaxcutExact, PrefixIsRunningMinimum) {
  StreamConfig cfg;
  cfg.n = 5;
  cfg.horizon = 60;
  cfg.noise = 0.4;
  const Stream s = maxcut_stream(cfg);
  const ExactComparator ex = maxcut_exact(5, s.events);
  ASSERT_EQ(ex.prefix.size(), 60u);
  for (std::size_t t = 1; t <= 60; ++t) {
    const std::vector<RoundEvent> head(s.events.begin(), s.events.begin() + static_cast<std::ptrdiff_t>(t));
    EXPECT_DOUBLE_EQ(ex.prefix[t - 1], maxcut_exact(5, head).value);
  }
  EXPECT_DOUBLE_EQ(ex.prefix.back(), ex.value);
  EXPECT_DOUBLE_EQ(total_loss(ex.witness, s.events), ex.value);
}

TEST(MaxcutExact, BelowSampledCuts) {
  StreamConfig cfg;
  cfg.n = 9;
  cfg.horizon = 300;
  cfg.noise = 0.35;
  const Stream s = maxcut_stream(cfg);
  const double best = maxcut_exact(9, s.events).value;
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<bool> in_a(9);
    for (std::size_t i = 0; i < 9; ++i) in_a[i] = coin(rng);
    EXPECT_LE(best, total_loss(cut_matrix(in_a), s.events));
  }
}

TEST(GamblingExact, MatchesSubsetDynamicProgram) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    StreamConfig cfg;
    cfg.kind = ProblemKind::gambling;
    cfg.n = 6;
    cfg.horizon = 120;
    cfg.noise = 0.3;
    cfg.seed = seed;
    const Stream s = gambling_stream(cfg);
    const ExactComparator ex = gambling_exact(6, s.events);
    EXPECT_DOUBLE_EQ(ex.value, min_ordering_mistakes(6, s.events)) << seed;
    EXPECT_DOUBLE_EQ(total_loss(ex.witness, s.events), ex.value);
  }
}

TEST(GamblingExact, BelowSampledPermutationsAndCap) {
  StreamConfig cfg;
  cfg.kind = ProblemKind::gambling;
  cfg.n = 6;
  cfg.horizon = 200;
  cfg.noise = 0.25;
  const Stream s = gambling_stream(cfg);
  const double best = gambling_exact(6, s.events).value;
  EXPECT_LE(best, total_loss(s.planted, s.events));
  std::vector<std::size_t> order{0, 1, 2, 3, 4, 5};
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    EXPECT_LE(best, total_loss(permutation_matrix(order), s.events));
  }
  EXPECT_THROW(gambling_exact(9, s.events), DomainError);
}

TEST(CfComparator, CertifiedGap) {
  StreamConfig cfg;
  cfg.kind = ProblemKind::cf;
  cfg.m = 2;
  cfg.n = 3;
  cfg.noise = 0.2;
  std::vector<SymMatrix> losses;
  const Stream s = cf_stream(cfg);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t t = 0; t < 40; ++t) {
    const RoundEvent& e = s.events[t];
    losses.push_back(build_sparse_loss(e.i, e.j, u(rng), s.problem).dense());
  }
  const OfflineResult r = cf_comparator(s.problem, losses);
  EXPECT_LE(r.gap(), 1e-6 * (1.0 + std::abs(r.value)));
  EXPECT_LE(r.lower_bound, r.value);
}

TEST(ParseKinds, RoundTrip) {
  for (ProblemKind k : {ProblemKind::maxcut, ProblemKind::gambling, ProblemKind::cf})
    EXPECT_EQ(parse_problem_kind(to_string(k)), k);
  for (LossKind k : {LossKind::sign, LossKind::absolute, LossKind::squared}) EXPECT_EQ(parse_loss_kind(to_string(k)), k);
  EXPECT_THROW(parse_problem_kind("tsp"), DomainError);
}
