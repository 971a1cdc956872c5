#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sdpftrl/error.hpp"
#include "sdpftrl/offline.hpp"
#include "sdpftrl/omp.hpp"
#include "sdpftrl/sym_matrix.hpp"

namespace sdpftrl {

enum class ProblemKind { maxcut, gambling, cf };

inline std::string_view to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::maxcut: return "maxcut";
    case ProblemKind::gambling: return "gambling";
    case ProblemKind::cf: return "cf";
  }
  return "?";
}

inline ProblemKind parse_problem_kind(std::string_view s) {
  for (ProblemKind k : {ProblemKind::maxcut, ProblemKind::gambling, ProblemKind::cf})
    if (s == to_string(k)) return k;
  throw DomainError("unknown problem '" + std::string(s) + "'");
}

inline LossKind parse_loss_kind(std::string_view s) {
  for (LossKind k : {LossKind::sign, LossKind::absolute, LossKind::squared})
    if (s == to_string(k)) return k;
  throw DomainError("unknown loss kind '" + std::string(s) + "'");
}

struct StreamConfig {
  ProblemKind kind = ProblemKind::maxcut;
  std::size_t n = 6;  // nodes, teams, or columns (items) for cf
  std::size_t m = 4;  // rows (users) for cf
  std::size_t horizon = 512;
  std::uint64_t seed = 1;
  double noise = 0.0;
  // Planted structure; drawn from the seed when absent.
  std::optional<std::vector<bool>> planted_cut;        // membership of A
  std::optional<std::vector<std::size_t>> planted_order;  // teams from first to last
  std::size_t rank = 1;
  LossKind cf_loss = LossKind::absolute;
  std::optional<double> cf_tau;  // trace-norm bound of the cf class
  // Gambling decomposability multipliers: (c1 ln n, c2 n ln n).
  double c1 = 1.0;
  double c2 = 1.0;
  // Overrides of the problem's (beta, tau).
  std::optional<double> beta;
  std::optional<double> tau;
  // Ratings file for cf; synthetic when empty.
  std::string ratings_path;
};

struct Stream {
  OmpProblem problem;
  std::vector<RoundEvent> events;
  Matrix planted;  // planted class member (empty for file sources)
};

// C^A_ij = +1 when exactly one of i, j is in A, else -1.
inline Matrix cut_matrix(const std::vector<bool>& in_a) {
  const std::size_t n = in_a.size();
  Matrix c(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c(i, j) = in_a[i] != in_a[j] ? 1.0 : -1.0;
  return c;
}

// W_ij = +1 when i appears before j in the ordering, else -1.
inline Matrix permutation_matrix(const std::vector<std::size_t>& order) {
  const std::size_t n = order.size();
  std::vector<std::size_t> pos(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (order[k] >= n || pos[order[k]] != n) throw DomainError("permutation_matrix: not a permutation");
    pos[order[k]] = k;
  }
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w(i, j) = pos[i] < pos[j] ? 1.0 : -1.0;
  return w;
}

namespace detail {

// Uniform ordered pair with i != j.
inline std::pair<std::size_t, std::size_t> random_pair(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::uniform_int_distribution<std::size_t> second(0, n - 2);
  const std::size_t i = first(rng);
  std::size_t j = second(rng);
  if (j >= i) ++j;
  return {i, j};
}

inline void check_noise(double noise, double cap) {
  if (!(noise >= 0.0 && noise <= cap)) throw DomainError("stream: noise rate out of range");
}

}  // namespace detail

inline Stream maxcut_stream(const StreamConfig& cfg) {
  if (cfg.n < 2) throw DomainError("maxcut_stream: n must be >= 2");
  detail::check_noise(cfg.noise, 0.5);
  std::mt19937_64 rng(cfg.seed);
  std::vector<bool> in_a(cfg.n);
  if (cfg.planted_cut) {
    if (cfg.planted_cut->size() != cfg.n) throw DimensionError("maxcut_stream: planted cut has the wrong size");
    in_a = *cfg.planted_cut;
  } else {
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < cfg.n; ++i) in_a[i] = coin(rng);
  }
  Stream s;
  s.planted = cut_matrix(in_a);
  const double n = static_cast<double>(cfg.n);
  s.problem = {cfg.n, cfg.n, 0.5, cfg.beta.value_or(1.0), cfg.tau.value_or(n), true};
  std::bernoulli_distribution flip(cfg.noise);
  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    const auto [i, j] = detail::random_pair(cfg.n, rng);
    double y = s.planted(i, j);
    if (flip(rng)) y = -y;
    s.events.push_back({i, j, y, LossKind::sign});
  }
  return s;
}

inline Stream gambling_stream(const StreamConfig& cfg) {
  if (cfg.n < 2) throw DomainError("gambling_stream: n must be >= 2");
  detail::check_noise(cfg.noise, 0.5);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(cfg.n);
  if (cfg.planted_order) {
    order = *cfg.planted_order;
  } else {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
  }
  Stream s;
  s.planted = permutation_matrix(order);
  const double n = static_cast<double>(cfg.n);
  const double ln = std::log(n);
  // Permutation matrices are not symmetric, so the block embedding is used.
  s.problem = {cfg.n, cfg.n, 0.5, cfg.beta.value_or(cfg.c1 * ln), cfg.tau.value_or(cfg.c2 * n * ln), false};
  std::bernoulli_distribution flip(cfg.noise);
  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    const auto [i, j] = detail::random_pair(cfg.n, rng);
    double y = s.planted(i, j);
    if (flip(rng)) y = -y;
    s.events.push_back({i, j, y, LossKind::sign});
  }
  return s;
}

// Trace norm of an m x n matrix via sym(W), whose eigenvalues are +-sigma_k.
inline double trace_norm(const Matrix& w) { return 0.5 * norms(sym_embed(w, false)).trace_norm; }

inline std::vector<RoundEvent> read_ratings(std::istream& in, LossKind kind);

inline Stream cf_stream(const StreamConfig& cfg) {
  if (cfg.m == 0 || cfg.n == 0) throw DomainError("cf_stream: dimensions must be positive");
  detail::check_noise(cfg.noise, std::numeric_limits<double>::infinity());
  Stream s;
  const double mn = static_cast<double>(cfg.m + cfg.n);
  double tau = 0.0;
  if (!cfg.ratings_path.empty()) {
    std::ifstream in(cfg.ratings_path);
    if (!in) throw DomainError("cf_stream: cannot open '" + cfg.ratings_path + "'");
    s.events = read_ratings(in, cfg.cf_loss);
    for (const RoundEvent& e : s.events)
      if (e.i >= cfg.m || e.j >= cfg.n) throw DimensionError("cf_stream: rating index outside the m x n matrix");
    // Without a declared bound use the largest trace norm in [-1, 1]^{m x n}.
    tau = cfg.cf_tau.value_or(std::sqrt(static_cast<double>(cfg.m * cfg.n * std::min(cfg.m, cfg.n))));
  } else {
    if (cfg.rank == 0) throw DomainError("cf_stream: rank must be >= 1");
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd;
    Matrix u(cfg.m, cfg.rank), v(cfg.n, cfg.rank);
    for (std::size_t i = 0; i < cfg.m; ++i)
      for (std::size_t k = 0; k < cfg.rank; ++k) u(i, k) = nd(rng);
    for (std::size_t j = 0; j < cfg.n; ++j)
      for (std::size_t k = 0; k < cfg.rank; ++k) v(j, k) = nd(rng);
    Matrix w(cfg.m, cfg.n);
    double top = 0.0;
    for (std::size_t i = 0; i < cfg.m; ++i)
      for (std::size_t j = 0; j < cfg.n; ++j) {
        for (std::size_t k = 0; k < cfg.rank; ++k) w(i, j) += u(i, k) * v(j, k);
        top = std::max(top, std::abs(w(i, j)));
      }
    if (top > 0.0)
      for (std::size_t i = 0; i < cfg.m; ++i)
        for (std::size_t j = 0; j < cfg.n; ++j) w(i, j) /= top;
    s.planted = w;
    tau = cfg.cf_tau.value_or(trace_norm(w));
    std::uniform_int_distribution<std::size_t> row(0, cfg.m - 1), col(0, cfg.n - 1);
    for (std::size_t t = 0; t < cfg.horizon; ++t) {
      const std::size_t i = row(rng);
      const std::size_t j = col(rng);
      // Gaussian noise truncated to two standard deviations.
      double z = 0.0;
      if (cfg.noise > 0.0)
        do z = nd(rng);
        while (std::abs(z) > 2.0);
      s.events.push_back({i, j, std::clamp(w(i, j) + cfg.noise * z, -1.0, 1.0), cfg.cf_loss});
    }
  }
  s.problem = {cfg.m, cfg.n, lipschitz_constant(cfg.cf_loss), cfg.beta.value_or(std::sqrt(mn)),
               cfg.tau.value_or(2.0 * tau), false};
  return s;
}

inline Stream make_stream(const StreamConfig& cfg) {
  switch (cfg.kind) {
    case ProblemKind::maxcut: return maxcut_stream(cfg);
    case ProblemKind::gambling: return gambling_stream(cfg);
    case ProblemKind::cf: return cf_stream(cfg);
  }
  throw DomainError("make_stream: unknown problem");
}

// Exhaustive minimum of the cumulative loss over a finite class, with the
// minimum after every round.
struct ExactComparator {
  double value = 0.0;
  Matrix witness;
  std::vector<double> prefix;  // min over vertices of the loss up to round t
};

namespace detail {

template <class Vertices>
ExactComparator exhaustive_min(const std::vector<RoundEvent>& events, const Vertices& vertices) {
  const std::size_t count = vertices.size();
  std::vector<double> cum(count, 0.0);
  ExactComparator out;
  out.prefix.reserve(events.size());
  for (const RoundEvent& ev : events) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count; ++k) {
      cum[k] += ev.loss(vertices[k](ev.i, ev.j));
      best = std::min(best, cum[k]);
    }
    out.prefix.push_back(best);
  }
  std::size_t arg = 0;
  for (std::size_t k = 1; k < count; ++k)
    if (cum[k] < cum[arg]) arg = k;
  out.value = events.empty() ? 0.0 : cum[arg];
  out.witness = vertices[arg];
  return out;
}

}  // namespace detail

// Minimum over all cut matrices.
inline ExactComparator maxcut_exact(std::size_t n, const std::vector<RoundEvent>& events) {
  if (n < 2 || n > 14) throw DomainError("maxcut_exact: n must be in [2, 14]");
  std::vector<Matrix> cuts;
  // C^A = C^{complement of A}: fix node 0 outside A.
  for (std::uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<bool> in_a(n, false);
    for (std::size_t i = 1; i < n; ++i) in_a[i] = (mask >> (i - 1)) & 1u;
    cuts.push_back(cut_matrix(in_a));
  }
  return detail::exhaustive_min(events, cuts);
}

inline ExactComparator gambling_exact(std::size_t n, const std::vector<RoundEvent>& events) {
  if (n < 2 || n > 8) throw DomainError("gambling_exact: n must be in [2, 8]");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Matrix> perms;
  do perms.push_back(permutation_matrix(order));
  while (std::next_permutation(order.begin(), order.end()));
  return detail::exhaustive_min(events, perms);
}

// CF comparator: certified minimum of the summed reduction losses over the
// reduced set of the embedded problem.
inline OfflineResult cf_comparator(const OmpProblem& problem, const std::vector<SymMatrix>& losses,
                                   const OfflineOptions& opt = {}) {
  const EmbedDims dims = embed_dims(problem);
  return best_offline_sdp_sum(losses, DecisionSet::reduced(dims.n, problem.beta, problem.tau), opt);
}

// Decomposition witness shared by every permutation matrix of n teams.
inline Decomposition gambling_witness(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return decompose_sym(permutation_matrix(order), false);
}

// Ratings file: one event per line, "t,i,j,y" with 1-based t, i, j; lines
// starting with '#' and blank lines are skipped.
inline void write_ratings(std::ostream& out, const std::vector<RoundEvent>& events) {
  out << "# t,i,j,y\n";
  char buf[64];
  for (std::size_t t = 0; t < events.size(); ++t) {
    const auto res = std::to_chars(buf, buf + sizeof buf, events[t].y);
    out << t + 1 << ',' << events[t].i + 1 << ',' << events[t].j + 1 << ',' << std::string_view(buf, res.ptr - buf)
        << '\n';
  }
}

inline std::vector<RoundEvent> read_ratings(std::istream& in, LossKind kind) {
  std::vector<RoundEvent> events;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::string_view rest(line);
    rest.remove_prefix(first);
    std::size_t ints[3];
    for (std::size_t& v : ints) {
      const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), v);
      if (res.ec != std::errc() || res.ptr == rest.data() + rest.size() || *res.ptr != ',')
        throw ParseError("expected 't,i,j,y'", lineno);
      rest.remove_prefix(res.ptr - rest.data() + 1);
    }
    double y = 0.0;
    const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), y);
    if (res.ec != std::errc() || rest.find_first_not_of(" \t", res.ptr - rest.data()) != std::string_view::npos)
      throw ParseError("malformed rating value", lineno);
    if (ints[0] != events.size() + 1) throw ParseError("round index out of sequence", lineno);
    if (ints[1] == 0 || ints[2] == 0) throw ParseError("indices are 1-based", lineno);
    if (!(std::abs(y) <= 1.0)) throw ParseError("rating outside [-1, 1]", lineno);
    events.push_back({ints[1] - 1, ints[2] - 1, y, kind});
  }
  return events;
}

}  // namespace sdpftrl
