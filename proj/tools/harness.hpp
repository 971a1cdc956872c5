#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdpftrl/adversary.hpp"
#include "sdpftrl/bounds.hpp"
#include "sdpftrl/error.hpp"
#include "sdpftrl/game.hpp"
#include "sdpftrl/omp.hpp"
#include "sdpftrl/problems.hpp"

namespace sdpftrl::cli {

// Configuration error detected before any computation; exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  // sdp (synthetic losses on a bound's own decision/loss sets), maxcut,
  // gambling or cf.
  std::string problem = "sdp";
  std::string variant = "logdet-main";
  std::size_t order = 4;
  double radius = 1.0;
  double beta = 1.0;
  double tau = 2.0;
  double loss_radius = 1.0;
  std::string adversary = "iid";  // iid, adaptive, zero

  std::size_t n = 6;
  std::size_t m = 4;
  double noise = 0.0;
  std::size_t rank = 1;
  std::string loss = "absolute";
  double c1 = 1.0;
  double c2 = 1.0;
  std::string ratings;

  std::string regularizer = "auto";
  std::size_t horizon = 256;
  std::uint64_t seed = 1;
  std::optional<double> eta;
  std::optional<double> epsilon;
  std::string comparator = "exact";  // exact, convex, none
  std::string solver = "auto";       // auto, pgd
};

struct CsvRow {
  std::size_t round = 0;
  double loss = 0.0;
  double cum_loss = 0.0;
  double comparator_cum = 0.0;
  double regret = 0.0;
  double bound = 0.0;
};

struct RunResult {
  std::vector<CsvRow> rows;
  double final_regret = 0.0;
  double bound = 0.0;
  double eta = 0.0;
  std::optional<double> epsilon;
  double s = 0.0;
  double h0 = 0.0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;

  double ratio() const { return bound > 0.0 ? final_regret / bound : 0.0; }
};

// Shortest representation with at most 17 significant digits, '.' decimal,
// and no negative zero.
inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
  out << "round,loss,cum_loss,comparator_cum,regret,bound\n";
  for (const CsvRow& r : rows)
    out << r.round << ',' << format_number(r.loss) << ',' << format_number(r.cum_loss) << ','
        << format_number(r.comparator_cum) << ',' << format_number(r.regret) << ',' << format_number(r.bound) << '\n';
}

inline nlohmann::ordered_json summary_json(const RunResult& r) {
  nlohmann::ordered_json j;
  j["final_regret"] = r.final_regret;
  j["bound"] = r.bound;
  j["ratio"] = r.ratio();
  j["eta"] = r.eta;
  j["epsilon"] = r.epsilon ? nlohmann::ordered_json(*r.epsilon) : nlohmann::ordered_json(nullptr);
  j["s"] = r.s;
  j["H0"] = r.h0;
  j["seed"] = r.seed;
  j["wall_time"] = r.wall_time;
  return j;
}

namespace detail {

inline RegularizerSpec resolve_regularizer(const RunConfig& cfg, RegularizerSpec fallback) {
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw UsageError("epsilon must be > 0");
  if (cfg.epsilon) fallback.epsilon = *cfg.epsilon;
  return fallback;
}

inline double resolve_eta(const RunConfig& cfg, const BoundParams& p) {
  if (cfg.eta && !(*cfg.eta > 0.0 && std::isfinite(*cfg.eta))) throw UsageError("eta must be > 0");
  return cfg.eta.value_or(p.eta);
}

inline GameOptions game_options(const RunConfig& cfg) {
  GameOptions opt;
  opt.keep_decisions = false;
  if (cfg.solver == "pgd") opt.solver.kind = SolverKind::projected_gradient;
  else if (cfg.solver != "auto") throw UsageError("unknown solver '" + cfg.solver + "' (auto, pgd)");
  return opt;
}

inline void check_common(const RunConfig& cfg) {
  if (cfg.horizon == 0) throw UsageError("horizon must be >= 1");
  if (cfg.comparator != "exact" && cfg.comparator != "convex" && cfg.comparator != "none")
    throw UsageError("unknown comparator '" + cfg.comparator + "' (exact, convex, none)");
}

inline RunResult run_sdp(const RunConfig& cfg) {
  BoundVariant v;
  try {
    v = parse_bound_variant(cfg.variant);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const ProblemConstants c{cfg.order, cfg.radius, cfg.beta, cfg.tau, cfg.loss_radius};
  const double horizon = static_cast<double>(cfg.horizon);
  const DecisionSet set = default_set(v, c);
  const LossSpace space = default_loss_space(v, c);
  // Losses always come from the variant's loss space. Swapping logdet and
  // entropic on reduced sets switches to the other guarantee, with the loss
  // radius converted: ||L||_Fr <= ||vec(L)||_1 <= N ||L||_Fr, and sampled
  // l1 losses are single entries or mirrored pairs, so L^2 is diagonal.
  BoundVariant gv = v;
  ProblemConstants gc = c;
  if (cfg.regularizer != "auto") {
    const RegularizerKind k = parse_regularizer(cfg.regularizer);
    const RegularizerKind own = default_regularizer(v, c).kind;
    if (k != own && v == BoundVariant::logdet_main && k == RegularizerKind::entropic) {
      gv = BoundVariant::entropic_reduced;
      gc.loss_radius = c.loss_radius * c.loss_radius;
    } else if (k != own && v == BoundVariant::entropic_reduced && k == RegularizerKind::logdet) {
      gv = BoundVariant::logdet_main;
      gc.loss_radius = static_cast<double>(c.order) * std::sqrt(c.loss_radius);
    } else if (k != own) {
      throw UsageError("variant '" + cfg.variant + "' is stated for the " + std::string(to_string(own)) +
                       " regularizer");
    }
  }
  const BoundParams p = bound_params(gv, gc, horizon);
  const RegularizerSpec reg = resolve_regularizer(cfg, default_regularizer(gv, gc));
  const double eta = resolve_eta(cfg, p);

  Adversary adv;
  if (cfg.adversary == "iid") adv = iid_adversary(space, cfg.order, cfg.seed);
  else if (cfg.adversary == "adaptive") adv = adaptive_adversary(space, cfg.order, cfg.seed);
  else if (cfg.adversary == "zero") adv = [n = cfg.order](std::size_t, const SymMatrix&) { return SymMatrix(n); };
  else throw UsageError("unknown adversary '" + cfg.adversary + "' (iid, adaptive, zero)");

  GameOptions opt = game_options(cfg);
  opt.loss_space = space;
  opt.bound = fixed_rate_bound_series(p, eta);
  opt.comparator = cfg.comparator == "exact"    ? ComparatorMode::per_prefix
                   : cfg.comparator == "convex" ? ComparatorMode::horizon
                                                : ComparatorMode::none;
  const GameTranscript tr = run_sdp_game(adv, cfg.horizon, reg, set, eta, opt);

  RunResult r;
  for (std::size_t t = 0; t < tr.rounds(); ++t)
    r.rows.push_back({t + 1, tr.round_loss[t], tr.cum_loss[t], tr.comparator_prefix[t], tr.regret[t], tr.bound[t]});
  r.final_regret = tr.final_regret();
  r.bound = tr.bound.back();
  r.eta = eta;
  if (reg.uses_epsilon()) r.epsilon = reg.epsilon;
  r.s = p.s;
  r.h0 = p.h0;
  return r;
}

inline StreamConfig stream_config(const RunConfig& cfg) {
  StreamConfig sc;
  try {
    sc.kind = parse_problem_kind(cfg.problem);
    sc.cf_loss = parse_loss_kind(cfg.loss);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (sc.kind == ProblemKind::cf && sc.cf_loss == LossKind::sign) throw UsageError("cf losses are absolute or squared");
  sc.n = cfg.n;
  sc.m = cfg.m;
  sc.horizon = cfg.horizon;
  sc.seed = cfg.seed;
  sc.noise = cfg.noise;
  sc.rank = cfg.rank;
  sc.c1 = cfg.c1;
  sc.c2 = cfg.c2;
  sc.ratings_path = cfg.ratings;
  return sc;
}

inline RunResult run_omp(const RunConfig& cfg) {
  const StreamConfig sc = stream_config(cfg);
  if (cfg.comparator == "exact") {
    if (sc.kind == ProblemKind::cf) throw UsageError("no exact comparator for cf; use --comparator convex");
    if (sc.kind == ProblemKind::maxcut && (sc.n < 2 || sc.n > 14)) throw UsageError("exact max-cut needs n <= 14");
    if (sc.kind == ProblemKind::gambling && (sc.n < 2 || sc.n > 8)) throw UsageError("exact gambling needs n <= 8");
  }
  const Stream s = make_stream(sc);
  if (!sc.ratings_path.empty() && s.events.size() != cfg.horizon)
    throw UsageError("ratings file has " + std::to_string(s.events.size()) + " events but horizon is " +
                     std::to_string(cfg.horizon));
  ProblemConstants c = reduced_constants(s.problem);
  BoundVariant v = BoundVariant::logdet_main;
  if (cfg.regularizer == "entropic") {
    v = BoundVariant::entropic_reduced;
    // Reduction losses have Tr(L^2) = 4 g^2 <= 4 G^2.
    c.loss_radius = 4.0 * s.problem.lipschitz * s.problem.lipschitz;
  } else if (cfg.regularizer != "auto" && cfg.regularizer != "logdet") {
    throw UsageError("matrix prediction runs support the logdet and entropic regularizers");
  }
  const double horizon = static_cast<double>(cfg.horizon);
  const BoundParams p = bound_params(v, c, horizon);
  const RegularizerSpec reg = resolve_regularizer(cfg, default_regularizer(v, c));
  const double eta = resolve_eta(cfg, p);

  OmpGameOptions opt;
  opt.sdp = game_options(cfg);
  opt.sdp.bound = fixed_rate_bound_series(p, eta);
  opt.sdp.comparator = cfg.comparator == "none" ? ComparatorMode::none : ComparatorMode::per_prefix;
  if (cfg.comparator == "exact")
    opt.comparator_prefix = sc.kind == ProblemKind::maxcut ? maxcut_exact(sc.n, s.events).prefix
                                                           : gambling_exact(sc.n, s.events).prefix;
  const OmpTranscript tr = run_omp_game(s.problem, s.events, reg, eta, opt);

  RunResult r;
  for (std::size_t t = 0; t < tr.rounds(); ++t)
    r.rows.push_back(
        {t + 1, tr.omp_loss[t], tr.omp_cum[t], tr.omp_comparator_prefix[t], tr.omp_regret[t], 0.5 * tr.sdp.bound[t]});
  r.final_regret = tr.omp_regret.back();
  r.bound = 0.5 * tr.sdp.bound.back();
  r.eta = eta;
  if (reg.uses_epsilon()) r.epsilon = reg.epsilon;
  r.s = p.s;
  r.h0 = p.h0;
  return r;
}

}  // namespace detail

// One game. Regret bounds: the fixed-rate FTRL guarantee H0 / eta + eta t / s
// of the selected guarantee, halved for matrix prediction problems.
inline RunResult run(const RunConfig& cfg) {
  detail::check_common(cfg);
  const auto start = std::chrono::steady_clock::now();
  RunResult r = cfg.problem == "sdp" ? detail::run_sdp(cfg) : detail::run_omp(cfg);
  r.seed = cfg.seed;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

struct BenchRow {
  std::size_t horizon = 0;
  double mean_regret = 0.0;
  double mean_bound = 0.0;
  std::optional<double> entropic_mean_regret;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::optional<double> slope;  // absent when some mean regret is not positive
};

// Least-squares slope of ln(regret) against ln(T).
inline std::optional<double> loglog_slope(const std::vector<BenchRow>& rows) {
  if (rows.size() < 2) return std::nullopt;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const BenchRow& r : rows) {
    if (!(r.mean_regret > 0.0)) return std::nullopt;
    const double x = std::log(static_cast<double>(r.horizon)), y = std::log(r.mean_regret);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(rows.size());
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

// Mean final regret over `seeds` consecutive seeds at each horizon; with
// compare_entropic, the same streams are replayed with the entropic
// regularizer.
inline BenchResult bench(RunConfig cfg, const std::vector<std::size_t>& horizons, std::size_t seeds,
                         bool compare_entropic) {
  if (horizons.empty()) throw UsageError("bench needs at least one horizon");
  for (std::size_t k = 1; k < horizons.size(); ++k)
    if (horizons[k] <= horizons[k - 1]) throw UsageError("bench horizons must be strictly ascending");
  if (seeds == 0) throw UsageError("bench needs at least one seed");
  BenchResult out;
  const std::uint64_t base = cfg.seed;
  for (std::size_t t : horizons) {
    BenchRow row{t, 0.0, 0.0, std::nullopt};
    double ent = 0.0;
    for (std::size_t k = 0; k < seeds; ++k) {
      RunConfig c = cfg;
      c.horizon = t;
      c.seed = base + k;
      const RunResult r = run(c);
      row.mean_regret += r.final_regret / static_cast<double>(seeds);
      row.mean_bound += r.bound / static_cast<double>(seeds);
      if (compare_entropic) {
        c.regularizer = "entropic";
        c.eta.reset();
        ent += run(c).final_regret / static_cast<double>(seeds);
      }
    }
    if (compare_entropic) row.entropic_mean_regret = ent;
    out.rows.push_back(row);
  }
  out.slope = loglog_slope(out.rows);
  return out;
}

inline void write_bench(std::ostream& out, const BenchResult& b) {
  const bool ent = !b.rows.empty() && b.rows.front().entropic_mean_regret.has_value();
  out << "T,mean_regret,mean_bound" << (ent ? ",entropic_mean_regret,entropic_over_logdet" : "") << '\n';
  for (const BenchRow& r : b.rows) {
    out << r.horizon << ',' << format_number(r.mean_regret) << ',' << format_number(r.mean_bound);
    if (ent) {
      out << ',' << format_number(*r.entropic_mean_regret) << ',';
      out << (r.mean_regret > 0.0 ? format_number(*r.entropic_mean_regret / r.mean_regret) : "undefined");
    }
    out << '\n';
  }
  out << "slope," << (b.slope ? format_number(*b.slope) : "undefined") << '\n';
}

}  // namespace sdpftrl::cli
