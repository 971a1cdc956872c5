#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "harness.hpp"
#include "sdpftrl/validators.hpp"

using namespace sdpftrl;

namespace {

void add_run_options(CLI::App& app, cli::RunConfig& cfg) {
  app.add_option("--problem", cfg.problem, "sdp, maxcut, gambling or cf")->capture_default_str();
  app.add_option("--variant", cfg.variant,
                 "guarantee for sdp runs: frobenius, entropic, logdet-spectral, entropic-reduced, logdet-main, "
                 "burg-vector")
      ->capture_default_str();
  app.add_option("--order", cfg.order, "matrix order N for sdp runs")->capture_default_str();
  app.add_option("--radius", cfg.radius, "ball radius for ball variants")->capture_default_str();
  app.add_option("--beta", cfg.beta, "diagonal bound of reduced sets")->capture_default_str();
  app.add_option("--tau", cfg.tau, "trace bound of reduced sets")->capture_default_str();
  app.add_option("--loss-radius", cfg.loss_radius, "loss set radius")->capture_default_str();
  app.add_option("--adversary", cfg.adversary, "iid, adaptive or zero")->capture_default_str();
  app.add_option("-n,--nodes", cfg.n, "nodes, teams, or cf columns")->capture_default_str();
  app.add_option("-m,--rows", cfg.m, "cf rows")->capture_default_str();
  app.add_option("--noise", cfg.noise, "label flip probability or rating noise")->capture_default_str();
  app.add_option("--rank", cfg.rank, "rank of the planted cf matrix")->capture_default_str();
  app.add_option("--loss", cfg.loss, "cf loss: absolute or squared")->capture_default_str();
  app.add_option("--c1", cfg.c1, "gambling beta multiplier")->capture_default_str();
  app.add_option("--c2", cfg.c2, "gambling tau multiplier")->capture_default_str();
  app.add_option("--ratings", cfg.ratings, "cf ratings file (t,i,j,y lines)");
  app.add_option("--regularizer", cfg.regularizer, "auto, or logdet/entropic for matrix prediction")
      ->capture_default_str();
  app.add_option("-T,--horizon", cfg.horizon, "number of rounds")->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--eta", cfg.eta, "learning rate (default: tuned to the horizon)");
  app.add_option("--epsilon", cfg.epsilon, "logdet/burg shift (default: beta or the ball radius)");
  app.add_option("--comparator", cfg.comparator, "exact, convex or none")->capture_default_str();
  app.add_option("--solver", cfg.solver, "auto or pgd")->capture_default_str();
}

std::vector<std::size_t> default_horizons() {
  std::vector<std::size_t> h;
  for (std::size_t t = 256; t <= 4096; t *= 2) h.push_back(t);
  return h;
}

void open_or_throw(std::ofstream& f, const std::string& path) {
  f.open(path, std::ios::binary);
  if (!f) throw cli::UsageError("cannot write '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online semidefinite FTRL experiments"};
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
  app.require_subcommand(1);

  cli::RunConfig run_cfg;
  std::string csv_path, json_path;
  CLI::App* run = app.add_subcommand("run", "play one game and report regret per round");
  add_run_options(*run, run_cfg);
  run->add_option("--csv", csv_path, "per-round CSV output (default: stdout)");
  run->add_option("--json", json_path, "JSON summary output");

  std::string suite = "all";
  std::size_t samples = 0;
  std::uint64_t val_seed = 1;
  CLI::App* validate = app.add_subcommand("validate", "numerical checks of the theory");
  validate->add_option("--suite", suite, "suite name or 'all' (" + suite_names() + ")")->capture_default_str();
  validate->add_option("--samples", samples, "samples per suite (0: suite default)")->capture_default_str();
  validate->add_option("--seed", val_seed, "random seed")->capture_default_str();

  cli::RunConfig bench_cfg;
  bench_cfg.comparator = "convex";
  std::vector<std::size_t> horizons = default_horizons();
  std::size_t seeds = 8;
  bool compare_entropic = false;
  std::string bench_csv;
  CLI::App* bench = app.add_subcommand("bench", "mean regret over seeds per horizon and its log-log slope");
  add_run_options(*bench, bench_cfg);
  bench->add_option("--horizons", horizons, "horizons, strictly ascending")->delimiter(',');
  bench->add_option("--seeds", seeds, "seeds per horizon")->capture_default_str();
  bench->add_flag("--compare-entropic", compare_entropic, "replay each stream with the entropic regularizer");
  bench->add_option("--csv", bench_csv, "table output (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const cli::RunResult r = cli::run(run_cfg);
      if (csv_path.empty()) {
        cli::write_csv(std::cout, r.rows);
      } else {
        std::ofstream f;
        open_or_throw(f, csv_path);
        cli::write_csv(f, r.rows);
      }
      const std::string summary = cli::summary_json(r).dump(2);
      if (json_path.empty()) {
        std::cerr << summary << '\n';
      } else {
        std::ofstream f;
        open_or_throw(f, json_path);
        f << summary << '\n';
      }
      return 0;
    }
    if (*validate) {
      const std::vector<CheckReport> reports = run_validation(suite, samples, val_seed);
      bool ok = true;
      for (const CheckReport& r : reports) {
        std::cout << r.line() << '\n';
        ok = ok && r.pass();
      }
      return ok ? 0 : 1;
    }
    if (*bench) {
      const cli::BenchResult b = cli::bench(bench_cfg, horizons, seeds, compare_entropic);
      if (bench_csv.empty()) {
        cli::write_bench(std::cout, b);
      } else {
        std::ofstream f;
        open_or_throw(f, bench_csv);
        cli::write_bench(f, b);
      }
      return 0;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
