#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mor/checks.hpp"
#include "mor/errors.hpp"
#include "mor/experiments.hpp"

namespace ex = mor::experiments;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitHard = 1;
constexpr int kExitSoft = 2;

struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string solver;
};

void log_line(const std::string& line) { std::cerr << "[mor] " << line << std::endl; }

ex::Config resolve_config(const Overrides& o) {
  ex::Config cfg = o.config_path.empty() ? ex::Config{} : ex::load_config(o.config_path);
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.solver == "dense") cfg.solver = mor::SolverKind::kDense;
  if (o.solver == "lowrank") cfg.solver = mor::SolverKind::kLowRank;
  ex::validate(cfg);
  return cfg;
}

int report(const ex::Config& cfg, const ex::RunResult& result) {
  ex::write_outputs(cfg, result);
  for (const auto& [stem, table] : result.tables) {
    std::cout << "wrote " << (cfg.output_dir / (stem + ".csv")).string() << " (" << table.rows.size()
              << " rows)\n";
  }
  int code = kExitOk;
  for (const auto& c : result.soft_checks) {
    std::cout << (c.passed ? "  pass: " : "  WARN: ") << c.name << " (" << c.detail << ")\n";
    if (!c.passed) code = kExitSoft;
  }
  if (!result.failures.empty()) {
    std::cout << "  " << result.failures.size() << " cell(s) recorded as NaN, see the meta.json sidecar\n";
  }
  std::printf("  %s finished in %.1f s\n", ex::to_string(result.experiment), result.wall_seconds);
  return code;
}

int run_experiments(const ex::Config& cfg, ex::Experiment which) {
  int code = kExitOk;
  auto merge = [&code](int c) { code = std::max(code, c); };
  if (which == ex::Experiment::kNonParametric || which == ex::Experiment::kAll) {
    merge(report(cfg, ex::run_nonparametric(cfg, log_line)));
  }
  if (which == ex::Experiment::kOneParam || which == ex::Experiment::kAll) {
    merge(report(cfg, ex::run_one_param(cfg, log_line)));
  }
  if (which == ex::Experiment::kFourParam || which == ex::Experiment::kAll) {
    merge(report(cfg, ex::run_four_param(cfg, log_line)));
  }
  return code;
}

int build_foms(const ex::Config& cfg) {
  for (bool one_parameter : {false, true}) {
    const ex::CachedFom fom = ex::fom_cache(cfg, one_parameter, log_line);
    std::cout << fom.path.string() << " n=" << fom.model.order() << " d=" << fom.model.num_parameters()
              << " checksum=" << fom.checksum << (fom.rebuilt ? " (built)" : " (cached)") << "\n";
  }
  return kExitOk;
}

int selftest() {
  int code = kExitOk;
  for (const auto& r : mor::checks::oracle_suite()) {
    std::cout << mor::checks::format_line(r) << std::endl;
    if (!r.passed) code = kExitHard;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model order reduction experiments on the thermal block benchmark", "mor"};
  app.set_version_flag("--version", std::string(MOR_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  app.add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed for parameter sampling");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (0: hardware concurrency)");
  app.add_option("--solver", o.solver, "matrix equation solver")->check(CLI::IsMember({"dense", "lowrank"}));

  auto* fom = app.add_subcommand("fom", "full-order model archives");
  fom->require_subcommand(1);
  auto* fom_build = fom->add_subcommand("build", "build or load the FOM archives");

  auto* run = app.add_subcommand("run", "run experiments and write CSV files");
  std::string experiment;
  run->add_option("experiment", experiment, "nonparam, one-param, four-param or all (default: from config)")
      ->check(CLI::IsMember({"nonparam", "one-param", "four-param", "all"}));

  auto* config = app.add_subcommand("config", "configuration helpers");
  config->require_subcommand(1);
  auto* print_defaults = config->add_subcommand("print-defaults", "print every configuration key with its default");

  auto* self = app.add_subcommand("selftest", "run the oracle checks");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) o.seed = seed;
  if (*threads_opt) o.threads = threads;

  try {
    if (*print_defaults) {
      std::cout << ex::default_config_json();
      return kExitOk;
    }
    if (*self) return selftest();
    const ex::Config cfg = resolve_config(o);
    if (*fom_build) return build_foms(cfg);
    if (*run) {
      const ex::Experiment which = experiment.empty() ? cfg.experiment : ex::experiment_from_string(experiment);
      return run_experiments(cfg, which);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitHard;
  }
  return kExitOk;
}
