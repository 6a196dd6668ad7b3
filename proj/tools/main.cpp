#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "slcomm/errors.hpp"
#include "slcomm/harness.hpp"

namespace {

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out;
  std::optional<unsigned> workers;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--seed", flags.seed, "Override the configured seed");
  cmd->add_option("--trials", flags.trials, "Override the configured trial count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", flags.out, "Write CSV here instead of stdout");
  cmd->add_option("--workers", flags.workers,
                  "Parallel trial workers (default: SLCOMM_WORKERS or the core count)")
      ->check(CLI::Range(1U, 1024U));
  cmd->add_flag("--timing", flags.timing, "Record wall time per trial");
}

slcomm::RunSettings settings_from(const CommonFlags& flags) {
  slcomm::RunSettings s;
  s.workers = flags.workers.value_or(slcomm::default_workers());
  s.timing = flags.timing;
  return s;
}

template <class Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream file(path);
  if (!file) throw slcomm::InvalidConfig("cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw slcomm::InvalidConfig("error while writing '" + path + "'");
}

slcomm::Scenario scenario_from(const std::string& path, const CommonFlags& flags) {
  slcomm::Scenario sc = slcomm::load_scenario(slcomm::ConfigDocument::load(path));
  if (flags.seed) sc.seed = *flags.seed;
  if (flags.trials) sc.trials = *flags.trials;
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed learning with sparsified mirror descent: simulator and checks"};
  app.require_subcommand(1);

  std::string config_path;
  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "Run every trial of a scenario at its base settings");
  run->add_option("config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
  add_common(run, run_flags);

  CommonFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Run the scenario over its [sweep] grid");
  sweep->add_option("config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
  add_common(sweep, sweep_flags);

  std::string suite = "all";
  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "Run invariant suites and print worst ratios");
  verify->add_option("suite", suite, "Suite name or 'all'");
  verify->add_option("--seed", verify_seed, "Seed for the randomized cases");

  CommonFlags hs_flags;
  auto* hide = app.add_subcommand("hide-and-seek", "Detection rate of the planted coordinate");
  hide->add_option("config", config_path, "Experiment file")->required()->check(CLI::ExistingFile);
  add_common(hide, hs_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto sc = scenario_from(config_path, run_flags);
      const auto recs = slcomm::run_scenario(sc, settings_from(run_flags));
      emit(run_flags.out, [&](std::ostream& os) { slcomm::write_trials_csv(os, recs); });
    } else if (sweep->parsed()) {
      const auto sc = scenario_from(config_path, sweep_flags);
      const auto recs = slcomm::sweep(sc, settings_from(sweep_flags));
      emit(sweep_flags.out, [&](std::ostream& os) { slcomm::write_trials_csv(os, recs); });
    } else if (verify->parsed()) {
      const auto results = slcomm::verify_module(suite, verify_seed);
      slcomm::print_verify_report(std::cout, results);
      for (const auto& r : results) {
        if (!r.passed) return 1;
      }
    } else if (hide->parsed()) {
      auto cfg = slcomm::load_hide_seek(slcomm::ConfigDocument::load(config_path));
      if (hs_flags.seed) cfg.seed = *hs_flags.seed;
      if (hs_flags.trials) cfg.trials = *hs_flags.trials;
      const auto rows = slcomm::hide_and_seek_scenario(cfg, settings_from(hs_flags));
      emit(hs_flags.out, [&](std::ostream& os) { slcomm::write_hide_seek_csv(os, rows); });
    }
  } catch (const slcomm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
