// smdeim-rom: full-order runs, offline builds, online ROM runs and sweeps.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "smdeim/bench/config.hpp"
#include "smdeim/bench/experiment.hpp"

int main(int argc, char** argv) {
  using smdeim::bench::Experiment;

  CLI::App app{"SMDEIM reduced-order model benchmark"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  bool quiet = false;

  struct Sub {
    const char* name;
    const char* help;
    Experiment::Command cmd;
  };
  const Sub subs[] = {
      {"simulate", "Run the full-order model and store snapshots", Experiment::Command::Simulate},
      {"offline", "Build POD bases, interpolants and reduced models from stored snapshots",
       Experiment::Command::Offline},
      {"online", "Integrate the reduced models from the offline artifact", Experiment::Command::Online},
      {"sweep", "simulate + offline + online over the whole grid, skipping finished rows", Experiment::Command::Sweep},
  };
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("--config", config_path, "Experiment config file (key=value)")->required()->check(CLI::ExistingFile);
    sc->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sc->add_option("--seed", seed, "Seed (overrides the config)");
    sc->add_option("--jobs", jobs, "Size points processed in parallel")->check(CLI::PositiveNumber);
    sc->add_flag("-q,--quiet", quiet, "No progress messages");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = smdeim::bench::load_config(config_path);
    for (const auto* sc : app.get_subcommands()) {
      if (sc->count("--out")) cfg.output_dir = out_dir;
      if (sc->count("--seed")) cfg.seed = seed;
      if (sc->count("--jobs")) cfg.jobs = jobs;
    }
    Experiment exp(cfg, [quiet](const std::string& msg) {
      if (!quiet) std::fprintf(stderr, "[smdeim-rom] %s\n", msg.c_str());
    });
    const std::string name = app.get_subcommands().front()->get_name();
    for (const auto& s : subs)
      if (name == s.name) return exp.run(s.cmd);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
