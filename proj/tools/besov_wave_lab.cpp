#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "bwl/lab/experiments.hpp"
#include "bwl/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for the damped wave equation u'' - Lap u + u' = u^p"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  std::string config;
  bool override_adm = false;
  int jobs = bwl::default_jobs();
  std::string out;
  std::uint64_t seed = 0;
  run->add_option("config", config, "experiment config file")->required();
  run->add_flag("--override-admissibility", override_adm, "run even if the hypothesis check fails");
  run->add_option("--jobs", jobs, "worker threads (default: BWL_JOBS or 1)")->check(CLI::PositiveNumber);
  auto* out_opt = run->add_option("--out", out, "output directory");
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");

  auto* list = app.add_subcommand("list", "list experiment kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : bwl::lab::kExitConfig;
  }

  if (list->parsed()) {
    std::cout << bwl::lab::list_experiments();
    return 0;
  }

  bwl::lab::RunOptions opts;
  opts.override_admissibility = override_adm;
  opts.jobs = jobs;
  if (*out_opt) opts.out_dir = out;
  if (*seed_opt) opts.seed = seed;
  const auto result = bwl::lab::run_file(config, opts);
  if (result.report) {
    const auto& rep = *result.report;
    std::cout << rep.kind << " [" << rep.config_hash << "] -> " << result.out_dir.string() << "\n";
    for (const auto& v : rep.verdicts)
      std::cout << "  " << (v.pass ? "PASS " : "FAIL ") << v.name << (v.detail.empty() ? "" : ": " + v.detail)
                << "\n";
  }
  return result.exit_code;
}
