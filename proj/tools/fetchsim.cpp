#include "prefetch/bench.hpp"

#include "CLI11.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tandem queue prefetch solver and simulator"};
  app.require_subcommand(1);
  const std::vector<std::string> raw_argv(argv, argv + argc);

  prefetch::SolveArgs solve_args;
  solve_args.argv = raw_argv;
  CLI::App* solve =
      app.add_subcommand("solve", "solve the dynamic program and dump tables");
  solve->add_option("--config", solve_args.config_path,
                    "JSON solve request file");
  solve->add_option("--preset", solve_args.preset, "named scenario preset");
  solve->add_option("--out", solve_args.out_dir, "output directory");

  prefetch::SweepArgs sweep_args;
  sweep_args.argv = raw_argv;
  std::string policy_list;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "simulate policies across a grid of holding costs");
  sweep->add_option("--config", sweep_args.config_path,
                    "JSON scenario config file");
  sweep->add_option("--preset", sweep_args.preset, "named scenario preset");
  sweep->add_option("--policies", policy_list,
                    "comma separated policy names (default: all)");
  sweep->add_option("--episodes", sweep_args.episodes,
                    "episodes per point (overrides scenario)");
  sweep->add_option("--seed", sweep_args.seed,
                    "base seed (overrides scenario)");
  sweep->add_option("--c-grid", sweep_args.c_grid,
                    "holding cost grid as lo:hi:{log,lin}:n");
  sweep->add_option("--out", sweep_args.out_dir, "output directory");

  prefetch::CompareArgs compare_args;
  compare_args.argv = raw_argv;
  CLI::App* compare =
      app.add_subcommand("compare", "compare two tradeoff CSV files");
  compare->add_option("baseline", compare_args.baseline, "baseline CSV")
      ->required();
  compare->add_option("candidate", compare_args.candidate, "candidate CSV")
      ->required();
  compare->add_option("--tol", compare_args.tol,
                      "allowed relative deviation per column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? prefetch::kExitOk : prefetch::kExitConfig;
  }

  if (solve->parsed()) return prefetch::run_solve(solve_args);
  if (sweep->parsed()) {
    sweep_args.policies = split_commas(policy_list);
    return prefetch::run_sweep(sweep_args);
  }
  if (compare->parsed()) return prefetch::run_compare(compare_args);
  return prefetch::kExitConfig;
}
