// randopt <command> --input <file> --output <file> [--grid M] [--seed S] [--polish]

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "randopt/cli.hpp"

int main(int argc, char** argv) {
  namespace rc = randopt::cli;

  CLI::App app{"Measurable minimizers of scenario-indexed functions over finite probability spaces"};
  app.set_help_flag("-h,--help", "Print this help message and exit");

  std::string command;
  std::string input;
  std::string output;
  int grid = 0;
  std::uint64_t seed = 0;
  bool polish = false;

  std::vector<std::string> commands(std::begin(rc::kCommands), std::end(rc::kCommands));
  app.add_option("command", command, "One of: solve-rop, solve-rlop, check-measurable, stationary, necessary, oracle")
      ->required()
      ->check(CLI::IsMember(commands));
  app.add_option("--input", input, "Problem document (JSON)")->required();
  app.add_option("--output", output, "Report file (JSON), written atomically")->required();
  auto* grid_opt = app.add_option("--grid", grid, "Grid points per dimension for global searches")
                       ->check(CLI::Range(2, 1000000));
  auto* seed_opt = app.add_option("--seed", seed, "Seed for the sampled local-minimum verification");
  app.add_flag("--polish", polish, "Refine grid minimizers by projected Newton descent");
  app.footer(
      "Exit codes: 0 solved/verified, 1 refused (a measurability hypothesis fails), "
      "2 no solution, 3 input error.\nRANDOPT_THREADS caps worker threads (0 = all cores).");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rc::kInputError;
  }

  rc::RunOptions opts;
  if (*grid_opt) opts.grid = grid;
  if (*seed_opt) opts.seed = seed;
  opts.polish = polish;

  try {
    const int code = rc::run(command, input, output, opts);
    if (code != rc::kOk) std::cerr << "randopt: " << command << " finished with exit code " << code << "; see " << output << "\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "randopt: " << e.what() << "\n";
    return rc::kInputError;
  }
}
