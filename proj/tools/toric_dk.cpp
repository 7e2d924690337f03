#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "toricdk/cli.hpp"

int main(int argc, char** argv) {
  using namespace toricdk;
  CLI::App app{"toric-dk: line bundle transforms and vanishing checks on toric stacks"};
  std::string command;
  std::string arg;
  std::int64_t box = -1;
  cli::Flags flags;
  app.add_option("command", command, "check | fm | homcmp | cohom | range | tilting | examples | suite")->required();
  app.add_option("input", arg, "scenario JSON file, or the example name for `examples`");
  app.add_option("--box", box, "half-width of the degree box");
  app.add_option("--workers", flags.workers, "threads for box scans");
  app.add_option("--format", flags.format, "json | csv | dot");
  app.add_option("--seed", flags.seed, "seed for `suite`");
  app.add_flag("--timing", flags.timing, "add wall-clock time to the report");
  CLI11_PARSE(app, argc, argv);
  if (box >= 0) flags.box = box;

  std::optional<std::string> scenario, name;
  if (!arg.empty()) {
    if (command == "examples") {
      name = arg;
    } else {
      try {
        scenario = cli::read_file(arg);
      } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return cli::exit_code_for(e.code());
      }
    }
  }
  auto res = cli::run(command, scenario, name, flags);
  std::cout << res.out;
  if (res.exit_code != 0 && res.exit_code != 3) std::cerr << "toric-dk: " << command << " failed\n";
  return res.exit_code;
}
