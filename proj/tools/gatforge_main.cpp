#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gatforge/cli.hpp"

namespace {

// Section headers get a splash of color on interactive terminals;
// GATFORGE_NO_COLOR suppresses it. Files and pipes always receive the plain
// deterministic bytes.
void write_report(const gatforge::cli::Outcome& out, const std::string& out_path,
                  bool json_format) {
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    f << out.report;
    return;
  }
  bool colorize = !json_format && isatty(fileno(stdout)) == 1 &&
                  std::getenv("GATFORGE_NO_COLOR") == nullptr;
  if (!colorize) {
    std::cout << out.report;
    return;
  }
  std::istringstream ss(out.report);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind("== error", 0) == 0) {
      std::cout << "\033[31m" << line << "\033[0m\n";
    } else if (line.rfind("== ", 0) == 0) {
      std::cout << "\033[36m" << line << "\033[0m\n";
    } else {
      std::cout << line << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"batch kernel for freely generated dependent type theories"};
  app.require_subcommand(1);

  std::string path;
  gatforge::cli::Flags flags;

  auto add_common = [&](CLI::App* cmd, bool with_budget, bool with_probe) {
    cmd->add_option("file", path, "input file")->required();
    cmd->add_option("--format", flags.format, "report format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--out", flags.out_path, "write the report to a file");
    if (with_budget) {
      cmd->add_option("--depth", flags.depth, "term depth budget");
      cmd->add_option("--ctx-len", flags.ctx_len, "context length budget");
      cmd->add_option("--max", flags.max_results, "enumeration result cap");
    }
    if (with_probe) {
      cmd->add_option("--probe", flags.probe, "stability probes per query");
      cmd->add_option("--seed", flags.seed, "probe sampling seed");
    }
  };

  add_common(app.add_subcommand("check", "parse and validate a signature file"), false, false);
  add_common(app.add_subcommand("unify", "solve the unification blocks of a problem file"),
             false, false);
  add_common(app.add_subcommand("generalize", "solve the generalization blocks"), false, false);
  add_common(app.add_subcommand("strictify-id",
                                "run identity strictification queries with stability probes"),
             true, true);
  add_common(app.add_subcommand("verify", "certify results against the bounded oracle"), true,
             false);

  CLI11_PARSE(app, argc, argv);

  std::string command = app.get_subcommands().front()->get_name();
  gatforge::cli::Outcome out = gatforge::cli::run(command, path, flags);
  write_report(out, flags.out_path, flags.format == "json");
  return out.exit_code;
}
