// bbgky_cli run <config> [--out DIR] [--format csv|json] [--threads K]
//
// Exit codes: 0 all checks passed, 1 a tolerance check failed, 2 bad config or I/O.
// BBGKY_THREADS caps the worker count when --threads is not given.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include "bbgky/harness/runner.hpp"

namespace {

int threads_from_env() {
  const char* v = std::getenv("BBGKY_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) {
    std::cerr << "ignoring BBGKY_THREADS='" << v << "': expected a positive integer\n";
    return 1;
  }
  return static_cast<int>(n);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace bbgky::harness;

  CLI::App app{"Config-driven runner for the BBGKY hierarchy experiments"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the experiment described by an INI config");
  std::string config;
  std::string out_dir;
  std::string format;
  int threads = 0;
  run->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides [output] dir)");
  run->add_option("--format", format, "Write only this format (default: both)")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list", "List the available experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  if (list->parsed()) {
    for (const auto& n : experiment_names()) std::cout << n << '\n';
    return exit_ok;
  }

  RunOptions opt;
  if (!out_dir.empty()) opt.out_dir = out_dir;
  if (format == "csv") opt.formats = {OutputFormat::csv};
  if (format == "json") opt.formats = {OutputFormat::json};
  opt.threads = threads > 0 ? threads : threads_from_env();

  const auto report = run_config(config, opt, std::cerr);
  for (const auto& p : report.written) std::cout << "wrote " << p.string() << '\n';
  if (report.exit_code == exit_ok) std::cout << "all checks passed\n";
  return report.exit_code;
}
