#pragma once

// run <config>: parse, execute, write outputs atomically, map the outcome to an exit code.

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bbgky/harness/experiments.hpp"
#include "bbgky/parallel.hpp"

namespace bbgky::harness {

inline constexpr const char* kToolVersion = "0.1.0";

enum class OutputFormat { csv, json };

enum ExitCode : int { exit_ok = 0, exit_tolerance = 1, exit_config = 2 };

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides [output] dir
  std::vector<OutputFormat> formats{OutputFormat::csv, OutputFormat::json};
  int threads = 1;
};

struct RunReport {
  int exit_code = exit_ok;
  std::vector<std::filesystem::path> written;
  std::vector<CheckFailure> failures;
  std::string error;
};

/// Row i of the table as "name=value, ..." for diagnostics.
inline std::string describe_row(const ResultTable& table, std::size_t i) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ", ";
    out += table.columns[c].name + "=" + detail::cell_text(table.rows[i][c]);
  }
  return out;
}

inline RunReport run_config(const std::filesystem::path& config_path, const RunOptions& opt, std::ostream& log) {
  RunReport report;
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const Error& e) {
    report.exit_code = exit_config;
    report.error = e.what();
    log << "config error: " << e.what() << '\n';
    return report;
  }

  set_thread_count(opt.threads);
  const auto start = std::chrono::steady_clock::now();
  ExperimentOutcome outcome;
  try {
    outcome = run_experiment(cfg);
  } catch (const IntegrationError& e) {
    report.exit_code = exit_tolerance;
    report.error = e.what();
    log << "integration failed: " << e.what() << '\n';
    return report;
  } catch (const Error& e) {
    report.exit_code = exit_config;
    report.error = e.what();
    log << "experiment rejected its parameters: " << e.what() << '\n';
    return report;
  }
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;

  auto& table = outcome.table;
  table.metadata = {{"experiment", cfg.name},
                    {"seed", cfg.seed},
                    {"config_sha256", cfg.config_hash},
                    {"tool_version", kToolVersion},
                    {"wall_time_seconds", wall.count()},
                    {"failures", outcome.failures.size()}};

  const auto dir = opt.out_dir ? *opt.out_dir : cfg.output_dir;
  try {
    std::filesystem::create_directories(dir);
    AtomicWriteBatch batch;
    for (auto f : opt.formats) {
      if (f == OutputFormat::csv) batch.add(dir / (cfg.output_stem + ".csv"), to_csv(table));
      if (f == OutputFormat::json) batch.add(dir / (cfg.output_stem + ".json"), to_json(table).dump(2) + "\n");
    }
    report.written = batch.commit();
  } catch (const std::exception& e) {
    report.exit_code = exit_config;
    report.error = e.what();
    log << "output error: " << e.what() << '\n';
    return report;
  }

  report.failures = outcome.failures;
  for (const auto& f : outcome.failures) log << "tolerance failure: " << f.message << " [" << describe_row(table, f.row) << "]\n";
  report.exit_code = outcome.failures.empty() ? exit_ok : exit_tolerance;
  return report;
}

}  // namespace bbgky::harness
