#pragma once

#include "maq/config.hpp"
#include "maq/io.hpp"

namespace maq {

struct RunResult {
  SuiteReport report;
  nlohmann::json outputs;
};

// Dispatches a parsed config to its command handler, writes report.json and
// the per-command CSV artifacts into cfg.out_dir, and returns the report.
RunResult run_command(const ExperimentConfig& cfg);

// Exit-code contract: 0 all pass, 1 check failure, 2 config error,
// 3 runtime/IO error.
int run_cli(int argc, char** argv);

}  // namespace maq
