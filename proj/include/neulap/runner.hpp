#pragma once

#include <string>

#include "neulap/config.hpp"

namespace neulap::cli {

struct RunOptions {
  int jobs = 1;
  std::string out_dir;  // empty: config.output_path
  bool dump_mesh = false;
};

// Executes the configured experiment, writing <out>/<experiment>.csv and
// <out>/summary.txt (one pass/fail line per assertion). Returns 0 when every
// assertion passes, 2 otherwise. Execution failures propagate as exceptions.
int run(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace neulap::cli
