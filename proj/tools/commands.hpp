// SPDX-License-Identifier: MIT
// Subcommands of the favard driver. Each returns a JSON report that embeds the
// configuration and the SHA-256 of every input, plus any CSV tables.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "favard/config.hpp"
#include "json.hpp"

namespace favard::cli {

struct CommandOutput {
  std::string command;
  nlohmann::json report;
  // (file name, contents) written next to the report.
  std::vector<std::pair<std::string, std::string>> files;

  // True when every entry of report["invariants"] holds.
  bool invariants_ok() const;
};

std::string sha256_hex(const std::string& bytes);

CommandOutput run_compute(const ExperimentConfig& cfg, const std::string& input, std::uint64_t mc_needles);
CommandOutput run_mc(const ExperimentConfig& cfg, const std::string& input, std::uint64_t needles);
CommandOutput run_cantor_decay(const ExperimentConfig& cfg, int n_max);
CommandOutput run_pipeline(const ExperimentConfig& cfg, const std::string& input, double kappa);
CommandOutput run_content(const ExperimentConfig& cfg, const std::string& input, double delta,
                          const std::string& curve);
CommandOutput run_lattice_check(const ExperimentConfig& cfg, const std::string& input);
CommandOutput run_tree_check(const ExperimentConfig& cfg, const std::string& input, double kappa);
// width <= 0 selects c_J and m0 < 0 the largest bad-scale count on E.
CommandOutput run_extract_graph(const ExperimentConfig& cfg, const std::string& input, double theta,
                                double width, int m0);

// Writes <dir>/<command>.json and the tables; throws IoError.
void write_outputs(const CommandOutput& out, const std::string& dir);

// 0 when all invariants hold, 2 otherwise.
int exit_code(const CommandOutput& out);

}  // namespace favard::cli
