// SPDX-License-Identifier: MIT
// Experiment configuration shared by the command-line driver and embedded in
// every report.
#pragma once

#include <cstdint>
#include <string>

namespace favard {

struct ExperimentConfig {
  double rho = 0.125;
  int n_angles = 4096;
  // Atom pitch; 0 selects the default of the discretization.
  double pitch = 0.0;
  int depth_n = 5;
  int k_max = 5;
  double kappa = 0.5;
  double c_eps = 1.0 / 64.0;
  double c_lambda = 1.0 / 256.0;
  double big_lambda = 64.0;
  // 0 selects rho^{-3}.
  double gamma = 0.0;
  double c_n = 8.0;
  double c_y = 0.25;
  double c_j = 1.0 / 16.0;
  double ahlfors = 1.0;
  std::uint64_t seed = 1;
  int workers = 1;
  std::uint64_t mc_needles = 0;
  int n_max = 5;

  double gamma_value() const;
  // Throws PreconditionError naming the first field outside its range.
  void validate() const;
};

// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& c);

}  // namespace favard
