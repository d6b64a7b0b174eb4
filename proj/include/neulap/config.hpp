#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neulap/eigensolve.hpp"
#include "neulap/profile.hpp"

namespace neulap::cli {

enum class ExperimentKind {
  TauSweep,
  DumbbellSweep,
  DirichletExample,
  BoundsCheck,
  RobinLimit,
  MeshConvergence,
  BracketingCheck,
  ScalingCheck,
};

const char* experiment_name(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::TauSweep;

  // [profile]
  std::string family = "gamma-poly";  // gamma-poly | width-poly | oscillating
  std::vector<double> coeffs = {0.3, 0.0, 0.2};
  double L = 1.0;
  int N = 2;

  // [sweep]  (for robin-limit the grid holds the eta values)
  std::vector<double> epsilon_grid = {0.5, 0.35, 0.25, 0.18, 0.125};

  // [mesh]
  int nx = 64, ny = 64;
  double h_base = 1.0 / 64.0;

  // [domain]
  double height = 0.83;

  // [solver]
  int k = 6;
  double tol = 1e-8;
  int max_iter = 500;
  int block_size = 0;
  std::uint64_t seed = 12345;

  // [bounds]   kappa wins if both are given; otherwise kappa = (N-1)/2 - (N-1-delta) + 1
  double kappa = 0.6;
  double delta = 0.1;

  // [output]
  std::string output_path = "out";

  geometry::ChannelProfile make_profile(double eps) const;
  eigs::EigenRequest make_request(int k_override = 0) const;
};

// Strict key = value parser with [section] headers; '#' and ';' comments.
// Unknown sections/keys and malformed values are rejected naming section.key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// The defaults table printed by --help.
std::string config_reference();

}  // namespace neulap::cli
