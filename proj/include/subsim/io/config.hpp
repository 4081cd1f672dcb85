#pragma once

#include "subsim/coupling.hpp"

#include <optional>
#include <string>
#include <vector>

namespace subsim::io {

// One experiment = one config file. Scenario-specific numeric knobs live in
// the `numerics` block; everything has an explicit value here after parsing
// (the seed is required, never defaulted).
struct ExperimentConfig {
  std::string scenario;  // spectrum|decay|clock|rate-model|liouvillian|mean-field|mps|3d-spectrum

  // geometry
  std::string model;  // free_space_parallel|free_space_perpendicular|waveguide|cube
  int n_atoms = 0;    // for cube: total atom count (side^3)
  double k0d = 0.0;
  bool independent = false;  // zero all off-diagonal couplings

  // numerics
  std::uint64_t seed = 0;
  int trajectories = 1;
  std::string initial = "inverted";  // inverted|clock
  double kl_d = kPi;
  double detuning = 0.0;
  bool coherent_only = false;
  std::string grid_kind = "uniform";  // uniform|log
  double t_max = 10.0;
  double t_first = 0.05;  // log grids
  int grid_points = 50;
  std::vector<int> manifolds = {1};   // spectrum scenario
  int max_manifold = -1;              // rate-model cascade top (-1 = N)
  double delta_min = -3.0, delta_max = 3.0;
  int delta_count = 61;
  std::string ramsey_mode = "analytic";  // analytic|per_delta
  int bond_dim = 64;
  double dt_early = 1e-3, dt_late = 1e-2, t_switch = 5.0;
  int alpha_count = 5;  // liouvillian scenario
  std::vector<double> correlation_times;

  // output
  std::string output_dir = "out";

  ArrayGeometry geometry() const;
  CouplingMatrices couplings() const;
  std::vector<double> grid() const;
};

struct ParseResult {
  ExperimentConfig config;
  std::vector<std::string> errors;  // empty iff valid
  std::string raw;                  // config file contents (manifest echo)
};

// Reads and validates a JSON config. I/O problems throw std::runtime_error;
// schema violations are reported in `errors`.
ParseResult load_config(const std::string& path);

}  // namespace subsim::io
