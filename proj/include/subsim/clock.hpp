#pragma once

#include "subsim/jump.hpp"

namespace subsim {

// Central-fringe ridge of a Ramsey surface: detuning delta_m(t) of the |S|
// extremum continued from delta_m(0) = 0, and the amplitude |S_m|(t).
struct RidgeResult {
  std::vector<double> t;
  std::vector<double> delta_m;
  std::vector<double> s_m;
  bool truncated = false;   // ridge left the delta grid
  double last_valid = 0.0;  // last time with a bracketed extremum
};

// Grid search restricted to a continuation window around the previous ridge
// position plus three-point parabolic refinement.
RidgeResult extract_ridge(const RamseyScan& scan);

// Exact ridge for surfaces of the form S = -2 Re[e^{-i delta t} C(t)]:
// delta_m = unwrapped arg C / t, |S_m| = 2|C|.
RidgeResult ridge_from_coherence(const std::vector<double>& grid,
                                 const VecC& coherence);

// Sliding-window log-log slope nu(t); windows of +-half_width_decades around
// each usable center. Throws on non-positive series values inside windows.
struct SlopeSeries {
  std::vector<double> t_center;
  std::vector<double> slope;
  std::vector<double> residual;
};
SlopeSeries instantaneous_slope(const std::vector<double>& t,
                                const std::vector<double>& y,
                                double half_width_decades = 0.25);

// Leading-order (t -> 0) fringe shift from the cumulant equations of motion:
// Im[C'(0)/C(0)] for the clock product state. Reconstruction of the
// short-time perturbative baseline; agrees with mean-field as t -> 0.
double short_time_shift(const CouplingMatrices& cm, double kl_d);

}  // namespace subsim
