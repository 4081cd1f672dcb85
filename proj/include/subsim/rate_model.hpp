#pragma once

#include "subsim/spectrum.hpp"

#include <optional>

namespace subsim {

// Directed transition rates between eigenstates of adjacent manifolds,
// gamma_down[m](xi, xi') from (m, xi) to (m-1, xi'). Rows are rescaled so
// that every state's outflow equals its decay rate Gamma_xi.
struct RateGraph {
  std::vector<MatR> gamma_down;    // index m = 1..M; gamma_down[0] unused
  std::vector<VecR> total_rate;    // Gamma_xi per manifold, 0..M
  int top_manifold() const { return static_cast<int>(gamma_down.size()) - 1; }
};

// Rate table for one adjacent pair. `normalize` enforces the outflow sum rule
// (the unnormalized trace formula already comes out nonnegative through the
// PSD channel decomposition, small round-off clamped).
MatR transition_rates(const SystemSpectra& sys, int upper_m,
                      bool normalize = true);

RateGraph build_rate_graph(const SystemSpectra& sys, int top_manifold);

// Time-independent probability of passing through each eigenstate during the
// cascade, propagated downward from `initial` in manifold `top`.
std::vector<VecR> passage_probabilities(const RateGraph& g, int top,
                                        const VecR& initial);

// Populations p[m](t) from the linear cascade, solved top manifold down.
struct CascadeResult {
  std::vector<double> grid;
  std::vector<MatR> populations;  // populations[m](xi, time)
  VecR manifold_population(int m) const;  // summed over xi, per time
  VecR total_excitation() const;          // sum_m m * pop_m(t)
};
CascadeResult evolve_rate_equations(const RateGraph& g, int top,
                                    const VecR& initial,
                                    const std::vector<double>& grid);

// Constituent single-excitation pair of a two-excitation eigenstate: the
// (xi1 < xi2) pair among the `candidates` most subradiant single-excitation
// modes maximizing the fermionic-ansatz overlap. Ties (degenerate +-k pairs)
// resolved toward the lower combined rate.
struct ConstituentMatch {
  int xi1 = 0, xi2 = 0;
  double overlap2 = 0.0;
};
ConstituentMatch match_constituents(const SystemSpectra& sys, int xi2exc,
                                    int candidates = 10);

// Superradiant-channel fraction u = Gamma^(2)/(Gamma^(1)_xi1+Gamma^(1)_xi2)-1
// averaged over the `count` most subradiant two-excitation states.
double superradiant_fraction(const SystemSpectra& sys, int count);

}  // namespace subsim
