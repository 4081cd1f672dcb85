#pragma once

#include "subsim/moments.hpp"
#include "subsim/rng.hpp"
#include "subsim/spectrum.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace subsim {

enum class InitialState { FullyInverted, ClockState, ExplicitVector };

struct TrajectoryConfig {
  InitialState initial = InitialState::FullyInverted;
  double kl_d = kPi;       // laser phase per lattice site for ClockState
  VecC explicit_vector;    // full 2^N site vector for ExplicitVector
  double detuning = 0.0;   // delta: H gains -delta * n_e
  std::vector<double> grid;  // strictly increasing from 0
  int trajectories = 1;
  std::uint64_t seed = 1;
  bool coherent_only = false;  // Hermitian part only, no jumps

  void validate(int n_atoms) const;
};

// Amplitudes per excitation manifold, site-configuration basis. Blocks decay
// to zero along a trajectory and are dropped once negligible.
struct BlockState {
  std::vector<VecC> block;  // index = m_ex; size()==0 means unoccupied
  double norm2() const;
};

struct JumpEvent {
  double time = 0.0;
  int channel = -1;
  int manifold_after = 0;  // dominant manifold of the post-jump state
  VecR post_overlaps;      // |c_xi|^2 expansion over that manifold, sum 1
};

// Observables accumulated over an ensemble of trajectories.
struct ObservableRequest {
  bool n_e = true;
  std::optional<double> coherence_kl_d;        // C(t) = <sum e^{i kl d n} sigma_eg^n>
  std::vector<std::pair<int, int>> eigenpops;  // (manifold, xi)
  std::vector<int> correlation_grid_indices;   // pair maps at these grid points
  std::vector<int> moment_grid_indices;        // spin-moment snapshots
  bool record_passage = false;                 // eigenstate overlap after jumps
};

struct EnsembleResult {
  std::vector<double> grid;
  int trajectories = 0;

  VecR ne_mean, ne_err;
  VecC coh_mean;                    // complex mean of C(t)
  VecR coh_re_err, coh_im_err, coh_cov;  // cov of (Re C, Im C)
  MatR pop_num, pop_den, pop_mean, pop_err;  // eigenpops x grid
  std::vector<MatR> corr_mean;      // per correlation index: N x N
  std::vector<SpinMoments> moments;            // per moment index
  std::vector<double> moment_max_err;          // worst stderr per snapshot
  std::vector<VecR> passage_mean, passage_err;  // per manifold 1..N

  // Fringe surface value S(delta, t) = -2 Re[e^{-i delta t} C(t)] and its
  // standard error, from the recorded coherence.
  double fringe(double delta, int gi) const;
  double fringe_err(double delta, int gi) const;
};

// Per-geometry quantum-jump engine. Construction diagonalizes every occupied
// manifold once (the dominant cost); trajectories then propagate exactly in
// the manifold eigenbases between jumps.
class JumpEngine {
 public:
  JumpEngine(const CouplingMatrices& cm, int n_atoms,
             bool need_hermitian = false);

  int n_atoms() const { return n_; }
  const SystemSpectra& spectra() const { return sys_; }
  const DecayChannels& channels() const { return channels_; }

  BlockState initial_state(const TrajectoryConfig& cfg) const;

  using Visitor = std::function<void(int, double, const BlockState&)>;
  using JumpVisitor = std::function<void(const JumpEvent&)>;

  // Reproducible: (seed, index) fixes the trajectory bit-exactly.
  void evolve_trajectory(const TrajectoryConfig& cfg, std::uint64_t index,
                         const Visitor& visit,
                         const JumpVisitor* on_jump = nullptr) const;

  EnsembleResult run_ensemble(const TrajectoryConfig& cfg,
                              const ObservableRequest& req) const;

  // Observable helpers on block states.
  double excited_population(const BlockState& s) const;
  cplx coherence_sum(const BlockState& s, double kl_d) const;
  MatR pair_correlations(const BlockState& s) const;
  SpinMoments spin_moments(const BlockState& s) const;

 private:
  int n_;
  SystemSpectra sys_;
  DecayChannels channels_;
  std::vector<std::vector<std::vector<int>>> lower_map_;  // [m_ex][site]
  std::vector<EigHerm> herm_;  // coherent-only spectra, built on demand

  void evolve_dissipative(const TrajectoryConfig& cfg, Rng& rng,
                          const Visitor& visit, const JumpVisitor* on_jump) const;
  void evolve_coherent(const TrajectoryConfig& cfg, const Visitor& visit) const;
};

// Ramsey fringe surface S(delta, t) with standard errors.
struct RamseyScan {
  std::vector<double> deltas;
  std::vector<double> grid;
  MatR s, s_err;  // deltas x grid
};

enum class RamseyMode {
  // One delta=0 ensemble; the detuning dependence is exact since the
  // detuning term commutes with H_eff (phases per excitation manifold).
  AnalyticDetuning,
  // One full ensemble per delta value, detuning in the Hamiltonian.
  EnsemblePerDelta,
};

RamseyScan ramsey_scan(const JumpEngine& engine, const TrajectoryConfig& base,
                       const std::vector<double>& deltas,
                       RamseyMode mode = RamseyMode::AnalyticDetuning);

}  // namespace subsim
