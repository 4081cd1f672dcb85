#pragma once

#include "subsim/linalg.hpp"

#include <array>
#include <optional>

namespace subsim {

// Vectorized density matrix in MPS form, local dimension 4 per site with
// basis order {e(x)e, g(x)e, e(x)g, g(x)g} (left factor = ket side).
struct MpsRho {
  std::vector<std::array<MatC, 4>> site;  // site[k][sigma]: (Dl x Dr)

  int n_sites() const { return static_cast<int>(site.size()); }
  int bond_dim() const;  // largest bond

  static MpsRho product(const std::vector<Eigen::Vector4cd>& locals);
  static MpsRho fully_inverted(int n);
  static MpsRho clock_state(int n, double kl_d);

  cplx trace() const;
  double excited_population_real() const;  // Re part; imag via the pair below
  cplx excited_population() const;
  void scale(cplx factor);  // multiplies the first site tensor
};

// Waveguide Liouvillian as a bond-dimension-6 MPO. With dt set, encodes the
// Euler step operator (1 + L dt) instead of L itself. omega0 adds the bare
// optical phase terms; populations are invariant to it.
struct LiouvillianMpo {
  int n_sites = 0;
  double k0d = 0.0;
  std::optional<double> dt;
  double omega0 = 0.0;
  // w[0] used for the bulk; boundary forms are row 0 (site 1) and column 5
  // (site N) per the standard finite-state construction
  std::array<std::array<Eigen::Matrix4cd, 6>, 6> w;
  std::array<Eigen::Matrix4cd, 6> w_first;  // row form (with the +1 when dt)
  std::array<Eigen::Matrix4cd, 6> w_last;   // column form
};

LiouvillianMpo build_liouvillian_mpo(int n, double k0d,
                                     std::optional<double> dt = std::nullopt,
                                     double omega0 = 0.0);

// Dense contraction for small N, in the MPS site-major index convention
// (site 1 slowest; local sigma = ket_g + 2*bra_g).
MatC mpo_to_dense(const LiouvillianMpo& mpo);

MpsRho apply_mpo(const LiouvillianMpo& mpo, const MpsRho& rho);

// Variational compression to bond dimension D. guess_previous: warm-start
// from `guess` (the pre-step state) instead of the truncated-SVD guess.
struct CompressStats {
  double overlap_error = 0.0;  // 1 - |<out|big>|^2/(<out|out><big|big>)
  int sweeps = 0;
};
MpsRho compress(const MpsRho& big, int max_bond, CompressStats* stats = nullptr,
                const MpsRho* guess = nullptr, int max_sweeps = 2,
                double tol = 1e-10);

// rho^dagger in MPS form: conjugate tensors, ket/bra components swapped.
MpsRho mps_adjoint(const MpsRho& rho);

// Direct sum of two MPS (bond dimensions add).
MpsRho mps_add(const MpsRho& a, const MpsRho& b);

// (rho + rho^dagger)/2 compressed back to max_bond. Counters the slow
// Hermiticity drift that truncation noise feeds.
MpsRho hermitize(const MpsRho& rho, int max_bond);

struct MpsRunConfig {
  int n = 0;
  double k0d = 0.0;
  int bond_dim = 64;
  double dt_early = 1e-3, dt_late = 1e-2, t_switch = 5.0;
  double omega0 = 0.0;
  bool guess_previous = false;  // default: truncated-SVD initial guess
  double truncation_ceiling = 1e-3;  // abort above this per-step error
};

struct MpsSeries {
  std::vector<double> grid;
  VecR n_e;
  VecR n_e_imag;         // hermiticity diagnostic
  VecR trace_drift;      // |trace-1| before renormalization, max since last record
  VecR trunc_error;      // compression overlap error, max since last record
  double accumulated_trunc = 0.0;
  bool aborted = false;  // truncation ceiling hit; series valid up to abort
};

MpsSeries run_mps_decay(const MpsRunConfig& cfg, const MpsRho& initial,
                        const std::vector<double>& grid);

}  // namespace subsim
