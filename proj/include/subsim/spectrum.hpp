#pragma once

#include "subsim/linalg.hpp"
#include "subsim/manifold.hpp"

namespace subsim {

// One right/left eigenpair of the manifold-projected effective Hamiltonian.
// rank 1 = most subradiant. Right vectors have unit Euclidean norm, left rows
// satisfy <phi_xi|psi_xi'> = delta. k_d = dominant wavevector times d, in
// (-pi, pi]; NaN when not assigned (non-chain geometries, m_ex > 1).
struct EigenMode {
  int m_ex = 0;
  int rank = 0;
  double shift = 0.0;  // omega_xi, units Gamma0
  double rate = 0.0;   // Gamma_xi, units Gamma0
  VecC right;
  VecC left;  // row vector stored as a column
  double k_d = std::numeric_limits<double>::quiet_NaN();
};

struct ManifoldSpectrum {
  int m_ex = 0;
  VecC values;  // lambda = omega - i*rate/2, sorted by (rate, shift)
  MatC right;   // columns, unit norm
  MatC left;    // rows, bi-orthonormal against right

  int dim() const { return static_cast<int>(values.size()); }
  double rate(int xi) const { return -2.0 * values(xi).imag(); }
  double shift(int xi) const { return values(xi).real(); }
  EigenMode mode(int xi) const;
};

// Diagonalizes a complex-symmetric manifold matrix. Checks the eigenvalue
// residual ||H psi - lambda psi|| < 1e-8 ||H|| per mode and bi-orthonormality.
// `label` goes into error messages.
ManifoldSpectrum diagonalize_manifold(const MatC& h, int m_ex,
                                      const std::string& label = "");

// Convenience: project + diagonalize manifold m_ex of a coupling matrix.
ManifoldSpectrum manifold_spectrum(const CouplingMatrices& cm, int n_atoms,
                                   int m_ex);

// Peak of the zero-padded discrete Fourier transform of single-excitation
// amplitudes, folded into (-pi, pi]; degenerate +-k peaks report +|k|.
double dominant_wavevector(const VecC& amplitudes);

// Antisymmetric two-excitation ansatz from two single-excitation mode vectors.
// Throws std::invalid_argument when the inputs coincide (Pauli exclusion).
VecC fermionic_ansatz(const VecC& mode1, const VecC& mode2,
                      const ManifoldBasis& basis2);

// g <-> e exchange of configuration amplitudes, mapping manifold m_ex to
// N - m_ex. Predicted eigenvalue: same shift, rate + (N - 2 m_ex) Gamma0.
struct HoleMapped {
  VecC vector;
  double predicted_shift = 0.0;
  double predicted_rate = 0.0;
};
HoleMapped excitation_hole_map(const EigenMode& mode, const ManifoldBasis& from,
                               const ManifoldBasis& to);

// Bases and spectra for every excitation manifold of one geometry. The
// manifold diagonalizations are independent jobs; build_system_spectra runs
// them sequentially, build order lowest manifold first.
struct SystemSpectra {
  CouplingMatrices cm;
  std::vector<ManifoldBasis> bases;    // index = m_ex, 0..N
  std::vector<ManifoldSpectrum> spec;  // index = m_ex

  int n_atoms() const { return cm.n(); }
};
SystemSpectra build_system_spectra(const CouplingMatrices& cm, int n_atoms,
                                   int max_m_ex = -1);

enum class ScalingModel { XiSquared, NCubed, Alpha3D, Beta3D, PowerLawEta, DensityKappa };

struct ScalingFit {
  ScalingModel model;
  double exponent = 0.0;
  double residual = 0.0;
  int points = 0;
};

// log-log least squares of rate against abscissa over [window_lo, window_hi].
ScalingFit fit_scaling(const std::vector<double>& x, const std::vector<double>& gamma,
                       ScalingModel model, double window_lo, double window_hi);

}  // namespace subsim
