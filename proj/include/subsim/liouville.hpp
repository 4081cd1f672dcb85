#pragma once

#include "subsim/spectrum.hpp"

namespace subsim {

// Dense Liouvillian on vectorized density matrices, row-major convention:
// vec(rho)[i * 2^N + j] = <i|rho|j> with ket index i = excitation bitmask.
// vec(A rho B) = (A kron B^T) vec(rho).
struct LiouvillianMatrix {
  int n_atoms = 0;
  MatC mat;  // 4^N x 4^N
};

// N <= 5 (4^N <= 1024). Throws std::invalid_argument beyond that.
LiouvillianMatrix build_liouvillian_matrix(const CouplingMatrices& cm);

// Unsorted eigenvalues of the dense Liouvillian.
VecC liouvillian_spectrum(const LiouvillianMatrix& l);

// Multiset {-i (lambda_m - conj(lambda_n))} over all H_eff eigenvalue pairs
// drawn from every manifold; equals the Liouvillian spectrum when the
// eigenvalues of K are distinct.
std::vector<cplx> pairwise_difference_spectrum(const SystemSpectra& sys);

// Largest pairing distance between the two spectra after sorting; the
// eigenvalue-theorem tests pin this below 1e-8.
double spectrum_match_distance(std::vector<cplx> a, std::vector<cplx> b);

// Liouvillian eigenstate in the U basis, U^(n)_{eta1,eta2} =
// |psi^(n)_{eta1}><psi^(n - l_ex)_{eta2}|. coeff[n] holds the c matrix of
// level n (ket manifold n, bra manifold n - l_ex); the seed coefficient at
// (m_ex; xi1, xi2) is 1. Sector label follows the eigenvalue relation
// Lambda = -i (lambda^(m_ex)_{xi1} - conj(lambda^(m_ex - l_ex)_{xi2})).
struct LiouvillianEigenpair {
  cplx lambda;
  int m_ex = 0;   // ket manifold of the seed
  int l_ex = 0;   // ket minus bra manifold (conserved by J and K)
  int xi1 = 0, xi2 = 0;
  int n_min = 0;
  std::vector<MatC> coeff;  // index = ket manifold n, n_min..m_ex
};

// Appendix-style downward recursion for the right eigenstate Z. Requires the
// divisor eigenvalues it encounters to be distinct from Lambda (relative gap
// >= 1e-10), otherwise throws NumericalError naming the colliding sector.
LiouvillianEigenpair construct_eigenstate_recursive(const SystemSpectra& sys,
                                                    int m_ex, int l_ex, int xi1,
                                                    int xi2);

// Upward recursion for the adjoint eigenstate X of the same sector label,
// expanded over V^(n)_{eta1,eta2} = |phi^(n)_{eta1}><phi^(n - l_ex)_{eta2}|.
// coeff[n] runs from the seed manifold up to N.
LiouvillianEigenpair construct_adjoint_recursive(const SystemSpectra& sys,
                                                 int m_ex, int l_ex, int xi1,
                                                 int xi2);

// Dense 2^N x 2^N realizations (small N).
MatC materialize_eigenstate(const SystemSpectra& sys, const LiouvillianEigenpair& z);
MatC materialize_adjoint(const SystemSpectra& sys, const LiouvillianEigenpair& x);

// alpha_Lambda = Tr(X^dagger rho0) for a pure product state rho0 = |chi><chi|
// given in the site basis (dimension 2^N). Valid for l_ex = 0 pairs.
cplx overlap_coefficient(const SystemSpectra& sys, const LiouvillianEigenpair& x,
                         const VecC& chi);

// Tr(n_e Z) evaluated from the coefficient matrices.
cplx excitation_trace(const SystemSpectra& sys, const LiouvillianEigenpair& z);

// Full l_ex = 0 decomposition of a product state: predicted
// <n_e>(t) = sum_Lambda alpha e^{Lambda t} Tr(n_e Z_Lambda).
struct PopulationPrediction {
  std::vector<cplx> lambdas;
  std::vector<cplx> weights;  // alpha * Tr(n_e Z)
  double evaluate(double t) const;
};
PopulationPrediction decompose_population_dynamics(const SystemSpectra& sys,
                                                   const VecC& chi);

// Single-excitation-only coefficients alpha_xi (waveguide reduced form),
// for the diagonal sectors (m_ex=1, l=0, xi, xi), xi = 0..count-1.
std::vector<cplx> single_excitation_alphas(const SystemSpectra& sys,
                                           const VecC& chi, int count);

}  // namespace subsim
