#pragma once

#include "subsim/common.hpp"

namespace subsim {

enum class Model { FreeSpaceParallel, FreeSpacePerpendicular, Waveguide, Cube3D };

// Atom positions in units of 1/k0 plus the coupling model. Chains run along z.
struct ArrayGeometry {
  Model model = Model::FreeSpaceParallel;
  double k0d = 0.0;  // lattice constant, dimensionless k0*d
  std::vector<Eigen::Vector3d> positions;

  int n() const { return static_cast<int>(positions.size()); }

  static ArrayGeometry chain(Model m, int n_atoms, double k0d);
  static ArrayGeometry cube(int side, double k0d);

  // Throws std::invalid_argument when the invariants do not hold
  // (distinct positions, collinear uniform chain, perfect cube).
  void validate() const;
};

// Photon-mediated coupling kernels, in units of Gamma0. Each returns the
// effective-Hamiltonian element J(x) - i*Gamma(x)/2 for one atom pair.
cplx green_parallel(double x);
cplx green_perpendicular(double x);
cplx green_3d(const Eigen::Vector3d& delta_r);
cplx waveguide_element(double x);

struct CouplingMatrices {
  MatC h_offdiag;  // complex symmetric; diagonal fixed to -i/2 (units Gamma0)
  MatR gamma;      // symmetric dissipation matrix, diagonal = Gamma0
  double gamma0 = 1.0;

  int n() const { return static_cast<int>(gamma.rows()); }
};

// Fills both matrices from the geometry's kernel. Verifies gamma is PSD up to
// -1e-10 (throws NumericalError otherwise); tiny negative eigenvalues are
// clamped to zero later, in decay_channels().
CouplingMatrices build_coupling_matrices(const ArrayGeometry& g);

// Zeroes every off-diagonal coupling: independent atoms with rate Gamma0.
CouplingMatrices make_independent(int n_atoms);

// gamma = sum_c rate[c] * w_c w_c^T with rate >= 0 (clamped eigendecomposition).
// Collective jump operators are L_c = sum_m w[m,c] sigma_ge^m.
struct DecayChannels {
  VecR rate;    // N entries, descending order
  MatR weight;  // N x N, column c = w_c
};
DecayChannels decay_channels(const MatR& gamma);

}  // namespace subsim
