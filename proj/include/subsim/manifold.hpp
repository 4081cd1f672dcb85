#pragma once

#include "subsim/coupling.hpp"
#include "subsim/common.hpp"

namespace subsim {

// Fixed-excitation configuration basis. Configurations are bitmasks over
// atoms (bit k = atom k+1 excited), listed in ascending integer order, which
// coincides with lexicographic order of the excited-atom subsets.
struct ManifoldBasis {
  int n_atoms = 0;
  int m_ex = 0;
  std::vector<std::uint64_t> configs;

  int dim() const { return static_cast<int>(configs.size()); }

  // Index of a configuration mask; -1 if it does not belong to this manifold.
  int index_of(std::uint64_t mask) const;
};

ManifoldBasis enumerate_manifold(int n_atoms, int m_ex);

// sigma_ge^site applied to an amplitude vector of `from`; result lives in the
// manifold below. Configurations lacking the excitation are annihilated.
VecC apply_lowering(int site, const ManifoldBasis& from, const ManifoldBasis& to,
                    const VecC& v);

// sigma_eg^site, mapping into the manifold above.
VecC apply_raising(int site, const ManifoldBasis& from, const ManifoldBasis& to,
                   const VecC& v);

// Precomputed index map for sigma_ge^site: entry i is the target index of
// configs[i] with `site` removed, or -1 when site is not excited there.
std::vector<int> lowering_map(int site, const ManifoldBasis& from,
                              const ManifoldBasis& to);

// H_eff restricted to one excitation manifold: exchange elements
// h_offdiag[n][m] between configs C and (C \ {m}) u {n}, diagonal
// m_ex * (-i Gamma0/2). Complex symmetric by construction.
MatC project_heff(const CouplingMatrices& cm, const ManifoldBasis& basis);

}  // namespace subsim
