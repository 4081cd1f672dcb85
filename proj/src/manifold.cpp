#include "subsim/manifold.hpp"

#include <algorithm>

namespace subsim {

int ManifoldBasis::index_of(std::uint64_t mask) const {
  auto it = std::lower_bound(configs.begin(), configs.end(), mask);
  if (it == configs.end() || *it != mask) return -1;
  return static_cast<int>(it - configs.begin());
}

ManifoldBasis enumerate_manifold(int n_atoms, int m_ex) {
  if (n_atoms < 0 || n_atoms > 62)
    throw std::invalid_argument("enumerate_manifold: atom count out of range");
  if (m_ex < 0 || m_ex > n_atoms)
    throw std::invalid_argument("enumerate_manifold: excitation number out of range");
  ManifoldBasis b;
  b.n_atoms = n_atoms;
  b.m_ex = m_ex;
  b.configs.reserve(binomial(n_atoms, m_ex));
  if (m_ex == 0) {
    b.configs.push_back(0);
    return b;
  }
  // Gosper's hack: next integer with the same popcount.
  std::uint64_t v = (1ull << m_ex) - 1;
  const std::uint64_t limit = 1ull << n_atoms;
  while (v < limit) {
    b.configs.push_back(v);
    std::uint64_t t = v | (v - 1);
    v = (t + 1) | (((~t & -(~t)) - 1) >> (__builtin_ctzll(v) + 1));
  }
  return b;
}

VecC apply_lowering(int site, const ManifoldBasis& from, const ManifoldBasis& to,
                    const VecC& v) {
  if (to.m_ex != from.m_ex - 1 || to.n_atoms != from.n_atoms)
    throw std::invalid_argument("apply_lowering: manifolds not adjacent");
  const std::uint64_t bit = 1ull << site;
  VecC out = VecC::Zero(to.dim());
  for (int i = 0; i < from.dim(); ++i) {
    const std::uint64_t c = from.configs[i];
    if (c & bit) out(to.index_of(c & ~bit)) += v(i);
  }
  return out;
}

VecC apply_raising(int site, const ManifoldBasis& from, const ManifoldBasis& to,
                   const VecC& v) {
  if (to.m_ex != from.m_ex + 1 || to.n_atoms != from.n_atoms)
    throw std::invalid_argument("apply_raising: manifolds not adjacent");
  const std::uint64_t bit = 1ull << site;
  VecC out = VecC::Zero(to.dim());
  for (int i = 0; i < from.dim(); ++i) {
    const std::uint64_t c = from.configs[i];
    if (!(c & bit)) out(to.index_of(c | bit)) += v(i);
  }
  return out;
}

std::vector<int> lowering_map(int site, const ManifoldBasis& from,
                              const ManifoldBasis& to) {
  const std::uint64_t bit = 1ull << site;
  std::vector<int> map(from.dim(), -1);
  for (int i = 0; i < from.dim(); ++i) {
    const std::uint64_t c = from.configs[i];
    if (c & bit) map[i] = to.index_of(c & ~bit);
  }
  return map;
}

MatC project_heff(const CouplingMatrices& cm, const ManifoldBasis& basis) {
  const int n = basis.n_atoms;
  if (cm.n() != n) throw std::invalid_argument("project_heff: dimension mismatch");
  const int d = basis.dim();
  MatC h = MatC::Zero(d, d);
  const cplx diag = double(basis.m_ex) * cplx(0.0, -0.5) * kGamma0;
  for (int i = 0; i < d; ++i) {
    h(i, i) = diag;
    const std::uint64_t c = basis.configs[i];
    for (int m = 0; m < n; ++m) {
      if (!(c & (1ull << m))) continue;
      const std::uint64_t base = c & ~(1ull << m);
      for (int nn = 0; nn < n; ++nn) {
        if (nn == m || (base & (1ull << nn))) continue;
        const int j = basis.index_of(base | (1ull << nn));
        h(j, i) += cm.h_offdiag(nn, m);
      }
    }
  }
  return h;
}

}  // namespace subsim
