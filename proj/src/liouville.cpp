#include "subsim/liouville.hpp"

#include <algorithm>
#include <cmath>

namespace subsim {

namespace {

MatC kron(const MatC& a, const MatC& b) {
  MatC out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

MatC dense_heff_full(const CouplingMatrices& cm) {
  const int n = cm.n();
  const int dim = 1 << n;
  MatC h = MatC::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    h(s, s) = double(__builtin_popcount(unsigned(s))) * cplx(0.0, -0.5);
    for (int m = 0; m < n; ++m) {
      if (!(s & (1 << m))) continue;
      for (int q = 0; q < n; ++q) {
        if (q == m || (s & (1 << q))) continue;
        h((s & ~(1 << m)) | (1 << q), s) += cm.h_offdiag(q, m);
      }
    }
  }
  return h;
}

MatC dense_lowering(int site, int n) {
  const int dim = 1 << n;
  MatC op = MatC::Zero(dim, dim);
  for (int s = 0; s < dim; ++s)
    if (s & (1 << site)) op(s & ~(1 << site), s) = 1.0;
  return op;
}

// <phi^(q-1)_i | sigma_ge^s | psi^(q)_j> for one manifold transition.
std::vector<MatC> lowering_in_eigenbasis(const SystemSpectra& sys, int q) {
  const int n = sys.n_atoms();
  const auto& from = sys.bases[q];
  const auto& to = sys.bases[q - 1];
  std::vector<MatC> a(n);
  for (int s = 0; s < n; ++s) {
    const auto map = lowering_map(s, from, to);
    MatC low = MatC::Zero(to.dim(), from.dim());
    for (int i = 0; i < from.dim(); ++i)
      if (map[i] >= 0) low.row(map[i]) += sys.spec[q].right.row(i);
    a[s] = sys.spec[q - 1].left * low;
  }
  return a;
}

std::vector<MatC> gamma_weighted(const SystemSpectra& sys,
                                 const std::vector<MatC>& a) {
  const int n = sys.n_atoms();
  std::vector<MatC> c(n);
  for (int m = 0; m < n; ++m) {
    c[m] = MatC::Zero(a[0].rows(), a[0].cols());
    for (int q = 0; q < n; ++q)
      if (sys.cm.gamma(m, q) != 0.0) c[m] += sys.cm.gamma(m, q) * a[q];
  }
  return c;
}

cplx sector_eigenvalue(const SystemSpectra& sys, int ket, int l, int xi1, int xi2) {
  return -kI * (sys.spec[ket].values(xi1) -
                std::conj(sys.spec[ket - l].values(xi2)));
}

void check_divisor(cplx target, cplx level, int n, int e1, int e2) {
  if (std::abs(target - level) < 1e-10 * std::max(1.0, std::abs(target)))
    throw NumericalError(
        "liouvillian recursion: eigenvalue collision with sector (n=" +
        std::to_string(n) + ", eta1=" + std::to_string(e1) +
        ", eta2=" + std::to_string(e2) + ")");
}

}  // namespace

LiouvillianMatrix build_liouvillian_matrix(const CouplingMatrices& cm) {
  const int n = cm.n();
  if (n > 5)
    throw std::invalid_argument("build_liouvillian_matrix: N must be <= 5");
  const int dim = 1 << n;
  const MatC h = dense_heff_full(cm);
  const MatC id = MatC::Identity(dim, dim);
  LiouvillianMatrix l;
  l.n_atoms = n;
  l.mat = -kI * (kron(h, id) - kron(id, h.conjugate()));
  std::vector<MatC> low(n);
  for (int s = 0; s < n; ++s) low[s] = dense_lowering(s, n);
  for (int m = 0; m < n; ++m)
    for (int q = 0; q < n; ++q)
      if (cm.gamma(m, q) != 0.0) l.mat += cm.gamma(m, q) * kron(low[m], low[q]);
  return l;
}

VecC liouvillian_spectrum(const LiouvillianMatrix& l) {
  return eig_general(l.mat).values;
}

std::vector<cplx> pairwise_difference_spectrum(const SystemSpectra& sys) {
  std::vector<cplx> all;
  for (const auto& s : sys.spec)
    for (int i = 0; i < s.dim(); ++i) all.push_back(s.values(i));
  std::vector<cplx> out;
  out.reserve(all.size() * all.size());
  for (const cplx& a : all)
    for (const cplx& b : all) out.push_back(-kI * (a - std::conj(b)));
  return out;
}

double spectrum_match_distance(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("spectrum_match_distance: size mismatch");
  // Greedy nearest-neighbor pairing; lexicographic sorting is unstable when
  // real parts agree only to rounding.
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const cplx& x : a) {
    double bestd = 1e300;
    size_t best = 0;
    for (size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(x - b[j]);
      if (d < bestd) {
        bestd = d;
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, bestd);
  }
  return worst;
}

LiouvillianEigenpair construct_eigenstate_recursive(const SystemSpectra& sys,
                                                    int m_ex, int l_ex, int xi1,
                                                    int xi2) {
  const int n_atoms = sys.n_atoms();
  if (m_ex > n_atoms || m_ex - l_ex > n_atoms || m_ex < 0 || m_ex - l_ex < 0)
    throw std::invalid_argument("construct_eigenstate_recursive: bad sector");
  LiouvillianEigenpair z;
  z.m_ex = m_ex;
  z.l_ex = l_ex;
  z.xi1 = xi1;
  z.xi2 = xi2;
  z.n_min = std::max(0, l_ex);
  z.lambda = sector_eigenvalue(sys, m_ex, l_ex, xi1, xi2);
  z.coeff.assign(m_ex + 1, MatC());
  z.coeff[m_ex] =
      MatC::Zero(sys.spec[m_ex].dim(), sys.spec[m_ex - l_ex].dim());
  z.coeff[m_ex](xi1, xi2) = 1.0;
  for (int n = m_ex; n > z.n_min; --n) {
    const auto a_ket = lowering_in_eigenbasis(sys, n);
    const auto a_bra = lowering_in_eigenbasis(sys, n - l_ex);
    const auto c_bra = gamma_weighted(sys, a_bra);
    MatC numer = MatC::Zero(sys.spec[n - 1].dim(), sys.spec[n - l_ex - 1].dim());
    for (int m = 0; m < n_atoms; ++m)
      numer += a_ket[m] * z.coeff[n] * c_bra[m].adjoint();
    MatC& out = z.coeff[n - 1] = numer;
    for (int e1 = 0; e1 < out.rows(); ++e1)
      for (int e2 = 0; e2 < out.cols(); ++e2) {
        const cplx lvl = sector_eigenvalue(sys, n - 1, l_ex, e1, e2);
        check_divisor(z.lambda, lvl, n - 1, e1, e2);
        out(e1, e2) /= (z.lambda - lvl);
      }
  }
  return z;
}

LiouvillianEigenpair construct_adjoint_recursive(const SystemSpectra& sys,
                                                 int m_ex, int l_ex, int xi1,
                                                 int xi2) {
  const int n_atoms = sys.n_atoms();
  const int n_top = std::min(n_atoms, n_atoms + l_ex);
  LiouvillianEigenpair x;
  x.m_ex = m_ex;
  x.l_ex = l_ex;
  x.xi1 = xi1;
  x.xi2 = xi2;
  x.n_min = m_ex;
  x.lambda = sector_eigenvalue(sys, m_ex, l_ex, xi1, xi2);
  x.coeff.assign(n_top + 1, MatC());
  x.coeff[m_ex] =
      MatC::Zero(sys.spec[m_ex].dim(), sys.spec[m_ex - l_ex].dim());
  x.coeff[m_ex](xi1, xi2) = 1.0;
  const cplx target = std::conj(x.lambda);
  for (int n = m_ex; n < n_top; ++n) {
    const auto a_ket = lowering_in_eigenbasis(sys, n + 1);
    const auto a_bra = lowering_in_eigenbasis(sys, n + 1 - l_ex);
    const auto c_ket = gamma_weighted(sys, a_ket);
    MatC numer =
        MatC::Zero(sys.spec[n + 1].dim(), sys.spec[n + 1 - l_ex].dim());
    for (int m = 0; m < n_atoms; ++m)
      numer += c_ket[m].adjoint() * x.coeff[n] * a_bra[m];
    MatC& out = x.coeff[n + 1] = numer;
    for (int e1 = 0; e1 < out.rows(); ++e1)
      for (int e2 = 0; e2 < out.cols(); ++e2) {
        const cplx lvl =
            std::conj(sector_eigenvalue(sys, n + 1, l_ex, e1, e2));
        check_divisor(target, lvl, n + 1, e1, e2);
        out(e1, e2) /= (target - lvl);
      }
  }
  return x;
}

namespace {

// Scatter manifold eigenvectors into the 2^N site space.
MatC embed_columns(const ManifoldBasis& b, const MatC& cols) {
  MatC out = MatC::Zero(1 << b.n_atoms, cols.cols());
  for (int i = 0; i < b.dim(); ++i) out.row(int(b.configs[i])) = cols.row(i);
  return out;
}

}  // namespace

MatC materialize_eigenstate(const SystemSpectra& sys,
                            const LiouvillianEigenpair& z) {
  const int dim = 1 << sys.n_atoms();
  MatC out = MatC::Zero(dim, dim);
  for (int n = z.n_min; n <= z.m_ex; ++n) {
    const MatC ket = embed_columns(sys.bases[n], sys.spec[n].right);
    const MatC bra = embed_columns(sys.bases[n - z.l_ex], sys.spec[n - z.l_ex].right);
    out += ket * z.coeff[n] * bra.adjoint();
  }
  return out;
}

MatC materialize_adjoint(const SystemSpectra& sys,
                         const LiouvillianEigenpair& x) {
  const int dim = 1 << sys.n_atoms();
  MatC out = MatC::Zero(dim, dim);
  for (int n = x.n_min; n < int(x.coeff.size()); ++n) {
    if (x.coeff[n].size() == 0) continue;
    const MatC ket = embed_columns(sys.bases[n], sys.spec[n].left.adjoint());
    const MatC bra = embed_columns(sys.bases[n - x.l_ex],
                                   sys.spec[n - x.l_ex].left.adjoint());
    out += ket * x.coeff[n] * bra.adjoint();
  }
  return out;
}

cplx overlap_coefficient(const SystemSpectra& sys, const LiouvillianEigenpair& x,
                         const VecC& chi) {
  if (x.l_ex != 0)
    throw std::invalid_argument("overlap_coefficient: needs an l_ex = 0 pair");
  cplx alpha = 0.0;
  for (int n = x.n_min; n < int(x.coeff.size()); ++n) {
    if (x.coeff[n].size() == 0) continue;
    const auto& b = sys.bases[n];
    VecC slice(b.dim());
    for (int i = 0; i < b.dim(); ++i) slice(i) = chi(int(b.configs[i]));
    const VecC u = sys.spec[n].left * slice;  // <phi_eta | chi>
    alpha += (x.coeff[n].conjugate().cwiseProduct(u * u.adjoint())).sum();
  }
  return alpha;
}

cplx excitation_trace(const SystemSpectra& sys, const LiouvillianEigenpair& z) {
  if (z.l_ex != 0)
    throw std::invalid_argument("excitation_trace: needs an l_ex = 0 pair");
  cplx tr = 0.0;
  for (int n = std::max(1, z.n_min); n <= z.m_ex; ++n) {
    const MatC gram = sys.spec[n].right.adjoint() * sys.spec[n].right;
    tr += double(n) * (z.coeff[n].cwiseProduct(gram.transpose())).sum();
  }
  return tr;
}

double PopulationPrediction::evaluate(double t) const {
  cplx v = 0.0;
  for (size_t i = 0; i < lambdas.size(); ++i)
    v += weights[i] * std::exp(lambdas[i] * t);
  return v.real();
}

PopulationPrediction decompose_population_dynamics(const SystemSpectra& sys,
                                                   const VecC& chi) {
  PopulationPrediction p;
  const int n_atoms = sys.n_atoms();
  for (int m = 1; m <= n_atoms; ++m) {
    for (int x1 = 0; x1 < sys.spec[m].dim(); ++x1)
      for (int x2 = 0; x2 < sys.spec[m].dim(); ++x2) {
        const auto z = construct_eigenstate_recursive(sys, m, 0, x1, x2);
        const auto x = construct_adjoint_recursive(sys, m, 0, x1, x2);
        const cplx alpha = overlap_coefficient(sys, x, chi);
        const cplx w = alpha * excitation_trace(sys, z);
        if (std::abs(w) < 1e-300) continue;
        p.lambdas.push_back(z.lambda);
        p.weights.push_back(w);
      }
  }
  return p;
}

std::vector<cplx> single_excitation_alphas(const SystemSpectra& sys,
                                           const VecC& chi, int count) {
  const int n_atoms = sys.n_atoms();
  std::vector<LiouvillianEigenpair> xs(count);
  for (int xi = 0; xi < count; ++xi) {
    auto& x = xs[xi];
    x.m_ex = 1;
    x.l_ex = 0;
    x.xi1 = x.xi2 = xi;
    x.n_min = 1;
    x.lambda = sector_eigenvalue(sys, 1, 0, xi, xi);
    x.coeff.assign(n_atoms + 1, MatC());
    x.coeff[1] = MatC::Zero(n_atoms, n_atoms);
    x.coeff[1](xi, xi) = 1.0;
  }
  // batched ascent: the transition operators are shared between the xi's and
  // freed level by level (they dominate memory at mid manifolds)
  for (int n = 1; n < n_atoms; ++n) {
    const auto a = lowering_in_eigenbasis(sys, n + 1);
    const auto c = gamma_weighted(sys, a);
    for (auto& x : xs) {
      MatC numer = MatC::Zero(sys.spec[n + 1].dim(), sys.spec[n + 1].dim());
      for (int m = 0; m < n_atoms; ++m)
        numer += c[m].adjoint() * x.coeff[n] * a[m];
      const cplx target = std::conj(x.lambda);
      MatC& out = x.coeff[n + 1] = numer;
      for (int e1 = 0; e1 < out.rows(); ++e1)
        for (int e2 = 0; e2 < out.cols(); ++e2) {
          const cplx lvl = std::conj(sector_eigenvalue(sys, n + 1, 0, e1, e2));
          check_divisor(target, lvl, n + 1, e1, e2);
          out(e1, e2) /= (target - lvl);
        }
    }
  }
  std::vector<cplx> alphas(count);
  for (int xi = 0; xi < count; ++xi)
    alphas[xi] = overlap_coefficient(sys, xs[xi], chi);
  return alphas;
}

}  // namespace subsim
