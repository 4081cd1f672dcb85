#include "subsim/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace subsim {

EigenMode ManifoldSpectrum::mode(int xi) const {
  EigenMode m;
  m.m_ex = m_ex;
  m.rank = xi + 1;
  m.shift = shift(xi);
  m.rate = rate(xi);
  m.right = right.col(xi);
  m.left = left.row(xi).transpose();
  return m;
}

ManifoldSpectrum diagonalize_manifold(const MatC& h, int m_ex,
                                      const std::string& label) {
  const int d = static_cast<int>(h.rows());
  EigDecomp eig;
  try {
    eig = eig_general(h);
  } catch (const NumericalError& e) {
    throw NumericalError("diagonalize_manifold[" + label + ", m_ex=" +
                         std::to_string(m_ex) + "]: " + e.what());
  }

  // Sort by ascending rate, ties by shift, then solver index.
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ra = -2.0 * eig.values(a).imag(), rb = -2.0 * eig.values(b).imag();
    if (ra != rb) return ra < rb;
    return eig.values(a).real() < eig.values(b).real();
  });

  ManifoldSpectrum s;
  s.m_ex = m_ex;
  s.values = VecC(d);
  s.right = MatC(d, d);
  s.left = MatC(d, d);
  for (int i = 0; i < d; ++i) {
    s.values(i) = eig.values(order[i]);
    const double nrm = eig.right.col(order[i]).norm();
    s.right.col(i) = eig.right.col(order[i]) / nrm;
    s.left.row(i) = eig.left.row(order[i]) * nrm;
  }

  const double hnorm = h.norm();
  for (int i = 0; i < d; ++i) {
    const double resid = (h * s.right.col(i) - s.values(i) * s.right.col(i)).norm();
    if (resid > 1e-8 * std::max(hnorm, 1e-300))
      throw NumericalError("diagonalize_manifold[" + label +
                           "]: eigenpair residual " + std::to_string(resid));
  }
  return s;
}

ManifoldSpectrum manifold_spectrum(const CouplingMatrices& cm, int n_atoms,
                                   int m_ex) {
  if (m_ex == 1) {
    // single-excitation sector is the coupling matrix itself; no bitmask
    // basis needed, which keeps large-N (3D cube) spectra available
    return diagonalize_manifold(cm.h_offdiag, 1);
  }
  const ManifoldBasis b = enumerate_manifold(n_atoms, m_ex);
  return diagonalize_manifold(project_heff(cm, b), m_ex);
}

SystemSpectra build_system_spectra(const CouplingMatrices& cm, int n_atoms,
                                   int max_m_ex) {
  if (max_m_ex < 0) max_m_ex = n_atoms;
  SystemSpectra s;
  s.cm = cm;
  s.bases.resize(max_m_ex + 1);
  s.spec.resize(max_m_ex + 1);
  for (int m = 0; m <= max_m_ex; ++m) {
    s.bases[m] = enumerate_manifold(n_atoms, m);
    if (m == 0) {
      s.spec[0].m_ex = 0;
      s.spec[0].values = VecC::Zero(1);
      s.spec[0].right = MatC::Ones(1, 1);
      s.spec[0].left = MatC::Ones(1, 1);
      continue;
    }
    s.spec[m] = diagonalize_manifold(project_heff(cm, s.bases[m]), m,
                                     "m=" + std::to_string(m));
  }
  return s;
}

double dominant_wavevector(const VecC& amplitudes) {
  const int n = static_cast<int>(amplitudes.size());
  const int m = 4 * n;  // zero padding sharpens near-degenerate peaks
  double best = 0.0, best_mag = -1.0;
  for (int j = 0; j < m; ++j) {
    // k*d grid covering (-pi, pi]
    const double kd = -kPi + 2.0 * kPi * (j + 1) / m;
    cplx f = 0.0;
    for (int a = 0; a < n; ++a)
      f += amplitudes(a) * std::exp(-kI * (kd * (a + 1)));
    const double mag = std::abs(f);
    if (mag > best_mag * (1.0 + 1e-12)) {
      best_mag = mag;
      best = kd;
    } else if (std::abs(mag - best_mag) <= 1e-12 * best_mag &&
               std::abs(kd) < std::abs(best) - 1e-15) {
      best = kd;  // of equal peaks keep the one closer to zero
    }
  }
  // Degenerate +-k pair: report the positive branch.
  if (best < 0.0) {
    cplx fpos = 0.0, fneg = 0.0;
    for (int a = 0; a < n; ++a) {
      fpos += amplitudes(a) * std::exp(-kI * (-best * (a + 1)));
      fneg += amplitudes(a) * std::exp(-kI * (best * (a + 1)));
    }
    if (std::abs(fpos) >= std::abs(fneg) * (1.0 - 1e-9)) best = -best;
  }
  return best;
}

VecC fermionic_ansatz(const VecC& mode1, const VecC& mode2,
                      const ManifoldBasis& basis2) {
  const int n = basis2.n_atoms;
  if (basis2.m_ex != 2)
    throw std::invalid_argument("fermionic_ansatz: target basis must have m_ex=2");
  if (mode1.size() != n || mode2.size() != n)
    throw std::invalid_argument("fermionic_ansatz: inputs must be single-excitation");
  VecC out(basis2.dim());
  for (int idx = 0; idx < basis2.dim(); ++idx) {
    const std::uint64_t c = basis2.configs[idx];
    const int m = __builtin_ctzll(c);
    const int nn = 63 - __builtin_clzll(c);
    out(idx) = mode1(m) * mode2(nn) - mode2(m) * mode1(nn);
  }
  const double nrm = out.norm();
  if (nrm < 1e-12)
    throw std::invalid_argument("fermionic_ansatz: antisymmetrization annihilates "
                                "identical modes");
  return out / nrm;
}

HoleMapped excitation_hole_map(const EigenMode& mode, const ManifoldBasis& from,
                               const ManifoldBasis& to) {
  const int n = from.n_atoms;
  if (to.m_ex != n - from.m_ex)
    throw std::invalid_argument("excitation_hole_map: target manifold must be N - m_ex");
  const std::uint64_t full = (n == 64) ? ~0ull : ((1ull << n) - 1);
  HoleMapped h;
  h.vector = VecC::Zero(to.dim());
  for (int i = 0; i < from.dim(); ++i)
    h.vector(to.index_of(full & ~from.configs[i])) = mode.right(i);
  h.predicted_shift = mode.shift;
  h.predicted_rate = mode.rate + (n - 2 * from.m_ex) * kGamma0;
  return h;
}

ScalingFit fit_scaling(const std::vector<double>& x, const std::vector<double>& gamma,
                       ScalingModel model, double window_lo, double window_hi) {
  if (x.size() != gamma.size())
    throw std::invalid_argument("fit_scaling: length mismatch");
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] < window_lo || x[i] > window_hi) continue;
    if (x[i] <= 0.0 || gamma[i] <= 0.0)
      throw std::invalid_argument("fit_scaling: non-positive data in window");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(gamma[i]));
  }
  if (lx.size() < 3)
    throw std::invalid_argument("fit_scaling: fewer than 3 points in window");
  const LineFit f = fit_line(lx, ly);
  ScalingFit s;
  s.model = model;
  s.exponent = f.slope;
  s.residual = f.residual;
  s.points = static_cast<int>(lx.size());
  return s;
}

}  // namespace subsim
