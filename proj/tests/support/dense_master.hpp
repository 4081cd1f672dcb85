#pragma once

// Brute-force master-equation integrator over the full 2^N density matrix.
// Test-only oracle: evolves rho directly with index-mapped sigma operators,
// independent of the trajectory and tensor-network code paths it checks.

#include "subsim/coupling.hpp"
#include "subsim/ode.hpp"

#include <functional>

namespace subsim::oracle {

class DenseMaster {
 public:
  explicit DenseMaster(const CouplingMatrices& cm) : cm_(cm), n_(cm.n()) {
    if (n_ > 8) throw std::invalid_argument("DenseMaster: N too large");
    dim_ = 1 << n_;
  }

  // rhs of Eq. (2): -i(H rho - rho H^dag) + sum Gamma_mn sigma_ge^m rho sigma_eg^n
  MatC rhs(const MatC& rho) const {
    MatC out = MatC::Zero(dim_, dim_);
    // effective-Hamiltonian part, using the exchange elements directly
    for (int s = 0; s < dim_; ++s) {
      const int mex = __builtin_popcount(unsigned(s));
      for (int t = 0; t < dim_; ++t) {
        const cplx v = rho(s, t);
        if (v == 0.0) continue;
        const int mex_t = __builtin_popcount(unsigned(t));
        out(s, t) += -kI * v *
                     (cplx(0.0, -0.5) * double(mex) - cplx(0.0, +0.5) * double(mex_t));
      }
    }
    for (int m = 0; m < n_; ++m)
      for (int q = 0; q < n_; ++q) {
        if (q == m) continue;
        const cplx h = cm_.h_offdiag(q, m);
        if (h == 0.0) continue;
        // -i h sigma_eg^q sigma_ge^m rho   and   +i h* rho sigma_eg^m sigma_ge^q
        for (int s = 0; s < dim_; ++s) {
          if ((s & (1 << m)) && !(s & (1 << q))) {
            const int sp = (s & ~(1 << m)) | (1 << q);
            for (int t = 0; t < dim_; ++t) {
              out(sp, t) += -kI * h * rho(s, t);
              out(t, sp) += kI * std::conj(h) * rho(t, s);
            }
          }
        }
      }
    // jump term
    for (int m = 0; m < n_; ++m)
      for (int q = 0; q < n_; ++q) {
        const double g = cm_.gamma(m, q);
        if (g == 0.0) continue;
        for (int s = 0; s < dim_; ++s) {
          if (!(s & (1 << m))) continue;
          const int sl = s & ~(1 << m);
          for (int t = 0; t < dim_; ++t) {
            if (!(t & (1 << q))) continue;
            out(sl, t & ~(1 << q)) += g * rho(s, t);
          }
        }
      }
    return out;
  }

  // Evolve rho0 and report it on the grid.
  void evolve(const MatC& rho0, const std::vector<double>& grid,
              const std::function<void(int, double, const MatC&)>& record,
              double rtol = 1e-9) const {
    VecC y = Eigen::Map<const VecC>(rho0.data(), dim_ * dim_);
    auto rhs_vec = [&](double, const VecC& v, VecC& dv) {
      const MatC rho = Eigen::Map<const MatC>(v.data(), dim_, dim_);
      const MatC d = rhs(rho);
      dv = Eigen::Map<const VecC>(d.data(), dim_ * dim_);
    };
    integrate_dp45(rhs_vec, y, grid,
                   [&](int gi, double t, const VecC& v) {
                     record(gi, t, Eigen::Map<const MatC>(v.data(), dim_, dim_));
                   },
                   rtol, 1e-12);
  }

  std::vector<double> excited_population(const MatC& rho0,
                                         const std::vector<double>& grid,
                                         double rtol = 1e-9) const {
    std::vector<double> ne(grid.size());
    evolve(rho0, grid,
           [&](int gi, double, const MatC& rho) {
             double v = 0.0;
             for (int s = 0; s < dim_; ++s)
               v += __builtin_popcount(unsigned(s)) * rho(s, s).real();
             ne[gi] = v;
           },
           rtol);
    return ne;
  }

  int dim() const { return dim_; }

 private:
  CouplingMatrices cm_;
  int n_;
  int dim_;
};

// |e...e> density matrix.
inline MatC fully_inverted_rho(int n) {
  const int dim = 1 << n;
  MatC rho = MatC::Zero(dim, dim);
  rho(dim - 1, dim - 1) = 1.0;
  return rho;
}

// Product clock state (|g> + e^{i kL d n}|e>)/sqrt(2), site phases n = 1..N.
inline VecC clock_state(int n, double kl_d) {
  const int dim = 1 << n;
  VecC psi = VecC::Zero(dim);
  for (int s = 0; s < dim; ++s) {
    cplx amp = 1.0;
    for (int a = 0; a < n; ++a)
      amp *= (s & (1 << a)) ? std::exp(kI * (kl_d * (a + 1))) / std::sqrt(2.0)
                            : cplx(1.0 / std::sqrt(2.0));
    psi(s) = amp;
  }
  return psi;
}

}  // namespace subsim::oracle
