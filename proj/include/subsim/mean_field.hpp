#pragma once

#include "subsim/coupling.hpp"
#include "subsim/moments.hpp"

namespace subsim {

// Second-order cumulant state: one-body moments <sigma_ab^i> plus two-body
// moments for all site pairs, labels {ee, ge, eg} per site. Flattened into a
// complex vector for integration.
struct CumulantState {
  int n_atoms = 0;
  VecC y;  // layout: [3*N one-body][9 per pair i<j]

  static int one_index(int label, int site) { return 3 * site + label; }
  static int two_index(int i, int j, int la, int lb, int n) {
    return 3 * n + 9 * SpinMoments::pair_index(i, j, n) + 3 * la + lb;
  }

  static CumulantState from_moments(const SpinMoments& m);
  SpinMoments to_moments() const;

  // Hermiticity pairing residual, max |<eg> - conj(<ge>)| over sites/pairs.
  double hermiticity_defect() const;
};

// Equations of motion generated symbolically from the master equation with
// the two-body cumulant closure for three-site moments. Built once per
// geometry (plus detuning), then evaluated as a flat instruction tape.
class CumulantSystem {
 public:
  CumulantSystem(const CouplingMatrices& cm, double detuning = 0.0);

  int n_atoms() const { return n_; }
  void rhs(const VecC& y, VecC& dy) const;

  // Fully inverted or clock product state.
  CumulantState initial_inverted() const;
  CumulantState initial_clock(double kl_d) const;

  struct Series {
    std::vector<double> grid;
    VecR n_e;
    VecC coherence;  // sum_n e^{i kl d n} <sigma_eg^n>
    std::vector<std::string> warnings;
    std::vector<SpinMoments> snapshots;  // at every grid point? only if kept
  };

  // Integrates with DP45 (rtol 1e-8), records n_e and the clock coherence.
  // Population excursions outside [0,1] beyond 1e-3 are flagged as warnings,
  // never clamped.
  Series evolve(const CumulantState& init, const std::vector<double>& grid,
                double coherence_kl_d = kPi, double rtol = 1e-8) const;

 private:
  int n_;
  double detuning_;
  MatC h_;   // coupling elements incl. diagonal
  MatR gamma_;

  struct Term {  // dy[target] += coef * prod(moments)
    int target;
    cplx coef;
    int a = -1, b = -1, c = -1;  // moment indices; -1 = absent
  };
  std::vector<Term> tape_;

  void generate();
};

}  // namespace subsim
