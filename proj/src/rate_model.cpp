#include "subsim/rate_model.hpp"

#include "subsim/ode.hpp"

#include <cmath>

namespace subsim {

MatR transition_rates(const SystemSpectra& sys, int upper_m, bool normalize) {
  if (upper_m < 1 || upper_m >= static_cast<int>(sys.spec.size()))
    throw std::invalid_argument("transition_rates: manifolds not adjacent");
  const int n = sys.n_atoms();
  const auto& up = sys.spec[upper_m];
  const auto& lo = sys.spec[upper_m - 1];
  const int du = up.dim(), dl = lo.dim();

  // <psi'_xi' | sigma_ge^s | psi_xi> with quantum-mechanical bras
  std::vector<MatC> m_site(n);
  for (int s = 0; s < n; ++s) {
    const auto map = lowering_map(s, sys.bases[upper_m], sys.bases[upper_m - 1]);
    MatC lowered = MatC::Zero(dl, du);
    for (int i = 0; i < du; ++i)
      if (map[i] >= 0) lowered.row(map[i]) += up.right.row(i);
    m_site[s].noalias() = lo.right.adjoint() * lowered;
  }
  const DecayChannels ch = decay_channels(sys.cm.gamma);
  MatR unnorm = MatR::Zero(du, dl);  // (xi, xi')
  MatC k(dl, du);
  for (int c = 0; c < n; ++c) {
    if (ch.rate(c) <= 0.0) continue;
    k.setZero();
    for (int s = 0; s < n; ++s) {
      const double w = ch.weight(s, c);
      if (w != 0.0) k += w * m_site[s];
    }
    unnorm += ch.rate(c) * k.cwiseAbs2().transpose();
  }
  unnorm = unnorm.cwiseMax(0.0);
  if (!normalize) return unnorm;
  MatR out = unnorm;
  for (int xi = 0; xi < du; ++xi) {
    const double row = unnorm.row(xi).sum();
    if (row <= 0.0)
      throw NumericalError("transition_rates: state with zero outflow");
    out.row(xi) *= up.rate(xi) / row;
  }
  return out;
}

RateGraph build_rate_graph(const SystemSpectra& sys, int top_manifold) {
  RateGraph g;
  g.gamma_down.resize(top_manifold + 1);
  g.total_rate.resize(top_manifold + 1);
  for (int m = 0; m <= top_manifold; ++m) {
    g.total_rate[m] = VecR(sys.spec[m].dim());
    for (int i = 0; i < sys.spec[m].dim(); ++i)
      g.total_rate[m](i) = sys.spec[m].rate(i);
    if (m >= 1) g.gamma_down[m] = transition_rates(sys, m);
  }
  return g;
}

std::vector<VecR> passage_probabilities(const RateGraph& g, int top,
                                        const VecR& initial) {
  if (std::abs(initial.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("passage_probabilities: initial must sum to 1");
  std::vector<VecR> wp(top + 1);
  wp[top] = initial;
  for (int m = top; m >= 1; --m) {
    const int du = static_cast<int>(wp[m].size());
    VecR next = VecR::Zero(g.gamma_down[m].cols());
    for (int xi = 0; xi < du; ++xi) {
      if (wp[m](xi) <= 0.0) continue;
      const double rate = g.total_rate[m](xi);
      if (rate <= 1e-300)
        throw NumericalError("passage_probabilities: populated dark state");
      next += (wp[m](xi) / rate) * g.gamma_down[m].row(xi).transpose();
    }
    wp[m - 1] = next;
  }
  return wp;
}

CascadeResult evolve_rate_equations(const RateGraph& g, int top,
                                    const VecR& initial,
                                    const std::vector<double>& grid) {
  if (initial.minCoeff() < 0.0)
    throw std::invalid_argument("evolve_rate_equations: negative populations");
  std::vector<int> offset(top + 1);
  int total = 0;
  for (int m = 0; m <= top; ++m) {
    offset[m] = total;
    total += static_cast<int>(g.total_rate[m].size());
  }
  VecC y = VecC::Zero(total);
  for (int i = 0; i < initial.size(); ++i) y(offset[top] + i) = initial(i);

  auto rhs = [&](double, const VecC& v, VecC& dv) {
    dv.setZero();
    for (int m = 0; m <= top; ++m) {
      const int d = static_cast<int>(g.total_rate[m].size());
      for (int i = 0; i < d; ++i)
        dv(offset[m] + i) -= g.total_rate[m](i) * v(offset[m] + i);
      if (m >= 1) {
        // inflow to m-1 from m
        const auto& gm = g.gamma_down[m];
        for (int i = 0; i < d; ++i) {
          const cplx p = v(offset[m] + i);
          if (p == 0.0) continue;
          for (int j = 0; j < gm.cols(); ++j)
            dv(offset[m - 1] + j) += gm(i, j) * p;
        }
      }
    }
  };

  CascadeResult out;
  out.grid = grid;
  out.populations.resize(top + 1);
  for (int m = 0; m <= top; ++m)
    out.populations[m] =
        MatR::Zero(g.total_rate[m].size(), static_cast<int>(grid.size()));
  try {
    integrate_dp45(rhs, y, grid,
                   [&](int gi, double, const VecC& v) {
                     for (int m = 0; m <= top; ++m)
                       for (int i = 0; i < out.populations[m].rows(); ++i)
                         out.populations[m](i, gi) =
                             std::max(0.0, v(offset[m] + i).real());
                   },
                   1e-9, 1e-12);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("rate cascade integration failed: ") +
                         e.what());
  }
  return out;
}

VecR CascadeResult::manifold_population(int m) const {
  return populations[m].colwise().sum().transpose();
}

VecR CascadeResult::total_excitation() const {
  VecR tot = VecR::Zero(grid.size());
  for (size_t m = 1; m < populations.size(); ++m)
    tot += double(m) * populations[m].colwise().sum().transpose();
  return tot;
}

ConstituentMatch match_constituents(const SystemSpectra& sys, int xi2exc,
                                    int candidates) {
  const int n = sys.n_atoms();
  candidates = std::min(candidates, n);
  const auto& b2 = sys.bases[2];
  const VecC target = sys.spec[2].right.col(xi2exc);
  ConstituentMatch best;
  double best_rate = 1e300;
  for (int i = 0; i < candidates; ++i)
    for (int j = i + 1; j < candidates; ++j) {
      const VecC ans = fermionic_ansatz(sys.spec[1].right.col(i),
                                        sys.spec[1].right.col(j), b2);
      const double ov = std::norm(ans.adjoint().dot(target));
      const double rate = sys.spec[1].rate(i) + sys.spec[1].rate(j);
      const bool better = ov > best.overlap2 * (1.0 + 1e-9) ||
                          (std::abs(ov - best.overlap2) <= 1e-9 * best.overlap2 &&
                           rate < best_rate);
      if (better) {
        best.xi1 = i;
        best.xi2 = j;
        best.overlap2 = ov;
        best_rate = rate;
      }
    }
  return best;
}

double superradiant_fraction(const SystemSpectra& sys, int count) {
  double sum = 0.0;
  for (int xi = 0; xi < count; ++xi) {
    const auto m = match_constituents(sys, xi);
    const double denom = sys.spec[1].rate(m.xi1) + sys.spec[1].rate(m.xi2);
    sum += sys.spec[2].rate(xi) / denom - 1.0;
  }
  return sum / count;
}

}  // namespace subsim
