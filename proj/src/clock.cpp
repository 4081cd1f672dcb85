#include "subsim/clock.hpp"

#include "subsim/mean_field.hpp"

#include <cmath>

namespace subsim {

RidgeResult extract_ridge(const RamseyScan& scan) {
  const int nd = static_cast<int>(scan.deltas.size());
  const int ng = static_cast<int>(scan.grid.size());
  if (nd < 3) throw std::invalid_argument("extract_ridge: delta grid too coarse");
  RidgeResult out;
  out.t = scan.grid;
  out.delta_m.assign(ng, 0.0);
  out.s_m.assign(ng, 0.0);

  // t = 0: S is delta-independent, the ridge starts at delta = 0 by contract
  int prev = 0;
  for (int d = 1; d < nd; ++d)
    if (std::abs(scan.deltas[d]) < std::abs(scan.deltas[prev])) prev = d;
  out.s_m[0] = std::abs(scan.s(prev, 0));
  out.last_valid = 0.0;

  const int window = std::max(3, nd / 8);
  for (int g = 1; g < ng; ++g) {
    // nearest-extremum continuation: hill-climb on |S| from the previous
    // ridge position; never hops across a fringe valley
    int best = prev;
    for (int moves = 0; moves < window; ++moves) {
      const double here = std::abs(scan.s(best, g));
      const double left = best > 0 ? std::abs(scan.s(best - 1, g)) : -1.0;
      const double right =
          best < nd - 1 ? std::abs(scan.s(best + 1, g)) : -1.0;
      if (left > here && left >= right)
        --best;
      else if (right > here)
        ++best;
      else
        break;
    }
    if (best == 0 || best == nd - 1) {
      out.truncated = true;
      out.delta_m.resize(g);
      out.s_m.resize(g);
      out.t.resize(g);
      return out;
    }
    // three-point parabolic refinement on |S|
    const double ym = std::abs(scan.s(best - 1, g));
    const double y0 = std::abs(scan.s(best, g));
    const double yp = std::abs(scan.s(best + 1, g));
    const double denom = ym - 2.0 * y0 + yp;
    double frac = 0.0;
    if (denom < -1e-300) frac = 0.5 * (ym - yp) / denom;
    frac = std::clamp(frac, -0.5, 0.5);
    const double h = scan.deltas[best + 1] - scan.deltas[best];
    out.delta_m[g] = scan.deltas[best] + frac * h;
    out.s_m[g] = y0 - 0.25 * (ym - yp) * frac;
    out.last_valid = scan.grid[g];
    prev = best;
  }
  return out;
}

RidgeResult ridge_from_coherence(const std::vector<double>& grid,
                                 const VecC& coherence) {
  RidgeResult out;
  out.t = grid;
  const int ng = static_cast<int>(grid.size());
  out.delta_m.assign(ng, 0.0);
  out.s_m.assign(ng, 0.0);
  double phase = 0.0, prev_arg = 0.0;
  for (int g = 0; g < ng; ++g) {
    const cplx c = coherence(g);
    out.s_m[g] = 2.0 * std::abs(c);
    const double a = std::arg(c);
    if (g > 0) {
      double d = a - prev_arg;
      while (d > kPi) d -= 2 * kPi;
      while (d < -kPi) d += 2 * kPi;
      phase += d;
      out.delta_m[g] = phase / grid[g];
    }
    prev_arg = a;
    out.last_valid = grid[g];
  }
  return out;
}

SlopeSeries instantaneous_slope(const std::vector<double>& t,
                                const std::vector<double>& y,
                                double half_width_decades) {
  if (t.size() != y.size())
    throw std::invalid_argument("instantaneous_slope: size mismatch");
  SlopeSeries out;
  for (size_t c = 0; c < t.size(); ++c) {
    if (t[c] <= 0.0) continue;
    std::vector<double> lx, ly;
    for (size_t i = 0; i < t.size(); ++i) {
      if (t[i] <= 0.0) continue;
      if (std::abs(std::log10(t[i] / t[c])) > half_width_decades) continue;
      if (y[i] <= 0.0)
        throw std::invalid_argument(
            "instantaneous_slope: non-positive values inside a window");
      lx.push_back(std::log(t[i]));
      ly.push_back(std::log(y[i]));
    }
    if (lx.size() < 3) continue;
    const LineFit f = fit_line(lx, ly);
    out.t_center.push_back(t[c]);
    out.slope.push_back(f.slope);
    out.residual.push_back(f.residual);
  }
  return out;
}

double short_time_shift(const CouplingMatrices& cm, double kl_d) {
  CumulantSystem sys(cm);
  const CumulantState init = sys.initial_clock(kl_d);
  VecC dy(init.y.size());
  sys.rhs(init.y, dy);
  cplx c = 0.0, cdot = 0.0;
  for (int s = 0; s < cm.n(); ++s) {
    const cplx ph = std::exp(kI * (kl_d * (s + 1)));
    c += ph * init.y(CumulantState::one_index(kEG, s));
    cdot += ph * dy(CumulantState::one_index(kEG, s));
  }
  return (cdot / c).imag();
}

}  // namespace subsim
