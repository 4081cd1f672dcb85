#pragma once

#include "subsim/common.hpp"

#include <functional>

namespace subsim {

// Adaptive Dormand-Prince 5(4) over complex vectors. Calls `record` at every
// requested grid time (grid must be ascending, grid[0] = start time).
// rhs(t, y, dydt).
inline void integrate_dp45(
    const std::function<void(double, const VecC&, VecC&)>& rhs, VecC& y,
    const std::vector<double>& grid,
    const std::function<void(int, double, const VecC&)>& record,
    double rtol = 1e-8, double atol = 1e-10) {
  static const double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
  static const double a21 = 1. / 5;
  static const double a31 = 3. / 40, a32 = 9. / 40;
  static const double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
  static const double a51 = 19372. / 6561, a52 = -25360. / 2187,
                      a53 = 64448. / 6561, a54 = -212. / 729;
  static const double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247,
                      a64 = 49. / 176, a65 = -5103. / 18656;
  static const double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192,
                      b5 = -2187. / 6784, b6 = 11. / 84;
  static const double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920,
                      e5 = -17253. / 339200, e6 = 22. / 525, e7 = -1. / 40;

  const int n = static_cast<int>(y.size());
  VecC k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
  double t = grid.front();
  record(0, t, y);
  double h = 1e-4;
  rhs(t, y, k1);
  for (size_t gi = 1; gi < grid.size(); ++gi) {
    const double t_target = grid[gi];
    while (t < t_target) {
      h = std::min(h, t_target - t);
      ytmp = y + h * (a21 * k1);
      rhs(t + c2 * h, ytmp, k2);
      ytmp = y + h * (a31 * k1 + a32 * k2);
      rhs(t + c3 * h, ytmp, k3);
      ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      rhs(t + c4 * h, ytmp, k4);
      ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      rhs(t + c5 * h, ytmp, k5);
      ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      rhs(t + h, ytmp, k6);
      ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      rhs(t + h, ynew, k7);
      const VecC err =
          h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double scale = 0.0;
      for (int i = 0; i < n; ++i) {
        const double s = atol + rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
        scale = std::max(scale, std::abs(err(i)) / s);
      }
      if (scale <= 1.0) {
        t += h;
        y.swap(ynew);
        k1.swap(k7);
      }
      const double factor =
          scale > 0 ? 0.9 * std::pow(scale, -0.2) : 5.0;
      h *= std::clamp(factor, 0.2, 5.0);
      if (h < 1e-14)
        throw NumericalError("integrate_dp45: step size underflow");
    }
    record(static_cast<int>(gi), t, y);
  }
}

}  // namespace subsim
