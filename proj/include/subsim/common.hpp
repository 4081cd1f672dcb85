#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace subsim {

using cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// Working units: hbar = 1, Gamma0 = 1, lengths as k0*r, times in 1/Gamma0.
inline constexpr double kGamma0 = 1.0;

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniform time grid starting at 0 (spec contract for trajectory configs).
inline std::vector<double> uniform_grid(double t_end, int steps) {
  std::vector<double> g(steps + 1);
  for (int i = 0; i <= steps; ++i) g[i] = t_end * i / steps;
  return g;
}

// 0, then log-spaced points from t_first to t_end. Useful for power-law tails.
inline std::vector<double> log_grid(double t_first, double t_end, int points) {
  std::vector<double> g;
  g.push_back(0.0);
  double lf = std::log(t_first), le = std::log(t_end);
  for (int i = 0; i < points; ++i)
    g.push_back(std::exp(lf + (le - lf) * i / (points - 1)));
  return g;
}

}  // namespace subsim
