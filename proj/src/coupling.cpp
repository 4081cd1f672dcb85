#include "subsim/coupling.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace subsim {

ArrayGeometry ArrayGeometry::chain(Model m, int n_atoms, double k0d) {
  ArrayGeometry g;
  g.model = m;
  g.k0d = k0d;
  g.positions.reserve(n_atoms);
  for (int i = 1; i <= n_atoms; ++i)
    g.positions.emplace_back(0.0, 0.0, k0d * i);
  return g;
}

ArrayGeometry ArrayGeometry::cube(int side, double k0d) {
  ArrayGeometry g;
  g.model = Model::Cube3D;
  g.k0d = k0d;
  g.positions.reserve(side * side * side);
  for (int x = 0; x < side; ++x)
    for (int y = 0; y < side; ++y)
      for (int z = 0; z < side; ++z)
        g.positions.emplace_back(k0d * x, k0d * y, k0d * z);
  return g;
}

void ArrayGeometry::validate() const {
  const int n_atoms = n();
  if (n_atoms < 1) throw std::invalid_argument("geometry: no atoms");
  for (int i = 0; i < n_atoms; ++i)
    for (int j = i + 1; j < n_atoms; ++j)
      if ((positions[i] - positions[j]).norm() <= 0.0)
        throw std::invalid_argument("geometry: duplicate atom positions");
  if (model != Model::Cube3D) {
    if (n_atoms > 1 && k0d <= 0.0)
      throw std::invalid_argument("geometry: chain needs k0d > 0");
    for (int i = 0; i < n_atoms; ++i) {
      const auto& p = positions[i];
      if (p.x() != 0.0 || p.y() != 0.0)
        throw std::invalid_argument("geometry: chain must lie along z");
      const double expected = k0d * (i + 1);
      if (std::abs(p.z() - expected) > 1e-12 * std::max(1.0, expected))
        throw std::invalid_argument("geometry: chain spacing not uniform");
    }
  } else {
    int side = static_cast<int>(std::round(std::cbrt(double(n_atoms))));
    if (side * side * side != n_atoms)
      throw std::invalid_argument("geometry: cube atom count not a perfect cube");
  }
}

cplx green_parallel(double x) {
  if (x <= 0.0) throw std::domain_error("green_parallel: separation must be > 0");
  return -1.5 * (1.0 - kI * x) * std::exp(kI * x) / (x * x * x);
}

cplx green_perpendicular(double x) {
  if (x <= 0.0) throw std::domain_error("green_perpendicular: separation must be > 0");
  return -0.75 * (x * x + kI * x - 1.0) * std::exp(kI * x) / (x * x * x);
}

cplx green_3d(const Eigen::Vector3d& delta_r) {
  const double x = delta_r.norm();
  if (x <= 0.0) throw std::domain_error("green_3d: separation must be > 0");
  const double w = delta_r.z();
  const double q = (w * w) / (x * x);
  const cplx bracket = x * x + kI * x - 1.0 + q * (3.0 - x * x - 3.0 * kI * x);
  return -0.75 * bracket * std::exp(kI * x) / (x * x * x);
}

cplx waveguide_element(double x) {
  if (x < 0.0) throw std::domain_error("waveguide_element: |dz| must be >= 0");
  return -0.5 * kI * std::exp(kI * x);
}

CouplingMatrices build_coupling_matrices(const ArrayGeometry& g) {
  g.validate();
  const int n = g.n();
  CouplingMatrices cm;
  cm.h_offdiag = MatC::Zero(n, n);
  cm.gamma = MatR::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    cm.h_offdiag(i, i) = -0.5 * kI;
    cm.gamma(i, i) = kGamma0;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      cplx h;
      switch (g.model) {
        case Model::FreeSpaceParallel:
          h = green_parallel((g.positions[i] - g.positions[j]).norm());
          break;
        case Model::FreeSpacePerpendicular:
          h = green_perpendicular((g.positions[i] - g.positions[j]).norm());
          break;
        case Model::Waveguide:
          h = waveguide_element(std::abs(g.positions[i].z() - g.positions[j].z()));
          break;
        case Model::Cube3D:
          h = green_3d(g.positions[i] - g.positions[j]);
          break;
      }
      cm.h_offdiag(i, j) = cm.h_offdiag(j, i) = h;
      cm.gamma(i, j) = cm.gamma(j, i) = -2.0 * h.imag();
    }
  }
  // Physical decay matrices are PSD; anything clearly below that is a bug.
  Eigen::SelfAdjointEigenSolver<MatR> es(cm.gamma, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * cm.gamma.norm())
    throw NumericalError("build_coupling_matrices: gamma not positive semidefinite");
  return cm;
}

CouplingMatrices make_independent(int n_atoms) {
  CouplingMatrices cm;
  cm.h_offdiag = MatC::Zero(n_atoms, n_atoms);
  cm.gamma = MatR::Identity(n_atoms, n_atoms) * kGamma0;
  for (int i = 0; i < n_atoms; ++i) cm.h_offdiag(i, i) = -0.5 * kI;
  return cm;
}

DecayChannels decay_channels(const MatR& gamma) {
  Eigen::SelfAdjointEigenSolver<MatR> es(gamma);
  const int n = static_cast<int>(gamma.rows());
  DecayChannels ch;
  ch.rate = VecR(n);
  ch.weight = MatR(n, n);
  // SelfAdjointEigenSolver sorts ascending; flip so superradiant channels first.
  for (int c = 0; c < n; ++c) {
    double r = es.eigenvalues()(n - 1 - c);
    ch.rate(c) = r > 0.0 ? r : 0.0;
    ch.weight.col(c) = es.eigenvectors().col(n - 1 - c);
  }
  return ch;
}

}  // namespace subsim
