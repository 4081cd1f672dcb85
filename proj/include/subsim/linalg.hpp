#pragma once

#include "subsim/common.hpp"

namespace subsim {

// Full non-Hermitian eigendecomposition, A * right = right * diag(values),
// left = right^{-1} (so left * A * right = diag(values)).
struct EigDecomp {
  VecC values;
  MatC right;
  MatC left;
};

// LAPACK zgeev plus explicit inversion of the eigenvector matrix.
// Throws NumericalError on solver failure or a defective eigenbasis.
EigDecomp eig_general(const MatC& a);

// Hermitian eigendecomposition (zheev), ascending eigenvalues.
struct EigHerm {
  VecR values;
  MatC vectors;
};
EigHerm eig_hermitian(const MatC& a);

MatC inverse(const MatC& a);

// Thin QR: a = q * r with q (m x k), r (k x n), k = min(m, n).
void qr_thin(const MatC& a, MatC& q, MatC& r);

// Thin SVD: a = u * s.asDiagonal() * vh, descending singular values.
void svd_thin(const MatC& a, MatC& u, VecR& s, MatC& vh);

// Least-squares slope/intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of fit residuals
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace subsim
