#include "subsim/linalg.hpp"

#include <lapacke.h>

#include <cmath>

namespace subsim {

EigDecomp eig_general(const MatC& a) {
  const int n = static_cast<int>(a.rows());
  EigDecomp d;
  d.values = VecC(n);
  d.right = MatC(n, n);
  MatC work = a;
  int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'V', n,
      reinterpret_cast<lapack_complex_double*>(work.data()), n,
      reinterpret_cast<lapack_complex_double*>(d.values.data()), nullptr, n,
      reinterpret_cast<lapack_complex_double*>(d.right.data()), n);
  if (info != 0)
    throw NumericalError("zgeev failed, info=" + std::to_string(info));
  d.left = inverse(d.right);
  return d;
}

EigHerm eig_hermitian(const MatC& a) {
  const int n = static_cast<int>(a.rows());
  EigHerm d;
  d.values = VecR(n);
  d.vectors = a;
  int info = LAPACKE_zheev(
      LAPACK_COL_MAJOR, 'V', 'L', n,
      reinterpret_cast<lapack_complex_double*>(d.vectors.data()), n,
      d.values.data());
  if (info != 0)
    throw NumericalError("zheev failed, info=" + std::to_string(info));
  return d;
}

MatC inverse(const MatC& a) {
  const int n = static_cast<int>(a.rows());
  MatC inv = a;
  std::vector<lapack_int> ipiv(n);
  int info = LAPACKE_zgetrf(
      LAPACK_COL_MAJOR, n, n,
      reinterpret_cast<lapack_complex_double*>(inv.data()), n, ipiv.data());
  if (info != 0)
    throw NumericalError("zgetrf failed (defective eigenbasis?), info=" +
                         std::to_string(info));
  info = LAPACKE_zgetri(
      LAPACK_COL_MAJOR, n,
      reinterpret_cast<lapack_complex_double*>(inv.data()), n, ipiv.data());
  if (info != 0)
    throw NumericalError("zgetri failed, info=" + std::to_string(info));
  return inv;
}

void qr_thin(const MatC& a, MatC& q, MatC& r) {
  const int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
  const int k = std::min(m, n);
  MatC work = a;
  std::vector<lapack_complex_double> tau(k);
  int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, m, n,
                            reinterpret_cast<lapack_complex_double*>(work.data()),
                            m, tau.data());
  if (info != 0) throw NumericalError("zgeqrf failed");
  r = MatC::Zero(k, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= std::min(j, k - 1); ++i) r(i, j) = work(i, j);
  info = LAPACKE_zungqr(LAPACK_COL_MAJOR, m, k, k,
                        reinterpret_cast<lapack_complex_double*>(work.data()), m,
                        tau.data());
  if (info != 0) throw NumericalError("zungqr failed");
  q = work.leftCols(k);
}

void svd_thin(const MatC& a, MatC& u, VecR& s, MatC& vh) {
  const int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
  const int k = std::min(m, n);
  MatC work = a;
  u.resize(m, k);
  s.resize(k);
  vh.resize(k, n);
  int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n,
                            reinterpret_cast<lapack_complex_double*>(work.data()),
                            m, s.data(),
                            reinterpret_cast<lapack_complex_double*>(u.data()), m,
                            reinterpret_cast<lapack_complex_double*>(vh.data()),
                            k);
  if (info != 0) throw NumericalError("zgesdd failed");
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2 || y.size() != x.size())
    throw std::invalid_argument("fit_line: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

}  // namespace subsim
