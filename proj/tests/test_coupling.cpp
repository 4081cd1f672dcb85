#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "subsim/coupling.hpp"
#include "subsim/rng.hpp"

using namespace subsim;

// Closed forms for the dissipative parts, evaluated independently of the
// kernel implementations.
static double gamma_parallel_ref(double x) {
  return 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
}
static double gamma_perp_ref(double x) {
  return 1.5 * ((x * x - 1.0) * std::sin(x) + x * std::cos(x)) / (x * x * x);
}

TEST_CASE("green_parallel dissipative part") {
  // single-atom limit: Gamma(x)/Gamma0 = 1 - x^2/10 + O(x^4)
  CHECK(-2.0 * green_parallel(1e-3).imag() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(-2.0 * green_parallel(kPi).imag() ==
        doctest::Approx(3.0 / (kPi * kPi)).epsilon(1e-12));
  CHECK(-2.0 * green_parallel(2 * kPi).imag() ==
        doctest::Approx(-3.0 / (4 * kPi * kPi)).epsilon(1e-12));
  for (double x : {0.3, 0.7, 1.9, 4.2})
    CHECK(-2.0 * green_parallel(x).imag() ==
          doctest::Approx(gamma_parallel_ref(x)).epsilon(1e-13));
  CHECK_THROWS_AS(green_parallel(0.0), std::domain_error);
  CHECK_THROWS_AS(green_parallel(-1.0), std::domain_error);
}

TEST_CASE("green_perpendicular dissipative part") {
  CHECK(-2.0 * green_perpendicular(1e-3).imag() ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(-2.0 * green_perpendicular(kPi).imag() ==
        doctest::Approx(-1.5 / (kPi * kPi)).epsilon(1e-12));
  for (double x : {0.5, 1.0, 2.0}) {
    CHECK(-2.0 * green_perpendicular(x).imag() ==
          doctest::Approx(gamma_perp_ref(x)).epsilon(1e-13));
    CHECK(green_perpendicular(x) != green_parallel(x));
    CHECK(std::abs(-2.0 * green_perpendicular(x).imag()) <= 1.0 + 1e-12);
    CHECK(std::abs(-2.0 * green_parallel(x).imag()) <= 1.0 + 1e-12);
  }
  CHECK_THROWS_AS(green_perpendicular(0.0), std::domain_error);
}

TEST_CASE("green_3d reduces to the chain kernels") {
  for (double x : {1.0, kPi, 5.0}) {
    const cplx par = green_3d(Eigen::Vector3d(0, 0, x));
    CHECK(std::abs(par - green_parallel(x)) <= 1e-12 * std::abs(par));
    const cplx perp = green_3d(Eigen::Vector3d(x, 0, 0));
    CHECK(std::abs(perp - green_perpendicular(x)) <= 1e-12 * std::abs(perp));
  }
  CHECK_THROWS_AS(green_3d(Eigen::Vector3d::Zero()), std::domain_error);
}

TEST_CASE("green_3d is invariant under rotation about z") {
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const double x = 0.2 + 3 * rng.uniform(), y = 0.2 + 3 * rng.uniform(),
                 z = -1 + 2 * rng.uniform();
    const cplx a = green_3d(Eigen::Vector3d(x, y, z));
    const cplx b = green_3d(Eigen::Vector3d(-y, x, z));
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
  }
}

TEST_CASE("waveguide element") {
  CHECK(waveguide_element(0.0) == cplx(0.0, -0.5));
  const cplx quarter = waveguide_element(kPi / 2);
  CHECK(quarter.real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(-2.0 * quarter.imag() == doctest::Approx(0.0));
  CHECK(-2.0 * waveguide_element(kPi).imag() == doctest::Approx(-1.0).epsilon(1e-14));
  for (double x : {0.1, 1.0, 2.5})
    CHECK(-2.0 * waveguide_element(x).imag() ==
          doctest::Approx(std::cos(x)).epsilon(1e-14));
}

TEST_CASE("build_coupling_matrices basics") {
  auto g1 = ArrayGeometry::chain(Model::FreeSpaceParallel, 1, 0.4 * kPi);
  auto cm1 = build_coupling_matrices(g1);
  CHECK(cm1.gamma(0, 0) == 1.0);
  CHECK(cm1.h_offdiag(0, 0) == cplx(0.0, -0.5));

  auto g2 = ArrayGeometry::chain(Model::Waveguide, 2, 2 * kPi);
  auto cm2 = build_coupling_matrices(g2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(cm2.gamma(i, j) == doctest::Approx(1.0).epsilon(1e-14));

  auto g3 = ArrayGeometry::chain(Model::FreeSpaceParallel, 3, 0.4 * kPi);
  auto cm3 = build_coupling_matrices(g3);
  CHECK(cm3.gamma(0, 2) ==
        doctest::Approx(gamma_parallel_ref(0.8 * kPi)).epsilon(1e-13));
}

TEST_CASE("coupling matrices invariants across geometries") {
  std::vector<ArrayGeometry> geoms;
  for (double k0d : {0.2 * kPi, 0.4 * kPi, 0.6 * kPi, 1.3 * kPi}) {
    geoms.push_back(ArrayGeometry::chain(Model::FreeSpaceParallel, 9, k0d));
    geoms.push_back(ArrayGeometry::chain(Model::FreeSpacePerpendicular, 9, k0d));
    geoms.push_back(ArrayGeometry::chain(Model::Waveguide, 9, k0d));
  }
  geoms.push_back(ArrayGeometry::cube(3, 0.8 * kPi));
  for (const auto& g : geoms) {
    auto cm = build_coupling_matrices(g);
    CHECK((cm.h_offdiag - cm.h_offdiag.transpose()).norm() == 0.0);
    CHECK((cm.gamma - cm.gamma.transpose()).norm() == 0.0);
    for (int i = 0; i < cm.n(); ++i) {
      CHECK(cm.gamma(i, i) == 1.0);
      for (int j = 0; j < cm.n(); ++j) {
        if (i == j) continue;
        CHECK(cm.h_offdiag(i, j).imag() ==
              doctest::Approx(-0.5 * cm.gamma(i, j)).epsilon(1e-14));
        if (g.model == Model::Waveguide) {
          CHECK(cm.gamma(i, j) <= 1.0 + 1e-14);
          CHECK(cm.gamma(i, j) >= -1.0 - 1e-14);
        }
      }
    }
    Eigen::SelfAdjointEigenSolver<MatR> es(cm.gamma, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * cm.gamma.norm());
  }
}

TEST_CASE("decay channels reproduce gamma and clamp") {
  auto g = ArrayGeometry::chain(Model::Waveguide, 6, 0.2 * kPi);
  auto cm = build_coupling_matrices(g);
  auto ch = decay_channels(cm.gamma);
  MatR rebuilt = MatR::Zero(6, 6);
  for (int c = 0; c < 6; ++c)
    rebuilt += ch.rate(c) * ch.weight.col(c) * ch.weight.col(c).transpose();
  CHECK((rebuilt - cm.gamma).norm() <= 1e-10);
  CHECK(ch.rate.minCoeff() >= 0.0);
  // waveguide gamma has rank 2: exactly two radiative channels
  int active = 0;
  for (int c = 0; c < 6; ++c)
    if (ch.rate(c) > 1e-10) ++active;
  CHECK(active == 2);
}

TEST_CASE("geometry validation") {
  ArrayGeometry bad = ArrayGeometry::chain(Model::FreeSpaceParallel, 3, 0.5);
  bad.positions[2] = bad.positions[1];
  CHECK_THROWS_AS(build_coupling_matrices(bad), std::invalid_argument);
  ArrayGeometry cube = ArrayGeometry::cube(2, 0.8 * kPi);
  cube.positions.pop_back();
  CHECK_THROWS_AS(cube.validate(), std::invalid_argument);
}
