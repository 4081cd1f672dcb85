#include <doctest.h>

#include <cmath>

#include "subsim/liouville.hpp"
#include "subsim/mps.hpp"
#include "support/dense_master.hpp"

using namespace subsim;

namespace {

// map a (ket,bra) site-basis pair to the MPS site-major global index
int mps_index(int i_ket, int j_bra, int n) {
  int idx = 0;
  for (int site = 0; site < n; ++site) {
    const int kg = (i_ket >> site) & 1 ? 0 : 1;  // bit set = excited
    const int bg = (j_bra >> site) & 1 ? 0 : 1;
    idx = idx * 4 + (kg + 2 * bg);
  }
  return idx;
}

}  // namespace

TEST_CASE("MPO contraction equals the dense Liouvillian (waveguide N=3)") {
  const int n = 3;
  const double k0d = 0.2 * kPi;
  auto cm = build_coupling_matrices(ArrayGeometry::chain(Model::Waveguide, n, k0d));
  auto dense = build_liouvillian_matrix(cm);
  auto mpo = build_liouvillian_mpo(n, k0d);
  MatC contracted = mpo_to_dense(mpo);
  const int dim = 1 << n;
  double worst = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int ip = 0; ip < dim; ++ip)
        for (int jp = 0; jp < dim; ++jp) {
          const cplx a = dense.mat(i * dim + j, ip * dim + jp);
          const cplx b = contracted(mps_index(i, j, n), mps_index(ip, jp, n));
          worst = std::max(worst, std::abs(a - b));
        }
  CHECK(worst <= 1e-10);
}

TEST_CASE("dt-absorbed MPO encodes exactly 1 + L dt") {
  const int n = 3;
  const double k0d = 0.37 * kPi, dt = 7e-3;
  MatC l = mpo_to_dense(build_liouvillian_mpo(n, k0d));
  MatC step = mpo_to_dense(build_liouvillian_mpo(n, k0d, dt));
  MatC expected = MatC::Identity(l.rows(), l.cols()) + dt * l;
  CHECK((step - expected).norm() <= 1e-13 * expected.norm());
}

TEST_CASE("bare-frequency terms drop out of populations") {
  const int n = 4;
  MpsRunConfig cfg;
  cfg.n = n;
  cfg.k0d = 0.3 * kPi;
  cfg.bond_dim = 16;  // exact for N=4
  cfg.dt_early = 1e-3;
  cfg.dt_late = 5e-3;
  auto grid = uniform_grid(2.0, 4);
  cfg.omega0 = 0.0;
  auto a = run_mps_decay(cfg, MpsRho::fully_inverted(n), grid);
  cfg.omega0 = 1.0;
  auto b = run_mps_decay(cfg, MpsRho::fully_inverted(n), grid);
  for (int g = 0; g < a.n_e.size(); ++g)
    CHECK(std::abs(a.n_e(g) - b.n_e(g)) <= 1e-10);
}

TEST_CASE("Dicke pair cascade matches dense integration") {
  const int n = 2;
  auto cm = build_coupling_matrices(ArrayGeometry::chain(Model::Waveguide, n, 2 * kPi));
  oracle::DenseMaster ref(cm);
  auto grid = uniform_grid(5.0, 10);
  auto ne_ref = ref.excited_population(oracle::fully_inverted_rho(n), grid);

  MpsRunConfig cfg;
  cfg.n = n;
  cfg.k0d = 2 * kPi;
  cfg.bond_dim = 8;
  cfg.dt_early = 2e-4;
  cfg.dt_late = 2e-4;
  auto series = run_mps_decay(cfg, MpsRho::fully_inverted(n), grid);
  for (int g = 0; g < series.n_e.size(); ++g) {
    CHECK(std::abs(series.n_e(g) - ne_ref[g]) <= 1e-2);
    CHECK(series.n_e_imag(g) <= 1e-8);
  }
}

TEST_CASE("N=6 waveguide matches the dense master equation within 1e-2") {
  const int n = 6;
  const double k0d = 0.2 * kPi;
  auto cm = build_coupling_matrices(ArrayGeometry::chain(Model::Waveguide, n, k0d));
  oracle::DenseMaster ref(cm);
  auto grid = uniform_grid(30.0, 15);
  auto ne_ref = ref.excited_population(oracle::fully_inverted_rho(n), grid);

  MpsRunConfig cfg;
  cfg.n = n;
  cfg.k0d = k0d;
  cfg.bond_dim = 32;
  auto series = run_mps_decay(cfg, MpsRho::fully_inverted(n), grid);
  REQUIRE(!series.aborted);
  for (int g = 0; g < series.n_e.size(); ++g) {
    CHECK(std::abs(series.n_e(g) - ne_ref[g]) <= 1e-2);
    CHECK(series.n_e(g) >= -1e-9);
    CHECK(series.n_e(g) <= n + 1e-9);
    CHECK(series.n_e_imag(g) <= 1e-8);
  }
}

TEST_CASE("per-step compression error scales as dt^2, trace drift as dt") {
  // bond-starved on purpose so compression is lossy
  auto run = [](double dt) {
    MpsRunConfig cfg;
    cfg.n = 6;
    cfg.k0d = 0.2 * kPi;
    cfg.bond_dim = 8;
    cfg.dt_early = dt;
    cfg.dt_late = dt;
    cfg.t_switch = 1e9;
    return run_mps_decay(cfg, MpsRho::fully_inverted(6), {0.0, 0.5, 1.0});
  };
  auto coarse = run(2e-3);
  auto fine = run(1e-3);
  const double trunc_ratio =
      coarse.trunc_error.maxCoeff() / fine.trunc_error.maxCoeff();
  CHECK(trunc_ratio > 3.0);
  CHECK(trunc_ratio < 5.5);
  // the trace component of the compression residual is first order in dt
  const double drift_ratio =
      coarse.trace_drift.maxCoeff() / fine.trace_drift.maxCoeff();
  CHECK(drift_ratio > 1.7);
  CHECK(drift_ratio < 5.5);
}

TEST_CASE("clock-state product MPS reproduces first-moment structure") {
  const int n = 5;
  auto rho = MpsRho::clock_state(n, 0.8);
  CHECK(std::abs(rho.trace() - 1.0) <= 1e-14);
  CHECK(rho.excited_population_real() == doctest::Approx(0.5 * n).epsilon(1e-13));
  CHECK(rho.bond_dim() == 1);
}

TEST_CASE("compression is exact when the bond dimension suffices") {
  const int n = 4;
  auto mpo = build_liouvillian_mpo(n, 0.25 * kPi, 1e-2);
  MpsRho rho = MpsRho::clock_state(n, kPi);
  MpsRho big = apply_mpo(mpo, rho);
  CompressStats stats;
  MpsRho small = compress(big, 64, &stats);
  CHECK(stats.overlap_error <= 1e-12);
  CHECK(std::abs(small.trace() - big.trace()) <= 1e-10);
  CHECK(std::abs(small.excited_population() - big.excited_population()) <= 1e-9);
}
