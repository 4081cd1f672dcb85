#include <doctest.h>

#include <cmath>

#include "subsim/jump.hpp"
#include "support/dense_master.hpp"

using namespace subsim;

TEST_CASE("single atom decays exponentially") {
  auto cm = build_coupling_matrices(ArrayGeometry::chain(Model::FreeSpaceParallel, 1, 0.5));
  JumpEngine eng(cm, 1);
  TrajectoryConfig cfg;
  cfg.initial = InitialState::FullyInverted;
  cfg.grid = uniform_grid(6.0, 12);
  cfg.trajectories = 10000;
  cfg.seed = 77;
  auto res = eng.run_ensemble(cfg, ObservableRequest{});
  for (size_t g = 0; g < cfg.grid.size(); ++g) {
    const double expected = std::exp(-cfg.grid[g]);
    CHECK(std::abs(res.ne_mean(g) - expected) <= 3.0 * res.ne_err(g) + 1e-12);
  }
}

TEST_CASE("Dicke dark state never decays") {
  auto cm = build_coupling_matrices(ArrayGeometry::chain(Model::Waveguide, 2, 2 * kPi));
  JumpEngine eng(cm, 2);
  TrajectoryConfig cfg;
  cfg.initial = InitialState::ExplicitVector;
  cfg.explicit_vector = VecC::Zero(4);
  cfg.explicit_vector(1) = 1.0 / std::sqrt(2.0);
  cfg.explicit_vector(2) = -1.0 / std::sqrt(2.0);
  cfg.grid = uniform_grid(30.0, 10);
  cfg.trajectories = 20;
  auto res = eng.run_ensemble(cfg, ObservableRequest{});
  for (size_t g = 0; g < cfg.grid.size(); ++g) {
    CHECK(res.ne_mean(g) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.ne_err(g) <= 1e-10);
  }
}

TEST_CASE("ensemble matches the dense master equation at N=4") {
  auto cm = build_coupling_matrices(
      ArrayGeometry::chain(Model::FreeSpaceParallel, 4, 0.4 * kPi));
  JumpEngine eng(cm, 4);
  TrajectoryConfig cfg;
  cfg.initial = InitialState::FullyInverted;
  cfg.grid = uniform_grid(20.0, 40);
  cfg.trajectories = 4000;
  cfg.seed = 5;
  auto res = eng.run_ensemble(cfg, ObservableRequest{});

  oracle::DenseMaster ref(cm);
  auto ne = ref.excited_population(oracle::fully_inverted_rho(4), cfg.grid);
  int outside = 0;
  for (size_t g = 1; g < cfg.grid.size(); ++g)
    if (std::abs(res.ne_mean(g) - ne[g]) > 3.0 * res.ne_err(g) + 1e-9) ++outside;
  // a few 3-sigma excursions out of 40 points are statistically expected
  CHECK(outside <= 2);
  CHECK(res.ne_mean(0) == doctest::Approx(4.0));
}

TEST_CASE("clock-state ensemble matches the dense master equation at N=4") {
  auto cm = build_coupling_matrices(ArrayGeometry::chain(Model::Waveguide, 4, 0.3 * kPi));
  JumpEngine eng(cm, 4);
  TrajectoryConfig cfg;
  cfg.initial = InitialState::ClockState;
  cfg.kl_d = kPi;
  cfg.detuning = 0.4;
  cfg.grid = uniform_grid(10.0, 20);
  cfg.trajectories = 4000;
  cfg.seed = 11;
  ObservableRequest req;
  req.coherence_kl_d = cfg.kl_d;
  auto res = eng.run_ensemble(cfg, req);

  oracle::DenseMaster ref(cm);
  const VecC chi = oracle::clock_state(4, cfg.kl_d);
  MatC rho0 = chi * chi.adjoint();
  // same detuning term in the oracle: fold -delta into the coupling diagonal
  // via a modified cm is not possible; instead evolve with H including it by
  // shifting each manifold: use the identity <sigma_eg>(delta) = e^{-i d t} *
  // <sigma_eg>(0) checked separately; here compare populations only.
  auto ne = ref.excited_population(rho0, cfg.grid);
  int outside = 0;
  for (size_t g = 1; g < cfg.grid.size(); ++g)
    if (std::abs(res.ne_mean(g) - ne[g]) > 3.0 * res.ne_err(g) + 1e-9) ++outside;
  CHECK(outside <= 2);
}

TEST_CASE("recorded states stay normalized and manifolds never climb") {
  auto cm = build_coupling_matrices(
      ArrayGeometry::chain(Model::FreeSpaceParallel, 5, 0.4 * kPi));
  JumpEngine eng(cm, 5);
  TrajectoryConfig cfg;
  cfg.initial = InitialState::ClockState;
  cfg.kl_d = 0.0;
  cfg.grid = uniform_grid(15.0, 30);
  int top_prev = 1 << 20;
  bool ok_norm = true, ok_top = true;
  for (int traj = 0; traj < 10; ++traj) {
    top_prev = 1 << 20;
    eng.evolve_trajectory(cfg, traj, [&](int, double, const BlockState& st) {
      ok_norm &= std::abs(st.norm2() - 1.0) <= 1e-10;
      int top = -1;
      for (int m = 0; m < static_cast<int>(st.block.size()); ++m)
        if (st.block[m].size() && st.block[m].squaredNorm() > 1e-20) top = m;
      ok_top &= top <= top_prev;
      top_prev = top;
    });
  }
  CHECK(ok_norm);
  CHECK(ok_top);
}

TEST_CASE("trajectories are reproducible bit-for-bit") {
  auto cm = build_coupling_matrices(ArrayGeometry::chain(Model::Waveguide, 4, 0.25 * kPi));
  JumpEngine eng(cm, 4);
  TrajectoryConfig cfg;
  cfg.initial = InitialState::FullyInverted;
  cfg.grid = uniform_grid(8.0, 16);
  cfg.seed = 123;
  std::vector<VecC> run1, run2;
  for (int pass = 0; pass < 2; ++pass) {
    auto& sink = pass == 0 ? run1 : run2;
    eng.evolve_trajectory(cfg, 3, [&](int, double, const BlockState& st) {
      VecC flat = VecC::Zero(1 << 4);
      for (int m = 0; m < static_cast<int>(st.block.size()); ++m)
        if (st.block[m].size())
          for (int i = 0; i < st.block[m].size(); ++i)
            flat(int(eng.spectra().bases[m].configs[i])) = st.block[m](i);
      sink.push_back(flat);
    });
  }
  REQUIRE(run1.size() == run2.size());
  for (size_t i = 0; i < run1.size(); ++i)
    CHECK((run1[i] - run2[i]).norm() == 0.0);
}

TEST_CASE("ensemble population is monotone within statistical error") {
  auto cm = build_coupling_matrices(
      ArrayGeometry::chain(Model::FreeSpaceParallel, 6, 0.4 * kPi));
  JumpEngine eng(cm, 6);
  TrajectoryConfig cfg;
  cfg.initial = InitialState::FullyInverted;
  cfg.grid = uniform_grid(25.0, 25);
  cfg.trajectories = 600;
  cfg.seed = 9;
  auto res = eng.run_ensemble(cfg, ObservableRequest{});
  for (size_t g = 1; g < cfg.grid.size(); ++g)
    CHECK(res.ne_mean(g) <=
          res.ne_mean(g - 1) + 3.0 * (res.ne_err(g) + res.ne_err(g - 1)) + 1e-12);
}

TEST_CASE("initial-condition robustness: subradiant wavevectors retain population") {
  const int n = 10;
  auto cm = build_coupling_matrices(
      ArrayGeometry::chain(Model::FreeSpaceParallel, n, 0.4 * kPi));
  JumpEngine eng(cm, n);
  std::vector<double> at50, slope_early, slope_late;
  for (double kld : {kPi, 0.0}) {
    TrajectoryConfig cfg;
    cfg.initial = InitialState::ClockState;
    cfg.kl_d = kld;
    cfg.grid = {0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 35.0, 50.0};
    cfg.trajectories = 700;
    cfg.seed = 31;
    auto res = eng.run_ensemble(cfg, ObservableRequest{});
    at50.push_back(res.ne_mean(7));
    slope_early.push_back((res.ne_mean(0) - res.ne_mean(2)) / 2.0);
    slope_late.push_back((res.ne_mean(5) - res.ne_mean(7)) / 30.0);
  }
  // fast initial decay, slow tail, for both wavevectors
  for (int i = 0; i < 2; ++i) CHECK(slope_early[i] > 5.0 * slope_late[i]);
  CHECK(at50[0] > at50[1]);
  // fully inverted shows the same shape
  TrajectoryConfig cfg;
  cfg.initial = InitialState::FullyInverted;
  cfg.grid = {0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 35.0, 50.0};
  cfg.trajectories = 400;
  auto res = eng.run_ensemble(cfg, ObservableRequest{});
  CHECK((res.ne_mean(0) - res.ne_mean(2)) / 2.0 >
        5.0 * (res.ne_mean(5) - res.ne_mean(7)) / 30.0);
}

TEST_CASE("independent atoms give the closed-form Ramsey fringe") {
  const int n = 6;
  auto cm = make_independent(n);
  JumpEngine eng(cm, n);
  TrajectoryConfig cfg;
  cfg.initial = InitialState::ClockState;
  cfg.kl_d = 0.7;
  cfg.grid = uniform_grid(4.0, 8);
  cfg.trajectories = 3000;
  cfg.seed = 2;
  auto scan = ramsey_scan(eng, cfg, {-1.0, 0.0, 0.8});
  for (size_t d = 0; d < scan.deltas.size(); ++d)
    for (size_t g = 0; g < scan.grid.size(); ++g) {
      const double expected = -double(n) * std::cos(scan.deltas[d] * scan.grid[g]) *
                              std::exp(-0.5 * scan.grid[g]);
      CHECK(std::abs(scan.s(d, g) - expected) <=
            3.0 * scan.s_err(d, g) + 1e-9);
    }
}

TEST_CASE("analytic-detuning scan equals per-delta ensembles") {
  const int n = 5;
  auto cm = build_coupling_matrices(
      ArrayGeometry::chain(Model::FreeSpaceParallel, n, 0.6 * kPi));
  JumpEngine eng(cm, n);
  TrajectoryConfig cfg;
  cfg.initial = InitialState::ClockState;
  cfg.kl_d = kPi;
  cfg.grid = uniform_grid(6.0, 12);
  cfg.trajectories = 50;
  cfg.seed = 17;
  auto a = ramsey_scan(eng, cfg, {-0.5, 0.3, 1.1}, RamseyMode::AnalyticDetuning);
  auto b = ramsey_scan(eng, cfg, {-0.5, 0.3, 1.1}, RamseyMode::EnsemblePerDelta);
  CHECK((a.s - b.s).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("detuned single-atom coherence rotates as e^{-i delta t}") {
  auto cm = make_independent(1);
  JumpEngine eng(cm, 1);
  TrajectoryConfig cfg;
  cfg.initial = InitialState::ClockState;
  cfg.kl_d = 0.0;
  cfg.detuning = 1.3;
  cfg.grid = uniform_grid(3.0, 6);
  cfg.trajectories = 5000;
  cfg.seed = 21;
  ObservableRequest req;
  req.coherence_kl_d = 0.0;
  auto res = eng.run_ensemble(cfg, req);
  for (size_t g = 0; g < cfg.grid.size(); ++g) {
    const cplx expected = 0.5 * std::exp(-kI * (1.3 * cfg.grid[g])) *
                          std::exp(-0.5 * cfg.grid[g]);
    CHECK(std::abs(res.coh_mean(g) - expected) <=
          3.0 * (res.coh_re_err(g) + res.coh_im_err(g)) + 1e-9);
  }
}

TEST_CASE("coherent-only evolution conserves independent-atom coherence") {
  const int n = 4;
  auto cm = make_independent(n);
  JumpEngine eng(cm, n, /*need_hermitian=*/true);
  TrajectoryConfig cfg;
  cfg.initial = InitialState::ClockState;
  cfg.kl_d = kPi;
  cfg.coherent_only = true;
  cfg.trajectories = 1;
  cfg.grid = uniform_grid(20.0, 10);
  ObservableRequest req;
  req.coherence_kl_d = kPi;
  auto res = eng.run_ensemble(cfg, req);
  for (size_t g = 0; g < cfg.grid.size(); ++g) {
    CHECK(std::abs(res.coh_mean(g)) == doctest::Approx(0.5 * n).epsilon(1e-9));
    CHECK(res.ne_mean(g) == doctest::Approx(0.5 * n).epsilon(1e-9));
  }
}

TEST_CASE("passage statistics: Dicke cascade goes through the bright state") {
  auto cm = build_coupling_matrices(ArrayGeometry::chain(Model::Waveguide, 2, 2 * kPi));
  JumpEngine eng(cm, 2);
  TrajectoryConfig cfg;
  cfg.initial = InitialState::FullyInverted;
  cfg.grid = uniform_grid(40.0, 8);
  cfg.trajectories = 50;
  ObservableRequest req;
  req.record_passage = true;
  auto res = eng.run_ensemble(cfg, req);
  REQUIRE(res.passage_mean[1].size() == 2);
  // bright state is rank 2 (rate 2Gamma0), dark is rank 1
  CHECK(res.passage_mean[1](1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(res.passage_mean[1](0) <= 1e-10);
}

TEST_CASE("spin moments of a product state factorize at t=0") {
  const int n = 3;
  auto cm = build_coupling_matrices(ArrayGeometry::chain(Model::Waveguide, n, 0.3 * kPi));
  JumpEngine eng(cm, n);
  TrajectoryConfig cfg;
  cfg.initial = InitialState::ClockState;
  cfg.kl_d = 0.9;
  cfg.grid = {0.0, 0.5};
  cfg.trajectories = 1;
  ObservableRequest req;
  req.moment_grid_indices = {0};
  auto res = eng.run_ensemble(cfg, req);
  const SpinMoments& m = res.moments[0];
  for (int site = 0; site < n; ++site) {
    CHECK(std::abs(m.one(kEE, site) - 0.5) <= 1e-12);
    const cplx ge_expected = 0.5 * std::exp(kI * (0.9 * (site + 1)));
    CHECK(std::abs(m.one(kGE, site) - ge_expected) <= 1e-12);
    CHECK(std::abs(m.one(kEG, site) - std::conj(ge_expected)) <= 1e-12);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const MatC& b = m.two[SpinMoments::pair_index(i, j, n)];
      for (int la = 0; la < 3; ++la)
        for (int lb = 0; lb < 3; ++lb)
          CHECK(std::abs(b(la, lb) - m.one(la, i) * m.one(lb, j)) <= 1e-12);
    }
}
