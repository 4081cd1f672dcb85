#include "subsim/io/runner.hpp"

#include "subsim/clock.hpp"
#include "subsim/io/output.hpp"
#include "subsim/jump.hpp"
#include "subsim/liouville.hpp"
#include "subsim/mean_field.hpp"
#include "subsim/mps.hpp"
#include "subsim/rate_model.hpp"

#include <cstdio>
#include <filesystem>

namespace subsim::io {

namespace fs = std::filesystem;

namespace {

struct Outputs {
  std::string dir;
  RunManifest manifest;

  std::string file(const std::string& name) const { return dir + "/" + name; }
  void record(const std::string& name) {
    manifest.outputs.emplace_back(name, fnv1a64_file(file(name)));
  }
};

TrajectoryConfig trajectory_config(const ExperimentConfig& cfg) {
  TrajectoryConfig t;
  t.initial = cfg.initial == "clock" ? InitialState::ClockState
                                     : InitialState::FullyInverted;
  t.kl_d = cfg.kl_d;
  t.detuning = cfg.detuning;
  t.grid = cfg.grid();
  t.trajectories = cfg.coherent_only ? 1 : cfg.trajectories;
  t.seed = cfg.seed;
  t.coherent_only = cfg.coherent_only;
  return t;
}

void run_spectrum(const ExperimentConfig& cfg, Outputs& out) {
  const auto cm = cfg.couplings();
  CsvWriter csv(out.file("modes.csv"), {"m_ex", "xi", "gamma", "omega", "k_d"});
  const bool chain = cfg.model != "cube";
  for (int m : cfg.manifolds) {
    auto s = manifold_spectrum(cm, cfg.n_atoms, m);
    for (int xi = 0; xi < s.dim(); ++xi) {
      double kd = std::numeric_limits<double>::quiet_NaN();
      if (chain && m == 1) kd = dominant_wavevector(s.right.col(xi));
      csv.row({double(m), double(xi + 1), s.rate(xi), s.shift(xi), kd});
    }
  }
  csv.close();
  out.record("modes.csv");
}

void run_3d_spectrum(const ExperimentConfig& cfg, Outputs& out) {
  const auto cm = cfg.couplings();
  auto s = manifold_spectrum(cm, cfg.n_atoms, 1);
  CsvWriter csv(out.file("modes.csv"), {"xi", "gamma", "omega"});
  for (int xi = 0; xi < s.dim(); ++xi)
    csv.row({double(xi + 1), s.rate(xi), s.shift(xi)});
  csv.close();
  out.record("modes.csv");

  // xi-scaling fit over the declared window
  std::vector<double> xs, gs;
  const int limit = std::min(60, s.dim());
  for (int xi = 0; xi < limit; ++xi) {
    xs.push_back(xi + 1);
    gs.push_back(s.rate(xi));
  }
  auto fit = fit_scaling(xs, gs, ScalingModel::Beta3D, 1, limit);
  CsvWriter fcsv(out.file("fits.csv"),
                 {"window_lo", "window_hi", "exponent", "residual"});
  fcsv.row({1.0, double(limit), fit.exponent, fit.residual});
  fcsv.close();
  out.record("fits.csv");
}

void run_decay(const ExperimentConfig& cfg, Outputs& out) {
  const auto cm = cfg.couplings();
  JumpEngine eng(cm, cfg.n_atoms, cfg.coherent_only);
  TrajectoryConfig t = trajectory_config(cfg);
  ObservableRequest req;
  req.coherence_kl_d = cfg.kl_d;
  for (double ct : cfg.correlation_times) {
    int best = 0;
    for (size_t g = 0; g < t.grid.size(); ++g)
      if (std::abs(t.grid[g] - ct) < std::abs(t.grid[best] - ct))
        best = static_cast<int>(g);
    req.correlation_grid_indices.push_back(best);
  }
  auto res = eng.run_ensemble(t, req);
  CsvWriter csv(out.file("observables.csv"),
                {"t", "n_e_mean", "n_e_stderr", "coh_re", "coh_im",
                 "coh_re_stderr", "coh_im_stderr"});
  for (size_t g = 0; g < res.grid.size(); ++g)
    csv.row({res.grid[g], res.ne_mean(g), res.ne_err(g), res.coh_mean(g).real(),
             res.coh_mean(g).imag(), res.coh_re_err(g), res.coh_im_err(g)});
  csv.close();
  out.record("observables.csv");
  if (!res.corr_mean.empty()) {
    CsvWriter ccsv(out.file("paircorr.csv"), {"t", "m", "n", "value"});
    for (size_t k = 0; k < res.corr_mean.size(); ++k)
      for (int a = 0; a < cfg.n_atoms; ++a)
        for (int b = 0; b < cfg.n_atoms; ++b)
          ccsv.row({res.grid[req.correlation_grid_indices[k]], double(a + 1),
                    double(b + 1), res.corr_mean[k](a, b)});
    ccsv.close();
    out.record("paircorr.csv");
  }
}

void run_clock(const ExperimentConfig& cfg, Outputs& out) {
  const auto cm = cfg.couplings();
  JumpEngine eng(cm, cfg.n_atoms, cfg.coherent_only);
  TrajectoryConfig t = trajectory_config(cfg);
  t.initial = InitialState::ClockState;
  std::vector<double> deltas(cfg.delta_count);
  for (int i = 0; i < cfg.delta_count; ++i)
    deltas[i] = cfg.delta_min + (cfg.delta_max - cfg.delta_min) * i /
                                    (cfg.delta_count - 1);
  auto scan = ramsey_scan(eng, t, deltas,
                          cfg.ramsey_mode == "analytic"
                              ? RamseyMode::AnalyticDetuning
                              : RamseyMode::EnsemblePerDelta);
  CsvWriter fcsv(out.file("fringe.csv"), {"delta", "t", "s", "s_stderr"});
  for (size_t d = 0; d < deltas.size(); ++d)
    for (size_t g = 0; g < scan.grid.size(); ++g)
      fcsv.row({deltas[d], scan.grid[g], scan.s(d, g), scan.s_err(d, g)});
  fcsv.close();
  out.record("fringe.csv");

  auto ridge = extract_ridge(scan);
  CsvWriter rcsv(out.file("ridge.csv"), {"t", "delta_m", "s_m"});
  for (size_t g = 0; g < ridge.t.size(); ++g)
    rcsv.row({ridge.t[g], ridge.delta_m[g], ridge.s_m[g]});
  rcsv.close();
  out.record("ridge.csv");
}

void run_rate_model(const ExperimentConfig& cfg, Outputs& out) {
  const auto cm = cfg.couplings();
  const int top = cfg.max_manifold < 0 ? cfg.n_atoms : cfg.max_manifold;
  auto sys = build_system_spectra(cm, cfg.n_atoms, top);
  auto graph = build_rate_graph(sys, top);

  CsvWriter rcsv(out.file("rates.csv"), {"m_ex", "xi", "xi_to", "gamma"});
  for (int m = 1; m <= top; ++m)
    for (int i = 0; i < graph.gamma_down[m].rows(); ++i)
      for (int j = 0; j < graph.gamma_down[m].cols(); ++j)
        rcsv.row({double(m), double(i + 1), double(j + 1),
                  graph.gamma_down[m](i, j)});
  rcsv.close();
  out.record("rates.csv");

  VecR init = VecR::Zero(sys.spec[top].dim());
  init(top == cfg.n_atoms ? 0 : 0) = 1.0;
  auto wp = passage_probabilities(graph, top, init);
  CsvWriter pcsv(out.file("passage.csv"), {"m_ex", "xi", "wp"});
  for (int m = 0; m <= top; ++m)
    for (int i = 0; i < wp[m].size(); ++i)
      pcsv.row({double(m), double(i + 1), wp[m](i)});
  pcsv.close();
  out.record("passage.csv");

  auto cascade = evolve_rate_equations(graph, top, init, cfg.grid());
  CsvWriter mcsv(out.file("manifolds.csv"), {"t", "m_ex", "population"});
  for (size_t g = 0; g < cascade.grid.size(); ++g)
    for (int m = 0; m <= top; ++m)
      mcsv.row({cascade.grid[g], double(m), cascade.manifold_population(m)(g)});
  mcsv.close();
  out.record("manifolds.csv");
  CsvWriter tcsv(out.file("totals.csv"), {"t", "n_e"});
  const VecR tot = cascade.total_excitation();
  for (size_t g = 0; g < cascade.grid.size(); ++g)
    tcsv.row({cascade.grid[g], tot(g)});
  tcsv.close();
  out.record("totals.csv");
}

void run_liouvillian(const ExperimentConfig& cfg, Outputs& out) {
  const auto cm = cfg.couplings();
  if (cfg.n_atoms <= 5) {
    auto l = build_liouvillian_matrix(cm);
    auto vals = liouvillian_spectrum(l);
    CsvWriter csv(out.file("eigenvalues.csv"), {"re", "im"});
    for (int i = 0; i < vals.size(); ++i)
      csv.row({vals(i).real(), vals(i).imag()});
    csv.close();
    out.record("eigenvalues.csv");
  }
  auto sys = build_system_spectra(cm, cfg.n_atoms);
  VecC inverted = VecC::Zero(int64_t(1) << cfg.n_atoms);
  inverted((int64_t(1) << cfg.n_atoms) - 1) = 1.0;
  auto alphas = single_excitation_alphas(sys, inverted, cfg.alpha_count);
  CsvWriter acsv(out.file("alphas.csv"), {"xi", "gamma_xi", "alpha_re", "alpha_im"});
  for (size_t i = 0; i < alphas.size(); ++i)
    acsv.row({double(i + 1), sys.spec[1].rate(static_cast<int>(i)),
              alphas[i].real(), alphas[i].imag()});
  acsv.close();
  out.record("alphas.csv");
}

void run_mean_field(const ExperimentConfig& cfg, Outputs& out) {
  const auto cm = cfg.couplings();
  CumulantSystem sys(cm, cfg.detuning);
  const auto init = cfg.initial == "clock" ? sys.initial_clock(cfg.kl_d)
                                           : sys.initial_inverted();
  auto series = sys.evolve(init, cfg.grid(), cfg.kl_d);
  CsvWriter csv(out.file("moments.csv"),
                {"t", "n_e", "coh_re", "coh_im"});
  for (size_t g = 0; g < series.grid.size(); ++g)
    csv.row({series.grid[g], series.n_e(g), series.coherence(g).real(),
             series.coherence(g).imag()});
  csv.close();
  out.record("moments.csv");
}

void run_mps(const ExperimentConfig& cfg, Outputs& out) {
  MpsRunConfig m;
  m.n = cfg.n_atoms;
  m.k0d = cfg.k0d;
  m.bond_dim = cfg.bond_dim;
  m.dt_early = cfg.dt_early;
  m.dt_late = cfg.dt_late;
  m.t_switch = cfg.t_switch;
  const MpsRho init = cfg.initial == "clock"
                          ? MpsRho::clock_state(cfg.n_atoms, cfg.kl_d)
                          : MpsRho::fully_inverted(cfg.n_atoms);
  auto series = run_mps_decay(m, init, cfg.grid());
  CsvWriter csv(out.file("observables.csv"),
                {"t", "n_e", "n_e_imag", "trace_drift", "trunc_error"});
  for (size_t g = 0; g < series.grid.size(); ++g)
    csv.row({series.grid[g], series.n_e(g), series.n_e_imag(g),
             series.trace_drift(g), series.trunc_error(g)});
  csv.close();
  out.record("observables.csv");
  if (series.aborted)
    throw NumericalError("mps: truncation error exceeded the ceiling");
}

}  // namespace

int validate_config(const std::string& config_path) {
  ParseResult parsed;
  try {
    parsed = load_config(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  for (const auto& err : parsed.errors)
    std::fprintf(stderr, "schema: %s\n", err.c_str());
  if (parsed.errors.empty()) std::printf("config ok\n");
  return parsed.errors.empty() ? 0 : 2;
}

int run_experiment(const std::string& config_path,
                   const std::string& output_dir_override) {
  ParseResult parsed;
  try {
    parsed = load_config(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  if (!parsed.errors.empty()) {
    for (const auto& err : parsed.errors)
      std::fprintf(stderr, "schema: %s\n", err.c_str());
    return 2;
  }
  const auto& cfg = parsed.config;

  Outputs out;
  out.dir = output_dir_override.empty() ? cfg.output_dir : output_dir_override;
  out.manifest.config_echo = parsed.raw;
  out.manifest.version = kVersion;
  out.manifest.started = iso8601_now();

  std::error_code ec;
  fs::create_directories(out.dir, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create output dir %s\n",
                 out.dir.c_str());
    return 4;
  }

  int code = 0;
  try {
    if (cfg.scenario == "spectrum")
      run_spectrum(cfg, out);
    else if (cfg.scenario == "3d-spectrum")
      run_3d_spectrum(cfg, out);
    else if (cfg.scenario == "decay")
      run_decay(cfg, out);
    else if (cfg.scenario == "clock")
      run_clock(cfg, out);
    else if (cfg.scenario == "rate-model")
      run_rate_model(cfg, out);
    else if (cfg.scenario == "liouvillian")
      run_liouvillian(cfg, out);
    else if (cfg.scenario == "mean-field")
      run_mean_field(cfg, out);
    else if (cfg.scenario == "mps")
      run_mps(cfg, out);
  } catch (const NumericalError& e) {
    out.manifest.status = "numerical-error";
    out.manifest.error = e.what();
    code = 3;
  } catch (const std::exception& e) {
    out.manifest.status = "error";
    out.manifest.error = e.what();
    code = 3;
  }
  out.manifest.finished = iso8601_now();
  try {
    out.manifest.write(out.dir + "/manifest.json");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  if (code != 0)
    std::fprintf(stderr, "run failed: %s\n", out.manifest.error.c_str());
  return code;
}

}  // namespace subsim::io
