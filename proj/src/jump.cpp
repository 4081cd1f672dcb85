#include "subsim/jump.hpp"

#include <cmath>

namespace subsim {

void TrajectoryConfig::validate(int n_atoms) const {
  if (grid.empty() || grid.front() != 0.0)
    throw std::invalid_argument("trajectory grid must start at 0");
  for (size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw std::invalid_argument("trajectory grid must be strictly increasing");
  if (trajectories < 1)
    throw std::invalid_argument("trajectory count must be >= 1");
  if (initial == InitialState::ExplicitVector &&
      explicit_vector.size() != (int64_t(1) << n_atoms))
    throw std::invalid_argument("explicit vector has wrong dimension");
}

double BlockState::norm2() const {
  double n2 = 0.0;
  for (const auto& b : block) n2 += b.squaredNorm();
  return n2;
}

JumpEngine::JumpEngine(const CouplingMatrices& cm, int n_atoms,
                       bool need_hermitian)
    : n_(n_atoms) {
  sys_ = build_system_spectra(cm, n_atoms);
  channels_ = decay_channels(cm.gamma);
  lower_map_.resize(n_atoms + 1);
  for (int m = 1; m <= n_atoms; ++m) {
    lower_map_[m].resize(n_atoms);
    for (int s = 0; s < n_atoms; ++s)
      lower_map_[m][s] = lowering_map(s, sys_.bases[m], sys_.bases[m - 1]);
  }
  if (need_hermitian) {
    herm_.resize(n_atoms + 1);
    for (int m = 0; m <= n_atoms; ++m) {
      const MatC h = project_heff(cm, sys_.bases[m]);
      herm_[m] = eig_hermitian(0.5 * (h + h.adjoint()));
    }
  }
}

BlockState JumpEngine::initial_state(const TrajectoryConfig& cfg) const {
  BlockState st;
  st.block.resize(n_ + 1);
  switch (cfg.initial) {
    case InitialState::FullyInverted:
      st.block[n_] = VecC::Ones(1);
      break;
    case InitialState::ClockState: {
      const double amp = std::pow(0.5, 0.5 * n_);
      for (int m = 0; m <= n_; ++m) {
        const auto& b = sys_.bases[m];
        st.block[m] = VecC(b.dim());
        for (int i = 0; i < b.dim(); ++i) {
          double phase = 0.0;
          std::uint64_t c = b.configs[i];
          while (c) {
            const int a = __builtin_ctzll(c);
            phase += cfg.kl_d * (a + 1);
            c &= c - 1;
          }
          st.block[m](i) = amp * std::exp(kI * phase);
        }
      }
      break;
    }
    case InitialState::ExplicitVector: {
      for (int m = 0; m <= n_; ++m) {
        const auto& b = sys_.bases[m];
        st.block[m] = VecC(b.dim());
        for (int i = 0; i < b.dim(); ++i)
          st.block[m](i) = cfg.explicit_vector(int64_t(b.configs[i]));
        if (st.block[m].squaredNorm() < 1e-30) st.block[m].resize(0);
      }
      break;
    }
  }
  const double n2 = st.norm2();
  if (std::abs(n2 - 1.0) > 1e-8)
    for (auto& b : st.block) b /= std::sqrt(n2);
  return st;
}

void JumpEngine::evolve_trajectory(const TrajectoryConfig& cfg,
                                   std::uint64_t index, const Visitor& visit,
                                   const JumpVisitor* on_jump) const {
  cfg.validate(n_);
  if (cfg.coherent_only) {
    evolve_coherent(cfg, visit);
    return;
  }
  Rng rng = trajectory_rng(cfg.seed, index);
  evolve_dissipative(cfg, rng, visit, on_jump);
}

namespace {
constexpr double kDropBlock = 1e-30;  // squared-norm floor for live manifolds
}

void JumpEngine::evolve_dissipative(const TrajectoryConfig& cfg, Rng& rng,
                                    const Visitor& visit,
                                    const JumpVisitor* on_jump) const {
  const BlockState init = initial_state(cfg);
  // eigenbasis coordinates per occupied manifold, anchored at t_anchor with
  // unit total norm
  std::vector<VecC> coord(n_ + 1);
  for (int m = 0; m <= n_; ++m)
    if (init.block[m].size()) coord[m] = sys_.spec[m].left * init.block[m];

  visit(0, 0.0, init);

  BlockState psi;  // reconstruction buffer
  psi.block.resize(n_ + 1);
  // phase-evolved coordinates at the probe time
  std::vector<VecC> evolved(n_ + 1);

  const auto reconstruct = [&](double dt) -> double {
    double n2 = 0.0;
    for (int m = 0; m <= n_; ++m) {
      if (!coord[m].size()) {
        psi.block[m].resize(0);
        continue;
      }
      const VecC& lam = sys_.spec[m].values;
      evolved[m].resize(coord[m].size());
      for (int i = 0; i < coord[m].size(); ++i)
        evolved[m](i) =
            std::exp(-kI * dt * (lam(i) - cfg.detuning * double(m))) *
            coord[m](i);
      psi.block[m].noalias() = sys_.spec[m].right * evolved[m];
      n2 += psi.block[m].squaredNorm();
    }
    return n2;
  };

  double t_anchor = 0.0;
  double threshold = rng.uniform_pos();
  size_t gi = 1;
  while (gi < cfg.grid.size()) {
    const double target = cfg.grid[gi];
    const double n2 = reconstruct(target - t_anchor);
    if (n2 > threshold) {
      // no jump before this grid point: record and re-anchor
      const double scale = 1.0 / std::sqrt(n2);
      for (int m = 0; m <= n_; ++m) {
        if (!coord[m].size()) continue;
        psi.block[m] *= scale;
        if (psi.block[m].squaredNorm() < kDropBlock) {
          coord[m].resize(0);
          psi.block[m].resize(0);
          continue;
        }
        coord[m] = evolved[m] * scale;
      }
      visit(static_cast<int>(gi), target, psi);
      threshold /= n2;
      t_anchor = target;
      ++gi;
      continue;
    }

    // jump inside (t_anchor, target]: bracketed secant on log norm
    double lo = 0.0, f_lo = -std::log(threshold);
    double hi = target - t_anchor, f_hi = std::log(n2 / threshold);
    double tau = hi, f_tau = f_hi;
    for (int it = 0; it < 200; ++it) {
      if (hi - lo < 1e-13 * std::max(1.0, t_anchor + hi)) break;
      double cand = lo + (hi - lo) * f_lo / (f_lo - f_hi);
      const double margin = 1e-3 * (hi - lo);
      cand = std::clamp(cand, lo + margin, hi - margin);
      const double f = std::log(reconstruct(cand)) - std::log(threshold);
      tau = cand;
      f_tau = f;
      if (std::abs(f) < 1e-12) break;
      if (f > 0) {
        lo = cand;
        f_lo = f;
      } else {
        hi = cand;
        f_hi = f;
      }
    }
    const double n2j = reconstruct(tau);
    const double scale = 1.0 / std::sqrt(n2j);
    for (int m = 0; m <= n_; ++m)
      if (psi.block[m].size()) psi.block[m] *= scale;

    // collective decay channel weights g_c ||L_c psi||^2
    std::vector<double> weight(n_, 0.0);
    std::vector<std::vector<VecC>> lowered(n_);
    for (int s = 0; s < n_; ++s) {
      lowered[s].resize(n_ + 1);
      for (int m = 1; m <= n_; ++m) {
        if (!psi.block[m].size()) continue;
        const auto& map = lower_map_[m][s];
        VecC& out = lowered[s][m - 1];
        out = VecC::Zero(sys_.bases[m - 1].dim());
        for (int i = 0; i < sys_.bases[m].dim(); ++i)
          if (map[i] >= 0) out(map[i]) += psi.block[m](i);
      }
    }
    std::vector<std::vector<VecC>> kvec(n_);
    double total = 0.0;
    for (int c = 0; c < n_; ++c) {
      if (channels_.rate(c) <= 0.0) continue;
      auto& k = kvec[c];
      k.resize(n_ + 1);
      double k2 = 0.0;
      for (int m = 0; m < n_; ++m) {
        for (int s = 0; s < n_; ++s) {
          if (!lowered[s][m].size()) continue;
          const double w = channels_.weight(s, c);
          if (w == 0.0) continue;
          if (!k[m].size()) k[m] = VecC::Zero(lowered[s][m].size());
          k[m] += w * lowered[s][m];
        }
        if (k[m].size()) k2 += k[m].squaredNorm();
      }
      weight[c] = channels_.rate(c) * k2;
      total += weight[c];
    }
    if (total <= 0.0)
      throw NumericalError("jump fired with no active decay channel");
    double u = rng.uniform() * total;
    int chosen = -1;
    for (int c = 0; c < n_; ++c) {
      u -= weight[c];
      if (u <= 0.0 && weight[c] > 0.0) {
        chosen = c;
        break;
      }
    }
    if (chosen < 0)
      for (int c = n_ - 1; c >= 0; --c)
        if (weight[c] > 0.0) {
          chosen = c;
          break;
        }

    double post2 = 0.0;
    for (int m = 0; m <= n_; ++m) {
      if (m < n_ && kvec[chosen][m].size())
        psi.block[m] = kvec[chosen][m];
      else
        psi.block[m].resize(0);
      if (psi.block[m].size()) post2 += psi.block[m].squaredNorm();
    }
    const double pscale = 1.0 / std::sqrt(post2);
    int dominant = 0;
    double dom2 = -1.0;
    for (int m = 0; m <= n_; ++m) {
      if (!psi.block[m].size()) {
        coord[m].resize(0);
        continue;
      }
      psi.block[m] *= pscale;
      const double b2 = psi.block[m].squaredNorm();
      if (b2 < kDropBlock) {
        psi.block[m].resize(0);
        coord[m].resize(0);
        continue;
      }
      coord[m] = sys_.spec[m].left * psi.block[m];
      if (b2 > dom2) {
        dom2 = b2;
        dominant = m;
      }
    }
    if (on_jump) {
      JumpEvent ev;
      ev.time = t_anchor + tau;
      ev.channel = chosen;
      ev.manifold_after = dominant;
      const VecC& c = coord[dominant];
      ev.post_overlaps = VecR(c.size());
      double s = 0.0;
      for (int i = 0; i < c.size(); ++i) {
        ev.post_overlaps(i) = std::norm(c(i));
        s += ev.post_overlaps(i);
      }
      if (s > 0) ev.post_overlaps /= s;
      (*on_jump)(ev);
    }
    t_anchor += tau;
    threshold = rng.uniform_pos();
  }
}

void JumpEngine::evolve_coherent(const TrajectoryConfig& cfg,
                                 const Visitor& visit) const {
  if (herm_.empty())
    throw std::logic_error("JumpEngine built without Hermitian spectra");
  const BlockState init = initial_state(cfg);
  std::vector<VecC> coord(n_ + 1);
  for (int m = 0; m <= n_; ++m)
    if (init.block[m].size())
      coord[m] = herm_[m].vectors.adjoint() * init.block[m];
  visit(0, 0.0, init);
  BlockState psi;
  psi.block.resize(n_ + 1);
  for (size_t gi = 1; gi < cfg.grid.size(); ++gi) {
    const double t = cfg.grid[gi];
    double n2 = 0.0;
    for (int m = 0; m <= n_; ++m) {
      if (!coord[m].size()) {
        psi.block[m].resize(0);
        continue;
      }
      VecC ph(coord[m].size());
      for (int i = 0; i < coord[m].size(); ++i)
        ph(i) = std::exp(-kI * t *
                         (herm_[m].values(i) - cfg.detuning * double(m))) *
                coord[m](i);
      psi.block[m].noalias() = herm_[m].vectors * ph;
      n2 += psi.block[m].squaredNorm();
    }
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& b : psi.block)
      if (b.size()) b *= scale;
    visit(static_cast<int>(gi), t, psi);
  }
}

double JumpEngine::excited_population(const BlockState& s) const {
  double ne = 0.0;
  for (int m = 1; m < static_cast<int>(s.block.size()); ++m)
    if (s.block[m].size()) ne += m * s.block[m].squaredNorm();
  return ne;
}

cplx JumpEngine::coherence_sum(const BlockState& s, double kl_d) const {
  cplx total = 0.0;
  for (int m = 0; m < n_; ++m) {
    if (!s.block[m].size() || !s.block[m + 1].size()) continue;
    for (int site = 0; site < n_; ++site) {
      const auto& map = lower_map_[m + 1][site];
      cplx v = 0.0;
      for (int i = 0; i < sys_.bases[m + 1].dim(); ++i)
        if (map[i] >= 0) v += std::conj(s.block[m + 1](i)) * s.block[m](map[i]);
      total += std::exp(kI * (kl_d * (site + 1))) * v;
    }
  }
  return total;
}

MatR JumpEngine::pair_correlations(const BlockState& s) const {
  MatR corr = MatR::Zero(n_, n_);
  for (int m = 2; m < static_cast<int>(s.block.size()); ++m) {
    if (!s.block[m].size()) continue;
    const auto& b = sys_.bases[m];
    for (int i = 0; i < b.dim(); ++i) {
      const double w = std::norm(s.block[m](i));
      if (w == 0.0) continue;
      std::uint64_t c = b.configs[i];
      while (c) {
        const int a1 = __builtin_ctzll(c);
        std::uint64_t rest = c & (c - 1);
        std::uint64_t r = rest;
        while (r) {
          const int a2 = __builtin_ctzll(r);
          corr(a1, a2) += w;
          corr(a2, a1) += w;
          r &= r - 1;
        }
        c = rest;
      }
    }
  }
  return corr;
}

SpinMoments JumpEngine::spin_moments(const BlockState& s) const {
  SpinMoments mom = SpinMoments::zero(n_);
  // one-body
  for (int m = 1; m < static_cast<int>(s.block.size()); ++m) {
    if (!s.block[m].size()) continue;
    const auto& b = sys_.bases[m];
    for (int i = 0; i < b.dim(); ++i) {
      const double w = std::norm(s.block[m](i));
      std::uint64_t c = b.configs[i];
      while (c) {
        mom.one(kEE, __builtin_ctzll(c)) += w;
        c &= c - 1;
      }
    }
  }
  for (int site = 0; site < n_; ++site) {
    cplx ge = 0.0;
    for (int m = 1; m <= n_; ++m) {
      if (!s.block[m].size() || !s.block[m - 1].size()) continue;
      const auto& map = lower_map_[m][site];
      for (int i = 0; i < sys_.bases[m].dim(); ++i)
        if (map[i] >= 0)
          ge += std::conj(s.block[m - 1](map[i])) * s.block[m](i);
    }
    mom.one(kGE, site) = ge;
    mom.one(kEG, site) = std::conj(ge);
  }
  // two-body via site-op application
  const auto apply_op = [&](int label, int site, const VecC& in, int m,
                            VecC& out) -> int {
    if (label == kEE) {
      out = in;
      const auto& b = sys_.bases[m];
      for (int i = 0; i < b.dim(); ++i)
        if (!(b.configs[i] & (1ull << site))) out(i) = 0.0;
      return m;
    }
    if (label == kGE) {  // lowers
      if (m == 0) return -1;
      const auto& map = lower_map_[m][site];
      out = VecC::Zero(sys_.bases[m - 1].dim());
      for (int i = 0; i < sys_.bases[m].dim(); ++i)
        if (map[i] >= 0) out(map[i]) += in(i);
      return m - 1;
    }
    // kEG raises
    if (m == n_) return -1;
    const auto& map = lower_map_[m + 1][site];
    out = VecC::Zero(sys_.bases[m + 1].dim());
    for (int i = 0; i < sys_.bases[m + 1].dim(); ++i)
      if (map[i] >= 0) out(i) = in(map[i]);
    return m + 1;
  };
  VecC tmp1, tmp2;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      MatC& blockij = mom.two[SpinMoments::pair_index(i, j, n_)];
      for (int la = 0; la < 3; ++la)
        for (int lb = 0; lb < 3; ++lb) {
          cplx v = 0.0;
          for (int m = 0; m < static_cast<int>(s.block.size()); ++m) {
            if (!s.block[m].size()) continue;
            const int m1 = apply_op(la, i, s.block[m], m, tmp1);
            if (m1 < 0) continue;
            const int m2 = apply_op(lb, j, tmp1, m1, tmp2);
            if (m2 < 0 || m2 > n_ || !s.block[m2].size()) continue;
            v += s.block[m2].dot(tmp2);
          }
          blockij(la, lb) = v;
        }
    }
  return mom;
}

namespace {

// Welford accumulators: immune to cancellation when the spread is tiny.
struct Acc {
  double mean = 0.0, m2 = 0.0;
  long n = 0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double var() const { return n > 1 ? m2 / n : 0.0; }
  double stderr_mean() const {
    return n > 1 ? std::sqrt(m2 / n / (n - 1)) : 0.0;
  }
};

struct Acc2 {  // bivariate, tracks covariance as well
  Acc a, b;
  double c = 0.0;
  void add(double x, double y) {
    const double dx = x - a.mean;
    a.add(x);
    b.add(y);
    c += dx * (y - b.mean);
  }
  double cov_mean() const { return a.n > 1 ? c / a.n / (a.n - 1) : 0.0; }
  double cov() const { return a.n > 1 ? c / a.n : 0.0; }
};

}  // namespace

double EnsembleResult::fringe(double delta, int gi) const {
  const double t = grid[gi];
  return -2.0 * (std::cos(delta * t) * coh_mean(gi).real() +
                 std::sin(delta * t) * coh_mean(gi).imag());
}

double EnsembleResult::fringe_err(double delta, int gi) const {
  const double t = grid[gi];
  const double c = std::cos(delta * t), s = std::sin(delta * t);
  const double var = c * c * coh_re_err(gi) * coh_re_err(gi) +
                     s * s * coh_im_err(gi) * coh_im_err(gi) +
                     2.0 * c * s * coh_cov(gi);
  return 2.0 * std::sqrt(std::max(0.0, var));
}

EnsembleResult JumpEngine::run_ensemble(const TrajectoryConfig& cfg,
                                        const ObservableRequest& req) const {
  cfg.validate(n_);
  const int ng = static_cast<int>(cfg.grid.size());
  const int ntraj = cfg.trajectories;
  EnsembleResult out;
  out.grid = cfg.grid;
  out.trajectories = ntraj;

  std::vector<Acc> ne_acc(ng);
  std::vector<Acc2> coh_acc(ng);  // (Re C, Im C)
  const int np = static_cast<int>(req.eigenpops.size());
  std::vector<Acc2> pop_acc(np * ng);  // (num, den)
  std::vector<MatR> corr_s(req.correlation_grid_indices.size(),
                           MatR::Zero(n_, n_));
  std::vector<SpinMoments> mom_s;
  std::vector<std::vector<Acc>> mom_acc;  // per snapshot: 3N one-body |.| accs
  for (size_t k = 0; k < req.moment_grid_indices.size(); ++k) {
    mom_s.push_back(SpinMoments::zero(n_));
    mom_acc.emplace_back(3 * n_);
  }
  std::vector<std::vector<Acc>> pass_acc(n_ + 1);
  if (req.record_passage)
    for (int m = 0; m <= n_; ++m) pass_acc[m].resize(sys_.bases[m].dim());

  for (int traj = 0; traj < ntraj; ++traj) {
    auto visit = [&](int gi, double, const BlockState& st) {
      if (req.n_e) ne_acc[gi].add(excited_population(st));
      if (req.coherence_kl_d) {
        const cplx c = coherence_sum(st, *req.coherence_kl_d);
        coh_acc[gi].add(c.real(), c.imag());
      }
      for (int p = 0; p < np; ++p) {
        const auto [m, xi] = req.eigenpops[p];
        double num = 0.0, den = 0.0;
        if (m < static_cast<int>(st.block.size()) && st.block[m].size()) {
          den = st.block[m].squaredNorm();
          num = std::norm(sys_.spec[m].right.col(xi).adjoint().dot(st.block[m]));
        }
        pop_acc[p * ng + gi].add(num, den);
      }
      for (size_t k = 0; k < req.correlation_grid_indices.size(); ++k)
        if (req.correlation_grid_indices[k] == gi)
          corr_s[k] += pair_correlations(st);
      for (size_t k = 0; k < req.moment_grid_indices.size(); ++k)
        if (req.moment_grid_indices[k] == gi) {
          const SpinMoments m = spin_moments(st);
          mom_s[k].one += m.one;
          for (size_t q = 0; q < m.two.size(); ++q) mom_s[k].two[q] += m.two[q];
          for (int la = 0; la < 3; ++la)
            for (int site = 0; site < n_; ++site)
              mom_acc[k][la * n_ + site].add(std::abs(m.one(la, site)));
        }
    };
    JumpEngine::JumpVisitor on_jump = [&](const JumpEvent& ev) {
      auto& accs = pass_acc[ev.manifold_after];
      for (int i = 0; i < ev.post_overlaps.size(); ++i)
        accs[i].add(ev.post_overlaps(i));
    };
    evolve_trajectory(cfg, traj, visit, req.record_passage ? &on_jump : nullptr);
  }

  const double inv = 1.0 / ntraj;
  out.ne_mean = VecR(ng);
  out.ne_err = VecR(ng);
  out.coh_mean = VecC(ng);
  out.coh_re_err = VecR(ng);
  out.coh_im_err = VecR(ng);
  out.coh_cov = VecR(ng);
  for (int g = 0; g < ng; ++g) {
    out.ne_mean(g) = ne_acc[g].mean;
    out.ne_err(g) = ne_acc[g].stderr_mean();
    out.coh_mean(g) = cplx(coh_acc[g].a.mean, coh_acc[g].b.mean);
    out.coh_re_err(g) = coh_acc[g].a.stderr_mean();
    out.coh_im_err(g) = coh_acc[g].b.stderr_mean();
    out.coh_cov(g) = coh_acc[g].cov_mean();
  }
  out.pop_num = MatR::Zero(np, ng);
  out.pop_den = MatR::Zero(np, ng);
  out.pop_mean = MatR::Zero(np, ng);
  out.pop_err = MatR::Zero(np, ng);
  for (int p = 0; p < np; ++p)
    for (int g = 0; g < ng; ++g) {
      const Acc2& acc = pop_acc[p * ng + g];
      const double a = acc.a.mean, b = acc.b.mean;
      out.pop_num(p, g) = a;
      out.pop_den(p, g) = b;
      if (b <= 0.0) {
        out.pop_mean(p, g) = std::numeric_limits<double>::quiet_NaN();
        out.pop_err(p, g) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const double r = a / b;
      out.pop_mean(p, g) = r;
      // delta method for the ratio estimator
      const double var =
          std::max(0.0, acc.a.var() + r * r * acc.b.var() - 2.0 * r * acc.cov());
      out.pop_err(p, g) =
          ntraj > 1 ? std::sqrt(var / (ntraj - 1)) / b : 0.0;
    }
  for (auto& c : corr_s) out.corr_mean.push_back(c * inv);
  for (size_t k = 0; k < mom_s.size(); ++k) {
    SpinMoments m = SpinMoments::zero(n_);
    m.one = mom_s[k].one * inv;
    for (size_t q = 0; q < m.two.size(); ++q) m.two[q] = mom_s[k].two[q] * inv;
    out.moments.push_back(std::move(m));
    double worst = 0.0;
    for (auto& acc : mom_acc[k]) worst = std::max(worst, acc.stderr_mean());
    out.moment_max_err.push_back(worst);
  }
  if (req.record_passage) {
    out.passage_mean.resize(n_ + 1);
    out.passage_err.resize(n_ + 1);
    for (int m = 0; m <= n_; ++m) {
      if (pass_acc[m].empty() || pass_acc[m][0].n == 0) continue;
      out.passage_mean[m] = VecR(pass_acc[m].size());
      out.passage_err[m] = VecR(pass_acc[m].size());
      for (size_t i = 0; i < pass_acc[m].size(); ++i) {
        out.passage_mean[m](i) = pass_acc[m][i].mean;
        out.passage_err[m](i) = pass_acc[m][i].stderr_mean();
      }
    }
  }
  return out;
}

RamseyScan ramsey_scan(const JumpEngine& engine, const TrajectoryConfig& base,
                       const std::vector<double>& deltas, RamseyMode mode) {
  if (base.initial == InitialState::FullyInverted)
    throw std::invalid_argument("ramsey_scan: needs a clock-type initial state");
  RamseyScan scan;
  scan.deltas = deltas;
  scan.grid = base.grid;
  const int ng = static_cast<int>(base.grid.size());
  scan.s = MatR(deltas.size(), ng);
  scan.s_err = MatR(deltas.size(), ng);
  ObservableRequest req;
  req.n_e = false;
  req.coherence_kl_d = base.kl_d;
  if (mode == RamseyMode::AnalyticDetuning) {
    TrajectoryConfig cfg = base;
    cfg.detuning = 0.0;
    const auto res = engine.run_ensemble(cfg, req);
    for (size_t d = 0; d < deltas.size(); ++d)
      for (int g = 0; g < ng; ++g) {
        scan.s(d, g) = res.fringe(deltas[d], g);
        scan.s_err(d, g) = res.fringe_err(deltas[d], g);
      }
  } else {
    for (size_t d = 0; d < deltas.size(); ++d) {
      TrajectoryConfig cfg = base;
      cfg.detuning = deltas[d];
      const auto res = engine.run_ensemble(cfg, req);
      for (int g = 0; g < ng; ++g) {
        scan.s(d, g) = res.fringe(0.0, g);
        scan.s_err(d, g) = res.fringe_err(0.0, g);
      }
    }
  }
  return scan;
}

}  // namespace subsim
