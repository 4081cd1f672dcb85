#include "subsim/mps.hpp"

#include <cmath>

namespace subsim {

namespace {

using M2 = Eigen::Matrix2cd;
using M4 = Eigen::Matrix4cd;

// local site ops in the basis index sigma = ket_g + 2*bra_g (e = 0, g = 1)
M4 kron_kb(const M2& ket, const M2& bra) {
  M4 out;
  for (int k = 0; k < 2; ++k)
    for (int b = 0; b < 2; ++b)
      for (int kp = 0; kp < 2; ++kp)
        for (int bp = 0; bp < 2; ++bp)
          out(k + 2 * b, kp + 2 * bp) = ket(k, kp) * bra(b, bp);
  return out;
}

M2 sig_ge() {
  M2 m = M2::Zero();
  m(1, 0) = 1.0;
  return m;
}
M2 sig_eg() {
  M2 m = M2::Zero();
  m(0, 1) = 1.0;
  return m;
}
M2 sig_ee() {
  M2 m = M2::Zero();
  m(0, 0) = 1.0;
  return m;
}

MatC kron_dense(const MatC& a, const MatC& b) {
  MatC out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

int MpsRho::bond_dim() const {
  int d = 1;
  for (const auto& s : site) d = std::max(d, int(s[0].cols()));
  return d;
}

MpsRho MpsRho::product(const std::vector<Eigen::Vector4cd>& locals) {
  MpsRho rho;
  rho.site.resize(locals.size());
  for (size_t k = 0; k < locals.size(); ++k)
    for (int s = 0; s < 4; ++s) {
      rho.site[k][s] = MatC(1, 1);
      rho.site[k][s](0, 0) = locals[k](s);
    }
  return rho;
}

MpsRho MpsRho::fully_inverted(int n) {
  return product(std::vector<Eigen::Vector4cd>(
      n, Eigen::Vector4cd(1.0, 0.0, 0.0, 0.0)));
}

MpsRho MpsRho::clock_state(int n, double kl_d) {
  std::vector<Eigen::Vector4cd> locals(n);
  for (int k = 0; k < n; ++k) {
    const cplx ph = std::exp(kI * (kl_d * (k + 1)));
    // rho = |psi><psi|, psi = (|g> + ph |e>)/sqrt(2):
    // (rho_ee, rho_ge, rho_eg, rho_gg)
    locals[k] = Eigen::Vector4cd(0.5, 0.5 * std::conj(ph), 0.5 * ph, 0.5);
  }
  return product(locals);
}

cplx MpsRho::trace() const {
  MatC v = MatC::Ones(1, 1);
  for (const auto& s : site) v = v * (s[0] + s[3]);
  return v(0, 0);
}

cplx MpsRho::excited_population() const {
  const int n = n_sites();
  std::vector<MatC> suffix(n + 1);
  suffix[n] = MatC::Ones(1, 1);
  for (int k = n - 1; k >= 0; --k)
    suffix[k] = (site[k][0] + site[k][3]) * suffix[k + 1];
  cplx total = 0.0;
  MatC prefix = MatC::Ones(1, 1);
  for (int k = 0; k < n; ++k) {
    total += (prefix * site[k][0] * suffix[k + 1])(0, 0);
    prefix = prefix * (site[k][0] + site[k][3]);
  }
  const cplx tr = prefix(0, 0);
  return total / tr;
}

double MpsRho::excited_population_real() const {
  return excited_population().real();
}

void MpsRho::scale(cplx factor) {
  for (int s = 0; s < 4; ++s) site[0][s] *= factor;
}

LiouvillianMpo build_liouvillian_mpo(int n, double k0d, std::optional<double> dt,
                                     double omega0) {
  if (n < 2) throw std::invalid_argument("build_liouvillian_mpo: N >= 2");
  LiouvillianMpo mpo;
  mpo.n_sites = n;
  mpo.k0d = k0d;
  mpo.dt = dt;
  mpo.omega0 = omega0;
  const cplx lam = std::exp(kI * k0d);
  const double g = dt ? *dt : 1.0;  // Gamma0 -> Gamma0 dt absorption

  const M4 id = M4::Identity();
  const M4 ge_ket = kron_kb(sig_ge(), M2::Identity());
  const M4 ge_bra = kron_kb(M2::Identity(), sig_ge());
  const M4 eg_ket = kron_kb(sig_eg(), M2::Identity());
  const M4 eg_bra = kron_kb(M2::Identity(), sig_eg());
  const M4 ee_ket = kron_kb(sig_ee(), M2::Identity());
  const M4 ee_bra = kron_kb(M2::Identity(), sig_ee());
  M4 v = -(kI * omega0 + 0.5) * ee_ket + (kI * omega0 - 0.5) * ee_bra +
         kron_kb(sig_ge(), sig_ge());
  v *= g;

  for (auto& row : mpo.w)
    for (auto& entry : row) entry = M4::Zero();
  auto& w = mpo.w;
  w[0][0] = id;
  w[0][1] = 0.5 * g * lam * (ge_bra - eg_ket);
  w[0][2] = 0.5 * g * lam * ge_ket;
  w[0][3] = 0.5 * g * std::conj(lam) * ge_bra;
  w[0][4] = 0.5 * g * std::conj(lam) * (ge_ket - eg_bra);
  w[0][5] = v;
  w[1][1] = lam * id;
  w[1][5] = ge_ket;
  w[2][2] = lam * id;
  w[2][5] = ge_bra - eg_ket;
  w[3][3] = std::conj(lam) * id;
  w[3][5] = ge_ket - eg_bra;
  w[4][4] = std::conj(lam) * id;
  w[4][5] = ge_bra;
  w[5][5] = id;

  for (int c = 0; c < 6; ++c) mpo.w_first[c] = w[0][c];
  for (int r = 0; r < 6; ++r) mpo.w_last[r] = w[r][5];
  if (dt) mpo.w_first[5] += id;  // encodes 1 + L dt
  return mpo;
}

MatC mpo_to_dense(const LiouvillianMpo& mpo) {
  const int n = mpo.n_sites;
  if (n > 5) throw std::invalid_argument("mpo_to_dense: N too large");
  std::array<MatC, 6> block;
  for (int c = 0; c < 6; ++c) block[c] = mpo.w_first[c];
  for (int k = 1; k < n - 1; ++k) {
    std::array<MatC, 6> next;
    for (int c = 0; c < 6; ++c) {
      next[c] = MatC::Zero(block[0].rows() * 4, block[0].cols() * 4);
      for (int r = 0; r < 6; ++r)
        if (!mpo.w[r][c].isZero(0)) next[c] += kron_dense(block[r], mpo.w[r][c]);
    }
    block = std::move(next);
  }
  MatC out = MatC::Zero(block[0].rows() * 4, block[0].cols() * 4);
  for (int r = 0; r < 6; ++r)
    if (!mpo.w_last[r].isZero(0)) out += kron_dense(block[r], mpo.w_last[r]);
  return out;
}

MpsRho apply_mpo(const LiouvillianMpo& mpo, const MpsRho& rho) {
  const int n = rho.n_sites();
  if (n != mpo.n_sites) throw std::invalid_argument("apply_mpo: size mismatch");
  MpsRho out;
  out.site.resize(n);
  for (int k = 0; k < n; ++k) {
    const int wl = k == 0 ? 1 : 6, wr = k == n - 1 ? 1 : 6;
    const int dl = static_cast<int>(rho.site[k][0].rows());
    const int dr = static_cast<int>(rho.site[k][0].cols());
    for (int s = 0; s < 4; ++s)
      out.site[k][s] = MatC::Zero(wl * dl, wr * dr);
    auto entry = [&](int r, int c) -> const M4& {
      if (k == 0) return mpo.w_first[c];
      if (k == n - 1) return mpo.w_last[r];
      return mpo.w[r][c];
    };
    for (int r = 0; r < wl; ++r)
      for (int c = 0; c < wr; ++c) {
        const M4& op = entry(r, c);
        if (op.isZero(0)) continue;
        for (int s = 0; s < 4; ++s)
          for (int sp = 0; sp < 4; ++sp) {
            if (op(s, sp) == 0.0) continue;
            out.site[k][s].block(r * dl, c * dr, dl, dr) +=
                op(s, sp) * rho.site[k][sp];
          }
      }
  }
  return out;
}

namespace {

// right-canonicalize in place via LQ sweeps (sites n-1 .. 1)
void right_canonicalize(MpsRho& rho) {
  const int n = rho.n_sites();
  for (int k = n - 1; k >= 1; --k) {
    const int dl = static_cast<int>(rho.site[k][0].rows());
    const int dr = static_cast<int>(rho.site[k][0].cols());
    MatC m(dl, 4 * dr);
    for (int s = 0; s < 4; ++s) m.middleCols(s * dr, dr) = rho.site[k][s];
    // LQ via QR of the adjoint
    MatC q, r;
    qr_thin(m.adjoint(), q, r);
    const int rank = static_cast<int>(q.cols());
    MatC l = r.adjoint();          // dl x rank
    MatC qh = q.adjoint();         // rank x 4dr
    for (int s = 0; s < 4; ++s)
      rho.site[k][s] = qh.middleCols(s * dr, dr);
    for (int s = 0; s < 4; ++s) rho.site[k - 1][s] = rho.site[k - 1][s] * l;
  }
}

// left-to-right SVD truncation to max_bond; input must be right-canonical
void svd_truncate(MpsRho& rho, int max_bond) {
  const int n = rho.n_sites();
  for (int k = 0; k < n - 1; ++k) {
    const int dl = static_cast<int>(rho.site[k][0].rows());
    const int dr = static_cast<int>(rho.site[k][0].cols());
    MatC m(4 * dl, dr);
    for (int s = 0; s < 4; ++s) m.middleRows(s * dl, dl) = rho.site[k][s];
    MatC u, vh;
    VecR sv;
    svd_thin(m, u, sv, vh);
    int keep = std::min<int>(max_bond, static_cast<int>(sv.size()));
    while (keep > 1 && sv(keep - 1) <= 1e-300) --keep;
    for (int s = 0; s < 4; ++s)
      rho.site[k][s] = u.block(s * dl, 0, dl, keep);
    MatC rest = sv.head(keep).asDiagonal() * vh.topRows(keep);
    for (int s = 0; s < 4; ++s) rho.site[k + 1][s] = rest * rho.site[k + 1][s];
  }
}

cplx mps_overlap(const MpsRho& a, const MpsRho& b) {
  // <a|b>
  MatC e = MatC::Ones(1, 1);
  for (int k = 0; k < a.n_sites(); ++k) {
    MatC next = MatC::Zero(a.site[k][0].cols(), b.site[k][0].cols());
    for (int s = 0; s < 4; ++s)
      next += a.site[k][s].adjoint() * e * b.site[k][s];
    e = std::move(next);
  }
  return e(0, 0);
}

}  // namespace

MpsRho compress(const MpsRho& big, int max_bond, CompressStats* stats,
                const MpsRho* guess, int max_sweeps, double tol) {
  const int n = big.n_sites();
  MpsRho out;
  if (guess) {
    out = *guess;
  } else {
    out = big;
    right_canonicalize(out);
    svd_truncate(out, max_bond);
  }
  const double bb = mps_overlap(big, big).real();

  // environments of <out|big>
  std::vector<MatC> er(n + 1);
  er[n] = MatC::Ones(1, 1);
  for (int k = n - 1; k >= 1; --k) {
    er[k] = MatC::Zero(out.site[k][0].rows(), big.site[k][0].rows());
    for (int s = 0; s < 4; ++s)
      er[k] += out.site[k][s].conjugate() * er[k + 1] * big.site[k][s].transpose();
  }

  double prev_quality = -1.0;
  int sweeps_done = 0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    // left-to-right: update and left-orthonormalize
    std::vector<MatC> el(n + 1);
    el[0] = MatC::Ones(1, 1);
    double c2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const int dr_out = k == n - 1 ? 1 : static_cast<int>(out.site[k][0].cols());
      std::array<MatC, 4> g;
      c2 = 0.0;
      for (int s = 0; s < 4; ++s) {
        g[s] = el[k] * big.site[k][s] * er[k + 1].transpose();
        c2 += g[s].squaredNorm();
      }
      if (k == n - 1) {
        for (int s = 0; s < 4; ++s) out.site[k][s] = g[s];
        break;
      }
      // QR-orthonormalize the updated tensor, push R into the environment
      const int dl = static_cast<int>(g[0].rows());
      MatC m(4 * dl, g[0].cols());
      for (int s = 0; s < 4; ++s) m.middleRows(s * dl, dl) = g[s];
      MatC q, r;
      qr_thin(m, q, r);
      const int keep = std::min<int>(dr_out, static_cast<int>(q.cols()));
      for (int s = 0; s < 4; ++s)
        out.site[k][s] = q.block(s * dl, 0, dl, keep);
      el[k + 1] = MatC::Zero(keep, big.site[k][0].cols());
      for (int s = 0; s < 4; ++s)
        el[k + 1] += out.site[k][s].adjoint() * el[k] * big.site[k][s];
    }
    ++sweeps_done;
    // out is left-canonical except the last tensor, so <out|out> = c2
    const double quality = c2 / bb;
    if (prev_quality >= 0.0 && std::abs(quality - prev_quality) < tol) {
      prev_quality = quality;
      break;
    }
    prev_quality = quality;
    if (sweep + 1 < max_sweeps) {
      // rebuild right environments for the next pass
      for (int k = n - 1; k >= 1; --k) {
        er[k] = MatC::Zero(out.site[k][0].rows(), big.site[k][0].rows());
        for (int s = 0; s < 4; ++s)
          er[k] +=
              out.site[k][s].conjugate() * er[k + 1] * big.site[k][s].transpose();
      }
    }
  }
  if (stats) {
    stats->overlap_error = std::max(0.0, 1.0 - prev_quality);
    stats->sweeps = sweeps_done;
  }
  return out;
}

MpsRho mps_adjoint(const MpsRho& rho) {
  MpsRho out;
  out.site.resize(rho.n_sites());
  static const int swap[4] = {0, 2, 1, 3};  // ket/bra exchange of sigma
  for (int k = 0; k < rho.n_sites(); ++k)
    for (int s = 0; s < 4; ++s) out.site[k][s] = rho.site[k][swap[s]].conjugate();
  return out;
}

MpsRho mps_add(const MpsRho& a, const MpsRho& b) {
  const int n = a.n_sites();
  MpsRho out;
  out.site.resize(n);
  for (int k = 0; k < n; ++k) {
    const int al = static_cast<int>(a.site[k][0].rows());
    const int ar = static_cast<int>(a.site[k][0].cols());
    const int bl = static_cast<int>(b.site[k][0].rows());
    const int br = static_cast<int>(b.site[k][0].cols());
    for (int s = 0; s < 4; ++s) {
      if (k == 0) {
        out.site[k][s] = MatC::Zero(1, ar + br);
        out.site[k][s].leftCols(ar) = a.site[k][s];
        out.site[k][s].rightCols(br) = b.site[k][s];
      } else if (k == n - 1) {
        out.site[k][s] = MatC::Zero(al + bl, 1);
        out.site[k][s].topRows(al) = a.site[k][s];
        out.site[k][s].bottomRows(bl) = b.site[k][s];
      } else {
        out.site[k][s] = MatC::Zero(al + bl, ar + br);
        out.site[k][s].topLeftCorner(al, ar) = a.site[k][s];
        out.site[k][s].bottomRightCorner(bl, br) = b.site[k][s];
      }
    }
  }
  return out;
}

MpsRho hermitize(const MpsRho& rho, int max_bond) {
  MpsRho sym = mps_add(rho, mps_adjoint(rho));
  sym.scale(0.5);
  return compress(sym, max_bond);
}

MpsSeries run_mps_decay(const MpsRunConfig& cfg, const MpsRho& initial,
                        const std::vector<double>& grid) {
  if (grid.empty() || grid.front() != 0.0)
    throw std::invalid_argument("run_mps_decay: grid must start at 0");
  MpsSeries out;
  out.grid = grid;
  const int ng = static_cast<int>(grid.size());
  out.n_e = VecR::Zero(ng);
  out.n_e_imag = VecR::Zero(ng);
  out.trace_drift = VecR::Zero(ng);
  out.trunc_error = VecR::Zero(ng);

  MpsRho rho = initial;
  {
    const cplx ne = rho.excited_population();
    out.n_e(0) = ne.real();
    out.n_e_imag(0) = std::abs(ne.imag());
  }
  const LiouvillianMpo op_early =
      build_liouvillian_mpo(cfg.n, cfg.k0d, cfg.dt_early, cfg.omega0);
  const LiouvillianMpo op_late =
      build_liouvillian_mpo(cfg.n, cfg.k0d, cfg.dt_late, cfg.omega0);

  double t = 0.0;
  double max_drift = 0.0, max_trunc = 0.0;
  int steps_since_hermitize = 0;
  for (int gi = 1; gi < ng; ++gi) {
    while (t < grid[gi] - 1e-12) {
      const double dt_nominal = t < cfg.t_switch ? cfg.dt_early : cfg.dt_late;
      const double dt = std::min(dt_nominal, grid[gi] - t);
      const LiouvillianMpo* op = &op_early;
      LiouvillianMpo custom;
      if (std::abs(dt - cfg.dt_early) < 1e-15)
        op = &op_early;
      else if (std::abs(dt - cfg.dt_late) < 1e-15)
        op = &op_late;
      else {
        custom = build_liouvillian_mpo(cfg.n, cfg.k0d, dt, cfg.omega0);
        op = &custom;
      }
      MpsRho big = apply_mpo(*op, rho);
      CompressStats stats;
      MpsRho next = compress(big, cfg.bond_dim, &stats,
                             cfg.guess_previous ? &rho : nullptr);
      const cplx tr = next.trace();
      max_drift = std::max(max_drift, std::abs(tr - 1.0));
      max_trunc = std::max(max_trunc, stats.overlap_error);
      out.accumulated_trunc += stats.overlap_error;
      next.scale(1.0 / tr);
      rho = std::move(next);
      t += dt;
      if (++steps_since_hermitize >= 25) {
        rho = hermitize(rho, cfg.bond_dim);
        rho.scale(1.0 / rho.trace());
        steps_since_hermitize = 0;
      }
      if (stats.overlap_error > cfg.truncation_ceiling) {
        out.aborted = true;
        break;
      }
    }
    if (steps_since_hermitize > 0) {
      rho = hermitize(rho, cfg.bond_dim);
      rho.scale(1.0 / rho.trace());
      steps_since_hermitize = 0;
    }
    const cplx ne = rho.excited_population();
    out.n_e(gi) = ne.real();
    out.n_e_imag(gi) = std::abs(ne.imag());
    out.trace_drift(gi) = max_drift;
    out.trunc_error(gi) = max_trunc;
    max_drift = max_trunc = 0.0;
    if (out.aborted) {
      out.n_e.conservativeResize(gi + 1);
      out.n_e_imag.conservativeResize(gi + 1);
      out.trace_drift.conservativeResize(gi + 1);
      out.trunc_error.conservativeResize(gi + 1);
      out.grid.resize(gi + 1);
      break;
    }
  }
  return out;
}

}  // namespace subsim
