#include "subsim/mean_field.hpp"

#include "subsim/ode.hpp"

#include <algorithm>
#include <map>

namespace subsim {

namespace {

// Internal label encoding (a,b) for sigma_ab, e=0 / g=1: code = 2a + b.
// EE=0, EG=1, GE=2, GG=3.
constexpr int iEE = 0, iEG = 1, iGE = 2, iGG = 3;

int to_public(int code) {
  switch (code) {
    case iEE: return kEE;
    case iGE: return kGE;
    case iEG: return kEG;
  }
  throw std::logic_error("to_public: gg survived substitution");
}

struct Mono {
  // sorted by site
  std::vector<std::pair<int, int>> ops;  // (site, label code)
  cplx coef;
};

// site-wise operator product; empty optional = annihilated
bool mul_site(int la, int lb, int& out) {
  const int a1 = la >> 1, b1 = la & 1, a2 = lb >> 1, b2 = lb & 1;
  if (b1 != a2) return false;
  out = (a1 << 1) | b2;
  return true;
}

bool multiply(const Mono& x, const Mono& y, Mono& out) {
  out.ops.clear();
  out.coef = x.coef * y.coef;
  size_t i = 0, j = 0;
  while (i < x.ops.size() && j < y.ops.size()) {
    if (x.ops[i].first < y.ops[j].first)
      out.ops.push_back(x.ops[i++]);
    else if (y.ops[j].first < x.ops[i].first)
      out.ops.push_back(y.ops[j++]);
    else {
      int prod;
      if (!mul_site(x.ops[i].second, y.ops[j].second, prod)) return false;
      out.ops.emplace_back(x.ops[i].first, prod);
      ++i;
      ++j;
    }
  }
  for (; i < x.ops.size(); ++i) out.ops.push_back(x.ops[i]);
  for (; j < y.ops.size(); ++j) out.ops.push_back(y.ops[j]);
  return true;
}

using MonoKey = std::vector<std::pair<int, int>>;

// substitute sigma_gg = 1 - sigma_ee everywhere; cur holds processed ops
void expand_gg(const std::vector<std::pair<int, int>>& ops, size_t k, Mono cur,
               std::map<MonoKey, cplx>& acc) {
  for (; k < ops.size(); ++k) {
    if (ops[k].second == iGG) {
      expand_gg(ops, k + 1, cur, acc);  // identity branch
      cur.ops.emplace_back(ops[k].first, iEE);
      cur.coef = -cur.coef;
      expand_gg(ops, k + 1, cur, acc);  // -sigma_ee branch
      return;
    }
    cur.ops.push_back(ops[k]);
  }
  acc[cur.ops] += cur.coef;
}

void accumulate(const Mono& m, std::map<MonoKey, cplx>& acc) {
  Mono start;
  start.coef = m.coef;
  expand_gg(m.ops, 0, start, acc);
}

}  // namespace

CumulantState CumulantState::from_moments(const SpinMoments& m) {
  const int n = m.n_atoms;
  CumulantState s;
  s.n_atoms = n;
  s.y = VecC::Zero(3 * n + 9 * n * (n - 1) / 2);
  for (int site = 0; site < n; ++site)
    for (int l = 0; l < 3; ++l) s.y(one_index(l, site)) = m.one(l, site);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int la = 0; la < 3; ++la)
        for (int lb = 0; lb < 3; ++lb)
          s.y(two_index(i, j, la, lb, n)) =
              m.two[SpinMoments::pair_index(i, j, n)](la, lb);
  return s;
}

SpinMoments CumulantState::to_moments() const {
  SpinMoments m = SpinMoments::zero(n_atoms);
  for (int site = 0; site < n_atoms; ++site)
    for (int l = 0; l < 3; ++l) m.one(l, site) = y(one_index(l, site));
  for (int i = 0; i < n_atoms; ++i)
    for (int j = i + 1; j < n_atoms; ++j)
      for (int la = 0; la < 3; ++la)
        for (int lb = 0; lb < 3; ++lb)
          m.two[SpinMoments::pair_index(i, j, n_atoms)](la, lb) =
              y(two_index(i, j, la, lb, n_atoms));
  return m;
}

double CumulantState::hermiticity_defect() const {
  const int n = n_atoms;
  auto dag = [](int l) { return l == kGE ? kEG : (l == kEG ? kGE : kEE); };
  double worst = 0.0;
  for (int site = 0; site < n; ++site)
    for (int l = 0; l < 3; ++l)
      worst = std::max(worst, std::abs(y(one_index(l, site)) -
                                       std::conj(y(one_index(dag(l), site)))));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int la = 0; la < 3; ++la)
        for (int lb = 0; lb < 3; ++lb)
          worst = std::max(
              worst, std::abs(y(two_index(i, j, la, lb, n)) -
                              std::conj(y(two_index(i, j, dag(la), dag(lb), n)))));
  return worst;
}

CumulantSystem::CumulantSystem(const CouplingMatrices& cm, double detuning)
    : n_(cm.n()), detuning_(detuning), gamma_(cm.gamma) {
  h_ = cm.h_offdiag;
  for (int p = 0; p < n_; ++p) h_(p, p) = cplx(-detuning, -0.5);
  generate();
}

void CumulantSystem::generate() {
  const int n = n_;
  // target moments: all one-body labels, then all pair labels
  std::vector<std::pair<int, Mono>> targets;
  auto to_internal = [](int pub) {
    return pub == kEE ? iEE : (pub == kGE ? iGE : iEG);
  };
  for (int site = 0; site < n; ++site)
    for (int l = 0; l < 3; ++l) {
      Mono a;
      a.coef = 1.0;
      a.ops = {{site, to_internal(l)}};
      targets.emplace_back(CumulantState::one_index(l, site), a);
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int la = 0; la < 3; ++la)
        for (int lb = 0; lb < 3; ++lb) {
          Mono a;
          a.coef = 1.0;
          a.ops = {{i, to_internal(la)}, {j, to_internal(lb)}};
          targets.emplace_back(CumulantState::two_index(i, j, la, lb, n), a);
        }

  auto moment_index = [&](const MonoKey& key) -> int {
    if (key.size() == 1)
      return CumulantState::one_index(to_public(key[0].second), key[0].first);
    return CumulantState::two_index(key[0].first, key[1].first,
                                    to_public(key[0].second),
                                    to_public(key[1].second), n);
  };

  for (auto& [target, a] : targets) {
    std::map<MonoKey, cplx> acc;
    const auto touches = [&](int p) {
      for (auto& op : a.ops)
        if (op.first == p) return true;
      return false;
    };
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        // legs disjoint from the moment cancel exactly between the coherent
        // and jump parts; skip them
        if (!touches(p) && !touches(q)) continue;
        Mono leg_pe{{{p, iEG}}, 1.0}, leg_qg{{{q, iGE}}, 1.0};
        Mono leg_qe{{{q, iEG}}, 1.0}, leg_pg{{{p, iGE}}, 1.0};
        Mono hh, tmp;
        // +i conj(h_pq) sigma_eg^q sigma_ge^p A
        if (multiply(leg_qe, leg_pg, hh) && multiply(hh, a, tmp)) {
          tmp.coef *= kI * std::conj(h_(p, q));
          accumulate(tmp, acc);
        }
        // -i h_pq A sigma_eg^p sigma_ge^q
        if (multiply(leg_pe, leg_qg, hh) && multiply(a, hh, tmp)) {
          tmp.coef *= -kI * h_(p, q);
          accumulate(tmp, acc);
        }
        // Gamma_pq sigma_eg^q A sigma_ge^p
        if (gamma_(p, q) != 0.0) {
          if (multiply(leg_qe, a, hh) && multiply(hh, leg_pg, tmp)) {
            tmp.coef *= gamma_(p, q);
            accumulate(tmp, acc);
          }
        }
      }

    for (auto& [key, coef] : acc) {
      if (std::abs(coef) < 1e-14) continue;
      Term t;
      t.target = target;
      t.coef = coef;
      switch (key.size()) {
        case 0:
          break;
        case 1:
        case 2:
          t.a = moment_index(key);
          break;
        case 3: {
          // two-body cumulant closure:
          // <ABC> = <AB><C> + <A><BC> + <AC><B> - 2<A><B><C>
          const MonoKey ab{key[0], key[1]}, bc{key[1], key[2]}, ac{key[0], key[2]};
          const MonoKey ka{key[0]}, kb{key[1]}, kc{key[2]};
          Term t1 = t;
          t1.a = moment_index(ab);
          t1.b = moment_index(kc);
          tape_.push_back(t1);
          Term t2 = t;
          t2.a = moment_index(ka);
          t2.b = moment_index(bc);
          tape_.push_back(t2);
          Term t3 = t;
          t3.a = moment_index(ac);
          t3.b = moment_index(kb);
          tape_.push_back(t3);
          Term t4 = t;
          t4.coef *= -2.0;
          t4.a = moment_index(ka);
          t4.b = moment_index(kb);
          t4.c = moment_index(kc);
          tape_.push_back(t4);
          continue;
        }
        default:
          throw std::logic_error(
              "cumulant generator: >3-site moment survived cancellation");
      }
      tape_.push_back(t);
    }
  }
}

void CumulantSystem::rhs(const VecC& y, VecC& dy) const {
  dy.setZero();
  for (const Term& t : tape_) {
    cplx v = t.coef;
    if (t.a >= 0) v *= y(t.a);
    if (t.b >= 0) v *= y(t.b);
    if (t.c >= 0) v *= y(t.c);
    dy(t.target) += v;
  }
}

CumulantState CumulantSystem::initial_inverted() const {
  SpinMoments m = SpinMoments::zero(n_);
  for (int s = 0; s < n_; ++s) m.one(kEE, s) = 1.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      m.two[SpinMoments::pair_index(i, j, n_)](kEE, kEE) = 1.0;
  return CumulantState::from_moments(m);
}

CumulantState CumulantSystem::initial_clock(double kl_d) const {
  SpinMoments m = SpinMoments::zero(n_);
  for (int s = 0; s < n_; ++s) {
    m.one(kEE, s) = 0.5;
    m.one(kGE, s) = 0.5 * std::exp(kI * (kl_d * (s + 1)));
    m.one(kEG, s) = std::conj(m.one(kGE, s));
  }
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      for (int la = 0; la < 3; ++la)
        for (int lb = 0; lb < 3; ++lb)
          m.two[SpinMoments::pair_index(i, j, n_)](la, lb) =
              m.one(la, i) * m.one(lb, j);
  return CumulantState::from_moments(m);
}

CumulantSystem::Series CumulantSystem::evolve(const CumulantState& init,
                                              const std::vector<double>& grid,
                                              double coherence_kl_d,
                                              double rtol) const {
  if (init.hermiticity_defect() > 1e-8)
    throw std::invalid_argument("cumulant evolve: initial moments not Hermitian-paired");
  Series out;
  out.grid = grid;
  out.n_e = VecR(grid.size());
  out.coherence = VecC(grid.size());
  VecC y = init.y;
  integrate_dp45(
      [this](double, const VecC& v, VecC& dv) { rhs(v, dv); }, y, grid,
      [&](int gi, double t, const VecC& v) {
        double ne = 0.0;
        cplx coh = 0.0;
        for (int s = 0; s < n_; ++s) {
          const cplx ee = v(CumulantState::one_index(kEE, s));
          ne += ee.real();
          coh += std::exp(kI * (coherence_kl_d * (s + 1))) *
                 v(CumulantState::one_index(kEG, s));
          if (ee.real() < -1e-3 || ee.real() > 1.0 + 1e-3)
            out.warnings.push_back("population excursion at t=" +
                                   std::to_string(t) + " site " +
                                   std::to_string(s));
        }
        out.n_e(gi) = ne;
        out.coherence(gi) = coh;
        CumulantState snap;
        snap.n_atoms = n_;
        snap.y = v;
        out.snapshots.push_back(std::move(snap).to_moments());
      },
      rtol, 1e-12);
  return out;
}

}  // namespace subsim
