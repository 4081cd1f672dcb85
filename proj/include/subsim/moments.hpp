#pragma once

#include "subsim/common.hpp"

namespace subsim {

// One- and two-site spin moments. Label order per site: {ee, ge, eg}
// (sigma_gg is eliminated via 1 - sigma_ee).
inline constexpr int kEE = 0, kGE = 1, kEG = 2;

struct SpinMoments {
  int n_atoms = 0;
  MatC one;                 // 3 x N, row = label
  std::vector<MatC> two;    // per pair i<j (packed), 3 x 3: (label_i, label_j)

  static int pair_index(int i, int j, int n) {
    // i < j
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }
  static SpinMoments zero(int n) {
    SpinMoments m;
    m.n_atoms = n;
    m.one = MatC::Zero(3, n);
    m.two.assign(n * (n - 1) / 2, MatC::Zero(3, 3));
    return m;
  }
};

}  // namespace subsim
