#include <doctest.h>

#include "subsim/manifold.hpp"
#include "subsim/rng.hpp"

using namespace subsim;

TEST_CASE("enumerate_manifold ordering and sizes") {
  auto b0 = enumerate_manifold(3, 0);
  CHECK(b0.dim() == 1);
  CHECK(b0.configs[0] == 0);

  auto b2 = enumerate_manifold(3, 2);
  REQUIRE(b2.dim() == 3);
  // subsets {12},{13},{23} in lexicographic order
  CHECK(b2.configs[0] == 0b011);
  CHECK(b2.configs[1] == 0b101);
  CHECK(b2.configs[2] == 0b110);
  for (int i = 0; i < 3; ++i) CHECK(b2.index_of(b2.configs[i]) == i);
  CHECK(b2.index_of(0b111) == -1);

  CHECK(enumerate_manifold(14, 7).dim() == 3432);
  CHECK_THROWS_AS(enumerate_manifold(3, 4), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_manifold(3, -1), std::invalid_argument);
}

TEST_CASE("apply_lowering on simple states") {
  auto b2 = enumerate_manifold(2, 2);
  auto b1 = enumerate_manifold(2, 1);
  auto b0 = enumerate_manifold(2, 0);

  VecC ee = VecC::Ones(1);  // |e1 e2>
  VecC low = apply_lowering(0, b2, b1, ee);
  REQUIRE(low.size() == 2);
  CHECK(low(b1.index_of(0b10)) == cplx(1.0));  // |e2>
  CHECK(low(b1.index_of(0b01)) == cplx(0.0));

  VecC sym(2);
  sym << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  VecC g = apply_lowering(0, b1, b0, sym);
  CHECK(std::abs(g(0) - 1.0 / std::sqrt(2.0)) <= 1e-15);
}

TEST_CASE("apply_lowering matches brute-force population sum") {
  // <sigma_eg^m sigma_ge^m> via lowering equals the direct sum of |amp|^2
  // over configurations containing m.
  auto b = enumerate_manifold(3, 2);
  auto blo = enumerate_manifold(3, 1);
  Rng rng(5);
  VecC v(b.dim());
  for (int i = 0; i < b.dim(); ++i)
    v(i) = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
  for (int m = 0; m < 3; ++m) {
    const VecC low = apply_lowering(m, b, blo, v);
    double direct = 0.0;
    for (int i = 0; i < b.dim(); ++i)
      if (b.configs[i] & (1ull << m)) direct += std::norm(v(i));
    CHECK(low.squaredNorm() == doctest::Approx(direct).epsilon(1e-13));
  }
}

TEST_CASE("raising is the adjoint of lowering") {
  auto bhi = enumerate_manifold(4, 3);
  auto blo = enumerate_manifold(4, 2);
  Rng rng(7);
  VecC a(bhi.dim()), b(blo.dim());
  for (int i = 0; i < bhi.dim(); ++i) a(i) = cplx(rng.uniform(), rng.uniform());
  for (int i = 0; i < blo.dim(); ++i) b(i) = cplx(rng.uniform(), rng.uniform());
  for (int site = 0; site < 4; ++site) {
    const cplx lhs = b.dot(apply_lowering(site, bhi, blo, a));
    const cplx rhs = apply_raising(site, blo, bhi, b).dot(a);
    CHECK(std::abs(lhs - rhs) <= 1e-13);
  }
}

TEST_CASE("project_heff single and full manifolds") {
  auto g = ArrayGeometry::chain(Model::FreeSpaceParallel, 4, 0.4 * kPi);
  auto cm = build_coupling_matrices(g);

  auto b1 = enumerate_manifold(4, 1);
  MatC h1 = project_heff(cm, b1);
  CHECK((h1 - cm.h_offdiag).norm() == 0.0);

  auto b4 = enumerate_manifold(4, 4);
  MatC h4 = project_heff(cm, b4);
  REQUIRE(h4.rows() == 1);
  CHECK(h4(0, 0) == cplx(0.0, -2.0));
}

TEST_CASE("project_heff matches a brute-force full-space Hamiltonian") {
  // Assemble H_eff over all 2^N basis states directly from the matrix
  // elements, check it is block diagonal in excitation number and that each
  // block equals project_heff.
  const int n = 5;
  auto g = ArrayGeometry::chain(Model::Waveguide, n, 0.3 * kPi);
  auto cm = build_coupling_matrices(g);

  const int dim = 1 << n;
  MatC full = MatC::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    full(s, s) = double(__builtin_popcount(unsigned(s))) * cplx(0.0, -0.5);
    for (int m = 0; m < n; ++m) {
      if (!(s & (1 << m))) continue;
      for (int nn = 0; nn < n; ++nn) {
        if (nn == m || (s & (1 << nn))) continue;
        const int t = (s & ~(1 << m)) | (1 << nn);
        full(t, s) += cm.h_offdiag(nn, m);
      }
    }
  }
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (__builtin_popcount(unsigned(i)) != __builtin_popcount(unsigned(j)))
        CHECK(full(i, j) == cplx(0.0));

  for (int m = 1; m <= n; ++m) {
    auto b = enumerate_manifold(n, m);
    MatC h = project_heff(cm, b);
    CHECK((h - h.transpose()).norm() == 0.0);
    MatC block(b.dim(), b.dim());
    for (int i = 0; i < b.dim(); ++i)
      for (int j = 0; j < b.dim(); ++j)
        block(i, j) = full(int(b.configs[i]), int(b.configs[j]));
    CHECK((h - block).norm() == 0.0);
  }
}

TEST_CASE("project_heff waveguide excitation-hole structure at N=3") {
  // m_ex=2 block equals the hole transform of the m_ex=1 block plus
  // (N-2)*(-i/2) on the diagonal.
  auto g = ArrayGeometry::chain(Model::Waveguide, 3, 0.2 * kPi);
  auto cm = build_coupling_matrices(g);
  auto b1 = enumerate_manifold(3, 1);
  auto b2 = enumerate_manifold(3, 2);
  MatC h1 = project_heff(cm, b1);
  MatC h2 = project_heff(cm, b2);
  const std::uint64_t full = 0b111;
  MatC h2_mapped(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int hi = b2.index_of(full & ~b1.configs[i]);
      const int hj = b2.index_of(full & ~b1.configs[j]);
      h2_mapped(hi, hj) = h1(i, j);
    }
  h2_mapped += double(3 - 2) * cplx(0.0, -0.5) * MatC::Identity(3, 3);
  CHECK((h2 - h2_mapped).norm() <= 1e-14);
}
