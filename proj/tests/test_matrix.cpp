#include <cmath>

#include "cpk/matrix.hpp"
#include "cpk/rng.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cpk;
using cpk::test::max_abs_diff;
using cpk::test::naive_product;

namespace {

CMatrix from_rows(std::size_t r, std::size_t c, std::initializer_list<complex_t> vals) {
  return CMatrix(r, c, cvector_t(vals));
}

// independent spectral-norm oracle: power iteration on A'A
double spectral_norm_oracle(const CMatrix& a, std::size_t iters = 2000) {
  CMatrix g = a.adjoint() * a;
  CVector x(g.cols());
  for (std::size_t i = 0; i < x.dim(); ++i)
    x[i] = complex_t(1.0 / std::sqrt(double(x.dim())), 0.1 * double(i + 1));
  double n = x.norm();
  for (auto& z : x.data()) z /= n;
  double lam = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    CVector y = g * x;
    lam = y.norm();
    if (lam == 0.0) return 0.0;
    for (auto& z : y.data()) z /= lam;
    x = y;
  }
  return std::sqrt(lam);
}

}  // namespace

TEST_CASE("vectorize stacks columns") {
  CHECK(vectorize(CMatrix::identity(2)).data() == cvector_t{1.0, 0.0, 0.0, 1.0});
  CMatrix a = from_rows(2, 2, {0.0, 1.0, 0.0, 0.0});
  CHECK(vectorize(a).data() == cvector_t{0.0, 0.0, 1.0, 0.0});

  // random 3x2 against the index formula
  auto rng = SeedStream(11).stream("vec");
  CMatrix b(3, 2);
  for (auto& z : b.data())
    z = complex_t(std::uniform_real_distribution<>(-1, 1)(rng),
                  std::uniform_real_distribution<>(-1, 1)(rng));
  CVector v = vectorize(b);
  REQUIRE(v.dim() == 6);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(v[i + j * 3] == b(i, j));

  CMatrix back = unvectorize(v, 3, 2);
  CHECK(max_abs_diff(back, b) == 0.0);
}

TEST_CASE("kron index formula") {
  CHECK(max_abs_diff(kron(CMatrix::identity(2), CMatrix::identity(2)), CMatrix::identity(4)) == 0.0);

  CMatrix e00 = from_rows(2, 2, {1.0, 0.0, 0.0, 0.0});  // e1 e1^T
  CMatrix e11 = from_rows(2, 2, {0.0, 0.0, 0.0, 1.0});  // e2 e2^T
  CMatrix k = kron(e00, e11);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(k(i, j) == ((i == 1 && j == 1) ? complex_t(1.0) : complex_t(0.0)));

  auto rng = SeedStream(11).stream("kron");
  CMatrix a = random_ginibre(3, rng), b = random_ginibre(2, rng);
  CMatrix kk = kron(a, b);
  for (std::size_t ia = 0; ia < 3; ++ia)
    for (std::size_t ja = 0; ja < 3; ++ja)
      for (std::size_t ib = 0; ib < 2; ++ib)
        for (std::size_t jb = 0; jb < 2; ++jb)
          CHECK(kk(ia * 2 + ib, ja * 2 + jb) == a(ia, ja) * b(ib, jb));
}

TEST_CASE("vec/kron compatibility: vec(B rho C') = kron(conj(C), B) vec(rho)") {
  auto rng = SeedStream(12).stream("veckron");
  for (std::size_t n : {std::size_t{2}, std::size_t{3}}) {
    for (int rep = 0; rep < 20; ++rep) {
      CMatrix b = random_ginibre(n, rng), c = random_ginibre(n, rng), rho = random_ginibre(n, rng);
      CVector lhs = vectorize(naive_product(naive_product(b, rho), c.adjoint()));
      CVector rhs = kron(c.conjugate(), b) * vectorize(rho);
      CHECK(test::vec_dist(lhs.data(), rhs.data()) <
            1e-12 * frobenius_norm(b) * frobenius_norm(c) * frobenius_norm(rho));
    }
  }
}

TEST_CASE("spectral norm") {
  CHECK(spectral_norm(CMatrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral_norm(from_rows(2, 2, {3.0, 0.0, 0.0, 1.0})) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(spectral_norm(from_rows(2, 2, {0.0, 2.0, 0.0, 0.0})) == doctest::Approx(2.0).epsilon(1e-12));

  auto rng = SeedStream(13).stream("snorm");
  for (int rep = 0; rep < 10; ++rep) {
    CMatrix a = random_ginibre(5, rng);
    double got = spectral_norm(a);
    double want = spectral_norm_oracle(a);
    CHECK(std::abs(got - want) <= 1e-10 * want);
  }
}

TEST_CASE("frobenius norm and norm ordering") {
  CHECK(frobenius_norm(CMatrix::identity(2)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(frobenius_norm(from_rows(2, 2, {1.0, 1.0, 1.0, 1.0})) == doctest::Approx(2.0));

  auto rng = SeedStream(14).stream("frob");
  for (int rep = 0; rep < 50; ++rep) {
    CMatrix a = random_ginibre(4, rng);
    CHECK(spectral_norm(a) <= frobenius_norm(a) + 1e-12);
  }
}

TEST_CASE("herm_eig") {
  auto e = herm_eig(from_rows(2, 2, {1.0, 0.0, 0.0, -1.0}));
  CHECK(e.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(e.eigenvalues[1] == doctest::Approx(1.0));

  auto x = herm_eig(from_rows(2, 2, {0.0, 1.0, 1.0, 0.0}));
  CHECK(x.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(x.eigenvalues[1] == doctest::Approx(1.0));
  // eigenvectors (1, -1)/sqrt2 and (1, 1)/sqrt2 up to phase
  const double s = 1.0 / std::sqrt(2.0);
  complex_t ov0 = std::conj(x.eigenvectors(0, 0)) * s - std::conj(x.eigenvectors(1, 0)) * s;
  complex_t ov1 = std::conj(x.eigenvectors(0, 1)) * s + std::conj(x.eigenvectors(1, 1)) * s;
  CHECK(std::abs(ov0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(ov1) == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(herm_eig(from_rows(2, 2, {0.0, 1.0, 0.0, 0.0})), Error);
}

TEST_CASE("herm_eig reconstruction/orthonormality, 1000 random Hermitians") {
  auto rng = SeedStream(15).stream("herm");
  std::uniform_int_distribution<std::size_t> dim_dist(2, 16);
  for (int rep = 0; rep < 1000; ++rep) {
    std::size_t n = dim_dist(rng);
    CMatrix g = random_ginibre(n, rng);
    CMatrix h = g + g.adjoint();
    auto e = herm_eig(h);
    CHECK(opnorm_diff_identity(e.eigenvectors.adjoint() * e.eigenvectors) <= 1e-9);
    CMatrix recon(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        complex_t acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          acc += e.eigenvectors(i, k) * e.eigenvalues[k] * std::conj(e.eigenvectors(j, k));
        recon(i, j) = acc;
      }
    CHECK(spectral_norm(h - recon) <= 1e-9 * std::max(1.0, spectral_norm(h)));
    for (std::size_t k = 1; k < n; ++k) CHECK(e.eigenvalues[k - 1] <= e.eigenvalues[k]);
  }
}

TEST_CASE("unitary dilation") {
  CMatrix u1 = unitary_dilation(from_rows(1, 1, {1.0}));
  CHECK(max_abs_diff(u1, from_rows(2, 2, {1.0, 0.0, 0.0, -1.0})) <= 1e-12);

  CMatrix u0 = unitary_dilation(CMatrix::zero(2, 2));
  CMatrix want(4, 4);
  want(0, 2) = want(1, 3) = want(2, 0) = want(3, 1) = 1.0;
  CHECK(max_abs_diff(u0, want) <= 1e-12);

  auto rng = SeedStream(16).stream("udil");
  for (int rep = 0; rep < 25; ++rep) {
    CMatrix a = random_contraction(2, rng);
    CMatrix u = unitary_dilation(a);
    CHECK(opnorm_diff_identity(naive_product(u.adjoint(), u)) <= 1e-9);
  }

  CHECK_THROWS_AS(unitary_dilation(from_rows(1, 1, {1.5})), Error);
  try {
    unitary_dilation(from_rows(1, 1, {1.5}));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotContraction);
  }
}

TEST_CASE("hermitian dilation") {
  CHECK(max_abs_diff(hermitian_dilation(from_rows(1, 1, {1.0})),
                     from_rows(2, 2, {0.0, 1.0, 1.0, 0.0})) == 0.0);
  CHECK(max_abs_diff(hermitian_dilation(CMatrix::zero(2, 2)), CMatrix::zero(4, 4)) == 0.0);

  auto rng = SeedStream(17).stream("hdil");
  for (int rep = 0; rep < 10; ++rep) {
    CMatrix a = random_ginibre(3, rng);
    CMatrix h = hermitian_dilation(a);
    auto eig = herm_eig(h);
    // eigenvalues of H are +-singular values of A; singular values via A'A
    auto gram = herm_eig(a.adjoint() * a);
    std::vector<double> expect;
    for (double lam : gram.eigenvalues) expect.push_back(std::sqrt(std::max(0.0, lam)));
    std::sort(expect.begin(), expect.end());
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(eig.eigenvalues[5 - k] == doctest::Approx(expect[2 - k]).epsilon(1e-9));
      CHECK(eig.eigenvalues[k] == doctest::Approx(-expect[2 - k]).epsilon(1e-9));
    }
    CHECK(spectral_norm(h) == doctest::Approx(spectral_norm(a)).epsilon(1e-10));
  }
}

TEST_CASE("v_a_matrix block structure and permutation identity") {
  // A = I_m: diag(I, -I, I, -I)
  CMatrix v = v_a_matrix(CMatrix::identity(2));
  CMatrix want(8, 8);
  for (std::size_t i = 0; i < 2; ++i) {
    want(i, i) = 1.0;
    want(2 + i, 2 + i) = -1.0;
    want(4 + i, 4 + i) = 1.0;
    want(6 + i, 6 + i) = -1.0;
  }
  CHECK(max_abs_diff(v, want) <= 1e-12);

  // A = 0.5 scalar: U_{0.5} twice
  CMatrix vh = v_a_matrix(from_rows(1, 1, {0.5}));
  const double r = std::sqrt(0.75);
  CMatrix w4(4, 4);
  w4(0, 0) = 0.5; w4(0, 1) = r; w4(1, 0) = r; w4(1, 1) = -0.5;
  w4(2, 2) = 0.5; w4(2, 3) = r; w4(3, 2) = r; w4(3, 3) = -0.5;
  CHECK(max_abs_diff(vh, w4) <= 1e-12);

  // random contraction: V_A = Pi1 U_H Pi2 with the explicit two-qubit permutations
  auto rng = SeedStream(18).stream("vam");
  for (int rep = 0; rep < 10; ++rep) {
    std::size_t m = 1 + rep % 3;
    CMatrix a = random_contraction(m, rng);
    CMatrix uh = unitary_dilation(hermitian_dilation(a));
    auto block_perm = [&](const std::vector<std::size_t>& p) {
      CMatrix pm(4 * m, 4 * m);
      for (std::size_t blk = 0; blk < 4; ++blk)
        for (std::size_t i = 0; i < m; ++i) pm(p[blk] * m + i, blk * m + i) = 1.0;
      return pm;
    };
    CMatrix pi1 = block_perm({0, 2, 3, 1});
    CMatrix pi2 = block_perm({1, 2, 0, 3});
    CMatrix lhs = v_a_matrix(a);
    CMatrix rhs = naive_product(naive_product(pi1, uh), pi2);
    CHECK(max_abs_diff(lhs, rhs) <= 1e-9);
  }
}

TEST_CASE("matrix_power_oracle") {
  CHECK(max_abs_diff(matrix_power_oracle(CMatrix::identity(3), 5), CMatrix::identity(3)) == 0.0);
  CHECK(max_abs_diff(matrix_power_oracle(from_rows(1, 1, {0.5}), 2), from_rows(1, 1, {0.25})) <= 1e-15);

  auto rng = SeedStream(19).stream("pow");
  CMatrix a = random_ginibre(4, rng);
  CMatrix want = naive_product(naive_product(a, a), a);
  CHECK(max_abs_diff(matrix_power_oracle(a, 3), want) <= 1e-12 * frobenius_norm(want));
}

TEST_CASE("entry validation") {
  CHECK_THROWS_AS(CMatrix(2, 2, cvector_t{1.0, 2.0, 3.0}), Error);
  CMatrix bad(1, 1);
  bad(0, 0) = complex_t(std::nan(""), 0.0);
  CHECK(!bad.is_finite());
  CHECK(CMatrix::identity(4).is_finite());
}
