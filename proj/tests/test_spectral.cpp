#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "obsrobust/generate.hpp"
#include "obsrobust/oracle.hpp"
#include "obsrobust/spectral.hpp"

using namespace obsrobust;
using testing::cmat;
using testing::mat;

TEST_CASE("eigenstructure of a diagonal matrix") {
  EigenStructure es = eigenstructure(mat({{1, 0, 0}, {0, 2, 0}, {0, 0, 3}}));
  REQUIRE(es.p() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(es.pairs[i].value.real() == doctest::Approx(i + 1));
    CHECK(es.pairs[i].multiplicity == 1);
    CHECK(std::abs(es.pairs[i].basis(i, 0)) == doctest::Approx(1.0));
  }
  CHECK(es.max_multiplicity == 1);
}

TEST_CASE("eigenstructure of the identity") {
  EigenStructure es = eigenstructure(Matrix::Identity(2, 2));
  REQUIRE(es.p() == 1);
  CHECK(es.pairs[0].value.real() == doctest::Approx(1.0));
  CHECK(es.pairs[0].multiplicity == 2);
  CHECK(testing::column_rank(es.pairs[0].basis) == 2);
}

TEST_CASE("eigenstructure of P diag(I_k, 2, ..., n-k+1) P^-1") {
  DegeneracyInstance inst = gen_degeneracy_instance(mat({{1, 0, 2, 1, 0}, {0, 1, 1, 0, 3}}));
  EigenStructure es = eigenstructure(inst.sys.a());
  REQUIRE(es.p() == 4);
  CHECK(es.pairs[0].value.real() == doctest::Approx(1.0));
  CHECK(es.pairs[0].multiplicity == 2);
  for (int i = 1; i < 4; ++i) {
    CHECK(es.pairs[i].value.real() == doctest::Approx(i + 1.0));
    CHECK(es.pairs[i].multiplicity == 1);
  }
}

TEST_CASE("a Jordan block has geometric multiplicity one") {
  EigenStructure es = eigenstructure(mat({{2, 1, 0}, {0, 2, 1}, {0, 0, 2}}));
  REQUIRE(es.p() == 1);
  CHECK(es.pairs[0].multiplicity == 1);
  CHECK(es.pairs[0].algebraic_count == 3);
}

TEST_CASE("a slightly perturbed Jordan block stays one eigenvalue") {
  Matrix a = mat({{1, 1}, {1e-12, 1}});
  EigenStructure es = eigenstructure(a);
  REQUIRE(es.p() == 1);
  CHECK(es.pairs[0].multiplicity == 1);
}

TEST_CASE("complex eigenvalues are reported in conjugate pairs") {
  EigenStructure es = eigenstructure(mat({{0, 1, 0}, {-1, 0, 0}, {0, 0, 3}}));
  REQUIRE(es.p() == 3);
  int with_partner = 0;
  for (std::size_t i = 0; i < es.p(); ++i)
    if (es.pairs[i].conjugate_of >= 0) {
      ++with_partner;
      const auto& partner = es.pairs[es.pairs[i].conjugate_of];
      CHECK(std::abs(partner.value - std::conj(es.pairs[i].value)) < 1e-12);
      CHECK(partner.value.imag() > 0);
    }
  CHECK(with_partner == 1);
}

TEST_CASE("eigenbases are orthonormal null-space bases with small residual") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 7;
    DenseSystem sys = random_test_system(n, 3, 3, rng);
    Tolerances tol;
    EigenStructure es = eigenstructure(sys.a(), tol);
    int total = 0;
    for (const EigenPair& p : es.pairs) {
      const CMatrix& x = p.basis;
      CHECK((x.adjoint() * x - CMatrix::Identity(p.multiplicity, p.multiplicity)).norm() < 1e-10);
      CMatrix res = sys.a().cast<Complex>() * x - p.value * x;
      CHECK(res.norm() <= tol.residual_cap * std::max(1.0, sys.a().norm()));
      total += p.multiplicity;
    }
    // these matrices are diagonalizable by construction
    CHECK(total == n);
  }
}

TEST_CASE("sum of multiplicities falls short of n exactly for defective matrices") {
  EigenStructure diag = eigenstructure(mat({{1, 0}, {0, 1}}));
  EigenStructure jordan = eigenstructure(mat({{1, 1}, {0, 1}}));
  CHECK(diag.pairs[0].multiplicity == 2);
  CHECK(jordan.pairs[0].multiplicity == 1);
}

TEST_CASE("rank_tol examples") {
  CHECK(rank_tol(cmat({{1, 0}, {0, 1}}), 1e-9) == 2);
  CHECK(rank_tol(cmat({{1, 1}, {1, 1}}), 1e-9) == 1);
  CHECK(rank_tol(cmat({{1, 0}, {0, 1}, {1, 1}}), 1e-9) == 2);
  CHECK(rank_tol(cmat({{0, 0}}), 1e-9) == 0);
}

TEST_CASE("span_contains examples") {
  CHECK(span_contains(cmat({{1, 0}}), cmat({{2, 0}}), 1e-9));
  CHECK_FALSE(span_contains(cmat({{1, 0}}), cmat({{0, 1}}), 1e-9));
  CMatrix empty(0, 2);
  CHECK(span_contains(empty, cmat({{0, 0}}), 1e-9));
  CHECK_FALSE(span_contains(empty, cmat({{1, 0}}), 1e-9));
}

TEST_CASE("is_observable examples") {
  CHECK(is_observable(DenseSystem(mat({{1, 0}, {0, 2}}), Matrix::Identity(2, 2))));
  CHECK_FALSE(is_observable(DenseSystem(mat({{1, 0}, {0, 2}}), mat({{1, 0}}))));
  CHECK_FALSE(is_observable(DenseSystem(Matrix::Identity(2, 2), mat({{1, 1}}))));
}

TEST_CASE("is_observable agrees with the Kalman test on random systems") {
  std::mt19937_64 rng(23);
  int positives = 0, negatives = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + trial % 7;
    DenseSystem sys = random_test_system(n, 3, 2, rng);
    // drop a sensor half of the time to get unobservable cases as well
    Matrix c = sys.c();
    if (trial % 2 && c.rows() > 1) c = c.topRows(c.rows() - 1).eval();
    DenseSystem s2(sys.a(), c);
    bool by_eigen = is_observable(s2);
    bool kalman = kalman_observable(s2.a(), s2.c());
    CHECK(by_eigen == kalman);
    (by_eigen ? positives : negatives) += 1;
  }
  CHECK(positives > 0);
  CHECK(negatives > 0);
}

TEST_CASE("tolerances must be positive") {
  Tolerances t;
  t.tol_rank = 0.0;
  CHECK_THROWS_AS(t.validate(), ValidationError);
  CHECK_THROWS_AS(eigenstructure(mat({{1}}), t), ValidationError);
}

TEST_CASE("non-finite input is rejected") {
  Matrix a = mat({{1, 0}, {0, 1}});
  a(1, 1) = std::nan("");
  CHECK_THROWS_AS(eigenstructure(a), ValidationError);
}

TEST_CASE("a defective eigenvalue next to a semisimple one at the same point") {
  // blocks J3(0) and (0): algebraic 4, geometric 2
  Matrix d = Matrix::Zero(6, 6);
  d(0, 1) = 1.0;
  d(1, 2) = 1.0;
  d(4, 4) = 1.0;
  d(5, 5) = -2.0;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix p = Matrix::Identity(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) p(i, j) += 0.3 * u(rng);
  Matrix a = p * d * p.inverse();
  EigenStructure es = eigenstructure(a);
  const EigenPair* zero = nullptr;
  for (const auto& e : es.pairs)
    if (std::abs(e.value) < 1e-3) zero = &e;
  REQUIRE(zero != nullptr);
  CHECK(zero->multiplicity == 2);

  Eigen::FullPivLU<Matrix> lu(a);
  lu.setThreshold(1e-10);
  CMatrix truth = lu.kernel().cast<Complex>();
  REQUIRE(truth.cols() == 2);
  CHECK((truth - zero->basis * (zero->basis.adjoint() * truth)).norm() < 1e-8 * truth.norm());

  // a sensor that sees one of the two eigenvectors only
  Matrix c = (p.inverse()).row(3);
  CHECK(is_observable(DenseSystem(a, c)) == kalman_observable(a, c));
  CHECK_FALSE(is_observable(DenseSystem(a, c)));
}

TEST_CASE("a wide Jordan scatter folds but a nearby simple eigenvalue stays apart") {
  // J6(0) scatters to radius ~1e-3 in floating point; -0.01 is a true eigenvalue
  Matrix d = Matrix::Zero(8, 8);
  for (int i = 0; i < 5; ++i) d(i, i + 1) = 1.0;
  d(6, 6) = -0.01;
  d(7, 7) = 0.5;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix p = Matrix::Identity(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) p(i, j) += 0.3 * u(rng);
  Matrix a = p * d * p.inverse();
  EigenStructure es = eigenstructure(a);
  REQUIRE(es.p() == 3);
  CHECK(std::abs(es.pairs[0].value - Complex(-0.01, 0.0)) < 1e-9);
  CHECK(es.pairs[0].algebraic_count == 1);
  CHECK(std::abs(es.pairs[1].value) < 1e-9);
  CHECK(es.pairs[1].algebraic_count == 6);
  CHECK(es.pairs[1].multiplicity == 1);

  // sensor blind to the Jordan eigenvector
  Matrix c = p.inverse().row(6) + p.inverse().row(7);
  CHECK_FALSE(kalman_observable(a, c));
  CHECK_FALSE(is_observable(DenseSystem(a, c)));
}

TEST_CASE("a Jordan scatter around exact semisimple copies of the same eigenvalue") {
  // J3(0) and three 1x1 zero blocks: algebraic 6, geometric 4
  Matrix d = Matrix::Zero(8, 8);
  d(0, 1) = 1.0;
  d(1, 2) = 1.0;
  d(6, 6) = 0.7;
  d(7, 7) = -0.4;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix p = Matrix::Identity(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) p(i, j) += 0.3 * u(rng);
  Matrix a = p * d * p.inverse();
  EigenStructure es = eigenstructure(a);
  REQUIRE(es.p() == 3);
  const EigenPair& zero = es.pairs[1];
  CHECK(std::abs(zero.value) < 1e-9);
  CHECK(zero.algebraic_count == 6);
  CHECK(zero.multiplicity == 4);
}
