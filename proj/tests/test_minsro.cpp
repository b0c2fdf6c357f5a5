#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "obsrobust/generate.hpp"
#include "obsrobust/minsro.hpp"
#include "obsrobust/oracle.hpp"

using namespace obsrobust;
using testing::cmat;
using testing::mat;

namespace {

SensorTable table_of(const CMatrix& y) {
  SensorTable t;
  t.y = y;
  t.row_scale.assign(y.rows(), 1.0);
  return t;
}

CMatrix random_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

TEST_CASE("sensor_table examples") {
  SensorTable t = sensor_table(Matrix::Identity(2, 2), cmat({{1}, {0}}));
  CHECK(t.y == cmat({{1}, {0}}));
  CHECK(sensor_table(mat({{1, 1}}), CMatrix::Identity(2, 2)).y == cmat({{1, 1}}));
  Matrix c = mat({{1, 0}, {0, 1}, {1, 1}});
  CHECK(sensor_table(c, CMatrix::Identity(2, 2)).y == c.cast<Complex>());
  CHECK_THROWS_AS(sensor_table(c, CMatrix::Identity(3, 3)), ValidationError);
}

TEST_CASE("closure examples") {
  SensorTable a = table_of(cmat({{1, 0}, {0, 1}, {1, 1}}));
  CHECK(closure(a, SensorSubset({0}), 1e-9) == SensorSubset({0}));
  SensorTable b = table_of(cmat({{1, 0}, {2, 0}, {0, 1}}));
  CHECK(closure(b, SensorSubset({0}), 1e-9) == SensorSubset({0, 1}));
  CHECK(closure(a, SensorSubset{}, 1e-9).empty());
  SensorTable z = table_of(cmat({{1, 0}, {0, 0}, {0, 1}}));
  CHECK(closure(z, SensorSubset{}, 1e-9) == SensorSubset({1}));
}

TEST_CASE("minsro_eig examples") {
  Tolerances tol;
  EigSearch s = minsro_eig(table_of(cmat({{1, 0}, {0, 1}, {1, 1}})), 2, tol);
  CHECK(s.r_kappa == 2);
  CHECK(s.layer_sizes.size() == 2);

  EigSearch simple = minsro_eig(table_of(cmat({{1}, {0}, {2}})), 1, tol);
  CHECK(simple.r_kappa == 2);
  CHECK(simple.removal == SensorSubset({0, 2}));
}

TEST_CASE("minsro_eig on random complex tables matches subset enumeration") {
  std::mt19937_64 rng(3);
  Tolerances tol;
  for (int trial = 0; trial < 40; ++trial) {
    CMatrix y = random_complex(6, 3, rng);
    // make some rows dependent so the answer is not always r - k + 1
    if (trial % 3 == 0) y.row(4) = y.row(0) * Complex(2.0, -1.0);
    if (trial % 4 == 0) y.row(5) = y.row(1) + y.row(2);
    if (trial % 5 == 0) y.row(3).setZero();
    SensorTable t = table_of(y);
    EigSearch s = minsro_eig(t, 3, tol);
    CHECK(s.r_kappa == testing::min_rows_to_break(y));
    // the reported set really breaks the rank
    CMatrix kept(6 - s.r_kappa, 3);
    int k = 0;
    for (int j = 0; j < 6; ++j)
      if (!s.removal.contains(j)) kept.row(k++) = y.row(j);
    CHECK(testing::column_rank(kept) < 3);
  }
}

TEST_CASE("tree leaves are rank k-1 closures") {
  std::mt19937_64 rng(8);
  CMatrix y = random_complex(7, 3, rng);
  y.row(6) = y.row(0) * 3.0;
  SensorTable t = table_of(y);
  SearchOptions opts;
  opts.keep_leaves = true;
  EigSearch s = minsro_eig(t, 3, Tolerances{}, opts);
  REQUIRE_FALSE(s.leaves.empty());
  for (const SensorSubset& leaf : s.leaves) {
    CMatrix rows(leaf.size(), 3);
    for (std::size_t i = 0; i < leaf.size(); ++i) rows.row(i) = y.row(leaf.indices()[i]);
    CHECK(testing::column_rank(rows) == 2);
    CHECK(closure(t, leaf, 1e-9) == leaf);
  }
}

TEST_CASE("deduplication modes agree") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix y = random_complex(7, 3, rng);
    y.row(3) = y.row(1) - y.row(2);
    y.row(5) = y.row(0) * 0.5;
    SensorTable t = table_of(y);
    int results[3];
    std::size_t leaves[3];
    int i = 0;
    for (DedupMode mode : {DedupMode::none, DedupMode::per_parent, DedupMode::layer}) {
      SearchOptions opts;
      opts.dedup = mode;
      EigSearch s = minsro_eig(t, 3, Tolerances{}, opts);
      results[i] = s.r_kappa;
      leaves[i] = s.layer_sizes.back();
      ++i;
    }
    CHECK(results[0] == results[1]);
    CHECK(results[1] == results[2]);
    CHECK(leaves[2] <= leaves[1]);
    CHECK(leaves[1] <= leaves[0]);
  }
}

TEST_CASE("minsro on small systems") {
  RobustnessReport a = minsro(DenseSystem(mat({{1, 0}, {0, 2}}), Matrix::Identity(2, 2)));
  CHECK(a.observable);
  CHECK(a.r_min == 1);
  CHECK(a.f_min.size() == 1);
  CHECK(a.s_robust == 0);
  CHECK(a.attack_tolerance == 0);

  RobustnessReport b = minsro(DenseSystem(Matrix::Identity(2, 2), mat({{1, 0}, {0, 1}, {1, 1}})));
  CHECK(b.r_min == 2);
  CHECK(b.s_robust == 1);
  CHECK(b.attack_tolerance == 0);
  REQUIRE(b.per_eigenvalue.size() == 1);
  CHECK(b.per_eigenvalue[0].multiplicity == 2);
  CHECK(b.per_eigenvalue[0].layer_sizes.size() == 2);
}

TEST_CASE("report invariants") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    DenseSystem sys = random_test_system(3 + trial % 4, 4, 2, rng);
    RobustnessReport rep = minsro(sys);
    REQUIRE(rep.observable);
    int m = sys.r();
    for (const auto& e : rep.per_eigenvalue) m = std::min(m, e.r_i);
    CHECK(rep.r_min == m);
    CHECK(static_cast<int>(rep.f_min.size()) == rep.r_min);
    CHECK(rep.s_robust == rep.r_min - 1);
    CHECK(rep.attack_tolerance == (rep.r_min - 1) / 2);
    CHECK(rep.per_eigenvalue[rep.eigen_index].r_i == rep.r_min);
  }
}

TEST_CASE("unobservable input follows the degenerate policy") {
  RobustnessReport rep = minsro(DenseSystem(mat({{1, 0}, {0, 2}}), mat({{1, 0}})));
  CHECK_FALSE(rep.observable);
  CHECK(rep.r_min == 0);
  CHECK(rep.f_min.empty());
  CHECK(rep.s_robust == -1);
  CHECK(rep.attack_tolerance == 0);
}

TEST_CASE("multiplicity above the cap aborts") {
  Matrix a = Matrix::Identity(10, 10);
  a(9, 9) = 2.0;
  Matrix c = Matrix::Identity(10, 10);
  CHECK_THROWS_AS(minsro(DenseSystem(a, c)), CapExceeded);
  SearchOptions opts;
  opts.max_multiplicity_cap = 9;
  CHECK(minsro(DenseSystem(a, c), Tolerances{}, opts).r_min == 1);
}

TEST_CASE("simple-spectrum shortcut agrees with the tree search") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    DenseSystem sys = random_test_system(4, 4, 1, rng);
    CHECK(minsro_simple_spectrum(sys) == minsro(sys).r_min);
  }
  CHECK_THROWS_AS(minsro_simple_spectrum(DenseSystem(Matrix::Identity(2, 2), Matrix::Identity(2, 2))),
                  ValidationError);
}

TEST_CASE("conjugate eigenvalues give the same r_kappa") {
  std::mt19937_64 rng(31);
  int pairs_seen = 0;
  for (int trial = 0; trial < 30; ++trial) {
    DenseSystem sys = random_test_system(6, 4, 2, rng);
    SearchOptions opts;
    opts.search_conjugates = true;
    RobustnessReport rep = minsro(sys, Tolerances{}, opts);
    EigenStructure es = eigenstructure(sys.a());
    for (std::size_t i = 0; i < es.p(); ++i) {
      int j = es.pairs[i].conjugate_of;
      if (j < 0) continue;
      ++pairs_seen;
      CHECK(rep.per_eigenvalue[i].r_i == rep.per_eigenvalue[j].r_i);
    }
    CHECK(minsro(sys).r_min == rep.r_min);
  }
  CHECK(pairs_seen > 0);
}

TEST_CASE("thread count does not change the answer") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    DenseSystem sys = random_test_system(7, 6, 3, rng);
    SearchOptions one, four;
    four.threads = 4;
    RobustnessReport a = minsro(sys, Tolerances{}, one);
    RobustnessReport b = minsro(sys, Tolerances{}, four);
    CHECK(a.r_min == b.r_min);
    CHECK(a.f_min == b.f_min);
    CHECK(a.eigen_index == b.eigen_index);
  }
}

TEST_CASE("cost variant") {
  DenseSystem sys(Matrix::Identity(2, 2), mat({{1, 0}, {0, 1}, {1, 1}}));
  RobustnessReport unit = minsro_cost(sys, CostVector::unit(3));
  REQUIRE(unit.r_c_min);
  CHECK(*unit.r_c_min == doctest::Approx(unit.r_min));

  // rows 1 and 3 are cheap: removing them leaves only (0, 1)
  RobustnessReport w = minsro_cost(sys, CostVector({1.0, 10.0, 1.0}));
  CHECK(*w.r_c_min == doctest::Approx(2.0));
  CHECK(*w.f_c_min == SensorSubset({0, 2}));
  CHECK(w.r_min == 2);

  CHECK_THROWS_AS(minsro_cost(sys, CostVector({1.0})), ValidationError);
}

TEST_CASE("cost variant matches the cost oracle") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 15; ++trial) {
    DenseSystem sys = random_test_system(4, 5, 2, rng);
    std::vector<double> c(5);
    for (double& v : c) v = u(rng);
    CostVector costs(c);
    RobustnessReport rep = minsro_cost(sys, costs);
    OracleResult orc = brute_force_cost(sys, costs);
    CHECK(*rep.r_c_min == doctest::Approx(orc.cost).epsilon(1e-12));
  }
}

TEST_CASE("cost variant picks the cheaper singleton") {
  RobustnessReport rep = minsro_cost(DenseSystem(mat({{1, 0}, {0, 2}}), Matrix::Identity(2, 2)),
                                     CostVector({5.0, 1.0}));
  CHECK(*rep.r_c_min == doctest::Approx(1.0));
  CHECK(*rep.f_c_min == SensorSubset({1}));
  CHECK(rep.f_min == SensorSubset({0}));
}

TEST_CASE("scaling a sensor row changes neither r_min nor F_min") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (int trial = 0; trial < 15; ++trial) {
    DenseSystem sys = random_test_system(5, 5, 2, rng);
    Matrix c = sys.c();
    c.row(trial % 5) *= (trial % 2 ? -1.0 : 1.0) * u(rng);
    RobustnessReport a = minsro(sys);
    RobustnessReport b = minsro(DenseSystem(sys.a(), c));
    CHECK(a.r_min == b.r_min);
    CHECK(a.f_min == b.f_min);
  }
}

TEST_CASE("no smaller removal breaks observability") {
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 15; ++trial) {
    DenseSystem sys = random_test_system(5, 5, 3, rng);
    RobustnessReport rep = minsro(sys);
    OracleResult orc = brute_force_numeric(sys);
    CHECK(rep.r_min == orc.r_min);
    if (rep.r_min < sys.r()) CHECK_FALSE(is_observable(sys.without(rep.f_min)));
  }
}
