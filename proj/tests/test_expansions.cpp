#include <doctest.h>

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "expansion_tables.hpp"
#include "lieheat/expansions.hpp"

using namespace lieheat;
namespace tb = lieheat::tables;

namespace {

StepMeasure random_measure(std::mt19937& rng, int ngens, int natoms) {
  StepMeasure m;
  std::uniform_int_distribution<int> g(0, ngens - 1), num(1, 5), den(1, 3);
  for (int i = 0; i < natoms; ++i) m.atoms.push_back({g(rng), Rational(num(rng), den(rng))});
  for (auto& a : m.atoms) a.length.canonicalize();
  return m;
}

StepMeasure bch(int ngens = 2) {
  StepMeasure m;
  m.atoms = {{0, 1}, {1, 1}};
  (void)ngens;
  return m;
}

Mat random_mat(std::mt19937& rng, int n, double scale) {
  std::normal_distribution<double> nd(0, scale);
  Mat a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  return a;
}

Eigen::MatrixXcd to_eigen(const Mat& a) {
  Eigen::MatrixXcd e(a.n(), a.n());
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) e(i, j) = a(i, j);
  return e;
}

}  // namespace

TEST_CASE("toe of simple measures") {
  const int D = 5;
  StepMeasure one;
  one.atoms = {{0, 1}};
  CHECK(toe_formal(one, 2, D) == exp(FreeSeries::generator(2, D, 0)));
  FreeSeries e = toe_formal(bch(), 2, D);
  CHECK(e == exp(FreeSeries::generator(2, D, 0)) * exp(FreeSeries::generator(2, D, 1)));
  CHECK(log(e).degree_part(2) == Rational(1, 2) * bracket(FreeSeries::generator(2, D, 0), FreeSeries::generator(2, D, 1)));
  StepMeasure halves;
  halves.atoms = {{0, Rational(1, 2)}, {0, Rational(1, 2)}};
  CHECK(toe_formal(halves, 2, D) == exp(FreeSeries::generator(2, D, 0)));
}

TEST_CASE("measure validation") {
  StepMeasure bad;
  bad.atoms = {{0, 0}};
  CHECK_THROWS(toe_formal(bad, 2, 3));
  StepMeasure num;
  num.atoms = {{Mat::identity(2), 1}};
  CHECK_THROWS(toe_formal(num, 2, 3));
  StepMeasure big;
  big.atoms = {{3, 1}};
  CHECK_THROWS_AS(toe_formal(big, 2, 3), ShapeError);
}

TEST_CASE("toe agrees with the simplex definition at degree 2") {
  // degree-2 part = sum_{i<j} l_i l_j X_ai X_aj + sum_i l_i^2/2 X_ai^2
  std::mt19937 rng(21);
  for (int it = 0; it < 10; ++it) {
    StepMeasure m = random_measure(rng, 3, 4);
    FreeSeries ref(3, 2);
    for (std::size_t i = 0; i < m.atoms.size(); ++i) {
      const int a = std::get<int>(m.atoms[i].value);
      ref.add_term({a, a}, m.atoms[i].length * m.atoms[i].length / 2);
      for (std::size_t j = i + 1; j < m.atoms.size(); ++j)
        ref.add_term({a, std::get<int>(m.atoms[j].value)}, m.atoms[i].length * m.atoms[j].length);
    }
    CHECK(toe_formal(m, 3, 2).degree_part(2) == ref);
  }
}

TEST_CASE("Magnus degree 3 of the two-atom measure matches classical BCH") {
  auto t = expansion_terms(bch(), ExpansionKind::magnus, 2, 4);
  FreeSeries x = FreeSeries::generator(2, 4, 0), y = FreeSeries::generator(2, 4, 1);
  CHECK(t[3] == Rational(1, 12) * bracket(bracket(x, y), y) + Rational(1, 12) * bracket(x, bracket(x, y)));
  CHECK(t[4] == Rational(-1, 24) * bracket(y, bracket(x, bracket(x, y))));
}

TEST_CASE("printed tables for multilinear terms") {
  for (int n = 1; n <= 3; ++n) {
    CHECK(tb::multilinear_term(ExpansionKind::magnus, n) == tb::mu_table(n));
    CHECK(tb::multilinear_term(ExpansionKind::sym_inward, n) == tb::eta_inward_table(n));
    CHECK(tb::multilinear_term(ExpansionKind::sym_outward, n) == tb::eta_outward_table(n));
  }
  for (int n = 1; n <= 4; ++n) {
    CHECK(tb::multilinear_term(ExpansionKind::wilcox_left, n) == tb::zeta_left_table(n));
    CHECK(tb::multilinear_term(ExpansionKind::wilcox_right, n) == tb::negative_transpose(tb::zeta_left_table(n)));
  }
  CHECK(tb::multilinear_term(ExpansionKind::sym_inward, 4) == tb::eta_inward_table(4));
}

TEST_CASE("degree-4 Magnus equals the descent formula") {
  for (int n = 1; n <= 5; ++n) CHECK(tb::multilinear_term(ExpansionKind::magnus, n) == tb::mu_descents(n));
}

TEST_CASE("outward recursion equals the literal log-based reference") {
  std::mt19937 rng(4);
  CHECK(expansion_terms(StepMeasure::distinct_units(4), ExpansionKind::sym_outward, 4, 4) ==
        tb::outward_reference(toe_formal(StepMeasure::distinct_units(4), 4, 4)));
  for (int it = 0; it < 5; ++it) {
    StepMeasure m = random_measure(rng, 3, 3);
    FreeSeries toe = toe_formal(m, 3, 5);
    CHECK(expansion_terms_from_toe(toe, ExpansionKind::sym_outward) == tb::outward_reference(toe));
  }
}

TEST_CASE("random measures refactor exactly and give Lie terms") {
  std::mt19937 rng(99);
  for (int it = 0; it < 12; ++it) {
    const int ng = 2 + it % 2;
    StepMeasure m = random_measure(rng, ng, 1 + it % 4);
    FreeSeries toe = toe_formal(m, ng, 5);
    FreeSeries lin(ng, 5);
    for (const auto& a : m.atoms) lin = lin + a.length * FreeSeries::generator(ng, 5, std::get<int>(a.value));
    for (auto kind : all_expansions()) {
      auto t = expansion_terms_from_toe(toe, kind);
      CHECK(refactor(t, kind) == toe);
      CHECK(t[1] == lin);
      for (int n = 1; n <= 5; ++n) {
        CHECK(dynkin_is_lie(t[n]));
        CHECK(t[n] == t[n].degree_part(n));
      }
    }
  }
}

TEST_CASE("single atom has only a linear term") {
  StepMeasure one;
  one.atoms = {{1, Rational(3, 2)}};
  for (auto kind : all_expansions()) {
    CHECK(refactor_check(one, kind, 2, 5));
    auto t = expansion_terms(one, kind, 2, 5);
    for (int n = 2; n <= 5; ++n) CHECK(t[n].is_zero());
  }
  CHECK(refactor_check(bch(), ExpansionKind::magnus, 2, 6));
}

TEST_CASE("right Wilcox is the negative transpose of left Wilcox") {
  for (int n = 1; n <= 4; ++n)
    CHECK(tb::multilinear_term(ExpansionKind::wilcox_right, n) ==
          tb::negative_transpose(tb::multilinear_term(ExpansionKind::wilcox_left, n)));
}

TEST_CASE("scaling lengths by s scales degree-n terms by s^n") {
  std::mt19937 rng(5);
  const Rational s(2, 3);
  for (int it = 0; it < 4; ++it) {
    StepMeasure m = random_measure(rng, 2, 3), ms = m;
    for (auto& a : ms.atoms) a.length *= s;
    for (auto kind : all_expansions()) {
      auto t = expansion_terms(m, kind, 2, 5), ts = expansion_terms(ms, kind, 2, 5);
      Rational p = 1;
      for (int n = 1; n <= 5; ++n) {
        p *= s;
        CHECK(ts[n] == p * t[n]);
      }
    }
  }
}

TEST_CASE("eval_matrix substitutes products") {
  std::mt19937 rng(8);
  Mat a = random_mat(rng, 3, 1), b = random_mat(rng, 3, 1);
  FreeSeries w = FreeSeries::word(2, 3, {0, 1});
  CHECK(norm_max(eval_matrix(w, {a, b}) - a * b) < 1e-15);
  FreeSeries h = Rational(1, 2) * bracket(FreeSeries::generator(2, 3, 0), FreeSeries::generator(2, 3, 1));
  CHECK(norm_max(eval_matrix(h, {a, b}) - 0.5 * (a * b - b * a)) < 1e-14);
  CHECK_THROWS(eval_matrix(w, {a}));
  CHECK_THROWS(eval_matrix(w, {a, Mat::identity(2)}));
}

TEST_CASE("degree-2 Magnus term matches the bilinear Taylor coefficient of log(e^sA e^tB)") {
  std::mt19937 rng(12);
  Mat a = random_mat(rng, 3, 0.3), b = random_mat(rng, 3, 0.3);
  auto t = expansion_terms(bch(), ExpansionKind::magnus, 2, 2);
  Mat mine = eval_matrix(t[2], {a, b});
  // Cauchy contour extraction of the s t coefficient
  const int N = 16;
  const double r = 0.5;
  const std::complex<double> I(0, 1);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(3, 3);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) {
      std::complex<double> s = r * std::exp(2.0 * M_PI * I * double(j) / double(N));
      std::complex<double> u = r * std::exp(2.0 * M_PI * I * double(k) / double(N));
      Eigen::MatrixXcd l = ((s * to_eigen(a)).exp() * (u * to_eigen(b)).exp()).log();
      acc += l / (s * u);
    }
  acc /= double(N * N);
  double err = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) err = std::max(err, std::abs(acc(i, j) - mine(i, j)));
  CHECK(err < 1e-12);
}

TEST_CASE("domination of Magnus terms") {
  std::mt19937 rng(31);
  for (int it = 0; it < 5; ++it) {
    Mat a = random_mat(rng, 2, 1), b = random_mat(rng, 2, 1);
    const double total = 2 * opnorm(a) + 2 * opnorm(b);
    StepMeasure m;
    // lengths chosen so the Banach-Lie mass is 0.5
    m.atoms = {{(0.5 / total) * a, 1}, {(0.5 / total) * b, 1}};
    auto rep = domination_check(m, ExpansionKind::magnus, make_majorant(MajorantName::magnus_heat), 6);
    CHECK(rep.mass_g == doctest::Approx(0.5));
    CHECK(rep.rows[0].norm_g <= rep.mass_g + 1e-15);
    CHECK(rep.all_hold());
  }
  StepMeasure formal;
  formal.atoms = {{0, 1}};
  CHECK_THROWS(domination_check(formal, ExpansionKind::magnus, make_majorant(MajorantName::magnus_heat), 3));
}

TEST_CASE("kind names") {
  for (auto k : all_expansions()) CHECK(expansion_from_string(to_string(k)) == k);
  CHECK(expansion_from_string("sym-in") == ExpansionKind::sym_inward);
  CHECK_THROWS(expansion_from_string("fer"));
}

TEST_CASE("balanced readings of the malformed degree-4 rows match the recursion") {
  CHECK(tb::multilinear_term(ExpansionKind::magnus, 4) == tb::mu4_reading());
  CHECK(tb::multilinear_term(ExpansionKind::sym_outward, 4) == tb::eta_outward4_reading());
}
