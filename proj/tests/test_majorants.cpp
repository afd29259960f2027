#include <doctest.h>

#include <cmath>

#include "lieheat/majorants.hpp"

using namespace lieheat;

namespace {

/// Taylor coefficients of a - b*x - sqrt(p0 + p1 x + p2 x^2), with sqrt(p0) = s0 rational.
std::vector<Rational> sqrt_form_taylor(Rational a, Rational b, Rational s0, Rational p1, Rational p2, int nmax) {
  std::vector<Rational> p(nmax + 1, 0), s(nmax + 1, 0);
  p[0] = s0 * s0;
  if (nmax >= 1) p[1] = p1;
  if (nmax >= 2) p[2] = p2;
  s[0] = s0;
  for (int n = 1; n <= nmax; ++n) {
    Rational acc = p[n];
    for (int i = 1; i < n; ++i) acc -= s[i] * s[n - i];
    s[n] = acc / (2 * s0);
  }
  std::vector<Rational> c(nmax + 1);
  for (int n = 0; n <= nmax; ++n) c[n] = -s[n];
  c[0] += a;
  if (nmax >= 1) c[1] -= b;
  return c;
}

struct Oracle {
  MajorantName name;
  std::vector<Rational> taylor;
  double (*closed)(double);
  double radius;
};

std::vector<Oracle> oracles(int nmax) {
  return {
      {MajorantName::magnus_heat, sqrt_form_taylor(2, 0, 2, -4, 0, nmax),
       [](double x) { return 2 - 2 * std::sqrt(1 - x); }, 1.0},
      {MajorantName::wilcox_halfline, sqrt_form_taylor(1, 0, 1, -2, Rational(1, 2), nmax),
       [](double x) { return 1 - std::sqrt(1 - 2 * x + x * x / 2); }, 2 - std::sqrt(2.0)},
      {MajorantName::wilcox_improved, sqrt_form_taylor(2, 1, 2, -8, 3, nmax),
       [](double x) { return 2 - x - std::sqrt(3 * x * x - 8 * x + 4); }, 2.0 / 3.0},
      {MajorantName::sym_outward_improved, sqrt_form_taylor(4, 1, 4, -16, 2, nmax),
       [](double x) { return 4 - x - std::sqrt(2 * (4 - x) * (4 - x) - 16); }, 4 - 2 * std::sqrt(2.0)},
      {MajorantName::magnus_periodic_improved, sqrt_form_taylor(4, 1, 4, -16, 2, nmax),
       [](double x) { return 4 - x - std::sqrt(2 * x * x - 16 * x + 16); }, 4 - 2 * std::sqrt(2.0)},
  };
}

}  // namespace

TEST_CASE("magnus_heat leading coefficients") {
  auto g = series_coeffs(make_majorant(MajorantName::magnus_heat), 4);
  CHECK(g[1] == 1);
  CHECK(g[2] == Rational(1, 4));
  CHECK(g[3] == Rational(1, 8));
  CHECK(g[4] == Rational(5, 64));
  CHECK(series_coeffs(make_majorant(MajorantName::wilcox_halfline), 2)[2] == Rational(1, 4));
  for (auto n : all_majorants()) CHECK(series_coeffs(make_majorant(n), 1)[1] == 1);
  CHECK_THROWS(series_coeffs(make_majorant(MajorantName::magnus_heat), 0));
}

TEST_CASE("series equal the Taylor expansion of the closed forms") {
  for (const auto& o : oracles(30)) {
    auto g = series_coeffs(make_majorant(o.name), 30);
    CHECK(o.taylor[0] == 0);
    for (int n = 1; n <= 30; ++n) {
      CHECK(g[n] == o.taylor[n]);
      CHECK(g[n] >= 0);
    }
  }
}

TEST_CASE("radii") {
  for (const auto& o : oracles(1)) CHECK(std::abs(radius(make_majorant(o.name)) - o.radius) < 1e-12);
  CHECK(radius(make_majorant(MajorantName::wilcox_halfline)) == doctest::Approx(0.5857864376));
  CHECK(radius(make_majorant(MajorantName::sym_outward_improved)) == doctest::Approx(1.1715728753));
  // smaller delta moves the radius outward
  CHECK(radius(make_majorant(MajorantName::magnus_periodic_improved, Rational(1, 2))) >
        radius(make_majorant(MajorantName::magnus_periodic_improved)));
  CHECK_THROWS(make_majorant(MajorantName::magnus_periodic_improved, 0));
  CHECK_THROWS(make_majorant(MajorantName::magnus_periodic_improved, Rational(3, 2)));
}

TEST_CASE("closed forms") {
  auto mh = make_majorant(MajorantName::magnus_heat);
  CHECK(closed_form(mh, 0) == 0);
  CHECK(std::abs(closed_form(mh, 0.75) - 1.0) < 1e-12);
  CHECK(closed_form(make_majorant(MajorantName::sym_outward_improved), 0) == 0);
  for (const auto& o : oracles(1)) {
    auto s = make_majorant(o.name);
    for (double f : {0.1, 0.5, 0.9, 0.999}) CHECK(std::abs(closed_form(s, f * o.radius) - o.closed(f * o.radius)) < 1e-12);
  }
  CHECK_THROWS_AS(closed_form(mh, 1.01), OutOfRadiusError);
  CHECK_THROWS_AS(closed_form(mh, -0.1), OutOfRadiusError);
}

TEST_CASE("printed half-line form is not the branch through the origin") {
  auto printed = [](double x) { return 1 - std::sqrt((2 - x) * (2 - x) - 1); };
  CHECK(std::abs(printed(0.0)) > 0.5);
  CHECK(closed_form(make_majorant(MajorantName::wilcox_halfline), 0.0) == 0);
}

TEST_CASE("partial sums converge inside and blow past the branch outside") {
  for (auto n : all_majorants()) {
    auto s = make_majorant(n);
    auto g = series_coeffs(s, 400);
    const double r = radius(s);
    CHECK(std::abs(partial_sum(g, 0.9 * r) - closed_form(s, 0.9 * r)) < 1e-10);
    CHECK(std::abs(partial_sum(std::vector<Rational>(g.begin(), g.begin() + 21), 0.3 * r) - closed_form(s, 0.3 * r)) <
          1e-10);
    CHECK(partial_sum(g, 1.05 * r) > closed_form(s, r));
  }
}

TEST_CASE("improved majorant is coefficient-wise smaller") {
  auto a = series_coeffs(make_majorant(MajorantName::magnus_heat), 20);
  auto b = series_coeffs(make_majorant(MajorantName::sym_outward_improved), 20);
  for (int n = 1; n <= 20; ++n) CHECK(a[n] >= b[n]);
}

TEST_CASE("names") {
  for (auto n : all_majorants()) CHECK(majorant_from_string(to_string(n)) == n);
  CHECK_THROWS(majorant_from_string("nope"));
}
