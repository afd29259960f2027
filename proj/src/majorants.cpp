#include "lieheat/majorants.hpp"

#include <cmath>
#include <limits>

namespace lieheat {

MajorantSpec make_majorant(MajorantName name, const Rational& delta) {
  MajorantSpec s;
  s.name = name;
  s.c_linear = 1;
  switch (name) {
    case MajorantName::magnus_heat:
      s.c_quad_T2 = Rational(1, 4);
      s.c_cross = Rational(1, 2);
      s.c_square = Rational(1, 4);
      break;
    case MajorantName::wilcox_halfline:
      s.c_quad_T2 = Rational(1, 4);
      s.c_cross = 1;
      s.c_square = Rational(1, 2);
      break;
    case MajorantName::wilcox_improved:
      s.c_quad_T2 = Rational(1, 4);
      s.c_cross = 1;
      s.c_square = Rational(1, 4);
      break;
    case MajorantName::sym_outward_improved:
      s.c_quad_T2 = Rational(1, 4);
      s.c_cross = Rational(1, 2);
      s.c_square = Rational(1, 8);
      break;
    case MajorantName::magnus_periodic_improved:
      if (delta <= 0 || delta > 1) throw std::invalid_argument("delta must lie in (0,1]");
      s.delta = delta;
      s.c_quad_T2 = delta * Rational(1, 4);
      s.c_cross = Rational(1, 2);
      s.c_square = Rational(1, 8);
      break;
  }
  return s;
}

std::vector<MajorantName> all_majorants() {
  return {MajorantName::magnus_heat, MajorantName::wilcox_halfline, MajorantName::wilcox_improved,
          MajorantName::sym_outward_improved, MajorantName::magnus_periodic_improved};
}

std::string to_string(MajorantName n) {
  switch (n) {
    case MajorantName::magnus_heat: return "magnus_heat";
    case MajorantName::wilcox_halfline: return "wilcox_halfline";
    case MajorantName::wilcox_improved: return "wilcox_improved";
    case MajorantName::sym_outward_improved: return "sym_outward_improved";
    case MajorantName::magnus_periodic_improved: return "magnus_periodic_improved";
  }
  return "?";
}

MajorantName majorant_from_string(const std::string& s) {
  for (auto n : all_majorants())
    if (to_string(n) == s) return n;
  throw std::invalid_argument("unknown majorant spec: " + s);
}

std::vector<Rational> series_coeffs(const MajorantSpec& spec, int nmax) {
  if (nmax < 1) throw std::invalid_argument("nmax must be >= 1");
  std::vector<Rational> g(nmax + 1, 0), h(nmax + 1, 0);
  for (int n = 1; n <= nmax; ++n) {
    Rational v = 0;
    if (n == 1) v += spec.c_linear;
    if (n == 2) v += spec.c_quad_T2;
    v += spec.c_cross * h[n - 1];
    Rational sq = 0;
    for (int i = 1; i < n; ++i) sq += h[i] * h[n - i];
    v += spec.c_square * sq;
    g[n] = v;
    h[n] = (n == 1) ? v - 1 : v;
  }
  return g;
}

namespace {

struct Quad {
  double cl, cq, cc, cs;
};

Quad coeffs(const MajorantSpec& s) {
  return {s.c_linear.get_d(), s.c_quad_T2.get_d(), s.c_cross.get_d(), s.c_square.get_d()};
}

double discriminant(const Quad& q, double x) {
  const double a = 1.0 - q.cc * x;
  return a * a - 4.0 * q.cs * ((q.cl - 1.0) * x + q.cq * x * x);
}

}  // namespace

double radius(const MajorantSpec& spec) {
  const Quad q = coeffs(spec);
  // D(x) = A x^2 - B x + 1
  const double A = q.cc * q.cc - 4.0 * q.cs * q.cq;
  const double B = 2.0 * q.cc + 4.0 * q.cs * (q.cl - 1.0);
  if (std::abs(A) < 1e-300) return B > 0 ? 1.0 / B : std::numeric_limits<double>::infinity();
  const double disc = B * B - 4.0 * A;
  if (disc < 0) return std::numeric_limits<double>::infinity();
  const double s = std::sqrt(disc);
  // Stable pair of roots of A x^2 - B x + 1.
  const double r1 = 2.0 / (B + std::copysign(s, B));
  const double r2 = 1.0 / (A * r1);
  double best = std::numeric_limits<double>::infinity();
  for (double r : {r1, r2})
    if (r > 0 && r < best) best = r;
  return best;
}

double closed_form(const MajorantSpec& spec, double x) {
  const double r = radius(spec);
  if (x < 0 || x > r) throw OutOfRadiusError("closed_form: x outside [0, radius]");
  const Quad q = coeffs(spec);
  const double D = std::max(0.0, discriminant(q, x));
  const double h = 2.0 * (q.cq * x * x + (q.cl - 1.0) * x) / ((1.0 - q.cc * x) + std::sqrt(D));
  return x + h;
}

double partial_sum(const std::vector<Rational>& g, double x) {
  double s = 0, p = 1;
  for (std::size_t n = 1; n < g.size(); ++n) {
    p *= x;
    s += g[n].get_d() * p;
  }
  return s;
}

}  // namespace lieheat
