#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "lieheat/kernels.hpp"

using namespace lieheat;
namespace bq = boost::math::quadrature;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

double gk(const std::function<double(double)>& f, double a, double b) {
  return bq::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
}

// Integral of f over a domain, split at the kernel peak.
double integrate_domain(Domain d, const std::function<double(double)>& f, double peak) {
  switch (d) {
    case Domain::interval01:
    case Domain::circle: return gk(f, 0, peak) + gk(f, peak, 1);
    case Domain::halfline: return gk(f, 0, peak) + gk(f, peak, peak + 40);
    case Domain::line: return gk(f, peak - 40, peak) + gk(f, peak, peak + 40);
  }
  return 0;
}

double raw_gauss(double u, double t, double k) { return std::exp(-u * u / (4 * k * t)) / std::sqrt(4 * kPi * k * t); }

double circle_images(double x, double y, double t, double k) {
  double s = 0;
  for (int p = -400; p <= 400; ++p) s += raw_gauss(x - y - p, t, k);
  return s;
}

// Literal even-n image sum for the circle interaction amplitude.
double s_plus_literal(double y, double t, double m) {
  double s = 0;
  if (t < 1e-6) return 0.0;
  const int lim = 2 * static_cast<int>(std::sqrt(400 * t / m)) + 3;
  for (int n = -2 * lim; n <= 2 * lim; n += 2) {
    const double u = 2 * y + n;
    s += 0.25 * std::sqrt(m) * u / (std::sqrt(2 * kPi) * std::pow(t, 1.5)) * std::exp(-m * u * u / (8 * t));
  }
  return s;
}

double s_minus_literal(double y, double t, double m) {
  double s = 0;
  if (t < 1e-6) return 0.0;
  const int lim = 2 * static_cast<int>(std::sqrt(400 * t / m)) + 3;
  for (int n = -2 * lim - 1; n <= 2 * lim; n += 2) {
    const double u = 2 * y + n;
    s += 0.25 * std::sqrt(m) * u / (std::sqrt(2 * kPi) * std::pow(t, 1.5)) * std::exp(-m * u * u / (8 * t));
  }
  return s;
}

}  // namespace

TEST_CASE("gaussian peak normalization") {
  for (double k : {0.3, 1.0, 2.5}) CHECK(std::abs(kernel(Domain::line, 0.4, 0.4, 1 / (4 * kPi * k), k) - 1) < 1e-14);
  CHECK_THROWS(kernel(Domain::line, 0, 0, 0, 1));
  CHECK_THROWS(kernel(Domain::line, 0, 0, 1, -1));
  CHECK_THROWS(kernel(Domain::interval01, 1.5, 0, 1, 1));
  CHECK_THROWS(kernel(Domain::halfline, -0.1, 0, 1, 1));
}

TEST_CASE("kernels conserve mass") {
  for (Domain d : {Domain::interval01, Domain::halfline, Domain::line, Domain::circle})
    for (double t : {0.003, 0.05, 0.4, 2.0})
      for (double x : {0.0, 0.2, 0.7}) {
        const double total = integrate_domain(d, [&](double y) { return kernel(d, x, y, t, 0.8); }, x);
        CHECK(std::abs(total - 1) < 1e-10);
      }
}

TEST_CASE("kernels are symmetric and positive") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (Domain d : {Domain::interval01, Domain::halfline, Domain::line, Domain::circle})
    for (int i = 0; i < 50; ++i) {
      const double x = u(rng), y = u(rng), t = 0.01 + u(rng);
      CHECK(std::abs(kernel(d, x, y, t, 0.7) - kernel(d, y, x, t, 0.7)) < 1e-14 * kernel(d, x, y, t, 0.7));
      CHECK(kernel(d, x, y, t, 0.7) > 0);
    }
}

TEST_CASE("semigroup property") {
  for (Domain d : {Domain::interval01, Domain::halfline, Domain::line, Domain::circle}) {
    const double k = 0.6, x = 0.3, y = 0.8;
    for (auto [t, s] : {std::pair{0.01, 0.02}, std::pair{0.1, 0.25}, std::pair{0.3, 0.5}}) {
      auto f = [&](double z) { return kernel(d, x, z, t, k) * kernel(d, z, y, s, k); };
      double v;
      if (d == Domain::interval01 || d == Domain::circle)
        v = gk(f, 0, x) + gk(f, x, y) + gk(f, y, 1);
      else if (d == Domain::halfline)
        v = gk(f, 0, x) + gk(f, x, y) + gk(f, y, 40);
      else
        v = gk(f, -40, x) + gk(f, x, y) + gk(f, y, 40);
      CHECK(std::abs(v - kernel(d, x, y, t + s, k)) < 1e-9);
    }
  }
}

TEST_CASE("circle theta form equals the image sum") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng), y = u(rng), k = 0.2 + u(rng), t = 0.005 + 0.6 * u(rng);
    const double th = theta3(kPi * (x - y), std::exp(-4 * kPi * kPi * k * t));
    CHECK(std::abs(th - circle_images(x, y, t, k)) < 1e-13);
    CHECK(std::abs(kernel(Domain::circle, x, y, t, k) - th) < 1e-13);
  }
}

TEST_CASE("theta series and triple product agree") {
  CHECK(theta3(0.4, 0) == 1);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double z = 6 * u(rng) - 3, q = 0.99 * u(rng);
    const double a = theta3(z, q), b = theta3_product(z, q);
    CHECK(std::abs(a - b) < 1e-13 * std::max(1.0, std::abs(a)));
  }
  double direct = 0;
  for (int n = -30; n <= 30; ++n) direct += std::pow(0.3, n * n);
  CHECK(std::abs(theta3(0, 0.3) - direct) < 1e-15);
  CHECK_THROWS(theta3(0, 1.0));
}

TEST_CASE("circle kernel is monotone in cos 2pi(x-y)") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (double t : {0.01, 0.1, 0.5}) {
    std::vector<std::pair<double, double>> v;
    for (int i = 0; i < 1000; ++i) {
      const double x = u(rng), y = u(rng);
      v.emplace_back(std::cos(2 * kPi * (x - y)), kernel(Domain::circle, x, y, t, 1.0));
    }
    std::sort(v.begin(), v.end());
    bool mono = true;
    for (std::size_t i = 1; i < v.size(); ++i) mono = mono && v[i].second >= v[i - 1].second - 1e-13;
    CHECK(mono);
  }
}

TEST_CASE("kernel derivative") {
  for (Domain d : {Domain::interval01, Domain::halfline, Domain::line, Domain::circle})
    for (double t : {0.02, 0.5}) {
      const double h = 1e-5, x = 0.4, y = 0.65;
      const double fd = (kernel(d, x + h, y, t, 0.9) - kernel(d, x - h, y, t, 0.9)) / (2 * h);
      CHECK(std::abs(kernel_dx(d, x, y, t, 0.9) - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("cell averages of step data") {
  for (Domain d : {Domain::interval01, Domain::halfline, Domain::line, Domain::circle}) {
    const double a = 0.2, b = 0.45, c = 0.4, e = 0.43;
    for (double t : {0.001, 0.05, 0.7}) {
      auto sol = [&](double x) { return gk([&](double y) { return kernel(d, x, y, t, 1.3); }, a, b); };
      const double ref = gk(sol, c, e) / (e - c);
      CHECK(std::abs(step_cell_average(d, a, b, c, e, t, 1.3) - ref) < 1e-11);
    }
  }
}

TEST_CASE("pointwise step solution") {
  for (Domain d : {Domain::interval01, Domain::halfline, Domain::line, Domain::circle}) {
    const double a = 0.2, b = 0.45;
    for (double t : {1e-4, 0.05, 0.7})
      for (double x : {0.0, 0.21, 0.44, 0.9}) {
        const double ref = gk([&](double y) { return kernel(d, x, y, t, 1.3); }, a, b);
        CHECK(std::abs(step_value(d, a, b, x, t, 1.3) - ref) < 1e-12);
        const double dref = gk([&](double y) { return kernel_dx(d, x, y, t, 1.3); }, a, b);
        CHECK(std::abs(step_value_dx(d, a, b, x, t, 1.3) - dref) < 1e-9 * std::max(1.0, std::abs(dref)));
      }
  }
  CHECK(step_value(Domain::line, 0, 1, 40, 1e-3, 1) == 0);
  CHECK_THROWS(step_value(Domain::line, 1, 0, 0.5, 1, 1));
}

TEST_CASE("line pair mass is one half") {
  CHECK(pair_mass_line(0.1, 0.5, 1, 3) == 0.5);
  CHECK(pair_mass_line(0.3, 0.3, 1, 1) == 0);
  for (auto [m1, m2] : {std::pair{1.0, 1.0}, std::pair{1.0, 5.0}, std::pair{0.2, 3.0}}) {
    CHECK(std::abs(pair_mass_line_quadrature(-0.3, 0.4, m1, m2) - 0.5) < 1e-8);
    // 2-D quadrature of the generated density over (t, x)
    const double y1 = -0.3, y2 = 0.4, M = m1 + m2, P = m1 * m2, c = (m1 * y1 + m2 * y2) / M;
    auto amp = [&](double t) {
      return 0.25 * std::sqrt(P) / (std::sqrt(kPi) * std::pow(t, 1.5) * std::sqrt(M)) *
             std::exp(-0.25 * P * (y2 - y1) * (y2 - y1) / (t * M)) * (y2 - y1);
    };
    auto inner = [&](double t) {
      if (t <= 0) return 0.0;
      const double w = std::sqrt(4 * t / M) * 9;
      return amp(t) * gk([&](double x) { return kernel(Domain::line, x, c, t, 1 / M); }, c - w, c + w);
    };
    bq::exp_sinh<double> es;
    CHECK(std::abs(es.integrate(inner) - 0.5) < 1e-8);
  }
}

TEST_CASE("half-line pair masses") {
  auto eq = pair_mass_halfline(0.2, 0.7, 2, 2);
  CHECK(std::abs(eq.sum() - 0.5) < 1e-15);
  auto big = pair_mass_halfline(0.2, 0.7, 1, 1e8);
  CHECK(big.direct < 0.5);
  CHECK(big.direct > 0.49);
  CHECK(big.variation_bound() <= 1);
  CHECK_THROWS(pair_mass_halfline(0.7, 0.2, 1, 1));
  for (auto [m1, m2] : {std::pair{1.0, 1.0}, std::pair{1.0, 4.0}, std::pair{3.0, 0.5}}) {
    const double y1 = 0.15, y2 = 0.6, M = m1 + m2, P = m1 * m2;
    auto an = pair_mass_halfline(y1, y2, m1, m2);
    // full 2-D quadrature of the displayed two-family density over x in [0, inf), t > 0
    auto family = [&](double cplus, double cminus, double sep) {
      auto amp = [&](double t) {
        return 0.25 * std::sqrt(P) / (std::sqrt(kPi) * std::pow(t, 1.5) * std::sqrt(M)) *
               std::exp(-0.25 * P * sep * sep / (t * M)) * sep;
      };
      auto inner = [&](double t) {
        if (t <= 0) return 0.0;
        const double w = std::sqrt(4 * t / M) * 9 + std::abs(cplus) + 1;
        auto dens = [&](double x) {
          return kernel(Domain::line, x, cplus, t, 1 / M) - kernel(Domain::line, x, cminus, t, 1 / M);
        };
        return amp(t) * gk(dens, 0, w);
      };
      bq::exp_sinh<double> es;
      return es.integrate(inner);
    };
    const double direct = family((m1 * y1 + m2 * y2) / M, -(m1 * y1 + m2 * y2) / M, y2 - y1);
    const double refl = family((-m1 * y1 + m2 * y2) / M, (m1 * y1 - m2 * y2) / M, y2 + y1);
    CHECK(std::abs(direct - an.direct) < 1e-7);
    CHECK(std::abs(refl - an.reflected) < 1e-7);
    auto q = pair_mass_halfline_quadrature(y1, y2, m1, m2);
    CHECK(std::abs(q.direct - an.direct) < 1e-8);
    CHECK(std::abs(q.reflected - an.reflected) < 1e-8);
    if (m1 == m2) CHECK(std::abs(direct + refl - 0.5) < 1e-8);
  }
}

TEST_CASE("circle interaction amplitudes") {
  for (double y : {0.05, 0.12, 0.2, 0.24})
    for (double t : {0.001, 0.03, 0.4, 3.0}) {
      CHECK(circle_s_plus(y, t, 1.0) > 0);
      CHECK(std::abs(circle_s_plus(y, t, 1.0) - s_plus_literal(y, t, 1.0)) < 1e-10 * std::max(1.0, s_plus_literal(y, t, 1.0)));
      CHECK(std::abs(circle_s_minus(y, t, 1.0) - s_minus_literal(y, t, 1.0)) < 1e-10 * std::max(1.0, std::abs(s_minus_literal(y, t, 1.0))));
      CHECK(circle_s_minus(y, t, 1.0) < 0);
    }
}

TEST_CASE("circle pair masses against quadrature") {
  for (double m : {1.0, 2.0})
    for (double y : {0.07, 0.15, 0.22}) {
      bq::tanh_sinh<double> ts;
      const double tcut = 60 * m;
      auto sp = [&](double t) { return t <= 0 ? 0.0 : s_plus_literal(y, t, m); };
      auto sm = [&](double t) { return t <= 0 ? 0.0 : s_minus_literal(y, t, m); };
      const double ip = ts.integrate(sp, 0.0, tcut), im = ts.integrate(sm, 0.0, tcut);
      CHECK(std::abs(ip - (0.5 - y)) < 1e-8);
      CHECK(std::abs(im + y) < 1e-8);
      CHECK(std::abs(ip + im - (0.5 - 2 * y)) < 1e-8);
      auto c = pair_mass_circle(-y + 1, y);
      CHECK(std::abs(c.net - (0.5 - 2 * y)) < 1e-15);
      CHECK(c.variation == 0.5);
      // finite horizon closed form
      for (double tau : {0.05, 0.5, 4.0}) {
        CHECK(std::abs(circle_s_plus_integral(y, tau, m) - ts.integrate(sp, 0.0, tau)) < 1e-9);
        CHECK(std::abs(circle_s_minus_integral(y, tau, m) - ts.integrate(sm, 0.0, tau)) < 1e-9);
      }
    }
  // the outer x integral of the kernel factor is exactly one; check it at sample times
  for (double t : {0.01, 0.3})
    CHECK(std::abs(gk([&](double x) { return kernel(Domain::circle, x, 0.0, t, 0.5); }, 0, 1) - 1) < 1e-12);
  CHECK(std::abs(pair_mass_circle(0.1, 0.3).net - 0.3) < 1e-15);
  CHECK(std::abs(pair_mass_circle(0.3, 0.1).net + 0.3) < 1e-15);
  CHECK(std::abs(pair_mass_circle(0.4, 0.4 + 1e-9).net - 0.5) < 1e-8);
}

TEST_CASE("circle boundary flux of a point mass") {
  for (double k : {0.5, 1.0})
    for (double y : {0.1, 0.35, 0.8}) {
      auto flux = [&](double t) {
        if (t <= 0) return 0.0;
        double s = 0;  // k d/dx of the theta series at x = 0, summed to convergence
        if (k * t > 0.05) {
          for (int n = 1; n < 200; ++n)
            s += -4 * kPi * n * std::exp(-4 * kPi * kPi * n * n * k * t) * std::sin(2 * kPi * n * (0 - y));
        } else {
          for (int p = -50; p <= 50; ++p) {
            const double u = 0 - y - p;
            s += -u / (2 * k * t) * raw_gauss(u, t, k);
          }
        }
        return k * s;
      };
      bq::tanh_sinh<double> ts;
      const double total = ts.integrate(flux, 0.0, 0.05 / k) + gk(flux, 0.05 / k, 20 / k);
      CHECK(std::abs(total - (0.5 - y)) < 1e-8);
      CHECK(std::abs(circle_flux_integral(y, 3.0, k) - (ts.integrate(flux, 0.0, 0.05 / k) + gk(flux, 0.05 / k, 3.0))) <
            1e-8);
    }
}
