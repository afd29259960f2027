#include "lieheat/kernels.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <stdexcept>

namespace lieheat {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kThetaSwitch = 0.2;  // kt above which series replace image sums
constexpr double kTailExponent = 42.0;  // exp(-42) ~ 6e-19

double gauss(double u, double t, double k) { return std::exp(-u * u / (4 * k * t)) / (2 * std::sqrt(kPi * k * t)); }
double gauss_dx(double u, double t, double k) { return -u / (2 * k * t) * gauss(u, t, k); }

double image_radius(double t, double k) { return std::sqrt(4 * k * t * kTailExponent) + 1.0; }

void check_args(Domain d, double x, double y, double t, double k) {
  if (!(t > 0)) throw std::domain_error("kernel: t must be positive");
  if (!(k > 0)) throw std::domain_error("kernel: k must be positive");
  switch (d) {
    case Domain::interval01:
      if (x < 0 || x > 1 || y < 0 || y > 1) throw std::domain_error("kernel: point outside [0,1]");
      break;
    case Domain::halfline:
      if (x < 0 || y < 0) throw std::domain_error("kernel: point outside [0,inf)");
      break;
    default: break;
  }
}

// sum over p in period*Z of f(u + p)
template <class F>
double periodic_sum(double u, double period, double radius, F f) {
  const long lo = static_cast<long>(std::floor((-radius - u) / period));
  const long hi = static_cast<long>(std::ceil((radius - u) / period));
  double s = 0;
  for (long p = lo; p <= hi; ++p) s += f(u + static_cast<double>(p) * period);
  return s;
}

double Phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * kPi); }
// antiderivative of Phi
double Psi(double z) { return z * Phi(z) + phi(z); }

// average over [c,d] of the line solution from the indicator of [a,b], sigma^2 = 2kt
double line_step_average(double a, double b, double c, double d, double sigma) {
  const double s = Psi((d - a) / sigma) - Psi((c - a) / sigma) - Psi((d - b) / sigma) + Psi((c - b) / sigma);
  return sigma * s / (d - c);
}

}  // namespace

std::string to_string(Domain d) {
  switch (d) {
    case Domain::interval01: return "interval";
    case Domain::halfline: return "halfline";
    case Domain::line: return "line";
    case Domain::circle: return "circle";
  }
  return "?";
}

Domain domain_from_string(const std::string& s) {
  if (s == "interval" || s == "interval01") return Domain::interval01;
  if (s == "halfline") return Domain::halfline;
  if (s == "line") return Domain::line;
  if (s == "circle") return Domain::circle;
  throw std::invalid_argument("unknown domain: " + s);
}

double theta3(double z, double q) {
  if (q < 0 || q >= 1) throw std::domain_error("theta3: nome outside [0,1)");
  double s = 1;
  for (int n = 1;; ++n) {
    const double qn = std::pow(q, static_cast<double>(n) * n);
    s += 2 * qn * std::cos(2 * n * z);
    if (qn < 1e-18 * std::abs(s) || qn == 0) break;
  }
  return s;
}

double theta3_product(double z, double q) {
  if (q < 0 || q >= 1) throw std::domain_error("theta3: nome outside [0,1)");
  double p = 1;
  const double c = std::cos(2 * z);
  for (int m = 1;; ++m) {
    const double q2m = std::pow(q, 2.0 * m), q2m1 = std::pow(q, 2.0 * m - 1);
    p *= (1 - q2m) * (1 + q2m1 * q2m1 + 2 * q2m1 * c);
    if (q2m1 < 1e-18 || q2m1 == 0) break;
  }
  return p;
}

double kernel(Domain d, double x, double y, double t, double k) {
  check_args(d, x, y, t, k);
  switch (d) {
    case Domain::line: return gauss(x - y, t, k);
    case Domain::halfline: return gauss(x - y, t, k) + gauss(x + y, t, k);
    case Domain::circle:
      if (k * t >= kThetaSwitch) return theta3(kPi * (x - y), std::exp(-4 * kPi * kPi * k * t));
      return periodic_sum(x - y, 1.0, image_radius(t, k), [&](double u) { return gauss(u, t, k); });
    case Domain::interval01: {
      if (k * t >= kThetaSwitch) {
        double s = 1;
        for (int n = 1;; ++n) {
          const double e = std::exp(-k * kPi * kPi * n * n * t);
          s += 2 * e * std::cos(n * kPi * x) * std::cos(n * kPi * y);
          if (e < 1e-18) break;
        }
        return s;
      }
      const double r = image_radius(t, k);
      return periodic_sum(x - y, 2.0, r, [&](double u) { return gauss(u, t, k); }) +
             periodic_sum(x + y, 2.0, r, [&](double u) { return gauss(u, t, k); });
    }
  }
  return 0;
}

double kernel_dx(Domain d, double x, double y, double t, double k) {
  check_args(d, x, y, t, k);
  switch (d) {
    case Domain::line: return gauss_dx(x - y, t, k);
    case Domain::halfline: return gauss_dx(x - y, t, k) + gauss_dx(x + y, t, k);
    case Domain::circle:
      if (k * t >= kThetaSwitch) {
        const double q = std::exp(-4 * kPi * kPi * k * t);
        double s = 0;
        for (int n = 1;; ++n) {
          const double qn = std::pow(q, static_cast<double>(n) * n);
          s -= 4 * kPi * n * qn * std::sin(2 * kPi * n * (x - y));
          if (n * qn < 1e-18 || qn == 0) break;
        }
        return s;
      }
      return periodic_sum(x - y, 1.0, image_radius(t, k), [&](double u) { return gauss_dx(u, t, k); });
    case Domain::interval01: {
      if (k * t >= kThetaSwitch) {
        double s = 0;
        for (int n = 1;; ++n) {
          const double e = std::exp(-k * kPi * kPi * n * n * t);
          s -= 2 * e * n * kPi * std::sin(n * kPi * x) * std::cos(n * kPi * y);
          if (n * e < 1e-18) break;
        }
        return s;
      }
      const double r = image_radius(t, k);
      return periodic_sum(x - y, 2.0, r, [&](double u) { return gauss_dx(u, t, k); }) +
             periodic_sum(x + y, 2.0, r, [&](double u) { return gauss_dx(u, t, k); });
    }
  }
  return 0;
}

double step_cell_average(Domain dom, double a, double b, double c, double d, double t, double k) {
  if (!(t > 0) || !(k > 0)) throw std::domain_error("step_cell_average: t and k must be positive");
  if (!(b > a) || !(d > c)) throw std::invalid_argument("step_cell_average: empty interval");
  const double sigma = std::sqrt(2 * k * t);
  const double r = image_radius(t, k) + (b - a) + (d - c);
  auto shifted = [&](double lo, double hi, double period) {
    if (period == 0) return line_step_average(lo, hi, c, d, sigma);
    const double mid = 0.5 * (lo + hi) - 0.5 * (c + d);
    const long pmin = static_cast<long>(std::floor((-r - mid) / period));
    const long pmax = static_cast<long>(std::ceil((r - mid) / period));
    double s = 0;
    for (long p = pmin; p <= pmax; ++p) {
      const double sh = static_cast<double>(p) * period;
      s += line_step_average(lo + sh, hi + sh, c, d, sigma);
    }
    return s;
  };
  switch (dom) {
    case Domain::line: return shifted(a, b, 0);
    case Domain::halfline: return shifted(a, b, 0) + shifted(-b, -a, 0);
    case Domain::circle: return shifted(a, b, 1.0);
    case Domain::interval01: return shifted(a, b, 2.0) + shifted(-b, -a, 2.0);
  }
  return 0;
}

namespace {

/// Sum of f(lo + p T, hi + p T) over the images within reach of x.
template <class F>
double image_sum(Domain dom, double a, double b, double x, double t, double k, F f) {
  const double r = image_radius(t, k) + (b - a);
  auto shifted = [&](double lo, double hi, double period) {
    if (period == 0) return f(lo, hi);
    const double mid = 0.5 * (lo + hi) - x;
    const long pmin = static_cast<long>(std::floor((-r - mid) / period));
    const long pmax = static_cast<long>(std::ceil((r - mid) / period));
    double s = 0;
    for (long p = pmin; p <= pmax; ++p) {
      const double sh = static_cast<double>(p) * period;
      s += f(lo + sh, hi + sh);
    }
    return s;
  };
  switch (dom) {
    case Domain::line: return shifted(a, b, 0);
    case Domain::halfline: return shifted(a, b, 0) + shifted(-b, -a, 0);
    case Domain::circle: return shifted(a, b, 1.0);
    case Domain::interval01: return shifted(a, b, 2.0) + shifted(-b, -a, 2.0);
  }
  return 0;
}

void check_step(double a, double b, double t, double k) {
  if (!(t > 0) || !(k > 0)) throw std::domain_error("step_value: t and k must be positive");
  if (!(b > a)) throw std::invalid_argument("step_value: empty interval");
}

}  // namespace

/// Fourier form on the bounded domains once the images stop being local.
bool use_series(Domain dom, double t, double k) {
  return (dom == Domain::interval01 && k * t > 0.05) || (dom == Domain::circle && k * t > 0.0125);
}

template <class F>
double fourier_sum(Domain dom, double t, double k, F term) {
  // interval: cos(n pi x) modes; circle: period-1 modes, wavenumber 2 pi n
  const double w = dom == Domain::interval01 ? kPi : 2 * kPi;
  double s = 0;
  for (int n = 1;; ++n) {
    const double decay = std::exp(-w * w * n * n * k * t);
    if (decay < 1e-18) break;
    s += decay * term(n, w * n);
  }
  return s;
}

double step_value(Domain dom, double a, double b, double x, double t, double k) {
  check_step(a, b, t, k);
  if (use_series(dom, t, k)) {
    if (dom == Domain::interval01)
      return (b - a) + fourier_sum(dom, t, k, [&](int, double kn) {
               return 2 / kn * (std::sin(kn * b) - std::sin(kn * a)) * std::cos(kn * x);
             });
    return (b - a) + fourier_sum(dom, t, k, [&](int, double kn) {
             return (std::sin(kn * (x - a)) - std::sin(kn * (x - b))) / (kn / 2);
           });
  }
  const double sigma = std::sqrt(2 * k * t);
  return image_sum(dom, a, b, x, t, k, [&](double lo, double hi) {
    const double u = (x - lo) / sigma, v = (x - hi) / sigma;
    if (v > 0) return Phi(-v) - Phi(-u);
    return Phi(u) - Phi(v);
  });
}

double step_value_dx(Domain dom, double a, double b, double x, double t, double k) {
  check_step(a, b, t, k);
  if (use_series(dom, t, k)) {
    if (dom == Domain::interval01)
      return fourier_sum(dom, t, k, [&](int, double kn) {
        return -2 * (std::sin(kn * b) - std::sin(kn * a)) * std::sin(kn * x);
      });
    return fourier_sum(dom, t, k,
                       [&](int, double kn) { return 2 * (std::cos(kn * (x - a)) - std::cos(kn * (x - b))); });
  }
  return image_sum(dom, a, b, x, t, k, [&](double lo, double hi) { return gauss(x - lo, t, k) - gauss(x - hi, t, k); });
}

double pair_mass_line(double y1, double y2, double m1, double m2) {
  if (!(m1 > 0) || !(m2 > 0)) throw std::domain_error("pair_mass_line: masses must be positive");
  if (y1 == y2) return 0;
  if (y1 > y2) throw std::invalid_argument("pair_mass_line: requires y1 < y2");
  return 0.5;
}

double pair_mass_line_quadrature(double y1, double y2, double m1, double m2) {
  if (y1 == y2) return 0;
  const double d = y2 - y1, sm = std::sqrt(m1 * m2);
  auto f = [&](double x) { return d * sm / (2 * kPi * (m1 * (x - y1) * (x - y1) + m2 * (x - y2) * (x - y2))); };
  boost::math::quadrature::tanh_sinh<double> q;
  const double c = (m1 * y1 + m2 * y2) / (m1 + m2);
  auto g = [&](double u) { return f(c + u); };
  return q.integrate(g, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
}

double HalflineMasses::variation_bound() const { return std::min(std::abs(direct) + std::abs(reflected), 1.0); }

HalflineMasses pair_mass_halfline(double y1, double y2, double m1, double m2) {
  if (!(m1 > 0) || !(m2 > 0)) throw std::domain_error("pair_mass_halfline: masses must be positive");
  if (y1 < 0 || y1 >= y2) throw std::invalid_argument("pair_mass_halfline: requires 0 <= y1 < y2");
  const double sm = std::sqrt(m1 * m2);
  HalflineMasses r;
  r.direct = std::atan((m2 * y2 + m1 * y1) / (sm * (y2 - y1))) / kPi;
  r.reflected = std::atan((m2 * y2 - m1 * y1) / (sm * (y2 + y1))) / kPi;
  return r;
}

HalflineMasses pair_mass_halfline_quadrature(double y1, double y2, double m1, double m2) {
  const double M = m1 + m2, P = m1 * m2;
  auto family = [&](double centre, double sep) {
    auto amp = [&](double t) {
      if (t <= 0) return 0.0;
      return 0.25 * std::sqrt(P) * sep / (std::sqrt(kPi) * std::pow(t, 1.5) * std::sqrt(M)) *
             std::exp(-0.25 * P * sep * sep / (t * M));
    };
    // x-integral over [0,inf) of the image pair centred at +-centre with k = 1/M
    auto f = [&](double t) { return std::erf(centre * std::sqrt(M) / (2 * std::sqrt(t))) * amp(t); };
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate(f);
  };
  HalflineMasses r;
  r.direct = family((m1 * y1 + m2 * y2) / M, y2 - y1);
  r.reflected = family((m2 * y2 - m1 * y1) / M, y2 + y1);
  return r;
}

CircleMasses pair_mass_circle(double y1, double y2) {
  if (y1 < 0 || y1 >= 1 || y2 < 0 || y2 >= 1) throw std::domain_error("pair_mass_circle: points must lie in [0,1)");
  CircleMasses r;
  if (y1 == y2) {
    r.net = 0;
  } else if (y1 < y2) {
    r.net = 0.5 + y1 - y2;
  } else {
    r.net = -(0.5 + y2 - y1);
  }
  r.variation = y1 == y2 ? 0.0 : 0.5;
  r.flux_y1 = 0.5 - y1;
  r.flux_y2 = 0.5 - y2;
  return r;
}

double circle_s_plus(double y, double t, double m) {
  if (!(t > 0) || !(m > 0)) throw std::domain_error("circle_s_plus: t and m must be positive");
  return -kernel_dx(Domain::circle, y - std::floor(y), 0.0, t, 1.0 / (2 * m)) / (2 * m);
}

double circle_s_minus(double y, double t, double m) { return -circle_s_plus(0.5 - y, t, m); }

namespace {

// sum over n in (parity + 2Z) of 1/2 sgn(2y+n) erfc(|2y+n| c)
double signed_erfc_sum(double y, double c, int parity) {
  double s = 0;
  const double radius = 10.0 / c + 4;
  const long nmax = static_cast<long>(std::ceil(radius)) + 2;
  for (long n = -nmax; n <= nmax; ++n) {
    if (((n % 2) + 2) % 2 != parity) continue;
    const double u = 2 * y + static_cast<double>(n);
    if (u == 0) continue;
    s += 0.5 * (u > 0 ? 1.0 : -1.0) * std::erfc(std::abs(u) * c);
  }
  return s;
}

}  // namespace

double circle_s_plus_integral(double y, double tau, double m) {
  if (std::isinf(tau)) return 0.5 - y;
  return signed_erfc_sum(y, std::sqrt(m) / std::sqrt(8 * tau), 0);
}

double circle_s_minus_integral(double y, double tau, double m) {
  if (std::isinf(tau)) return -y;
  return signed_erfc_sum(y, std::sqrt(m) / std::sqrt(8 * tau), 1);
}

double circle_flux_integral(double y, double tau, double k) {
  if (std::isinf(tau)) return 0.5 - y;
  // sum over p in Z of 1/2 sgn(y+p) erfc(|y+p|/sqrt(4k tau)): same sum with 2y -> y and all integers
  const double c = 1.0 / std::sqrt(4 * k * tau);
  return signed_erfc_sum(0.5 * y, c, 0) + signed_erfc_sum(0.5 * y, c, 1);
}

}  // namespace lieheat
