#pragma once

#include <string>
#include <utility>

namespace lieheat {

enum class Domain { interval01, halfline, line, circle };

std::string to_string(Domain d);
Domain domain_from_string(const std::string& s);

/// Heat kernel on `d` with diffusion parameter k (variance 2kt per image).
double kernel(Domain d, double x, double y, double t, double k);
/// Partial derivative of the kernel in x.
double kernel_dx(Domain d, double x, double y, double t, double k);

/// 1 + 2 sum q^{n^2} cos(2nz).
double theta3(double z, double q);
/// Triple-product form of theta3.
double theta3_product(double z, double q);

/// Average over x in [c, d] of the heat solution at time t started from the indicator of [a, b].
double step_cell_average(Domain dom, double a, double b, double c, double d, double t, double k);

/// Heat solution at (x, t) started from the indicator of [a, b].
double step_value(Domain dom, double a, double b, double x, double t, double k);
/// Its derivative in x.
double step_value_dx(Domain dom, double a, double b, double x, double t, double k);

/// Coefficient of [Y1, Y2] generated on the line: exactly 1/2 for y1 < y2.
double pair_mass_line(double y1, double y2, double m1, double m2);
/// Quadrature over x of the time-integrated (arctan-form) line density.
double pair_mass_line_quadrature(double y1, double y2, double m1, double m2);

struct HalflineMasses {
  double direct = 0;
  double reflected = 0;
  [[nodiscard]] double sum() const { return direct + reflected; }
  [[nodiscard]] double variation_bound() const;  // min(|direct| + |reflected|, 1)
};
HalflineMasses pair_mass_halfline(double y1, double y2, double m1, double m2);
/// Time quadrature of the two image families after exact integration in x.
HalflineMasses pair_mass_halfline_quadrature(double y1, double y2, double m1, double m2);

struct CircleMasses {
  double net = 0;        // coefficient of [Y1, Y2]
  double variation = 0;  // bound on the generated variation
  double flux_y1 = 0;    // boundary flux mass from a unit point mass at y1
  double flux_y2 = 0;
};
CircleMasses pair_mass_circle(double y1, double y2);

/// Circle interaction amplitude for points at -y and y: sum over even n.
double circle_s_plus(double y, double t, double m);
/// Same sum over odd n (equals -circle_s_plus(1/2 - y, t, m)).
double circle_s_minus(double y, double t, double m);
/// Closed-form time integrals of s_plus / s_minus over (0, tau].
double circle_s_plus_integral(double y, double tau, double m);
double circle_s_minus_integral(double y, double tau, double m);
/// Boundary flux k dK/dx(0, y, t) integrated over (0, tau], closed form.
double circle_flux_integral(double y, double tau, double k);

}  // namespace lieheat
