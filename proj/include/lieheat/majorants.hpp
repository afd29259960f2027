#pragma once

#include <string>
#include <vector>

#include "lieheat/freealg.hpp"

namespace lieheat {

enum class MajorantName { magnus_heat, wilcox_halfline, wilcox_improved, sym_outward_improved, magnus_periodic_improved };

struct OutOfRadiusError : std::domain_error {
  using std::domain_error::domain_error;
};

/// g = c_linear x + c_quad_T2 x^2 + c_cross x (g - x) + c_square (g - x)^2, x = T M.
struct MajorantSpec {
  MajorantName name = MajorantName::magnus_heat;
  Rational c_linear = 1;
  Rational c_quad_T2 = 0;
  Rational c_cross = 0;
  Rational c_square = 0;
  Rational delta = 1;
};

MajorantSpec make_majorant(MajorantName name, const Rational& delta = 1);
MajorantName majorant_from_string(const std::string& s);
std::string to_string(MajorantName n);
std::vector<MajorantName> all_majorants();

/// Coefficients g_0..g_nmax (g_0 = 0) of the g(0)=0 power-series solution.
std::vector<Rational> series_coeffs(const MajorantSpec& spec, int nmax);
/// Smaller root of the quadratic, the branch through the origin.
double closed_form(const MajorantSpec& spec, double x);
/// Smallest positive zero of the discriminant.
double radius(const MajorantSpec& spec);
double partial_sum(const std::vector<Rational>& g, double x);

// Literature radii (documentation only).
namespace radii_doc {
inline constexpr double moan_oteo_banach = 2.0;
inline constexpr double banach_lie_magnus = 2.4;
inline constexpr double zassenhaus_bayen = 0.5967;
inline constexpr double zassenhaus_numeric = 1.054;
inline constexpr double wilcox_numeric = 0.6584;
}  // namespace radii_doc

}  // namespace lieheat
