#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "lieheat/matrix.hpp"

namespace lieheat {

/// M = [[a0, c0], [b0, -a0]] with diffusion k.
struct PrecessState {
  double a0 = 0;
  double b0 = 0;
  double c0 = 0;
  double k = 1;

  [[nodiscard]] Mat matrix() const { return Mat{{a0, c0}, {b0, -a0}}; }
};

enum class CaseTag { stationary, semistable, unstable_hyperbolic, unstable_parabolic, unstable_elliptic, stable };
enum class Tri { yes, no, unknown };

std::string to_string(CaseTag t);
std::string to_string(Tri t);

struct CaseLabel {
  CaseTag tag = CaseTag::stationary;
  Tri magnus_convergent = Tri::unknown;
  bool heat_sum_exists = false;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BlowUpError : std::domain_error {
  using std::domain_error::domain_error;
};

inline constexpr double kDeadBand = 1e-12;

CaseLabel classify(const PrecessState& s);

/// J = [[0, -1], [1, 0]].
Mat rotation_generator();
/// exp(pi (M + J)) exp(-pi J) by the matrix exponential.
Mat toe_closed_form(const PrecessState& s);
/// Same product from cosh/sinh (or cos/sin) of the eigenvalue of M + J.
Mat toe_analytic(const PrecessState& s);

/// Index (1..11) of the trajectory table row and the time shift placing (b0, c0) at t = 0.
struct TrajectoryRow {
  int row = 0;
  double p = 0;      // |(b+1)(c-1)|, or r for the stationary row
  double shift = 0;  // argument offset
  std::optional<double> blowup_time;
};
TrajectoryRow trajectory_row(const PrecessState& s);

/// (b(t), c(t)) from the table row; throws BlowUpError past the blow-up time.
std::pair<double, double> trajectory(const PrecessState& s, double t);

/// (b', c') = (-2k(b+1)(b+c), 2k(c-1)(b+c)).
std::pair<double, double> ode_rhs(const PrecessState& s, double b, double c);

/// True iff the real 2x2 matrix has a real logarithm.
bool is_real_exponential(const Mat& a);

/// k dA/dx at x = 0 for b0 = c0 = 1, a0 = 0.
Mat boundary_flux_closed_form(const PrecessState& s, double t);
/// diag((1 + 4k tau)^{-1/2}, (1 + 4k tau)^{1/2}).
Mat flux_conjugator_closed_form(const PrecessState& s, double tau);
/// Integral of the operator norm of the flux over (0, T]: log(1 + 4kT) / 2.
double flux_norm_integral(const PrecessState& s, double T);

/// Scale factor in (0, 1) moving an unstable elliptic state into the hyperbolic domain.
double scaling_probe(const PrecessState& s);

/// Summary for reports: classification, closed-form TOE, exponential check, log when it exists.
nlohmann::json precess_report(const PrecessState& s);

}  // namespace lieheat
