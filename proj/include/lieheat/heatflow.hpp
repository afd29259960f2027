#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lieheat/kernels.hpp"
#include "lieheat/matrix.hpp"

namespace lieheat {

enum class Boundary { neumann, periodic };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

struct StabilityError : std::domain_error {
  using std::domain_error::domain_error;
};

struct NonConvergentFlowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Superdiagonal index q - p of entry (p, q); 0 on and below the diagonal.
inline int entry_grade(int p, int q) { return q > p ? q - p : 0; }

/// Matrix-valued field on a uniform mesh.
///
/// Neumann fields are cell-centred (x_j = x0 + (j + 1/2) h); periodic fields live on
/// nodes (x_j = x0 + j h) so that x = x0 is a sample point.
struct Field {
  Domain domain = Domain::interval01;
  Boundary bc = Boundary::neumann;
  int n_x = 0;
  int dim = 0;
  double x0 = 0;
  double length = 1;
  std::vector<double> k_entry;  // dim*dim diffusion factors
  std::vector<Mat> values;

  static Field make(Domain domain, Boundary bc, int n_x, int dim, double k, double length = 1.0, double x0 = 0.0);

  [[nodiscard]] double h() const { return length / n_x; }
  [[nodiscard]] double x(int j) const;
  [[nodiscard]] double k_max() const;
  [[nodiscard]] bool graded() const { return graded_; }

  /// Constant diffusion k on every entry.
  void set_constant_k(double k);
  /// Entry of grade g diffuses with 1/(m_star e^{beta g}); values must be strictly upper triangular.
  void set_graded(double m_star, double beta);

  void validate() const;

 private:
  bool graded_ = false;
};

/// One explicit RK4 step of dA/dt = k A'' + [A, k A'].
Field step(const Field& f, double dt);
/// Ordered product of exp(A(x_j) h), increasing x left to right.
Mat toe_spatial(const Field& f);
/// Banach-Lie variation sum_j 2|A_j| h.
double initial_mass(const Field& f);
/// Spatial integral sum_j A_j h.
Mat spatial_integral(const Field& f);
/// Max over entries of (max - min over cells).
double spatial_variation(const Field& f);

enum class FlowStatus { homogenized, reached_t_max, diverged };
std::string to_string(FlowStatus s);

struct RunOptions {
  double t_max = 0;      // 0: 50 / k_max
  double tol_homog = 1e-8;
  double dt = 0;         // 0: 0.25 h^2 / k_max
  double blowup_factor = 1e3;
  int series_every = 0;  // steps between time-series samples; 0 disables
};

struct SeriesSample {
  double t = 0;
  double mass_generated = 0;
  double variation = 0;
  double norm_h = 0;
};

struct FlowDiagnostics {
  FlowStatus status = FlowStatus::reached_t_max;
  double t_final = 0;
  long steps = 0;
  double mass_initial = 0;
  double mass_generated = 0;
  double flux_mass = 0;  // integral of the Banach-Lie norm of B(t, x0), periodic only
  double variation = 0;
  Mat heat_integral;     // H_t at the final time
  Mat toe_initial;
  Mat toe_final;
  Mat flux_product;      // F_t, identity for Neumann
  std::optional<double> blowup_time;
  std::vector<SeriesSample> series;
  Field final_field;
};

FlowDiagnostics run(const Field& f0, const RunOptions& opt);

/// F H F^{-1} from a homogenized periodic run.
Mat heat_sum_periodic(const Field& f0, const RunOptions& opt);
/// Same, from existing diagnostics.
Mat heat_sum_from(const FlowDiagnostics& d);

/// Evolve g by dg/dt = k g'' - k g' g^{-1} g' to time t and compare g^{-1} g' with the A-flow.
/// Returns the max entry difference. Constant k, Neumann only.
double multiplicative_crosscheck(const Field& f0, double t, double dt = 0);

/// Boundary current k dA/dx at x0 (one-sided three-point stencil on periodic nodes).
Mat boundary_flux(const Field& f);

// Initial data builders.
/// Rotation-conjugated [[a0, c0], [b0, -a0]] on the circle of length pi.
Field precessing_field(double a0, double b0, double c0, double k, int n_x);
/// Sum of matrix * cos(freq pi x / length + phase) terms.
struct ProfileMode {
  Mat matrix;
  double freq = 0;
  double phase = 0;
};
Field profile_field(Domain domain, Boundary bc, int n_x, double k, const std::vector<ProfileMode>& modes,
                    double length = 1.0, double x0 = 0.0);
/// Piecewise-constant data laid out from `start` (default x0), cell averages.
struct StepAtom {
  Mat matrix;
  double length = 0;
};
Field step_field(Domain domain, Boundary bc, int n_x, double k, const std::vector<StepAtom>& atoms,
                 double length = 1.0, double x0 = 0.0, std::optional<double> start = std::nullopt);
/// Scale values so that initial_mass equals `mass`.
void scale_to_mass(Field& f, double mass);

/// Run configuration, schema "v1".
struct HeatConfig {
  Field field;
  RunOptions options;
  bool expect_divergence = false;
  std::string initial_type;
  nlohmann::json initial_params;
};
HeatConfig heat_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FlowDiagnostics& d);
/// CSV with columns t, mass_generated, variation, norm_h.
std::string series_csv(const FlowDiagnostics& d);
/// CSV with columns x followed by the entries a_pq of the field.
std::string profile_csv(const Field& f);

}  // namespace lieheat
