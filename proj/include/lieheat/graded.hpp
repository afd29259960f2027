#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "lieheat/expansions.hpp"
#include "lieheat/kernels.hpp"
#include "lieheat/matrix.hpp"

namespace lieheat {

/// Diffusion of grade g: k_g = exp(-beta (g - 1)), so grade 1 always diffuses with k = 1.
double graded_k(int grade, double beta);

struct PicardOptions {
  double h_fine = 0.01;       // cell width over the data
  double stretch = 1.04;      // growth factor of cell widths outside the data
  double margin = 0.25;       // uniform cells on each side of the data
  double dt_ratio = 0.01;     // geometric time steps, dt = dt_ratio * t
  double t_start = 1e-7;
  double t_end = 0;           // 0: chosen from the slowest diffusion
  std::optional<double> start;  // left end of the data; default 0, or centred on the line
  bool masses = true;         // accumulate the generated variation per order
};

/// Grade-wise Picard series of the graded heat flow started from a step measure.
struct PicardSeries {
  Domain domain = Domain::line;
  double beta = 0;
  int dim = 0;
  int nmax = 0;
  double t_end = 0;
  std::vector<double> x;                   // cell centres
  std::vector<std::vector<Mat>> profiles;  // profiles[n][cell] = A_n(t_end), n = 1..nmax - 1
  std::vector<Mat> H;                      // H[n]: integral of A_n at t = infinity, n = 1..nmax
  std::vector<Mat> H_at_end;               // same at t_end, before tail extrapolation
  std::vector<double> generated_mass;      // [n]: integral over t and x of |gen_n| (Banach-Lie), n >= 2
};

/// Atoms must be strictly upper triangular matrices of one size (at most 6); nmax <= dim - 1.
PicardSeries picard_series(const StepMeasure& m, Domain d, double beta, int nmax, const PicardOptions& opt = {});

/// Degree-n terms of `kind` for the measure, evaluated on its atom matrices (index 0 unused).
std::vector<Mat> expansion_targets(const StepMeasure& m, ExpansionKind kind, int nmax);

struct SweepRow {
  double beta = 0;
  std::vector<Mat> H;
  std::vector<double> residual;  // [n]: |H_n - target_n| (max entry)
  std::vector<double> relative;  // [n]: residual / max(|target_n|, tiny)
  double total = 0;              // sum over n
};

struct BetaSweepReport {
  Domain domain = Domain::line;
  ExpansionKind target = ExpansionKind::magnus;
  std::vector<Mat> targets;
  std::vector<SweepRow> rows;
  double floor = 1e-5;       // numerical resolution of the solver
  bool monotone = false;     // every order non-increasing in beta within `floor`
  bool total_decreasing = false;
  [[nodiscard]] double final_residual() const;  // max over orders at the last beta
};

/// Default targets: wilcox_left on the half-line, sym_inward on the line, magnus on [0, 1].
ExpansionKind default_target(Domain d);

BetaSweepReport beta_sweep(const StepMeasure& m, Domain d, const std::vector<double>& betas, int nmax,
                           std::optional<ExpansionKind> target = std::nullopt, const PicardOptions& opt = {});

nlohmann::json to_json(const BetaSweepReport& r);

}  // namespace lieheat
