#pragma once

#include <string>
#include <variant>
#include <vector>

#include "lieheat/freealg.hpp"
#include "lieheat/majorants.hpp"
#include "lieheat/matrix.hpp"

namespace lieheat {

enum class ExpansionKind { magnus, wilcox_left, wilcox_right, sym_inward, sym_outward };

std::string to_string(ExpansionKind k);
ExpansionKind expansion_from_string(const std::string& s);
std::vector<ExpansionKind> all_expansions();

/// One atom of a piecewise-constant measure: generator index or matrix, held for `length`.
struct Atom {
  std::variant<int, Mat> value;
  Rational length;
};

struct StepMeasure {
  std::vector<Atom> atoms;

  [[nodiscard]] bool formal() const;
  [[nodiscard]] bool numeric() const;
  [[nodiscard]] int max_generator() const;  // -1 when no formal atoms
  void validate() const;

  static StepMeasure distinct_units(int n);  // X_0, ..., X_{n-1}, unit lengths
};

/// exp(l_1 X_{a_1}) ... exp(l_k X_{a_k}), earliest atom leftmost.
FreeSeries toe_formal(const StepMeasure& m, int ngens, int dmax);

/// Homogeneous terms, index n holds the degree-n term (index 0 is zero).
std::vector<FreeSeries> expansion_terms(const StepMeasure& m, ExpansionKind kind, int ngens, int dmax);
/// Same, starting from a precomputed time-ordered exponential.
std::vector<FreeSeries> expansion_terms_from_toe(const FreeSeries& toe, ExpansionKind kind);

/// Ordered product of exponentials of `terms` in the layout of `kind`.
FreeSeries refactor(const std::vector<FreeSeries>& terms, ExpansionKind kind);
bool refactor_check(const StepMeasure& m, ExpansionKind kind, int ngens, int dmax);

/// Substitute matrices for generators; words become products.
Mat eval_matrix(const FreeSeries& term, const std::vector<Mat>& assignment);

struct DominationRow {
  int n = 0;
  double norm_g = 0;
  double majorant = 0;
  bool dominated = false;
  double norm_op = 0;
  double moan_oteo = 0;
  bool moan_oteo_holds = false;
};

struct DominationReport {
  double mass_g = 0;   // sum of 2|A_i| l_i
  double mass_op = 0;  // sum of |A_i| l_i
  std::vector<DominationRow> rows;
  [[nodiscard]] bool all_hold() const;
};

/// Numeric measure; one formal generator per atom, evaluated back on the atom matrices.
DominationReport domination_check(const StepMeasure& m, ExpansionKind kind, const MajorantSpec& majorant, int nmax);

}  // namespace lieheat
