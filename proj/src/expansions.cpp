#include "lieheat/expansions.hpp"

#include <cmath>

namespace lieheat {

std::string to_string(ExpansionKind k) {
  switch (k) {
    case ExpansionKind::magnus: return "magnus";
    case ExpansionKind::wilcox_left: return "wilcox_left";
    case ExpansionKind::wilcox_right: return "wilcox_right";
    case ExpansionKind::sym_inward: return "sym_inward";
    case ExpansionKind::sym_outward: return "sym_outward";
  }
  return "?";
}

std::vector<ExpansionKind> all_expansions() {
  return {ExpansionKind::magnus, ExpansionKind::wilcox_left, ExpansionKind::wilcox_right, ExpansionKind::sym_inward,
          ExpansionKind::sym_outward};
}

ExpansionKind expansion_from_string(const std::string& s) {
  if (s == "magnus") return ExpansionKind::magnus;
  if (s == "wilcox_left" || s == "wilcox-left") return ExpansionKind::wilcox_left;
  if (s == "wilcox_right" || s == "wilcox-right") return ExpansionKind::wilcox_right;
  if (s == "sym_inward" || s == "sym-in") return ExpansionKind::sym_inward;
  if (s == "sym_outward" || s == "sym-out") return ExpansionKind::sym_outward;
  throw std::invalid_argument("unknown expansion kind: " + s);
}

bool StepMeasure::formal() const {
  for (const auto& a : atoms)
    if (!std::holds_alternative<int>(a.value)) return false;
  return true;
}

bool StepMeasure::numeric() const {
  for (const auto& a : atoms)
    if (!std::holds_alternative<Mat>(a.value)) return false;
  return true;
}

int StepMeasure::max_generator() const {
  int g = -1;
  for (const auto& a : atoms)
    if (const int* p = std::get_if<int>(&a.value)) g = std::max(g, *p);
  return g;
}

void StepMeasure::validate() const {
  int dim = -1;
  for (const auto& a : atoms) {
    if (a.length <= 0) throw std::invalid_argument("atom lengths must be positive");
    if (const Mat* m = std::get_if<Mat>(&a.value)) {
      if (dim >= 0 && m->n() != dim) throw std::invalid_argument("atom matrices differ in dimension");
      dim = m->n();
    } else if (std::get<int>(a.value) < 0) {
      throw std::invalid_argument("negative generator index");
    }
  }
}

StepMeasure StepMeasure::distinct_units(int n) {
  StepMeasure m;
  for (int i = 0; i < n; ++i) m.atoms.push_back({i, 1});
  return m;
}

FreeSeries toe_formal(const StepMeasure& m, int ngens, int dmax) {
  m.validate();
  if (!m.formal()) throw std::invalid_argument("toe_formal: numeric atoms are not allowed");
  if (m.max_generator() >= ngens) throw ShapeError("toe_formal: generator index exceeds ngens");
  FreeSeries r = FreeSeries::one(ngens, dmax);
  std::size_t i = 0;
  while (i < m.atoms.size()) {
    const int g = std::get<int>(m.atoms[i].value);
    Rational len = 0;
    for (; i < m.atoms.size() && std::get<int>(m.atoms[i].value) == g; ++i) len += m.atoms[i].length;
    r = r * exp(len * FreeSeries::generator(ngens, dmax, g));
  }
  return r;
}

namespace {

FreeSeries exp_scaled(const FreeSeries& z, const Rational& s) { return exp(s * z); }

}  // namespace

std::vector<FreeSeries> expansion_terms_from_toe(const FreeSeries& toe, ExpansionKind kind) {
  const int ng = toe.ngens(), d = toe.dmax();
  if (toe.constant_term() != 1) throw ConstantTermError("time-ordered exponential must have constant term 1");
  std::vector<FreeSeries> terms(d + 1, FreeSeries(ng, d));
  const Rational half(1, 2);
  switch (kind) {
    case ExpansionKind::magnus: {
      FreeSeries l = log(toe);
      for (int n = 1; n <= d; ++n) terms[n] = l.degree_part(n);
      break;
    }
    case ExpansionKind::wilcox_left:
    case ExpansionKind::wilcox_right: {
      FreeSeries r = toe;
      for (int n = 1; n <= d; ++n) {
        terms[n] = r.degree_part(n);
        if (n == d || terms[n].is_zero()) continue;
        FreeSeries e = exp_scaled(terms[n], -1);
        r = (kind == ExpansionKind::wilcox_left) ? r * e : e * r;
      }
      break;
    }
    case ExpansionKind::sym_inward: {
      FreeSeries r = toe;
      for (int n = 1; n <= d; ++n) {
        terms[n] = r.degree_part(n);
        if (n == d || terms[n].is_zero()) continue;
        FreeSeries e = exp_scaled(terms[n], -half);
        r = e * r * e;
      }
      break;
    }
    case ExpansionKind::sym_outward: {
      FreeSeries left = FreeSeries::one(ng, d), right = FreeSeries::one(ng, d);
      FreeSeries r = toe;
      for (int n = 1; n <= d; ++n) {
        terms[n] = r.degree_part(n);
        if (n == d || terms[n].is_zero()) continue;
        FreeSeries e = exp_scaled(terms[n], -half);
        left = left * e;
        right = e * right;
        r = left * toe * right;
      }
      break;
    }
  }
  return terms;
}

std::vector<FreeSeries> expansion_terms(const StepMeasure& m, ExpansionKind kind, int ngens, int dmax) {
  return expansion_terms_from_toe(toe_formal(m, ngens, dmax), kind);
}

FreeSeries refactor(const std::vector<FreeSeries>& terms, ExpansionKind kind) {
  if (terms.empty()) throw std::invalid_argument("refactor: no terms");
  const int ng = terms[0].ngens(), d = terms[0].dmax();
  const int top = static_cast<int>(terms.size()) - 1;
  FreeSeries r = FreeSeries::one(ng, d);
  const Rational half(1, 2);
  switch (kind) {
    case ExpansionKind::magnus: {
      FreeSeries s(ng, d);
      for (int n = 1; n <= top; ++n) s = s + terms[n];
      return exp(s);
    }
    case ExpansionKind::wilcox_left:
      for (int n = top; n >= 1; --n) r = r * exp(terms[n]);
      return r;
    case ExpansionKind::wilcox_right:
      for (int n = 1; n <= top; ++n) r = r * exp(terms[n]);
      return r;
    case ExpansionKind::sym_inward: {
      FreeSeries l = FreeSeries::one(ng, d), rr = FreeSeries::one(ng, d);
      for (int n = 1; n <= top; ++n) {
        FreeSeries e = exp(half * terms[n]);
        l = l * e;
        rr = e * rr;
      }
      return l * rr;
    }
    case ExpansionKind::sym_outward: {
      FreeSeries l = FreeSeries::one(ng, d), rr = FreeSeries::one(ng, d);
      for (int n = 1; n <= top; ++n) {
        FreeSeries e = exp(half * terms[n]);
        l = e * l;
        rr = rr * e;
      }
      return l * rr;
    }
  }
  return r;
}

bool refactor_check(const StepMeasure& m, ExpansionKind kind, int ngens, int dmax) {
  FreeSeries toe = toe_formal(m, ngens, dmax);
  return refactor(expansion_terms_from_toe(toe, kind), kind) == toe;
}

namespace {

void eval_words(const std::vector<mpz_class>& num, const mpz_class& den, const std::vector<Mat>& x, int depth,
                int degree, std::size_t idx, const Mat& prefix, Mat& acc) {
  const int ng = static_cast<int>(x.size());
  if (depth == degree) {
    if (num[idx] != 0) acc += mpq_class(num[idx], den).get_d() * prefix;
    return;
  }
  std::size_t span = 1;
  for (int i = depth + 1; i < degree; ++i) span *= ng;
  for (int g = 0; g < ng; ++g) {
    const std::size_t child = idx * ng + g;
    bool any = false;
    for (std::size_t j = child * span; j < (child + 1) * span && !any; ++j) any = num[j] != 0;
    if (!any) continue;
    eval_words(num, den, x, depth + 1, degree, child, prefix * x[g], acc);
  }
}

}  // namespace

Mat eval_matrix(const FreeSeries& term, const std::vector<Mat>& assignment) {
  if (static_cast<int>(assignment.size()) < term.ngens()) {
    for (int d = 1; d <= term.dmax(); ++d)
      for (std::size_t i = 0; i < term.numerators(d).size(); ++i)
        if (term.numerators(d)[i] != 0)
          for (int g : term.index_word(d, i))
            if (g >= static_cast<int>(assignment.size())) throw std::invalid_argument("unassigned generator");
  }
  if (assignment.empty()) throw std::invalid_argument("eval_matrix: empty assignment");
  const int dim = assignment[0].n();
  for (const auto& a : assignment)
    if (a.n() != dim) throw std::invalid_argument("eval_matrix: dimension mismatch");
  std::vector<Mat> x(assignment.begin(), assignment.begin() + std::min<std::size_t>(assignment.size(), term.ngens()));
  while (static_cast<int>(x.size()) < term.ngens()) x.emplace_back(dim);
  Mat acc(dim);
  for (int d = 0; d <= term.dmax(); ++d) {
    const auto& num = term.numerators(d);
    bool any = false;
    for (const auto& v : num) any = any || v != 0;
    if (!any) continue;
    eval_words(num, term.denominator(), x, 0, d, 0, Mat::identity(dim), acc);
  }
  return acc;
}

bool DominationReport::all_hold() const {
  for (const auto& r : rows)
    if (!r.dominated || !r.moan_oteo_holds) return false;
  return true;
}

DominationReport domination_check(const StepMeasure& m, ExpansionKind kind, const MajorantSpec& majorant, int nmax) {
  m.validate();
  if (!m.numeric() || m.atoms.empty()) throw std::invalid_argument("domination_check: numeric measure required");
  const int k = static_cast<int>(m.atoms.size());
  StepMeasure formal;
  std::vector<Mat> mats;
  DominationReport rep;
  for (int i = 0; i < k; ++i) {
    formal.atoms.push_back({i, m.atoms[i].length});
    mats.push_back(std::get<Mat>(m.atoms[i].value));
    const double op = opnorm(mats.back());
    rep.mass_op += op * m.atoms[i].length.get_d();
    rep.mass_g += 2.0 * op * m.atoms[i].length.get_d();
  }
  auto terms = expansion_terms(formal, kind, k, nmax);
  auto g = series_coeffs(majorant, nmax);
  for (int n = 1; n <= nmax; ++n) {
    DominationRow row;
    row.n = n;
    row.norm_op = opnorm(eval_matrix(terms[n], mats));
    row.norm_g = 2.0 * row.norm_op;
    row.majorant = g[n].get_d() * std::pow(rep.mass_g, n);
    row.dominated = row.norm_g <= row.majorant * (1 + 1e-12) + 1e-14;
    row.moan_oteo = std::pow(rep.mass_op, n) / std::ldexp(1.0, n - 1);
    row.moan_oteo_holds = row.norm_op <= row.moan_oteo * (1 + 1e-12) + 1e-14;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace lieheat
