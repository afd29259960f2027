#include "lieheat/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lieheat/expansions.hpp"
#include "lieheat/freealg.hpp"
#include "lieheat/graded.hpp"
#include "lieheat/heatflow.hpp"
#include "lieheat/kernels.hpp"
#include "lieheat/majorants.hpp"
#include "lieheat/precessing.hpp"

namespace lieheat {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool ok = false;
  std::string detail;
};

Outcome within(double value, double bound) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << value << " <= " << bound;
  return {value <= bound, s.str()};
}

Outcome flag(bool ok, const std::string& detail = {}) { return {ok, detail}; }

struct Check {
  const char* name;
  std::function<Outcome()> run;
};

FreeSeries gen(int n, int d, int i) { return FreeSeries::generator(n, d, i); }

std::vector<Check> freealg_checks() {
  return {
      {"log_exp_roundtrip",
       [] {
         const FreeSeries x = gen(2, 6, 0) + Rational(1, 3) * bracket(gen(2, 6, 0), gen(2, 6, 1));
         return flag(log(exp(x)) == x);
       }},
      {"bch_degree2_half_bracket",
       [] {
         const FreeSeries z = log(exp(gen(2, 3, 0)) * exp(gen(2, 3, 1)));
         return flag(z.degree_part(2) == Rational(1, 2) * bracket(gen(2, 3, 0), gen(2, 3, 1)));
       }},
      {"dynkin_accepts_brackets_rejects_products",
       [] {
         const FreeSeries b = bracket(gen(3, 4, 0), bracket(gen(3, 4, 1), gen(3, 4, 2)));
         return flag(dynkin_is_lie(b) && !dynkin_is_lie(gen(3, 4, 0) * gen(3, 4, 1)));
       }},
      {"associativity",
       [] {
         const FreeSeries a = FreeSeries::one(2, 5) + gen(2, 5, 0), b = gen(2, 5, 1) * gen(2, 5, 0), c = exp(gen(2, 5, 1));
         return flag((a * b) * c == a * (b * c));
       }},
      {"jacobi_identity",
       [] {
         const FreeSeries x = gen(3, 3, 0), y = gen(3, 3, 1), z = gen(3, 3, 2);
         return flag((bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y))).is_zero());
       }},
  };
}

std::vector<Check> expansions_checks() {
  return {
      {"magnus_degree2_half_bracket",
       [] {
         auto t = expansion_terms(StepMeasure::distinct_units(2), ExpansionKind::magnus, 2, 4);
         return flag(t[2] == Rational(1, 2) * bracket(gen(2, 4, 0), gen(2, 4, 1)));
       }},
      {"wilcox_left_degree3_row",
       [] {
         auto t = expansion_terms(StepMeasure::distinct_units(3), ExpansionKind::wilcox_left, 3, 3);
         const FreeSeries x1 = gen(3, 3, 0), x2 = gen(3, 3, 1), x3 = gen(3, 3, 2);
         const FreeSeries row = Rational(1, 3) * bracket(x2, bracket(x1, x3)) + Rational(1, 3) * bracket(x1, bracket(x2, x3));
         return flag(multilinear_part(t[3], {0, 1, 2}) == row);
       }},
      {"all_kinds_refactor_exactly",
       [] {
         StepMeasure m;
         m.atoms = {{0, Rational(1, 2)}, {1, Rational(2, 3)}, {0, Rational(1, 5)}, {2, Rational(1)}};
         for (ExpansionKind k : all_expansions())
           if (!refactor_check(m, k, 3, 5)) return flag(false, to_string(k));
         return flag(true);
       }},
      {"terms_are_lie",
       [] {
         for (ExpansionKind k : all_expansions()) {
           auto t = expansion_terms(StepMeasure::distinct_units(3), k, 3, 5);
           for (int n = 1; n <= 5; ++n)
             if (!dynkin_is_lie(t[n])) return flag(false, to_string(k) + " degree " + std::to_string(n));
         }
         return flag(true);
       }},
      {"magnus_domination",
       [] {
         std::mt19937 rng(11);
         std::normal_distribution<double> nd;
         StepMeasure m;
         for (int i = 0; i < 3; ++i) {
           Mat a(2);
           for (int e = 0; e < 4; ++e) a.data()[e] = 0.3 * nd(rng);
           m.atoms.push_back({a, Rational(1, 3)});
         }
         auto rep = domination_check(m, ExpansionKind::magnus, make_majorant(MajorantName::magnus_heat), 6);
         return flag(rep.all_hold());
       }},
  };
}

std::vector<Check> majorants_checks() {
  std::vector<Check> out;
  const std::vector<std::pair<MajorantName, double>> radii{{MajorantName::magnus_heat, 1.0},
                                                           {MajorantName::wilcox_halfline, 2 - std::sqrt(2.0)},
                                                           {MajorantName::wilcox_improved, 2.0 / 3.0},
                                                           {MajorantName::sym_outward_improved, 4 - 2 * std::sqrt(2.0)}};
  for (const auto& [name, r] : radii) {
    static std::vector<std::string> labels;
    labels.push_back("radius_" + to_string(name));
    out.push_back({labels.back().c_str(), [name = name, r = r] { return within(std::abs(radius(make_majorant(name)) - r), 1e-12); }});
  }
  out.push_back({"series_match_closed_form_inside", [] {
                   double worst = 0;
                   for (MajorantName n : all_majorants()) {
                     const MajorantSpec s = make_majorant(n);
                     const double x = 0.5 * radius(s);
                     worst = std::max(worst, std::abs(partial_sum(series_coeffs(s, 60), x) - closed_form(s, x)));
                   }
                   return within(worst, 1e-10);
                 }});
  out.push_back({"magnus_heat_leading_coefficients", [] {
                   auto g = series_coeffs(make_majorant(MajorantName::magnus_heat), 3);
                   return flag(g[1] == 1 && g[2] == Rational(1, 4) && g[3] == Rational(1, 8));
                 }});
  return out;
}

std::vector<Check> kernels_checks() {
  return {
      {"kernel_mass_interval",
       [] {
         double s = 0;
         const int n = 4000;
         for (int i = 0; i < n; ++i) s += kernel(Domain::interval01, (i + 0.5) / n, 0.3, 0.02, 1.0) / n;
         return within(std::abs(s - 1), 1e-6);
       }},
      {"theta_equals_images",
       [] {
         double worst = 0;
         for (double t : {0.05, 0.3})
           for (double x : {0.0, 0.2, 0.5}) {
             double img = 0;
             for (int p = -30; p <= 30; ++p)
               img += std::exp(-(x - p) * (x - p) / (4 * t)) / (2 * std::sqrt(kPi * t));
             worst = std::max(worst, std::abs(kernel(Domain::circle, x, 0.0, t, 1.0) - img));
           }
         return within(worst, 1e-13);
       }},
      {"pair_mass_line_quadrature_half",
       [] { return within(std::abs(pair_mass_line_quadrature(0.2, 1.1, 1.0, 2.5) - 0.5), 1e-8); }},
      {"pair_mass_halfline_equal_masses_half",
       [] {
         auto h = pair_mass_halfline_quadrature(0.3, 0.8, 1.0, 1.0);
         return within(std::abs(h.sum() - 0.5), 1e-8);
       }},
      {"circle_net_and_flux",
       [] {
         const double y = 0.15;
         auto c = pair_mass_circle(1 - y, y);
         const double net = circle_s_plus_integral(y, 60, 1) + circle_s_minus_integral(y, 60, 1);
         return within(std::max(std::abs(net - (0.5 - 2 * y)), std::abs(c.net - (0.5 - 2 * y))), 1e-8);
       }},
  };
}

std::vector<Check> heatflow_checks() {
  return {
      {"zero_field_stays_zero",
       [] {
         Field f = Field::make(Domain::interval01, Boundary::neumann, 32, 2, 1.0);
         auto d = run(f, {});
         return flag(d.status == FlowStatus::homogenized && norm_max(d.heat_integral) == 0 && d.mass_generated == 0);
       }},
      {"neumann_toe_conserved",
       [] {
         Field f = profile_field(Domain::interval01, Boundary::neumann, 64, 1.0,
                                 {{Mat{{0.3, 1.0}, {-0.4, -0.3}}, 0, 0}, {Mat{{0.5, -0.2}, {0.7, -0.5}}, 1, 0}});
         scale_to_mass(f, 0.6);
         RunOptions o;
         o.t_max = 0.5;
         o.tol_homog = 0;
         auto d = run(f, o);
         return within(norm_max(d.toe_final - d.toe_initial), 1e-4);
       }},
      {"homogenized_limit_and_mass_bound",
       [] {
         Field f = profile_field(Domain::interval01, Boundary::neumann, 64, 1.0,
                                 {{Mat{{0.3, 1.0}, {-0.4, -0.3}}, 0, 0}, {Mat{{0.0, 0.6}, {0.2, 0.0}}, 2, 0.3}});
         scale_to_mass(f, 0.8);
         RunOptions o;
         o.t_max = 10;
         auto d = run(f, o);
         const double bound = 2 - 2 * std::sqrt(1 - d.mass_initial) + 5e-3;
         if (d.status != FlowStatus::homogenized) return flag(false, "not homogenized");
         if (d.mass_initial + d.mass_generated > bound) return flag(false, "mass bound");
         return within(norm_max(expm(d.heat_integral) - d.toe_initial), 1e-4);
       }},
      {"graded_constant_k_is_magnus",
       [] {
         StepMeasure m;
         Mat a(3), b(3);
         a(0, 1) = 1;
         b(1, 2) = 1;
         a(1, 2) = 0.3;
         m.atoms = {{a, Rational(1, 2)}, {b, Rational(1, 2)}};
         PicardOptions o;
         o.dt_ratio = 0.02;
         auto s = picard_series(m, Domain::interval01, 0.0, 2, o);
         auto mu = expansion_targets(m, ExpansionKind::magnus, 2);
         return within(std::max(norm_max(s.H[1] - mu[1]), norm_max(s.H[2] - mu[2])), 1e-6);
       }},
  };
}

std::vector<Check> precess_checks() {
  return {
      {"semistable_toe_closed_form",
       [] {
         const Mat ref{{-1, 0}, {-2 * kPi, -1}};
         return within(norm_max(toe_closed_form({0, 1, 1, 1}) - ref), 1e-10);
       }},
      {"semistable_toe_not_real_exponential", [] { return flag(!is_real_exponential(toe_closed_form({0, 1, 1, 1}))); }},
      {"false_positive_configuration",
       [] {
         const CaseLabel l = classify({0, -0.5, -1.5, 1});
         return flag(l.heat_sum_exists && l.magnus_convergent == Tri::no);
       }},
      {"trajectory_solves_the_ode",
       [] {
         const PrecessState s{0, 0.3, -0.2, 1};
         auto [b, c] = trajectory(s, 0.2);
         const double h = 1e-5;
         auto [bp, cp] = trajectory(s, 0.2 + h);
         auto [bm, cm] = trajectory(s, 0.2 - h);
         auto [fb, fc] = ode_rhs(s, b, c);
         return within(std::max(std::abs((bp - bm) / (2 * h) - fb), std::abs((cp - cm) / (2 * h) - fc)), 1e-7);
       }},
      {"toe_analytic_matches_expm",
       [] {
         double worst = 0;
         for (auto [b0, c0] : {std::pair{0.3, -0.2}, std::pair{2.0, 3.0}, std::pair{-0.5, -1.5}})
           worst = std::max(worst, norm_max(toe_closed_form({0.1, b0, c0, 1}) - toe_analytic({0.1, b0, c0, 1})));
         return within(worst, 1e-9);
       }},
      {"stable_heat_flow_reproduces_toe",
       [] {
         const PrecessState s{0, 0.3, -0.2, 1};
         RunOptions o;
         o.t_max = 30;
         const Mat hs = heat_sum_periodic(precessing_field(s.a0, s.b0, s.c0, s.k, 128), o);
         return within(norm_max(expm(hs) - toe_closed_form(s)), 1e-3);
       }},
  };
}

using SuiteFn = std::vector<Check> (*)();
const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r{{"freealg", freealg_checks},
                                                              {"expansions", expansions_checks},
                                                              {"majorants", majorants_checks},
                                                              {"kernels", kernels_checks},
                                                              {"heatflow", heatflow_checks},
                                                              {"precess", precess_checks}};
  return r;
}

}  // namespace

bool VerifyReport::passed() const { return first_failure() == nullptr; }

const CheckResult* VerifyReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.passed) return &c;
  return nullptr;
}

std::vector<std::string> verify_suites() {
  std::vector<std::string> s{"all"};
  for (const auto& [name, fn] : registry()) s.push_back(name);
  return s;
}

VerifyReport run_verify(const std::string& suite) {
  bool known = suite == "all";
  for (const auto& [name, fn] : registry()) known = known || name == suite;
  if (!known) throw std::invalid_argument("unknown suite: " + suite);
  VerifyReport rep;
  for (const auto& [name, fn] : registry()) {
    if (suite != "all" && suite != name) continue;
    for (const Check& c : fn()) {
      CheckResult r;
      r.suite = name;
      r.name = c.name;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const Outcome o = c.run();
        r.passed = o.ok;
        r.detail = o.detail;
      } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rep.checks.push_back(r);
    }
  }
  return rep;
}

nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json j;
  j["passed"] = r.passed();
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"suite", c.suite}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  if (const CheckResult* f = r.first_failure()) j["first_failure"] = f->suite + "." + f->name;
  return j;
}

nlohmann::json timings_json(const VerifyReport& r) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : r.checks) j.push_back({{"suite", c.suite}, {"name", c.name}, {"seconds", c.seconds}});
  return j;
}

}  // namespace lieheat
