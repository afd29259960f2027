#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lieheat/expansions.hpp"
#include "lieheat/freealg.hpp"
#include "lieheat/heatflow.hpp"
#include "lieheat/majorants.hpp"
#include "lieheat/precessing.hpp"
#include "lieheat/report.hpp"
#include "lieheat/verify.hpp"

namespace fs = std::filesystem;
using namespace lieheat;

namespace {

enum Exit { ok = 0, check_failed = 1, config_error = 2, divergence = 3 };

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-")
    std::cout << content;
  else
    write_file_atomic(out, content);
}

std::string word_string(const Word& w) {
  std::string s;
  for (int l : w) s += "X" + std::to_string(l + 1);
  return s;
}

struct ExpandArgs {
  std::string kind;
  int atoms = 2;
  int max_degree = 4;
  std::string format = "text";
  std::string out;
};

int expand_cmd(const ExpandArgs& a) {
  ExpansionKind kind;
  try {
    kind = expansion_from_string(a.kind);
  } catch (const std::exception& e) {
    std::cerr << "expand: " << e.what() << '\n';
    return config_error;
  }
  if (a.atoms < 1 || a.atoms > 5 || a.max_degree < 1 || a.max_degree > 7) {
    std::cerr << "expand: needs 1 <= atoms <= 5 and 1 <= max-degree <= 7\n";
    return config_error;
  }
  const StepMeasure m = StepMeasure::distinct_units(a.atoms);
  const auto terms = expansion_terms(m, kind, a.atoms, a.max_degree);
  const FreeSeries residual = refactor(terms, kind) - toe_formal(m, a.atoms, a.max_degree);
  std::vector<bool> lie(terms.size(), true);
  for (int n = 1; n <= a.max_degree; ++n) lie[n] = dynkin_is_lie(terms[n]);

  std::ostringstream os;
  if (a.format == "json") {
    nlohmann::json j;
    j["kind"] = to_string(kind);
    j["atoms"] = a.atoms;
    j["max_degree"] = a.max_degree;
    nlohmann::json rows = nlohmann::json::array();
    for (int n = 1; n <= a.max_degree; ++n)
      rows.push_back({{"kind", to_string(kind)}, {"degree", n}, {"term", to_json(terms[n])}, {"lie", bool(lie[n])}});
    j["terms"] = rows;
    j["refactor_residual_terms"] = residual.term_count();
    os << j.dump(2) << '\n';
  } else if (a.format == "csv") {
    os << "degree,word,coefficient,lie\n";
    for (int n = 1; n <= a.max_degree; ++n)
      for (const auto& [w, c] : terms[n].terms())
        os << n << ',' << word_string(w) << ',' << c.get_str() << ',' << (lie[n] ? "true" : "false") << '\n';
  } else if (a.format == "text") {
    os << "kind " << to_string(kind) << ", atoms " << a.atoms << '\n';
    for (int n = 1; n <= a.max_degree; ++n)
      os << "degree " << n << (lie[n] ? " [lie] " : " [not lie] ") << to_string(terms[n]) << '\n';
    os << "refactor residual terms " << residual.term_count() << '\n';
  } else {
    std::cerr << "expand: unknown format " << a.format << '\n';
    return config_error;
  }
  emit(a.out, os.str());
  for (int n = 1; n <= a.max_degree; ++n)
    if (!lie[n]) {
      std::cerr << "expand: degree " << n << " term fails the Lie test\n";
      return check_failed;
    }
  if (!residual.is_zero()) {
    std::cerr << "expand: refactorization residual is nonzero\n";
    return check_failed;
  }
  return ok;
}

struct MajorantArgs {
  std::string spec;
  double mass = 0;
  int terms = 10;
  std::string delta = "1";
  std::string out;
};

int majorant_cmd(const MajorantArgs& a) {
  MajorantSpec spec;
  try {
    spec = make_majorant(majorant_from_string(a.spec), Rational(a.delta));
  } catch (const std::exception& e) {
    std::cerr << "majorant: " << e.what() << '\n';
    return config_error;
  }
  if (!(a.mass >= 0) || a.terms < 1) {
    std::cerr << "majorant: needs mass >= 0 and terms >= 1\n";
    return config_error;
  }
  const auto g = series_coeffs(spec, a.terms);
  std::string closed;
  try {
    std::ostringstream c;
    c.precision(17);
    c << closed_form(spec, a.mass);
    closed = c.str();
  } catch (const OutOfRadiusError&) {
  }
  std::ostringstream os;
  os.precision(17);
  os << "n,g_n,g_n_M^n,partial_sum,closed_form\n";
  double partial = 0;
  for (int n = 1; n <= a.terms; ++n) {
    const double term = g[n].get_d() * std::pow(a.mass, n);
    partial += term;
    os << n << ',' << g[n].get_str() << ',' << term << ',' << partial << ',' << closed << '\n';
  }
  emit(a.out, os.str());
  return ok;
}

struct HeatOutcome {
  int code = ok;
  std::string message;
};

HeatOutcome heat_one(const std::string& path, const fs::path& out_dir) {
  HeatConfig cfg;
  try {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    cfg = heat_config_from_json(j);
  } catch (const std::exception& e) {
    return {config_error, path + ": " + e.what()};
  }
  FlowDiagnostics d;
  try {
    d = run(cfg.field, cfg.options);
  } catch (const StabilityError& e) {
    return {config_error, path + ": " + e.what()};
  }
  const std::string stem = fs::path(path).stem().string();
  nlohmann::json j = to_json(d);
  j["config"] = stem;
  j["initial_type"] = cfg.initial_type;
  j["expect_divergence"] = cfg.expect_divergence;
  write_file_atomic((out_dir / (stem + ".json")).string(), j.dump(2) + "\n");
  if (cfg.options.series_every > 0) write_file_atomic((out_dir / (stem + "_series.csv")).string(), series_csv(d));
  write_file_atomic((out_dir / (stem + "_profile_initial.csv")).string(), profile_csv(cfg.field));
  write_file_atomic((out_dir / (stem + "_profile_final.csv")).string(), profile_csv(d.final_field));
  const bool diverged = d.status == FlowStatus::diverged;
  if (diverged && !cfg.expect_divergence) return {divergence, path + ": flow diverged"};
  if (!diverged && cfg.expect_divergence) return {check_failed, path + ": expected divergence, got " + to_string(d.status)};
  return {ok, path + ": " + to_string(d.status)};
}

int heat_cmd(const std::vector<std::string>& configs, const std::string& out) {
  const fs::path out_dir = out.empty() ? fs::path(".") : fs::path(out);
  std::vector<HeatOutcome> results(configs.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t i = 0; i < configs.size(); ++i)
    jobs.push_back([&, i] { results[i] = heat_one(configs[i], out_dir); });
  run_jobs(jobs);
  int code = ok;
  for (const auto& r : results) {
    (r.code == ok ? std::cout : std::cerr) << r.message << '\n';
    code = std::max(code, r.code);
  }
  return code;
}

struct PrecessArgs {
  PrecessState s;
  double t_max = 1;
  int samples = 21;
  std::string json_out;
  std::string phase_csv;
};

nlohmann::json trajectory_samples(const PrecessState& s, double t_max, int samples) {
  const TrajectoryRow row = trajectory_row(s);
  double t_end = t_max;
  if (row.blowup_time) t_end = std::min(t_end, 0.99 * *row.blowup_time);
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < samples; ++i) {
    const double t = t_end * i / (samples - 1);
    const auto [b, c] = trajectory(s, t);
    out.push_back({{"t", t}, {"b", b}, {"c", c}});
  }
  return out;
}

std::string phase_diagram_csv(double k, double t_max) {
  std::ostringstream os;
  os.precision(10);
  os << "start,b0,c0,case,t,b,c\n";
  int id = 0;
  for (int i = -4; i <= 4; ++i)
    for (int m = -4; m <= 4; ++m) {
      const PrecessState s{0, 0.5 * i, 0.5 * m, k};
      const std::string tag = to_string(classify(s).tag);
      for (const auto& p : trajectory_samples(s, t_max, 41))
        os << id << ',' << s.b0 << ',' << s.c0 << ',' << tag << ',' << p["t"].get<double>() << ','
           << p["b"].get<double>() << ',' << p["c"].get<double>() << '\n';
      ++id;
    }
  return os.str();
}

int precess_cmd(const PrecessArgs& a) {
  if (!(a.s.k > 0) || !(a.t_max > 0) || a.samples < 2) {
    std::cerr << "precess: needs k > 0, t-max > 0 and at least two samples\n";
    return config_error;
  }
  nlohmann::json j = precess_report(a.s);
  j["trajectory"] = trajectory_samples(a.s, a.t_max, a.samples);
  nlohmann::json flux;
  if (a.s.a0 == 0 && a.s.b0 == 1 && a.s.c0 == 1) {
    flux["flux_at_t_max"] = to_json(boundary_flux_closed_form(a.s, a.t_max));
    flux["conjugator_at_t_max"] = to_json(flux_conjugator_closed_form(a.s, a.t_max));
    flux["flux_norm_integral"] = flux_norm_integral(a.s, a.t_max);
    flux["bounded"] = false;
  } else {
    RunOptions o;
    o.t_max = a.t_max;
    o.tol_homog = 0;
    const FlowDiagnostics d = run(precessing_field(a.s.a0, a.s.b0, a.s.c0, a.s.k, 128), o);
    flux["status"] = to_string(d.status);
    flux["flux_mass"] = d.flux_mass;
    flux["flux_product"] = to_json(d.flux_product);
    if (d.blowup_time) flux["blowup_time"] = *d.blowup_time;
  }
  j["flux"] = flux;
  const std::string text = j.dump(2) + "\n";
  if (a.json_out.empty())
    std::cout << text;
  else
    write_file_atomic(a.json_out, text);
  if (!a.phase_csv.empty()) write_file_atomic(a.phase_csv, phase_diagram_csv(a.s.k, a.t_max));
  return ok;
}

int verify_cmd(const std::string& suite, const std::string& json_out, const std::string& timings_out) {
  VerifyReport r;
  try {
    r = run_verify(suite);
  } catch (const std::invalid_argument& e) {
    std::cerr << "verify: " << e.what() << '\n';
    return config_error;
  }
  for (const auto& c : r.checks)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.suite << '.' << c.name << (c.detail.empty() ? "" : "  ")
              << c.detail << '\n';
  if (!json_out.empty()) write_file_atomic(json_out, to_json(r).dump(2) + "\n");
  if (!timings_out.empty()) write_file_atomic(timings_out, timings_json(r).dump(2) + "\n");
  if (const CheckResult* f = r.first_failure()) {
    std::cerr << "first failure: " << f->suite << '.' << f->name << ' ' << f->detail << '\n';
    return check_failed;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lie heat flow expansions, majorants and solvers"};
  app.require_subcommand(1);

  ExpandArgs ea;
  auto* expand = app.add_subcommand("expand", "expansion terms in the free algebra");
  expand->add_option("--kind", ea.kind, "magnus, wilcox-left, wilcox-right, sym-in, sym-out")->required();
  expand->add_option("--atoms", ea.atoms, "number of distinct unit atoms");
  expand->add_option("--max-degree", ea.max_degree, "truncation degree");
  expand->add_option("--format", ea.format, "json, csv or text");
  expand->add_option("--out", ea.out, "output file (stdout by default)");

  MajorantArgs ma;
  auto* majorant = app.add_subcommand("majorant", "majorant series table");
  majorant->add_option("--spec", ma.spec, "majorant name")->required();
  majorant->add_option("--mass", ma.mass, "mass M")->required();
  majorant->add_option("--terms", ma.terms, "number of terms")->required();
  majorant->add_option("--delta", ma.delta, "periodic parameter, a rational");
  majorant->add_option("--out", ma.out, "output file (stdout by default)");

  std::vector<std::string> heat_configs;
  std::string heat_out;
  auto* heat = app.add_subcommand("heat", "run heat flow configurations");
  heat->add_option("configs", heat_configs, "config JSON files")->required();
  heat->add_option("--out", heat_out, "output directory");

  PrecessArgs pa;
  auto* precess = app.add_subcommand("precess", "precessing 2x2 example");
  precess->add_option("--a0", pa.s.a0)->required();
  precess->add_option("--b0", pa.s.b0)->required();
  precess->add_option("--c0", pa.s.c0)->required();
  precess->add_option("--k", pa.s.k)->required();
  precess->add_option("--t-max", pa.t_max, "trajectory horizon");
  precess->add_option("--samples", pa.samples, "trajectory samples");
  precess->add_option("--json", pa.json_out, "report file (stdout by default)");
  precess->add_option("--phase-csv", pa.phase_csv, "phase diagram samples");

  std::string suite = "all", verify_json, verify_timings;
  auto* verify = app.add_subcommand("verify", "run invariant checks");
  verify->add_option("--suite", suite, "all, freealg, expansions, majorants, kernels, heatflow, precess");
  verify->add_option("--json", verify_json, "report file");
  verify->add_option("--timings", verify_timings, "timing file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }

  try {
    if (*expand) return expand_cmd(ea);
    if (*majorant) return majorant_cmd(ma);
    if (*heat) return heat_cmd(heat_configs, heat_out);
    if (*precess) return precess_cmd(pa);
    if (*verify) return verify_cmd(suite, verify_json, verify_timings);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return check_failed;
  }
  return ok;
}
