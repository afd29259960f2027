#include "lieheat/precessing.hpp"

#include <algorithm>
#include <cmath>

namespace lieheat {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool near_zero(double x) { return std::abs(x) <= kDeadBand; }
}  // namespace

std::string to_string(CaseTag t) {
  switch (t) {
    case CaseTag::stationary: return "stationary";
    case CaseTag::semistable: return "semistable";
    case CaseTag::unstable_hyperbolic: return "unstable_hyperbolic";
    case CaseTag::unstable_parabolic: return "unstable_parabolic";
    case CaseTag::unstable_elliptic: return "unstable_elliptic";
    case CaseTag::stable: return "stable";
  }
  return "?";
}

std::string to_string(Tri t) { return t == Tri::yes ? "true" : t == Tri::no ? "false" : "unknown"; }

CaseLabel classify(const PrecessState& s) {
  CaseLabel l;
  const double b = s.b0, c = s.c0;
  const double m = std::max(-1 - b, c - 1);
  if (near_zero(b + c)) {
    l.tag = CaseTag::stationary;
  } else if (near_zero(m)) {
    l.tag = CaseTag::semistable;
  } else if (m > 0) {
    if (near_zero(b + 1) || near_zero(c - 1))
      l.tag = CaseTag::unstable_parabolic;
    else if ((b + 1) * (c - 1) > 0)
      l.tag = CaseTag::unstable_hyperbolic;
    else
      l.tag = CaseTag::unstable_elliptic;
  } else {
    l.tag = CaseTag::stable;
  }
  if (std::max(std::abs(b), std::abs(c)) < 1)
    l.magnus_convergent = Tri::yes;
  else if (l.tag == CaseTag::stationary)
    l.magnus_convergent = Tri::unknown;
  else if (l.tag != CaseTag::stable)
    l.magnus_convergent = Tri::no;
  else if (std::min(1 - b, c + 1) <= 0)
    l.magnus_convergent = Tri::no;
  else
    l.magnus_convergent = Tri::unknown;
  l.heat_sum_exists = l.tag == CaseTag::stationary || l.tag == CaseTag::stable;
  return l;
}

Mat rotation_generator() { return Mat{{0, -1}, {1, 0}}; }

Mat toe_closed_form(const PrecessState& s) {
  const Mat j = rotation_generator();
  return expm(kPi * (s.matrix() + j)) * expm(-kPi * j);
}

Mat toe_analytic(const PrecessState& s) {
  // (M + J)^2 = lambda2 I for the trace-free M + J
  const Mat n = s.matrix() + rotation_generator();
  const double lambda2 = s.a0 * s.a0 + (s.b0 + 1) * (s.c0 - 1);
  double ch, sh_over;  // cosh(pi l), sinh(pi l) / l
  if (lambda2 > 0) {
    const double l = std::sqrt(lambda2);
    ch = std::cosh(kPi * l);
    sh_over = std::sinh(kPi * l) / l;
  } else if (lambda2 < 0) {
    const double w = std::sqrt(-lambda2);
    ch = std::cos(kPi * w);
    sh_over = std::sin(kPi * w) / w;
  } else {
    ch = 1;
    sh_over = kPi;
  }
  // exp(-pi J) is the rotation by -pi, i.e. -I
  return -1.0 * (ch * Mat::identity(2) + sh_over * n);
}

TrajectoryRow trajectory_row(const PrecessState& s) {
  if (!(s.k > 0)) throw PreconditionError("trajectory needs k > 0");
  TrajectoryRow r;
  const double u = s.b0 + 1, v = s.c0 - 1, q = u * v, k = s.k;
  if (near_zero(u + v)) {
    r.row = 7;
    r.p = u;
    return r;
  }
  if (q < -kDeadBand) {
    r.p = -q;
    const double rp = std::sqrt(r.p);
    if (std::abs(u) < std::abs(v)) {
      r.shift = std::atanh(u / rp);
      r.row = r.shift > 0 ? 1 : 3;
    } else {
      r.shift = std::atanh(rp / u);
      r.row = r.shift > 0 ? 2 : 4;
    }
    if (r.shift < 0) r.blowup_time = -r.shift / (2 * k * rp);
    return r;
  }
  if (q > kDeadBand) {
    r.p = q;
    const double rp = std::sqrt(r.p);
    const double th = std::atan(-u / rp);
    if (th > 0) {
      r.row = 5;
      r.shift = th;
      r.blowup_time = (kPi / 2 - th) / (2 * k * rp);
    } else {
      r.row = 6;
      r.shift = th + kPi / 2;
      r.blowup_time = -th / (2 * k * rp);
    }
    return r;
  }
  // parabolic: one of u, v vanishes
  if (near_zero(v)) {
    r.shift = 1 / (2 * k * u);
    r.row = r.shift > 0 ? 8 : 10;
  } else {
    r.shift = -1 / (2 * k * v);
    r.row = r.shift > 0 ? 9 : 11;
  }
  if (r.shift < 0) r.blowup_time = -r.shift;
  return r;
}

std::pair<double, double> trajectory(const PrecessState& s, double t) {
  if (t < 0) throw PreconditionError("trajectory is evaluated forward in time");
  const TrajectoryRow r = trajectory_row(s);
  if (r.blowup_time && t >= *r.blowup_time) throw BlowUpError("trajectory blows up before the requested time");
  const double k = s.k, rp = std::sqrt(r.p);
  switch (r.row) {
    case 7: return {s.b0, s.c0};
    case 1:
    case 3: {
      const double th = r.shift + 2 * k * rp * t;
      return {-1 + rp * std::tanh(th), 1 - rp / std::tanh(th)};
    }
    case 2:
    case 4: {
      const double th = r.shift + 2 * k * rp * t;
      return {-1 + rp / std::tanh(th), 1 - rp * std::tanh(th)};
    }
    case 5: {
      const double th = r.shift + 2 * k * rp * t;
      return {-1 - rp * std::tan(th), 1 - rp / std::tan(th)};
    }
    case 6: {
      const double th = r.shift + 2 * k * rp * t;
      return {-1 + rp / std::tan(th), 1 + rp * std::tan(th)};
    }
    case 8:
    case 10: return {-1 + 1 / (2 * k * (r.shift + t)), 1};
    case 9:
    case 11: return {-1, 1 - 1 / (2 * k * (r.shift + t))};
  }
  throw std::logic_error("unreachable trajectory row");
}

std::pair<double, double> ode_rhs(const PrecessState& s, double b, double c) {
  return {-2 * s.k * (b + 1) * (b + c), 2 * s.k * (c - 1) * (b + c)};
}

bool is_real_exponential(const Mat& a) {
  if (a.n() != 2) throw std::invalid_argument("is_real_exponential: 2x2 matrices only");
  const double tr = a.trace(), dt = det(a);
  const double scale = std::max(norm_max(a), 1e-300);
  if (!(dt > 1e-14 * scale * scale)) return false;
  const double disc = tr * tr - 4 * dt;
  if (disc < -1e-14 * scale * scale) return true;  // complex pair
  if (tr > 0) return true;                           // both eigenvalues positive
  const bool scalar = std::abs(a(0, 1)) <= 1e-12 * scale && std::abs(a(1, 0)) <= 1e-12 * scale &&
                      std::abs(a(0, 0) - a(1, 1)) <= 1e-12 * scale;
  return scalar;
}

Mat boundary_flux_closed_form(const PrecessState& s, double t) {
  if (s.b0 != 1 || s.c0 != 1 || s.a0 != 0) throw PreconditionError("flux closed form needs a0 = 0, b0 = c0 = 1");
  if (t < 0) throw PreconditionError("flux closed form needs t >= 0");
  const double v = 2 * s.k / (1 + 4 * s.k * t);
  return Mat{{-v, 0}, {0, v}};
}

Mat flux_conjugator_closed_form(const PrecessState& s, double tau) {
  boundary_flux_closed_form(s, tau);
  const double r = std::sqrt(1 + 4 * s.k * tau);
  return Mat{{1 / r, 0}, {0, r}};
}

double flux_norm_integral(const PrecessState& s, double T) {
  boundary_flux_closed_form(s, T);
  return 0.5 * std::log1p(4 * s.k * T);
}

double scaling_probe(const PrecessState& s) {
  if (!(s.b0 < -1 && s.c0 > 1) || near_zero(s.b0 + s.c0))
    throw PreconditionError("scaling probe needs b0 < -1 < 1 < c0 and b0 != -c0");
  // (tau b0 + 1)(tau c0 - 1) is a downward parabola, positive between its roots
  const double r1 = -1 / s.b0, r2 = 1 / s.c0;
  return 0.5 * (r1 + r2);
}

nlohmann::json precess_report(const PrecessState& s) {
  const CaseLabel l = classify(s);
  nlohmann::json j;
  j["state"] = {{"a0", s.a0}, {"b0", s.b0}, {"c0", s.c0}, {"k", s.k}};
  j["case"] = to_string(l.tag);
  j["magnus_convergent"] = to_string(l.magnus_convergent);
  j["heat_sum_exists"] = l.heat_sum_exists;
  const Mat toe = toe_closed_form(s);
  j["toe"] = to_json(toe);
  j["det_toe"] = det(toe);
  const bool ex = is_real_exponential(toe);
  j["toe_is_real_exponential"] = ex;
  if (ex) j["log_toe"] = to_json(logm(toe));
  j["conserved"] = (s.b0 + 1) * (s.c0 - 1);
  const TrajectoryRow r = trajectory_row(s);
  j["trajectory_row"] = r.row;
  if (r.blowup_time) j["blowup_time"] = *r.blowup_time;
  if (l.tag == CaseTag::unstable_elliptic) j["scaling_probe"] = scaling_probe(s);
  std::string verdict;
  if (!l.heat_sum_exists)
    verdict = "no heat sum";
  else if (l.magnus_convergent == Tri::yes)
    verdict = "heat sum equals Magnus sum";
  else if (l.magnus_convergent == Tri::no)
    verdict = "heat sum exists but Magnus diverges (false positive)";
  else
    verdict = "heat sum exists; Magnus convergence unknown";
  j["verdict"] = verdict;
  return j;
}

}  // namespace lieheat
