#include "lieheat/graded.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>


namespace lieheat {

namespace {

constexpr double kGamma = 1.0 - 0.70710678118654752440;  // SDIRK2, L-stable and stiffly accurate
constexpr int kMaxDim = 6;
constexpr int kMaxEntries = kMaxDim * kMaxDim;

// three-point Gauss-Legendre on [0, 1]
constexpr std::array<double, 3> kGlX{0.11270166537925831148, 0.5, 0.88729833462074168852};
constexpr std::array<double, 3> kGlW{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

using Flat = std::array<double, kMaxEntries>;

/// One scalar profile of the exact first order: `coef` times the step solution of [lo, hi] with diffusion k.
struct Term {
  Flat coef{};
  double lo = 0, hi = 0, k = 1;
};

struct Grid {
  std::vector<double> xf;  // faces
  std::vector<double> xc;  // centres
  std::vector<double> w;   // widths
  [[nodiscard]] int n() const { return static_cast<int>(xc.size()); }
};

struct QPoint {
  double x = 0, w = 0;
  int cell = 0;
};

std::vector<double> stretched(double h0, double ratio, double dist) {
  std::vector<double> widths;
  double total = 0, h = h0;
  while (total < dist) {
    h *= ratio;
    widths.push_back(h);
    total += h;
  }
  return widths;
}

Grid make_grid(Domain d, double lo, double hi, double far, const PicardOptions& o) {
  Grid g;
  auto uniform = [&](double a, double b) {
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / o.h_fine - 1e-9)));
    for (int i = 0; i < n; ++i) g.xf.push_back(a + (b - a) * i / n);
  };
  if (d == Domain::interval01) {
    uniform(0, 1);
    g.xf.push_back(1);
  } else {
    const double a = d == Domain::halfline ? 0.0 : lo - o.margin;
    const double b = hi + o.margin;
    if (d == Domain::line) {
      auto left = stretched(o.h_fine, o.stretch, far);
      double x = a;
      std::vector<double> faces;
      for (double wd : left) faces.push_back(x -= wd);
      g.xf.assign(faces.rbegin(), faces.rend());
    }
    uniform(a, b);
    double x = b;
    g.xf.push_back(x);
    for (double wd : stretched(o.h_fine, o.stretch, far)) g.xf.push_back(x += wd);
  }
  for (std::size_t i = 0; i + 1 < g.xf.size(); ++i) {
    g.xc.push_back(0.5 * (g.xf[i] + g.xf[i + 1]));
    g.w.push_back(g.xf[i + 1] - g.xf[i]);
  }
  return g;
}

/// Thomas algorithm for (I - c L_k) y = r with the finite-volume Laplacian and zero-flux ends.
class Implicit {
 public:
  explicit Implicit(const Grid& g) : g_(g), n_(g.n()), cp_(n_), dp_(n_) {
    inv_d_.resize(n_ > 0 ? n_ - 1 : 0);
    for (int i = 0; i + 1 < n_; ++i) inv_d_[i] = 1.0 / (g.xc[i + 1] - g.xc[i]);
  }

  void solve(double c, const double* r, double* y) {
    for (int i = 0; i < n_; ++i) {
      const double left = i > 0 ? c * inv_d_[i - 1] / g_.w[i] : 0.0;
      const double right = i + 1 < n_ ? c * inv_d_[i] / g_.w[i] : 0.0;
      const double diag = 1 + left + right;
      const double lo = -left, up = -right;
      const double den = i > 0 ? diag - lo * cp_[i - 1] : diag;
      cp_[i] = up / den;
      dp_[i] = (r[i] - (i > 0 ? lo * dp_[i - 1] : 0.0)) / den;
    }
    for (int i = n_ - 1; i >= 0; --i) y[i] = dp_[i] - (i + 1 < n_ ? cp_[i] * y[i + 1] : 0.0);
  }

  /// L y, the divergence of the flux with zero-flux ends.
  void apply(const double* y, double* out) const {
    for (int i = 0; i < n_; ++i) {
      double s = 0;
      if (i > 0) s -= (y[i] - y[i - 1]) * inv_d_[i - 1];
      if (i + 1 < n_) s += (y[i + 1] - y[i]) * inv_d_[i];
      out[i] = s / g_.w[i];
    }
  }

 private:
  const Grid& g_;
  int n_;
  std::vector<double> inv_d_, cp_, dp_;
};

class Solver {
 public:
  Solver(const StepMeasure& m, Domain d, double beta, int nmax, const PicardOptions& o)
      : dom_(d), beta_(beta), nmax_(nmax), opt_(o) {
    m.validate();
    if (m.atoms.empty() || !m.numeric()) throw std::invalid_argument("picard_series: numeric step measure required");
    if (d == Domain::circle) throw std::invalid_argument("picard_series: the circle is not supported");
    dim_ = std::get<Mat>(m.atoms[0].value).n();
    if (dim_ < 2 || dim_ > kMaxDim) throw std::invalid_argument("picard_series: dimension must be 2..6");
    if (nmax < 1 || nmax > dim_ - 1) throw std::invalid_argument("picard_series: nmax must be 1..dim-1");
    dd_ = dim_ * dim_;
    for (int p = 0; p < dim_; ++p)
      for (int q = 0; q < dim_; ++q) k_[p * dim_ + q] = q > p ? graded_k(q - p, beta) : 0.0;

    double total = 0;
    for (const auto& a : m.atoms) total += a.length.get_d();
    double x = o.start ? *o.start : (d == Domain::line ? -0.5 * total : 0.0);
    lo_ = x;
    for (const auto& a : m.atoms) {
      const Mat& v = std::get<Mat>(a.value);
      const double len = a.length.get_d();
      for (int p = 0; p < dim_; ++p)
        for (int q = 0; q <= p; ++q)
          if (v(p, q) != 0) throw std::invalid_argument("picard_series: atoms must be strictly upper triangular");
      for (int g = 1; g < dim_; ++g) {
        Term t;
        bool any = false;
        for (int p = 0; p + g < dim_; ++p) {
          t.coef[p * dim_ + p + g] = v(p, p + g);
          any = any || v(p, p + g) != 0;
        }
        if (!any) continue;
        t.lo = x;
        t.hi = x + len;
        t.k = graded_k(g, beta);
        terms_.push_back(t);
        k_atom_min_ = std::min(k_atom_min_, t.k);
      }
      cut_.push_back(x);
      x += len;
    }
    cut_.push_back(x);
    hi_ = x;
    if (d == Domain::interval01 && (lo_ < 0 || hi_ > 1)) throw std::invalid_argument("picard_series: data must lie in [0, 1]");
    if (d == Domain::halfline && lo_ < 0) throw std::invalid_argument("picard_series: data must lie in [0, inf)");

    double kmin = 1, kmax = 1;
    for (int g = 1; g < std::max(2, nmax); ++g) {
      kmin = std::min(kmin, graded_k(g, beta));
      kmax = std::max(kmax, graded_k(g, beta));
    }
    if (o.t_end > 0)
      t_end_ = o.t_end;
    else if (d == Domain::interval01)
      t_end_ = 40.0 / (M_PI * M_PI * kmin);
    else
      t_end_ = 1e4 * std::max(1.0, (hi_ - lo_) * (hi_ - lo_)) / kmin;
    grid_ = make_grid(d, lo_, hi_, 8 * std::sqrt(kmax * t_end_) + (hi_ - lo_), o);
  }

  PicardSeries run() {
    const int n = grid_.n();
    const int nfv = nmax_ - 1;  // orders 2..nmax-1 are evolved on the grid
    Implicit imp(grid_);
    // fields[j] for j = 2..nmax-1: current values, stage values y1 and y2
    std::vector<std::vector<double>> cur(nmax_ + 1), y1(nmax_ + 1), y2(nmax_ + 1);
    for (int j = 2; j <= nfv; ++j) {
      cur[j].assign(static_cast<std::size_t>(dd_) * n, 0.0);
      y1[j] = y2[j] = cur[j];
    }
    std::vector<Flat> H(nmax_ + 1), H16, H4;
    std::vector<double> mass(nmax_ + 1, 0.0), m16, m4;
    H[1] = first_order_mass();

    std::vector<double> g1(static_cast<std::size_t>(dd_) * n), g2(g1.size()), rhs(n), tmp(n), lap(n);
    std::vector<double> times = time_grid();
    double rate1 = 0, rate2 = 0;
    for (std::size_t s = 0; s + 1 < times.size(); ++s) {
      const double t = times[s], dt = times[s + 1] - t;
      const double t1 = t + kGamma * dt, t2 = t + dt;
      points(t1, pts1_);
      points(t2, pts2_);
      first_order(t1, pts1_, a1_1_, d1_1_);
      first_order(t2, pts2_, a1_2_, d1_2_);
      for (int ord = 2; ord <= nmax_; ++ord) {
        gen_cells(ord, pts1_, a1_1_, d1_1_, y1, g1, opt_.masses ? &rate1 : nullptr);
        if (ord <= nfv) {
          for (int e = 0; e < dd_; ++e) {
            if (k_[e] == 0) continue;
            const double* c = cur[ord].data() + static_cast<std::size_t>(e) * n;
            double* s1 = y1[ord].data() + static_cast<std::size_t>(e) * n;
            for (int i = 0; i < n; ++i) rhs[i] = c[i] + kGamma * dt * g1[static_cast<std::size_t>(e) * n + i];
            imp.solve(kGamma * dt * k_[e], rhs.data(), s1);
          }
        }
        gen_cells(ord, pts2_, a1_2_, d1_2_, y2, g2, opt_.masses ? &rate2 : nullptr);
        if (ord <= nfv) {
          for (int e = 0; e < dd_; ++e) {
            if (k_[e] == 0) continue;
            const std::size_t off = static_cast<std::size_t>(e) * n;
            imp.apply(y1[ord].data() + off, lap.data());
            for (int i = 0; i < n; ++i)
              rhs[i] = cur[ord][off + i] + (1 - kGamma) * dt * (k_[e] * lap[i] + g1[off + i]) + kGamma * dt * g2[off + i];
            imp.solve(kGamma * dt * k_[e], rhs.data(), y2[ord].data() + off);
          }
        }
        for (int e = 0; e < dd_; ++e) {
          double s1 = 0, s2 = 0;
          const std::size_t off = static_cast<std::size_t>(e) * n;
          for (int i = 0; i < n; ++i) {
            s1 += g1[off + i] * grid_.w[i];
            s2 += g2[off + i] * grid_.w[i];
          }
          H[ord][e] += dt * ((1 - kGamma) * s1 + kGamma * s2);
        }
        if (opt_.masses) mass[ord] += dt * ((1 - kGamma) * rate1 + kGamma * rate2);
      }
      for (int j = 2; j <= nfv; ++j) cur[j] = y2[j];
      if (std::abs(t2 - t_end_ / 16) < 1e-12 * t_end_) {
        H16 = H;
        m16 = mass;
      }
      if (std::abs(t2 - t_end_ / 4) < 1e-12 * t_end_) {
        H4 = H;
        m4 = mass;
      }
    }

    PicardSeries r;
    r.domain = dom_;
    r.beta = beta_;
    r.dim = dim_;
    r.nmax = nmax_;
    r.t_end = t_end_;
    r.x = grid_.xc;
    r.H.assign(nmax_ + 1, Mat(dim_));
    r.H_at_end = r.H;
    const bool tail = dom_ != Domain::interval01;
    // H(t) ~ H_inf + a t^{-1/2} + b t^{-1} at t_end/16, t_end/4, t_end
    auto extrapolate = [](double h16, double h4, double h1) { return (4 * (2 * h1 - h4) - (2 * h4 - h16)) / 3; };
    r.generated_mass = mass;
    if (tail)
      for (int ord = 2; ord <= nmax_; ++ord) r.generated_mass[ord] = extrapolate(m16[ord], m4[ord], mass[ord]);
    for (int ord = 1; ord <= nmax_; ++ord)
      for (int e = 0; e < dd_; ++e) {
        r.H_at_end[ord].data()[e] = H[ord][e];
        double v = H[ord][e];
        if (tail && ord >= 2) v = extrapolate(H16[ord][e], H4[ord][e], H[ord][e]);
        r.H[ord].data()[e] = v;
      }
    r.profiles.assign(nmax_, {});
    if (nmax_ >= 2) {
      std::vector<QPoint> centres;
      for (int i = 0; i < n; ++i) centres.push_back({grid_.xc[i], 1.0, i});
      std::vector<Flat> a, da;
      first_order(t_end_, centres, a, da);
      for (int i = 0; i < n; ++i) r.profiles[1].push_back(to_mat(a[i]));
      for (int j = 2; j <= nfv; ++j)
        for (int i = 0; i < n; ++i) {
          Mat v(dim_);
          for (int e = 0; e < dd_; ++e) v.data()[e] = cur[j][static_cast<std::size_t>(e) * n + i];
          r.profiles[j].push_back(v);
        }
    }
    return r;
  }

 private:
  Domain dom_;
  double beta_;
  int nmax_, dim_ = 0, dd_ = 0;
  PicardOptions opt_;
  Flat k_{};
  std::vector<Term> terms_;
  std::vector<double> cut_;
  double lo_ = 0, hi_ = 0, t_end_ = 0, k_atom_min_ = 1e300;
  Grid grid_;
  std::vector<QPoint> pts1_, pts2_;
  std::vector<Flat> a1_1_, d1_1_, a1_2_, d1_2_;

  [[nodiscard]] Mat to_mat(const Flat& f) const {
    Mat m(dim_);
    for (int e = 0; e < dd_; ++e) m.data()[e] = f[e];
    return m;
  }

  [[nodiscard]] Flat first_order_mass() const {
    Flat h{};
    for (const Term& t : terms_)
      for (int e = 0; e < dd_; ++e) h[e] += t.coef[e] * (t.hi - t.lo);
    return h;
  }

  /// Geometric steps from t_start with exact stops at t_end / 16 and t_end / 4.
  [[nodiscard]] std::vector<double> time_grid() const {
    std::vector<double> out{opt_.t_start};
    for (double stop : {t_end_ / 16, t_end_ / 4, t_end_}) {
      const double a = out.back();
      const int k = std::max(1, static_cast<int>(std::ceil(std::log(stop / a) / std::log1p(opt_.dt_ratio))));
      const double r = std::pow(stop / a, 1.0 / k);
      for (int i = 1; i < k; ++i) out.push_back(a * std::pow(r, i));
      out.push_back(stop);
    }
    return out;
  }

  /// Gauss points per cell, subdivided where the first order still has unresolved jumps.
  void points(double t, std::vector<QPoint>& pts) const {
    pts.clear();
    const double sigma = std::sqrt(2 * k_atom_min_ * t);
    for (int i = 0; i < grid_.n(); ++i) {
      const double a = grid_.xf[i], w = grid_.w[i];
      int sub = 1;
      if (sigma < 2 * w) {
        double dist = 1e300;
        for (double c : cut_) dist = std::min(dist, std::max(0.0, std::max(a - c, c - (a + w))));
        if (dist < 12 * sigma) sub = std::min(256, static_cast<int>(std::ceil(4 * w / sigma)));
      }
      const double hs = w / sub;
      for (int s = 0; s < sub; ++s)
        for (int q = 0; q < 3; ++q) pts.push_back({a + (s + kGlX[q]) * hs, kGlW[q] * hs, i});
    }
  }

  void first_order(double t, const std::vector<QPoint>& pts, std::vector<Flat>& a, std::vector<Flat>& da) const {
    a.assign(pts.size(), Flat{});
    da.assign(pts.size(), Flat{});
    for (const Term& tm : terms_) {
      const bool unbounded = dom_ == Domain::line || dom_ == Domain::halfline;
      const double reach = std::sqrt(4 * tm.k * t * 42.0);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (unbounded && (pts[i].x > tm.hi + reach || (dom_ == Domain::line && pts[i].x < tm.lo - reach))) continue;
        const double u = step_value(dom_, tm.lo, tm.hi, pts[i].x, t, tm.k);
        const double du = step_value_dx(dom_, tm.lo, tm.hi, pts[i].x, t, tm.k);
        if (u == 0 && du == 0) continue;
        for (int e = 0; e < dd_; ++e) {
          if (tm.coef[e] == 0) continue;
          a[i][e] += tm.coef[e] * u;
          da[i][e] += tm.coef[e] * du;
        }
      }
    }
  }

  /// Cell slopes of a grid field (entry e), mirrored at the zero-flux ends.
  void slopes(const double* v, std::vector<double>& s) const {
    const int n = grid_.n();
    s.resize(n);
    for (int i = 0; i < n; ++i) {
      const double xl = i > 0 ? grid_.xc[i - 1] : 2 * grid_.xf[0] - grid_.xc[0];
      const double xr = i + 1 < n ? grid_.xc[i + 1] : 2 * grid_.xf[n] - grid_.xc[n - 1];
      const double vl = i > 0 ? v[i - 1] : v[0];
      const double vr = i + 1 < n ? v[i + 1] : v[n - 1];
      s[i] = (vr - vl) / (xr - xl);
    }
  }

  /// Cell averages of gen_ord = sum_j [A_j, k o dA_{ord-j}] into g (entry planes); optional variation rate.
  void gen_cells(int ord, const std::vector<QPoint>& pts, const std::vector<Flat>& a1, const std::vector<Flat>& d1,
                 const std::vector<std::vector<double>>& fields, std::vector<double>& g, double* rate) {
    const int n = grid_.n();
    std::fill(g.begin(), g.end(), 0.0);
    // slopes of the grid orders needed here
    std::vector<std::vector<std::vector<double>>> sl(ord);
    for (int j = 2; j < ord; ++j) {
      sl[j].resize(dd_);
      for (int e = 0; e < dd_; ++e)
        if (k_[e] != 0) slopes(fields[j].data() + static_cast<std::size_t>(e) * n, sl[j][e]);
    }
    std::vector<Flat> val(ord), der(ord);
    Mat c(dim_);
    if (rate) *rate = 0;
    for (std::size_t ip = 0; ip < pts.size(); ++ip) {
      const QPoint& p = pts[ip];
      val[1] = a1[ip];
      der[1] = d1[ip];
      for (int j = 2; j < ord; ++j)
        for (int e = 0; e < dd_; ++e) {
          if (k_[e] == 0) {
            val[j][e] = der[j][e] = 0;
            continue;
          }
          const double s = sl[j][e][p.cell];
          val[j][e] = fields[j][static_cast<std::size_t>(e) * n + p.cell] + s * (p.x - grid_.xc[p.cell]);
          der[j][e] = s;
        }
      Flat acc{};
      for (int j = 1; j < ord; ++j) {
        const Flat& x = val[j];
        const Flat& y = der[ord - j];
        for (int r = 0; r < dim_; ++r)
          for (int q = r + 1; q < dim_; ++q) {
            double v = 0;
            for (int m = r + 1; m < q; ++m) v += x[r * dim_ + m] * k_[m * dim_ + q] * y[m * dim_ + q] - k_[r * dim_ + m] * y[r * dim_ + m] * x[m * dim_ + q];
            acc[r * dim_ + q] += v;
          }
      }
      const double wgt = p.w / grid_.w[p.cell];
      for (int e = 0; e < dd_; ++e) g[static_cast<std::size_t>(e) * n + p.cell] += wgt * acc[e];
      if (rate) {
        for (int e = 0; e < dd_; ++e) c.data()[e] = acc[e];
        *rate += p.w * norm_lie(c);
      }
    }
  }
};

}  // namespace

double graded_k(int grade, double beta) { return std::exp(-beta * (std::max(grade, 1) - 1)); }

PicardSeries picard_series(const StepMeasure& m, Domain d, double beta, int nmax, const PicardOptions& opt) {
  Solver s(m, d, beta, nmax, opt);
  return s.run();
}

std::vector<Mat> expansion_targets(const StepMeasure& m, ExpansionKind kind, int nmax) {
  m.validate();
  if (!m.numeric() || m.atoms.empty()) throw std::invalid_argument("expansion_targets: numeric measure required");
  StepMeasure formal;
  std::vector<Mat> mats;
  const int k = static_cast<int>(m.atoms.size());
  for (int i = 0; i < k; ++i) {
    formal.atoms.push_back({i, m.atoms[i].length});
    mats.push_back(std::get<Mat>(m.atoms[i].value));
  }
  auto terms = expansion_terms(formal, kind, k, nmax);
  std::vector<Mat> out(nmax + 1, Mat(mats[0].n()));
  for (int n = 1; n <= nmax; ++n) out[n] = eval_matrix(terms[n], mats);
  return out;
}

ExpansionKind default_target(Domain d) {
  switch (d) {
    case Domain::halfline: return ExpansionKind::wilcox_left;
    case Domain::line: return ExpansionKind::sym_inward;
    default: return ExpansionKind::magnus;
  }
}

double BetaSweepReport::final_residual() const {
  if (rows.empty()) return 0;
  double r = 0;
  for (double v : rows.back().residual) r = std::max(r, v);
  return r;
}

BetaSweepReport beta_sweep(const StepMeasure& m, Domain d, const std::vector<double>& betas, int nmax,
                           std::optional<ExpansionKind> target, const PicardOptions& opt) {
  if (betas.empty()) throw std::invalid_argument("beta_sweep: no beta values");
  for (std::size_t i = 1; i < betas.size(); ++i)
    if (!(betas[i] > betas[i - 1])) throw std::invalid_argument("beta_sweep: betas must increase");
  BetaSweepReport rep;
  rep.domain = d;
  rep.target = target ? *target : default_target(d);
  rep.targets = expansion_targets(m, rep.target, nmax);
  PicardOptions o = opt;
  o.masses = false;
  for (double b : betas) {
    const PicardSeries s = picard_series(m, d, b, nmax, o);
    SweepRow row;
    row.beta = b;
    row.H = s.H;
    row.residual.assign(nmax + 1, 0.0);
    row.relative.assign(nmax + 1, 0.0);
    for (int n = 1; n <= nmax; ++n) {
      row.residual[n] = norm_max(s.H[n] - rep.targets[n]);
      row.relative[n] = row.residual[n] / std::max(norm_max(rep.targets[n]), 1e-300);
      row.total += row.residual[n];
    }
    rep.rows.push_back(row);
  }
  rep.monotone = true;
  rep.total_decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    for (int n = 1; n <= nmax; ++n)
      if (rep.rows[i].residual[n] > rep.rows[i - 1].residual[n] + rep.floor) rep.monotone = false;
    if (!(rep.rows[i].total < rep.rows[i - 1].total)) rep.total_decreasing = false;
  }
  return rep;
}

nlohmann::json to_json(const BetaSweepReport& r) {
  nlohmann::json j;
  j["domain"] = to_string(r.domain);
  j["target"] = to_string(r.target);
  j["floor"] = r.floor;
  j["monotone"] = r.monotone;
  j["total_decreasing"] = r.total_decreasing;
  j["final_residual"] = r.final_residual();
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRow& row : r.rows) {
    nlohmann::json jr;
    jr["beta"] = row.beta;
    nlohmann::json hs = nlohmann::json::array(), res = nlohmann::json::array(), rel = nlohmann::json::array();
    for (std::size_t n = 1; n < row.H.size(); ++n) {
      hs.push_back(to_json(row.H[n]));
      res.push_back(row.residual[n]);
      rel.push_back(row.relative[n]);
    }
    jr["H"] = hs;
    jr["residual"] = res;
    jr["relative"] = rel;
    jr["total"] = row.total;
    rows.push_back(jr);
  }
  j["rows"] = rows;
  return j;
}

}  // namespace lieheat
