#include "lieheat/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace lieheat {

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  n_ = static_cast<int>(rows.size());
  a_.reserve(static_cast<std::size_t>(n_) * n_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != n_) throw std::invalid_argument("matrix must be square");
    a_.insert(a_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(int n) {
  Mat m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

static void check_same(const Mat& a, const Mat& b) {
  if (a.n() != b.n()) throw std::invalid_argument("matrix dimension mismatch");
}

Mat& Mat::operator+=(const Mat& b) {
  check_same(*this, b);
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += b.a_[i];
  return *this;
}

Mat& Mat::operator-=(const Mat& b) {
  check_same(*this, b);
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= b.a_[i];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& x : a_) x *= s;
  return *this;
}

Mat Mat::transpose() const {
  Mat t(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Mat::trace() const {
  double s = 0;
  for (int i = 0; i < n_; ++i) s += (*this)(i, i);
  return s;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator-(Mat a) { return a *= -1.0; }
Mat operator*(double s, Mat a) { return a *= s; }
Mat operator*(Mat a, double s) { return a *= s; }

Mat operator*(const Mat& a, const Mat& b) {
  check_same(a, b);
  const int n = a.n();
  Mat c(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

double norm_fro(const Mat& a) {
  double s = 0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double norm_max(const Mat& a) {
  double s = 0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) s = std::max(s, std::abs(a(i, j)));
  return s;
}

double norm_one(const Mat& a) {
  double best = 0;
  for (int j = 0; j < a.n(); ++j) {
    double s = 0;
    for (int i = 0; i < a.n(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

std::vector<double> symmetric_eigenvalues(const Mat& s_in, double rel_tol) {
  Mat s = s_in;
  const int n = s.n();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0, diag = 0;
    for (int i = 0; i < n; ++i) {
      diag += s(i, i) * s(i, i);
      for (int j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
    }
    if (off <= rel_tol * rel_tol * rel_tol * diag || off == 0.0) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (s(p, q) == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (int k = 0; k < n; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (int k = 0; k < n; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = s(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double opnorm(const Mat& a) {
  if (a.n() == 0) return 0.0;
  if (a.n() == 2) {
    const double f = a(0, 0) * a(0, 0) + a(0, 1) * a(0, 1) + a(1, 0) * a(1, 0) + a(1, 1) * a(1, 1);
    const double dt = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = std::sqrt(std::max(0.0, (f - 2 * dt) * (f + 2 * dt)));
    return std::sqrt(0.5 * (f + disc));
  }
  const double scale = norm_max(a);
  if (scale == 0.0) return 0.0;
  Mat b = (1.0 / scale) * a;
  auto ev = symmetric_eigenvalues(b.transpose() * b);
  return scale * std::sqrt(std::max(0.0, ev.back()));
}

namespace {

struct LU {
  Mat m;
  std::vector<int> piv;
  int sign = 1;
  bool singular = false;
};

LU lu_decompose(const Mat& a) {
  LU f{a, std::vector<int>(a.n()), 1, false};
  const int n = a.n();
  for (int i = 0; i < n; ++i) f.piv[i] = i;
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(f.m(i, k)) > std::abs(f.m(p, k))) p = i;
    if (f.m(p, k) == 0.0) {
      f.singular = true;
      continue;
    }
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(f.m(k, j), f.m(p, j));
      std::swap(f.piv[k], f.piv[p]);
      f.sign = -f.sign;
    }
    for (int i = k + 1; i < n; ++i) {
      f.m(i, k) /= f.m(k, k);
      const double l = f.m(i, k);
      for (int j = k + 1; j < n; ++j) f.m(i, j) -= l * f.m(k, j);
    }
  }
  return f;
}

}  // namespace

double det(const Mat& a) {
  LU f = lu_decompose(a);
  if (f.singular) return 0.0;
  double d = f.sign;
  for (int i = 0; i < a.n(); ++i) d *= f.m(i, i);
  return d;
}

Mat solve(const Mat& a, const Mat& b) {
  check_same(a, b);
  LU f = lu_decompose(a);
  if (f.singular) throw std::domain_error("singular matrix");
  const int n = a.n();
  Mat x(n);
  for (int c = 0; c < n; ++c) {
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      double s = b(f.piv[i], c);
      for (int j = 0; j < i; ++j) s -= f.m(i, j) * y[j];
      y[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = y[i];
      for (int j = i + 1; j < n; ++j) s -= f.m(i, j) * x(j, c);
      x(i, c) = s / f.m(i, i);
    }
  }
  return x;
}

Mat inverse(const Mat& a) { return solve(a, Mat::identity(a.n())); }

Mat expm(const Mat& a) {
  const int n = a.n();
  static const double c[7] = {1.0,
                              1.0 / 2.0,
                              5.0 / 44.0,
                              1.0 / 66.0,
                              1.0 / 792.0,
                              1.0 / 15840.0,
                              1.0 / 665280.0};
  const double nrm = norm_one(a);
  int s = 0;
  if (nrm > 0.5) s = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  Mat x = std::ldexp(1.0, -s) * a;
  Mat p = Mat::identity(n);
  Mat num = Mat::identity(n), den = Mat::identity(n);
  for (int j = 1; j <= 6; ++j) {
    p = p * x;
    num += c[j] * p;
    den += ((j % 2 == 0) ? c[j] : -c[j]) * p;
  }
  Mat r = solve(den, num);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

Mat sqrtm(const Mat& a) {
  const int n = a.n();
  Mat y = a, z = Mat::identity(n);
  for (int it = 0; it < 100; ++it) {
    Mat yi = inverse(y), zi = inverse(z);
    Mat yn = 0.5 * (y + zi);
    Mat zn = 0.5 * (z + yi);
    const double delta = norm_fro(yn - y) / std::max(1e-300, norm_fro(yn));
    y = yn;
    z = zn;
    if (delta < 1e-15) break;
  }
  return y;
}

Mat logm(const Mat& a) {
  const int n = a.n();
  const Mat id = Mat::identity(n);
  Mat x = a;
  int k = 0;
  while (norm_one(x - id) > 0.25) {
    x = sqrtm(x);
    if (++k > 60) throw std::domain_error("logm: square-root iteration did not approach identity");
  }
  Mat z = solve((x + id).transpose(), (x - id).transpose()).transpose();  // (x-I)(x+I)^-1
  Mat z2 = z * z;
  Mat term = z;
  Mat sum = z;
  for (int j = 1; j < 60; ++j) {
    term = term * z2;
    Mat add = (1.0 / (2 * j + 1)) * term;
    sum += add;
    if (norm_one(add) < 1e-18 * std::max(1.0, norm_one(sum))) break;
  }
  return std::ldexp(2.0, k) * sum;
}

nlohmann::json to_json(const Mat& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < a.n(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (int j = 0; j < a.n(); ++j) r.push_back(a(i, j));
    rows.push_back(r);
  }
  return rows;
}

Mat mat_from_json(const nlohmann::json& j) {
  const int n = static_cast<int>(j.size());
  Mat m(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(j[i].size()) != n) throw std::invalid_argument("matrix must be square");
    for (int c = 0; c < n; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

}  // namespace lieheat
