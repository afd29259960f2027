#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace lieheat {

/// Dense square real matrix, row-major.
class Mat {
 public:
  Mat() = default;
  explicit Mat(int n, double fill = 0.0) : n_(n), a_(static_cast<std::size_t>(n) * n, fill) {}
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(int n);
  static Mat zero(int n) { return Mat(n); }

  [[nodiscard]] int n() const { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  [[nodiscard]] double* data() { return a_.data(); }
  [[nodiscard]] const double* data() const { return a_.data(); }

  Mat& operator+=(const Mat& b);
  Mat& operator-=(const Mat& b);
  Mat& operator*=(double s);

  [[nodiscard]] Mat transpose() const;
  [[nodiscard]] double trace() const;

 private:
  int n_ = 0;
  std::vector<double> a_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator-(Mat a);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double s, Mat a);
Mat operator*(Mat a, double s);

Mat commutator(const Mat& a, const Mat& b);

double norm_fro(const Mat& a);
double norm_max(const Mat& a);
double norm_one(const Mat& a);
/// Largest singular value via cyclic Jacobi on A^T A (relative tolerance 1e-12).
double opnorm(const Mat& a);
/// Banach-Lie norm: twice the operator norm.
inline double norm_lie(const Mat& a) { return 2.0 * opnorm(a); }

double det(const Mat& a);
Mat inverse(const Mat& a);
/// Solve A X = B by partial-pivot LU.
Mat solve(const Mat& a, const Mat& b);

/// Eigenvalues of a symmetric matrix (ascending) by cyclic Jacobi.
std::vector<double> symmetric_eigenvalues(const Mat& s, double rel_tol = 1e-12);

/// Matrix exponential: scaling and squaring with the diagonal (6,6) Pade approximant.
Mat expm(const Mat& a);
/// Principal square root (Denman-Beavers iteration).
Mat sqrtm(const Mat& a);
/// Principal logarithm: inverse scaling and squaring, Gregory series at the core.
Mat logm(const Mat& a);

nlohmann::json to_json(const Mat& a);
Mat mat_from_json(const nlohmann::json& j);

}  // namespace lieheat
