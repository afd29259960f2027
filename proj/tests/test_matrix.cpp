#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <random>

#include "lieheat/matrix.hpp"

using namespace lieheat;

namespace {

Eigen::MatrixXd to_eigen(const Mat& a) {
  Eigen::MatrixXd e(a.n(), a.n());
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < a.n(); ++j) e(i, j) = a(i, j);
  return e;
}

double diff(const Mat& a, const Eigen::MatrixXd& e) { return (to_eigen(a) - e).cwiseAbs().maxCoeff(); }

Mat random_mat(std::mt19937& rng, int n, double scale) {
  std::normal_distribution<double> nd(0, scale);
  Mat a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  return a;
}

}  // namespace

TEST_CASE("products and norms") {
  Mat a{{1, 2}, {3, 4}}, b{{0, 1}, {1, 0}};
  Mat ab = a * b;
  CHECK(ab(0, 0) == 2);
  CHECK(ab(1, 1) == 3);
  CHECK(commutator(a, a).n() == 2);
  CHECK(norm_max(commutator(a, a)) == 0);
  CHECK(norm_one(a) == 6);
  CHECK(det(a) == doctest::Approx(-2));
}

TEST_CASE("opnorm agrees with SVD") {
  std::mt19937 rng(1);
  for (int n : {2, 3, 4, 6}) {
    for (int it = 0; it < 10; ++it) {
      Mat a = random_mat(rng, n, 1.0);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
      CHECK(std::abs(opnorm(a) - svd.singularValues()(0)) < 1e-11 * svd.singularValues()(0));
    }
  }
  CHECK(opnorm(Mat(3)) == 0);
  CHECK(norm_lie(Mat::identity(2)) == doctest::Approx(2));
}

TEST_CASE("inverse and solve") {
  std::mt19937 rng(2);
  Mat a = random_mat(rng, 4, 1.0);
  CHECK(diff(inverse(a), to_eigen(a).inverse()) < 1e-10);
  CHECK(diff(a * inverse(a), Eigen::MatrixXd::Identity(4, 4)) < 1e-12);
  CHECK_THROWS(inverse(Mat(2)));
}

TEST_CASE("expm against Eigen") {
  std::mt19937 rng(3);
  for (double scale : {0.01, 0.5, 3.0, 10.0}) {
    Mat a = random_mat(rng, 3, scale);
    Eigen::MatrixXd ref = to_eigen(a).exp();
    CHECK(diff(expm(a), ref) < 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
  CHECK(diff(expm(Mat(3)), Eigen::MatrixXd::Identity(3, 3)) == 0);
}

TEST_CASE("logm and sqrtm invert expm and squaring") {
  std::mt19937 rng(4);
  for (int it = 0; it < 10; ++it) {
    Mat a = random_mat(rng, 3, 0.6);
    Mat l = logm(expm(a));
    CHECK(diff(l, to_eigen(expm(a)).log()) < 1e-10);
    Mat s = sqrtm(expm(a));
    CHECK(norm_max(s * s - expm(a)) < 1e-12 * std::max(1.0, norm_max(expm(a))));
  }
  Mat rot{{0, -3}, {3, 0}};
  CHECK(norm_max(logm(expm(rot)) - rot) < 1e-10);
}

TEST_CASE("symmetric eigenvalues") {
  Mat s{{2, 1, 0}, {1, 2, 0}, {0, 0, 5}};
  auto ev = symmetric_eigenvalues(s);
  CHECK(ev[0] == doctest::Approx(1));
  CHECK(ev[1] == doctest::Approx(3));
  CHECK(ev[2] == doctest::Approx(5));
}

TEST_CASE("json") {
  Mat a{{1, 2}, {3, 4}};
  Mat b = mat_from_json(to_json(a));
  CHECK(norm_max(a - b) == 0);
  CHECK_THROWS(mat_from_json(nlohmann::json::parse("[[1,2],[3]]")));
}
