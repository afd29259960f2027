#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace lieheat {

using Rational = mpq_class;
using Word = std::vector<int>;

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConstantTermError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Truncated series in the free associative algebra on `ngens` letters.
///
/// Storage is dense per degree with integer numerators over one common
/// denominator; the representation is kept canonical (gcd of all numerators
/// and the denominator is 1, denominator positive), so equality is structural.
class FreeSeries {
 public:
  static constexpr int kMaxDegree = 8;

  FreeSeries(int ngens, int dmax);

  static FreeSeries one(int ngens, int dmax);
  static FreeSeries generator(int ngens, int dmax, int letter);
  static FreeSeries word(int ngens, int dmax, const Word& w, const Rational& c = 1);
  /// Build from per-degree numerator arrays over a common denominator.
  static FreeSeries from_numerators(int ngens, int dmax, std::vector<std::vector<mpz_class>> num,
                                    mpz_class den);

  [[nodiscard]] int ngens() const { return ngens_; }
  [[nodiscard]] int dmax() const { return dmax_; }

  [[nodiscard]] Rational coeff(const Word& w) const;
  [[nodiscard]] Rational constant_term() const { return coeff({}); }
  void add_term(const Word& w, const Rational& c);

  /// Sparse canonical view: nonzero terms ordered by degree, then lexicographically.
  [[nodiscard]] std::vector<std::pair<Word, Rational>> terms() const;
  [[nodiscard]] std::size_t term_count() const;
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] int min_degree() const;  // dmax+1 for the zero series

  [[nodiscard]] FreeSeries degree_part(int n) const;
  [[nodiscard]] FreeSeries truncated(int new_dmax) const;

  FreeSeries operator-() const;
  friend FreeSeries operator+(const FreeSeries& a, const FreeSeries& b);
  friend FreeSeries operator-(const FreeSeries& a, const FreeSeries& b);
  friend FreeSeries operator*(const FreeSeries& a, const FreeSeries& b);
  friend FreeSeries operator*(const Rational& s, const FreeSeries& a);
  friend bool operator==(const FreeSeries& a, const FreeSeries& b);

  // Raw access for evaluators: numerators of degree d indexed by word index.
  [[nodiscard]] const std::vector<mpz_class>& numerators(int d) const { return num_[d]; }
  [[nodiscard]] const mpz_class& denominator() const { return den_; }
  [[nodiscard]] std::size_t word_index(const Word& w) const;
  [[nodiscard]] Word index_word(int degree, std::size_t index) const;

 private:
  int ngens_;
  int dmax_;
  std::vector<std::vector<mpz_class>> num_;
  mpz_class den_;

  void normalize();
  void check_word(const Word& w) const;
};

void require_same_shape(const FreeSeries& a, const FreeSeries& b);

FreeSeries add(const FreeSeries& a, const FreeSeries& b);
FreeSeries mul(const FreeSeries& a, const FreeSeries& b);
FreeSeries bracket(const FreeSeries& a, const FreeSeries& b);
FreeSeries exp(const FreeSeries& a);
FreeSeries log(const FreeSeries& a);

/// Dynkin test: every homogeneous part p_n satisfies delta(p_n) = n p_n.
bool dynkin_is_lie(const FreeSeries& a);
/// Left-nested bracketing operator applied word by word.
FreeSeries dynkin_operator(const FreeSeries& a);

/// Words in which each index of `vars` occurs exactly once and nothing else occurs.
FreeSeries multilinear_part(const FreeSeries& a, const std::vector<int>& vars);

/// Algebra homomorphism sending letter i to images[i] (truncated at a's dmax).
FreeSeries substitute(const FreeSeries& a, const std::vector<FreeSeries>& images);

nlohmann::json to_json(const FreeSeries& a);
FreeSeries series_from_json(const nlohmann::json& j);

std::string to_string(const FreeSeries& a);

}  // namespace lieheat
