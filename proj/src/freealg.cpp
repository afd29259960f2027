#include "lieheat/freealg.hpp"

#include <algorithm>
#include <sstream>

namespace lieheat {

namespace {

std::size_t ipow(int base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

}  // namespace

FreeSeries::FreeSeries(int ngens, int dmax) : ngens_(ngens), dmax_(dmax), den_(1) {
  if (ngens < 1) throw ShapeError("ngens must be positive");
  if (dmax < 0 || dmax > kMaxDegree) throw ShapeError("dmax must lie in [0, 8]");
  num_.resize(dmax + 1);
  for (int d = 0; d <= dmax; ++d) num_[d].assign(ipow(ngens, d), mpz_class(0));
}

FreeSeries FreeSeries::one(int ngens, int dmax) {
  FreeSeries s(ngens, dmax);
  s.num_[0][0] = 1;
  return s;
}

FreeSeries FreeSeries::generator(int ngens, int dmax, int letter) {
  return word(ngens, dmax, Word{letter});
}

FreeSeries FreeSeries::word(int ngens, int dmax, const Word& w, const Rational& c) {
  FreeSeries s(ngens, dmax);
  s.add_term(w, c);
  return s;
}

FreeSeries FreeSeries::from_numerators(int ngens, int dmax, std::vector<std::vector<mpz_class>> num,
                                       mpz_class den) {
  FreeSeries s(ngens, dmax);
  if (static_cast<int>(num.size()) != dmax + 1) throw ShapeError("numerator degrees mismatch");
  for (int d = 0; d <= dmax; ++d)
    if (num[d].size() != s.num_[d].size()) throw ShapeError("numerator sizes mismatch");
  if (sgn(den) == 0) throw std::domain_error("zero denominator");
  s.num_ = std::move(num);
  s.den_ = std::move(den);
  s.normalize();
  return s;
}

void FreeSeries::check_word(const Word& w) const {
  for (int l : w)
    if (l < 0 || l >= ngens_) throw ShapeError("letter out of range");
}

std::size_t FreeSeries::word_index(const Word& w) const {
  std::size_t idx = 0;
  for (int l : w) idx = idx * static_cast<std::size_t>(ngens_) + static_cast<std::size_t>(l);
  return idx;
}

Word FreeSeries::index_word(int degree, std::size_t index) const {
  Word w(degree);
  for (int i = degree - 1; i >= 0; --i) {
    w[i] = static_cast<int>(index % static_cast<std::size_t>(ngens_));
    index /= static_cast<std::size_t>(ngens_);
  }
  return w;
}

Rational FreeSeries::coeff(const Word& w) const {
  check_word(w);
  if (static_cast<int>(w.size()) > dmax_) return 0;
  Rational r(num_[w.size()][word_index(w)], den_);
  r.canonicalize();
  return r;
}

void FreeSeries::add_term(const Word& w, const Rational& c) {
  check_word(w);
  if (static_cast<int>(w.size()) > dmax_) return;
  if (c == 0) return;
  // bring everything to the common denominator lcm(den_, c.den)
  mpz_class l;
  mpz_lcm(l.get_mpz_t(), den_.get_mpz_t(), c.get_den_mpz_t());
  if (l != den_) {
    mpz_class f = l / den_;
    for (auto& v : num_)
      for (auto& x : v)
        if (sgn(x) != 0) x *= f;
    den_ = l;
  }
  num_[w.size()][word_index(w)] += c.get_num() * (l / c.get_den());
  normalize();
}

void FreeSeries::normalize() {
  if (sgn(den_) < 0) {
    den_ = -den_;
    for (auto& v : num_)
      for (auto& x : v) x = -x;
  }
  mpz_class g = den_;
  for (const auto& v : num_) {
    for (const auto& x : v) {
      if (sgn(x) == 0) continue;
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
      if (g == 1) return;
    }
  }
  bool all_zero = true;
  for (const auto& v : num_)
    for (const auto& x : v)
      if (sgn(x) != 0) all_zero = false;
  if (all_zero) {
    den_ = 1;
    return;
  }
  if (g == 1) return;
  for (auto& v : num_)
    for (auto& x : v)
      if (sgn(x) != 0) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
}

std::vector<std::pair<Word, Rational>> FreeSeries::terms() const {
  std::vector<std::pair<Word, Rational>> out;
  for (int d = 0; d <= dmax_; ++d) {
    for (std::size_t i = 0; i < num_[d].size(); ++i) {
      if (sgn(num_[d][i]) == 0) continue;
      Rational r(num_[d][i], den_);
      r.canonicalize();
      out.emplace_back(index_word(d, i), r);
    }
  }
  return out;
}

std::size_t FreeSeries::term_count() const {
  std::size_t n = 0;
  for (const auto& v : num_)
    for (const auto& x : v)
      if (sgn(x) != 0) ++n;
  return n;
}

bool FreeSeries::is_zero() const { return min_degree() > dmax_; }

int FreeSeries::min_degree() const {
  for (int d = 0; d <= dmax_; ++d)
    for (const auto& x : num_[d])
      if (sgn(x) != 0) return d;
  return dmax_ + 1;
}

FreeSeries FreeSeries::degree_part(int n) const {
  FreeSeries s(ngens_, dmax_);
  if (n < 0 || n > dmax_) return s;
  s.num_[n] = num_[n];
  s.den_ = den_;
  s.normalize();
  return s;
}

FreeSeries FreeSeries::truncated(int new_dmax) const {
  FreeSeries s(ngens_, new_dmax);
  for (int d = 0; d <= std::min(dmax_, new_dmax); ++d) s.num_[d] = num_[d];
  s.den_ = den_;
  s.normalize();
  return s;
}

void require_same_shape(const FreeSeries& a, const FreeSeries& b) {
  if (a.ngens() != b.ngens() || a.dmax() != b.dmax())
    throw ShapeError("incompatible series shapes (ngens/dmax differ)");
}

FreeSeries FreeSeries::operator-() const {
  FreeSeries s = *this;
  for (auto& v : s.num_)
    for (auto& x : v) x = -x;
  return s;
}

FreeSeries operator+(const FreeSeries& a, const FreeSeries& b) {
  require_same_shape(a, b);
  FreeSeries s(a.ngens_, a.dmax_);
  mpz_class l;
  mpz_lcm(l.get_mpz_t(), a.den_.get_mpz_t(), b.den_.get_mpz_t());
  mpz_class fa = l / a.den_, fb = l / b.den_;
  for (int d = 0; d <= a.dmax_; ++d) {
    auto& out = s.num_[d];
    const auto& va = a.num_[d];
    const auto& vb = b.num_[d];
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (sgn(va[i]) != 0) mpz_addmul(out[i].get_mpz_t(), va[i].get_mpz_t(), fa.get_mpz_t());
      if (sgn(vb[i]) != 0) mpz_addmul(out[i].get_mpz_t(), vb[i].get_mpz_t(), fb.get_mpz_t());
    }
  }
  s.den_ = l;
  s.normalize();
  return s;
}

FreeSeries operator-(const FreeSeries& a, const FreeSeries& b) { return a + (-b); }

FreeSeries operator*(const FreeSeries& a, const FreeSeries& b) {
  require_same_shape(a, b);
  const int D = a.dmax_;
  FreeSeries s(a.ngens_, D);
  std::vector<char> nza(D + 1, 0), nzb(D + 1, 0);
  for (int d = 0; d <= D; ++d) {
    for (const auto& x : a.num_[d]) if (sgn(x) != 0) { nza[d] = 1; break; }
    for (const auto& x : b.num_[d]) if (sgn(x) != 0) { nzb[d] = 1; break; }
  }
  for (int da = 0; da <= D; ++da) {
    if (!nza[da]) continue;
    for (int db = 0; da + db <= D; ++db) {
      if (!nzb[db]) continue;
      const std::size_t shift = ipow(a.ngens_, db);
      const auto& va = a.num_[da];
      const auto& vb = b.num_[db];
      auto& out = s.num_[da + db];
      for (std::size_t i = 0; i < va.size(); ++i) {
        if (sgn(va[i]) == 0) continue;
        const std::size_t base = i * shift;
        for (std::size_t j = 0; j < vb.size(); ++j) {
          if (sgn(vb[j]) == 0) continue;
          mpz_addmul(out[base + j].get_mpz_t(), va[i].get_mpz_t(), vb[j].get_mpz_t());
        }
      }
    }
  }
  s.den_ = a.den_ * b.den_;
  s.normalize();
  return s;
}

FreeSeries operator*(const Rational& c, const FreeSeries& a) {
  FreeSeries s = a;
  if (c == 0) return FreeSeries(a.ngens_, a.dmax_);
  for (auto& v : s.num_)
    for (auto& x : v)
      if (sgn(x) != 0) x *= c.get_num();
  s.den_ *= c.get_den();
  s.normalize();
  return s;
}

bool operator==(const FreeSeries& a, const FreeSeries& b) {
  return a.ngens_ == b.ngens_ && a.dmax_ == b.dmax_ && a.den_ == b.den_ && a.num_ == b.num_;
}

FreeSeries add(const FreeSeries& a, const FreeSeries& b) { return a + b; }
FreeSeries mul(const FreeSeries& a, const FreeSeries& b) { return a * b; }
FreeSeries bracket(const FreeSeries& a, const FreeSeries& b) { return a * b - b * a; }

FreeSeries exp(const FreeSeries& a) {
  if (a.constant_term() != 0) throw ConstantTermError("exp requires a zero constant term");
  const int low = a.min_degree();
  FreeSeries one = FreeSeries::one(a.ngens(), a.dmax());
  if (low > a.dmax()) return one;
  const int K = a.dmax() / low;
  // Horner: 1 + a(1 + a/2(1 + ... (1 + a/K)))
  FreeSeries acc = one;
  for (int k = K; k >= 1; --k) acc = one + Rational(1, k) * (a * acc);
  return acc;
}

FreeSeries log(const FreeSeries& a) {
  if (a.constant_term() != 1) throw ConstantTermError("log requires constant term 1");
  FreeSeries one = FreeSeries::one(a.ngens(), a.dmax());
  FreeSeries y = a - one;
  const int low = y.min_degree();
  if (low > a.dmax()) return FreeSeries(a.ngens(), a.dmax());
  const int K = a.dmax() / low;
  // y(1 - y(1/2 - y(1/3 - ...)))
  FreeSeries acc = Rational(K % 2 == 1 ? 1 : -1, K) * one;
  for (int k = K - 1; k >= 1; --k) {
    Rational c(k % 2 == 1 ? 1 : -1, k);
    acc = c * one + y * acc;
  }
  return y * acc;
}

FreeSeries dynkin_operator(const FreeSeries& a) {
  const int ng = a.ngens();
  // Work on numerators; the common denominator is shared.
  std::vector<std::vector<mpz_class>> acc(a.dmax() + 1);
  for (int d = 0; d <= a.dmax(); ++d) acc[d].assign(a.numerators(d).size(), mpz_class(0));
  for (int d = 1; d <= a.dmax(); ++d) {
    const auto& v = a.numerators(d);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (sgn(v[i]) == 0) continue;
      Word w = a.index_word(d, i);
      // expand [[...[x1,x2],...],xd] as signed words
      std::vector<std::pair<Word, int>> cur{{Word{w[0]}, 1}};
      for (int p = 1; p < d; ++p) {
        std::vector<std::pair<Word, int>> nxt;
        nxt.reserve(cur.size() * 2);
        for (auto& [u, sg] : cur) {
          Word r = u;
          r.push_back(w[p]);
          nxt.emplace_back(std::move(r), sg);
          Word l;
          l.reserve(u.size() + 1);
          l.push_back(w[p]);
          l.insert(l.end(), u.begin(), u.end());
          nxt.emplace_back(std::move(l), -sg);
        }
        cur = std::move(nxt);
      }
      for (auto& [u, sg] : cur) {
        auto& slot = acc[d][a.word_index(u)];
        if (sg > 0) slot += v[i];
        else slot -= v[i];
      }
    }
  }
  return FreeSeries::from_numerators(ng, a.dmax(), std::move(acc), a.denominator());
}

bool dynkin_is_lie(const FreeSeries& a) {
  if (a.constant_term() != 0) throw ConstantTermError("dynkin_is_lie requires a zero constant term");
  FreeSeries delta = dynkin_operator(a);
  for (int d = 1; d <= a.dmax(); ++d) {
    if (!(delta.degree_part(d) == Rational(d) * a.degree_part(d))) return false;
  }
  return true;
}

FreeSeries multilinear_part(const FreeSeries& a, const std::vector<int>& vars) {
  std::vector<int> sorted = vars;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const int d = static_cast<int>(sorted.size());
  if (d > a.dmax()) return FreeSeries(a.ngens(), a.dmax());
  std::vector<std::vector<mpz_class>> keep(a.dmax() + 1);
  for (int e = 0; e <= a.dmax(); ++e) keep[e].assign(a.numerators(e).size(), mpz_class(0));
  const auto& v = a.numerators(d);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (sgn(v[i]) == 0) continue;
    Word w = a.index_word(d, i);
    std::sort(w.begin(), w.end());
    if (w == sorted) keep[d][i] = v[i];
  }
  return FreeSeries::from_numerators(a.ngens(), a.dmax(), std::move(keep), a.denominator());
}

FreeSeries substitute(const FreeSeries& a, const std::vector<FreeSeries>& images) {
  if (static_cast<int>(images.size()) != a.ngens()) throw ShapeError("one image per letter required");
  const int ng = images.empty() ? 1 : images[0].ngens();
  for (const auto& im : images) {
    if (im.ngens() != ng || im.dmax() != a.dmax()) throw ShapeError("image shapes differ");
    if (im.constant_term() != 0) throw ConstantTermError("images must have zero constant term");
  }
  FreeSeries out(ng, a.dmax());
  for (const auto& [w, c] : a.terms()) {
    FreeSeries p = FreeSeries::one(ng, a.dmax());
    for (int l : w) p = p * images[l];
    out = out + c * p;
  }
  return out;
}

nlohmann::json to_json(const FreeSeries& a) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [w, c] : a.terms()) {
    terms.push_back({{"word", w}, {"num", c.get_num().get_str()}, {"den", c.get_den().get_str()}});
  }
  return {{"ngens", a.ngens()}, {"dmax", a.dmax()}, {"terms", terms}};
}

FreeSeries series_from_json(const nlohmann::json& j) {
  FreeSeries s(j.at("ngens").get<int>(), j.at("dmax").get<int>());
  for (const auto& t : j.at("terms")) {
    Word w = t.at("word").get<Word>();
    Rational c(mpz_class(t.at("num").get<std::string>()), mpz_class(t.at("den").get<std::string>()));
    c.canonicalize();
    s.add_term(w, c);
  }
  return s;
}

std::string to_string(const FreeSeries& a) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : a.terms()) {
    if (!first) os << (c > 0 ? " + " : " - ");
    else if (c < 0) os << "-";
    first = false;
    Rational ac = abs(c);
    if (ac != 1 || w.empty()) os << ac.get_str();
    for (int l : w) os << "X" << (l + 1);
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace lieheat
