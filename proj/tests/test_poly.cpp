#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "sumsq/error.hpp"
#include "sumsq/polynomial.hpp"

using namespace sumsq;

namespace {

using TermMap = std::map<Exponents, Rational>;

TermMap to_map(const Polynomial& p) {
  TermMap m;
  for (size_t i = 0; i < p.term_count(); ++i) m[p.degmat()[i]] = p.coeffs()[i];
  return m;
}

// Independent product oracle: plain convolution over a term map.
TermMap mul_oracle(const Polynomial& a, const Polynomial& b) {
  TermMap out;
  for (size_t i = 0; i < a.term_count(); ++i) {
    for (size_t j = 0; j < b.term_count(); ++j) {
      Exponents e = a.degmat()[i];
      for (size_t v = 0; v < e.size(); ++v) e[v] += b.degmat()[j][v];
      out[e] += a.coeffs()[i] * b.coeffs()[j];
    }
  }
  for (auto it = out.begin(); it != out.end();)
    it = (it->second == 0) ? out.erase(it) : std::next(it);
  return out;
}

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Polynomial random_poly(VarTablePtr vars, std::mt19937& rng, int max_terms = 6,
                       int max_deg = 3) {
  std::uniform_int_distribution<int> nterms(0, max_terms);
  std::uniform_int_distribution<int> expo(0, max_deg);
  std::uniform_int_distribution<int> num(-5, 5);
  std::uniform_int_distribution<int> den(1, 4);
  int t = nterms(rng);
  std::vector<Exponents> deg;
  std::vector<Rational> co;
  for (int i = 0; i < t; ++i) {
    Exponents e(vars->size());
    for (size_t v = 0; v < vars->size(); ++v) e[v] = expo(rng);
    deg.push_back(e);
    co.push_back(Rational(num(rng), den(rng)));
  }
  return Polynomial(vars, deg, co);
}

}  // namespace

TEST_CASE("vartable validation") {
  CHECK_NOTHROW(VarTable::make({"x", "y", "long_name2"}));
  CHECK_THROWS_AS(VarTable::make({"x", "x"}), Error);
  CHECK_THROWS_AS(VarTable::make({""}), Error);
  CHECK_THROWS_AS(VarTable::make({"coeff_1"}), Error);
  CHECK_THROWS_AS(VarTable::make({"Mvar_2"}), Error);
  CHECK_NOTHROW(VarTable::internal({"coeff_1", "x"}));
  auto t = VarTable::make({"x", "y"});
  CHECK(t->index_of("y") == size_t{1});
  CHECK(!t->index_of("z"));
}

TEST_CASE("canonical form and invariants") {
  auto t = VarTable::make({"x", "y"});
  // Shuffled rows with a duplicate and a cancelling pair.
  Polynomial p(t, {{0, 2}, {2, 0}, {0, 2}, {1, 1}, {1, 1}}, {3, 1, -1, 2, -2});
  CHECK(p.term_count() == 2);
  CHECK(p.degmat()[0] == Exponents{2, 0});
  CHECK(p.degmat()[1] == Exponents{0, 2});
  CHECK(p.coeffs()[1] == 2);
  // Idempotence: rebuilding from the canonical data changes nothing.
  Polynomial q(t, p.degmat(), p.coeffs());
  CHECK(q.degmat() == p.degmat());
  CHECK(q.coeffs() == p.coeffs());
  // Rows sorted and distinct, no zero coefficients.
  for (size_t i = 0; i + 1 < p.term_count(); ++i)
    CHECK(monomial_before(p.degmat()[i], p.degmat()[i + 1]));
  for (const Rational& c : p.coeffs()) CHECK(c != 0);
  CHECK_THROWS_AS(Polynomial(t, {{-1, 0}}, {Rational(1)}), Error);
}

TEST_CASE("term order matches the documented listing") {
  auto t = VarTable::make({"x", "y"});
  auto ms = monomials(t, {1, 2, 3});
  std::vector<std::string> want = {"x",   "y",     "x^2",   "x*y", "y^2",
                                   "x^3", "x^2*y", "x*y^2", "y^3"};
  REQUIRE(ms.size() == want.size());
  for (size_t i = 0; i < ms.size(); ++i) CHECK(ms[i].str() == want[i]);
}

TEST_CASE("monomial counts follow the stars-and-bars formula") {
  for (size_t n = 1; n <= 4; ++n) {
    std::vector<std::string> names;
    for (size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
    auto t = VarTable::make(names);
    for (int d = 0; d <= 5; ++d) {
      auto ms = monomial_exponents(n, {d});
      CHECK(ms.size() == static_cast<size_t>(binom(int(n) + d - 1, d)));
      for (const auto& e : ms) CHECK(total_degree(e) == d);
      for (size_t i = 0; i + 1 < ms.size(); ++i) CHECK(monomial_before(ms[i], ms[i + 1]));
    }
  }
}

TEST_CASE("mpmonomials matches the documented listing and counts") {
  auto t = VarTable::make({"x1", "x2", "y1", "y2", "z1"});
  auto ms = mpmonomials(t, {{0, 1}, {2, 3}, {4}}, {{1, 2}, {1}, {3}});
  std::vector<std::string> want = {
      "x1*y1*z1^3",   "x2*y1*z1^3",   "x1^2*y1*z1^3", "x1*x2*y1*z1^3",
      "x2^2*y1*z1^3", "x1*y2*z1^3",   "x2*y2*z1^3",   "x1^2*y2*z1^3",
      "x1*x2*y2*z1^3", "x2^2*y2*z1^3"};
  REQUIRE(ms.size() == want.size());
  for (size_t i = 0; i < ms.size(); ++i) CHECK(ms[i].str() == want[i]);

  // Size is the product of the per-partition counts.
  auto ms2 = mpmonomials(t, {{0, 1}, {2, 3, 4}}, {{0, 1, 2}, {2}});
  CHECK(ms2.size() == monomial_exponents(2, {0, 1, 2}).size() *
                          monomial_exponents(3, {2}).size());
}

TEST_CASE("differentiation of the guide example") {
  auto t = VarTable::make({"x", "y"});
  Polynomial p = poly_parse("2*x^2 + 3*x*y + 4*y^4", t);
  CHECK(p.diff(0) == poly_parse("4*x + 3*y", t));
  CHECK(p.diff(1) == poly_parse("3*x + 16*y^3", t));
}

TEST_CASE("evaluation is exact") {
  auto t = VarTable::make({"x", "y"});
  Polynomial p = poly_parse("2*x^2 + 3*x*y + 4*y^4", t);
  CHECK(p.eval({Rational(2), Rational(1, 2)}) == Rational(45, 4));
  CHECK(p.eval(std::vector<double>{2.0, 0.5}) == doctest::Approx(11.25));
  Polynomial c = p.substitute({{0, Rational(2)}, {1, Rational(1, 2)}});
  CHECK(c.is_constant());
  CHECK(c.coeff_of(Exponents{0, 0}) == Rational(45, 4));
}

TEST_CASE("ring laws hold exactly on random instances") {
  auto t = VarTable::make({"x", "y", "z"});
  std::mt19937 rng(20240817);
  for (int trial = 0; trial < 120; ++trial) {
    Polynomial a = random_poly(t, rng), b = random_poly(t, rng), c = random_poly(t, rng);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a - b) + b == a);
    CHECK(to_map(a * b) == mul_oracle(a, b));
    // Derivation rules: linearity and the product rule.
    for (size_t v = 0; v < 3; ++v) {
      CHECK((a + b).diff(v) == a.diff(v) + b.diff(v));
      CHECK((a * b).diff(v) == a.diff(v) * b + a * b.diff(v));
    }
    CHECK(a.pow(2) == a * a);
    CHECK(a.pow(0) == Polynomial::constant(t, 1));
    // Evaluation is a ring homomorphism.
    std::vector<Rational> pt = {Rational(1, 2), Rational(-2), Rational(3, 5)};
    CHECK((a * b + c).eval(pt) == a.eval(pt) * b.eval(pt) + c.eval(pt));
  }
}

TEST_CASE("parser accepts the documented grammar") {
  auto t = VarTable::make({"x1", "x2"});
  Polynomial p = poly_parse("2*x1^4 + 2*x1^3*x2 - x1^2*x2^2 + 5*x2^4", t);
  CHECK(p.str() == "2*x1^4 + 2*x1^3*x2 - x1^2*x2^2 + 5*x2^4");
  CHECK(poly_parse("2x1^4+2x1^3x2-x1^2x2^2+5x2^4", t) == p);
  CHECK(poly_parse(" 2 * x1 ^ 4 + 2x1^3 * x2 - x1^2 x2^2 + 5 x2^4", t) == p);

  auto u = VarTable::make({"x"});
  CHECK(poly_parse("0.5*x", u) == poly_parse("1/2*x", u));
  CHECK(poly_parse("-x", u) == poly_parse("0 - x", u));
  CHECK(poly_parse("3", u).is_constant());
  CHECK(poly_parse("x*x", u) == poly_parse("x^2", u));
  Polynomial tiny = poly_parse("x^2 - 0.000000000000001", u);
  CHECK(tiny.coeff_of(Exponents{0}) == Rational(-1, Integer("1000000000000000")));
}

TEST_CASE("parser rejects malformed input") {
  auto t = VarTable::make({"x", "y"});
  CHECK_THROWS_AS(poly_parse("", t), Error);
  CHECK_THROWS_AS(poly_parse("x + w", t), Error);
  CHECK_THROWS_AS(poly_parse("x^-1", t), Error);
  CHECK_THROWS_AS(poly_parse("x ++ y", t), Error);
  CHECK_THROWS_AS(poly_parse("1/0*x", t), Error);
  CHECK_THROWS_AS(poly_parse("x*", t), Error);
  CHECK_THROWS_AS(poly_parse("x^", t), Error);
  CHECK_THROWS_AS(poly_parse("(x+y)", t), Error);
}

TEST_CASE("format and parse round trip") {
  auto t = VarTable::make({"x", "y", "z"});
  std::mt19937 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    Polynomial p = random_poly(t, rng);
    CHECK(poly_parse(p.str(), t) == p);
  }
  CHECK(Polynomial::zero(t).str() == "0");
  CHECK(Polynomial::zero(t).degree() == -1);
  CHECK(poly_parse("-1/2", t).str() == "-1/2");
}

TEST_CASE("alignment merges variable tables") {
  auto t1 = VarTable::make({"x", "y"});
  auto t2 = VarTable::make({"y", "z"});
  Polynomial p = Polynomial::variable(t1, 0) + Polynomial::variable(t2, 1);
  CHECK(p.vars()->names() == std::vector<std::string>{"x", "y", "z"});
  CHECK(p.str() == "x + z");
  CHECK(p == poly_parse("z + x", VarTable::make({"z", "x"})));
}

TEST_CASE("polynomial matrices") {
  auto t = VarTable::make({"x"});
  PolyMatrix m(2, 2, t, true);
  m.set(0, 1, poly_parse("x", t));
  CHECK(m.at(1, 0) == poly_parse("x", t));
  CHECK_NOTHROW(m.validate());
  PolyMatrix bad(2, 2, t, false);
  bad.at(0, 1) = poly_parse("x", t);
  CHECK_NOTHROW(bad.validate());
  CHECK_THROWS_AS(PolyMatrix(2, 3, t, true), Error);
  CHECK(m.at(0, 0).is_zero());
}

TEST_CASE("degrees and substitution helpers") {
  auto t = VarTable::make({"x", "y"});
  Polynomial p = poly_parse("x^3*y + 2*y^2", t);
  CHECK(p.degree() == 4);
  CHECK(p.degree_in(0) == 3);
  CHECK(p.degree_in(1) == 2);
  Polynomial s = p.substitute({{1, Rational(1)}});
  CHECK(s == poly_parse("x^3 + 2", t));
}
