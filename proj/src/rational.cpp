#include "sumsq/rational.hpp"

#include <cctype>
#include <cmath>

#include "sumsq/error.hpp"

namespace sumsq {

Rational rat_from_string(const std::string& text) {
  if (text.empty()) fail(ErrorKind::parse, "empty number");
  std::string s = text;
  size_t dot = s.find('.');
  if (dot != std::string::npos) {
    // Decimal literal: shift the point out and divide by a power of ten.
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    size_t frac_len = s.size() - dot - 1;
    if (frac_len == 0 || digits.empty())
      fail(ErrorKind::parse, "bad decimal literal '" + text + "'");
    for (size_t i = 0; i < digits.size(); ++i) {
      char c = digits[i];
      if (!(std::isdigit(static_cast<unsigned char>(c)) ||
            (i == 0 && (c == '+' || c == '-'))))
        fail(ErrorKind::parse, "bad decimal literal '" + text + "'");
    }
    Integer num(digits, 10);
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  Rational r;
  if (r.set_str(s, 10) != 0)
    fail(ErrorKind::parse, "bad number '" + text + "'");
  if (r.get_den() == 0) fail(ErrorKind::parse, "zero denominator in '" + text + "'");
  r.canonicalize();
  return r;
}

Rational rat_from_double(double v) {
  if (!std::isfinite(v)) fail(ErrorKind::invalid_argument, "non-finite value");
  return Rational(v);
}

double rat_to_double(const Rational& r) { return r.get_d(); }

std::string rat_to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational rat_pow(const Rational& r, int e) {
  if (e < 0) fail(ErrorKind::invalid_argument, "negative exponent");
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), r.get_num().get_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), r.get_den().get_mpz_t(), e);
  return Rational(num, den);
}

}  // namespace sumsq
