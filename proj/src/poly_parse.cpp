#include <cctype>
#include <string>

#include "sumsq/error.hpp"
#include "sumsq/polynomial.hpp"

namespace sumsq {

namespace {

class Parser {
 public:
  Parser(const std::string& text, VarTablePtr vars)
      : text_(text), vars_(std::move(vars)) {}

  Polynomial run() {
    skip_ws();
    if (eof()) err("empty polynomial");
    Polynomial acc = Polynomial::zero(vars_);
    int sign = 1;
    if (peek() == '+' || peek() == '-') sign = (get() == '-') ? -1 : 1;
    acc += term(sign);
    skip_ws();
    while (!eof()) {
      char c = get();
      if (c == '+')
        sign = 1;
      else if (c == '-')
        sign = -1;
      else
        err(std::string("expected '+' or '-', found '") + c + "'");
      acc += term(sign);
      skip_ws();
    }
    return acc;
  }

 private:
  const std::string& text_;
  VarTablePtr vars_;
  size_t pos_ = 0;

  [[noreturn]] void err(const std::string& msg) {
    fail(ErrorKind::parse, msg + " at position " + std::to_string(pos_));
  }

  bool eof() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  char get() {
    skip_ws();
    if (pos_ >= text_.size()) err("unexpected end of input");
    return text_[pos_++];
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool number_ahead() {
    char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }
  bool ident_ahead() {
    char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string read_digits() {
    skip_ws();
    std::string s;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      s += text_[pos_++];
    if (s.empty()) err("expected digits");
    return s;
  }

  Rational read_number() {
    std::string s = read_digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      s += "." + read_digits();
      return rat_from_string(s);
    }
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      std::string den = read_digits();
      if (rat_from_string(den) == 0) err("zero denominator");
      return rat_from_string(s + "/" + den);
    }
    return rat_from_string(s);
  }

  std::string read_ident() {
    skip_ws();
    std::string s;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      s += text_[pos_++];
    return s;
  }

  int read_exponent() {
    size_t at = pos_;
    std::string d = read_digits();
    if (d.size() > 6) {
      pos_ = at;
      err("exponent too large");
    }
    return std::stoi(d);
  }

  Polynomial term(int sign) {
    Rational coef(sign);
    bool any = false;
    if (number_ahead()) {
      coef *= read_number();
      any = true;
      skip_ws();
      if (peek() == '*') get();
    }
    Exponents e(vars_ ? vars_->size() : 0, 0);
    while (ident_ahead()) {
      size_t at = pos_;
      std::string name = read_ident();
      auto idx = vars_ ? vars_->index_of(name) : std::nullopt;
      if (!idx) {
        pos_ = at;
        err("unknown variable '" + name + "'");
      }
      int ex = 1;
      skip_ws();
      if (peek() == '^') {
        get();
        ex = read_exponent();
      }
      e[*idx] += ex;
      any = true;
      skip_ws();
      if (peek() == '*') {
        get();
        if (!ident_ahead()) err("expected variable after '*'");
      }
    }
    if (!any) err("expected a term");
    return Polynomial::monomial(vars_, e, coef);
  }
};

}  // namespace

Polynomial poly_parse(const std::string& text, VarTablePtr vars) {
  return Parser(text, vars).run();
}

}  // namespace sumsq
