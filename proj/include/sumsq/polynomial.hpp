#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sumsq/rational.hpp"

namespace sumsq {

// Exponent row of a monomial, one entry per variable in the owning table.
using Exponents = std::vector<int>;

int total_degree(const Exponents& e);

// Graded-lexicographic term order used everywhere: lower total degree
// first, ties broken so the monomial with the higher power on an
// earlier-listed variable comes first (x before y, x^2 before x*y).
bool monomial_before(const Exponents& a, const Exponents& b);

// Ordered list of distinct variable names.
class VarTable {
 public:
  // Validates: names non-empty, unique, not using the reserved
  // prefixes "coeff_" and "Mvar_".
  static std::shared_ptr<const VarTable> make(std::vector<std::string> names);

  // Bypasses the reserved-prefix check; used by the program layer for
  // its generated decision and matrix variables.
  static std::shared_ptr<const VarTable> internal(std::vector<std::string> names);

  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(size_t i) const { return names_[i]; }
  size_t size() const { return names_.size(); }
  std::optional<size_t> index_of(const std::string& name) const;

 private:
  explicit VarTable(std::vector<std::string> names);
  std::vector<std::string> names_;
};

using VarTablePtr = std::shared_ptr<const VarTable>;

// Multivariate polynomial with exact rational coefficients, kept in
// canonical form: term rows distinct, sorted by monomial_before, no
// zero coefficients, exponents non-negative.
class Polynomial {
 public:
  Polynomial() = default;  // zero over an empty table
  Polynomial(VarTablePtr vars, std::vector<Exponents> degmat,
             std::vector<Rational> coeffs);

  static Polynomial zero(VarTablePtr vars);
  static Polynomial constant(VarTablePtr vars, const Rational& c);
  static Polynomial variable(VarTablePtr vars, size_t index);
  static Polynomial monomial(VarTablePtr vars, const Exponents& e,
                             const Rational& c = 1);

  const VarTablePtr& vars() const { return vars_; }
  size_t term_count() const { return degmat_.size(); }
  const std::vector<Exponents>& degmat() const { return degmat_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  bool is_zero() const { return degmat_.empty(); }
  bool is_constant() const;
  // -1 for the zero polynomial.
  int degree() const;
  int degree_in(size_t var) const;

  // Exact coefficient of the given exponent row (0 if absent).
  Rational coeff_of(const Exponents& e) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(const Polynomial& rhs);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  Polynomial operator*(const Rational& c) const;
  bool operator==(const Polynomial& rhs) const;
  bool operator!=(const Polynomial& rhs) const { return !(*this == rhs); }

  Polynomial pow(int e) const;
  Polynomial diff(size_t var) const;

  // Full evaluation; point indexed like the table.
  Rational eval(const std::vector<Rational>& point) const;
  double eval(const std::vector<double>& point) const;

  // Substitutes values for a subset of variables, keeping the table.
  Polynomial substitute(const std::vector<std::pair<size_t, Rational>>& values) const;

  // Rewrites over a wider table; `map[i]` is the new index of old
  // variable i.
  Polynomial remap(VarTablePtr new_vars, const std::vector<size_t>& map) const;

  std::string str() const;

 private:
  VarTablePtr vars_;
  std::vector<Exponents> degmat_;
  std::vector<Rational> coeffs_;

  void canonicalize();
};

// Shared-table alignment: returns copies of a and b over one table
// (left's order, then unseen names from the right).
std::pair<Polynomial, Polynomial> align(const Polynomial& a, const Polynomial& b);

// Dense matrix of polynomials over one shared table, row-major.
class PolyMatrix {
 public:
  PolyMatrix() : rows_(0), cols_(0), symmetric_(false) {}
  PolyMatrix(size_t rows, size_t cols, VarTablePtr vars, bool symmetric = false);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool symmetric() const { return symmetric_; }
  const VarTablePtr& vars() const { return vars_; }

  Polynomial& at(size_t i, size_t j);
  const Polynomial& at(size_t i, size_t j) const;
  void set(size_t i, size_t j, Polynomial p);

  // Checks the symmetric flag against the entries.
  void validate() const;

 private:
  size_t rows_, cols_;
  bool symmetric_;
  VarTablePtr vars_;
  std::vector<Polynomial> entries_;
};

// All monomials over `vars` whose total degree lies in `degrees`,
// listed degree set in the given order, graded-lex within a degree.
std::vector<Exponents> monomial_exponents(size_t nvars, const std::vector<int>& degrees);
std::vector<Polynomial> monomials(VarTablePtr vars, const std::vector<int>& degrees);

// Multipartite monomial vector: partitions[i] lists variable indices
// of block i, degrees[i] the admissible total degrees within block i.
// The last partition varies slowest, the first fastest, matching the
// per-block monomials() order.
std::vector<Polynomial> mpmonomials(VarTablePtr vars,
                                    const std::vector<std::vector<size_t>>& partitions,
                                    const std::vector<std::vector<int>>& degrees);

// Parses the grammar: poly = [sign] term (sign term)*,
// term = [coefficient][*] var[^int] ([*] var[^int])*,
// coefficient = integer | p/q | decimal. Unknown variables are errors.
Polynomial poly_parse(const std::string& text, VarTablePtr vars);

}  // namespace sumsq
