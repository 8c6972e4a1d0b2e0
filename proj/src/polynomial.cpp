#include "sumsq/polynomial.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "sumsq/error.hpp"

namespace sumsq {

int total_degree(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

bool monomial_before(const Exponents& a, const Exponents& b) {
  int da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

VarTable::VarTable(std::vector<std::string> names) : names_(std::move(names)) {}

static void check_names(const std::vector<std::string>& names, bool allow_reserved) {
  for (size_t i = 0; i < names.size(); ++i) {
    const std::string& n = names[i];
    if (n.empty()) fail(ErrorKind::invalid_argument, "empty variable name");
    if (!allow_reserved &&
        (n.rfind("coeff_", 0) == 0 || n.rfind("Mvar_", 0) == 0))
      fail(ErrorKind::invalid_argument, "variable name '" + n + "' uses a reserved prefix");
    for (size_t j = i + 1; j < names.size(); ++j)
      if (names[j] == n)
        fail(ErrorKind::invalid_argument, "duplicate variable name '" + n + "'");
  }
}

std::shared_ptr<const VarTable> VarTable::make(std::vector<std::string> names) {
  check_names(names, false);
  return std::shared_ptr<const VarTable>(new VarTable(std::move(names)));
}

std::shared_ptr<const VarTable> VarTable::internal(std::vector<std::string> names) {
  check_names(names, true);
  return std::shared_ptr<const VarTable>(new VarTable(std::move(names)));
}

std::optional<size_t> VarTable::index_of(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

Polynomial::Polynomial(VarTablePtr vars, std::vector<Exponents> degmat,
                       std::vector<Rational> coeffs)
    : vars_(std::move(vars)), degmat_(std::move(degmat)), coeffs_(std::move(coeffs)) {
  if (degmat_.size() != coeffs_.size())
    fail(ErrorKind::invalid_argument, "degmat/coeff length mismatch");
  size_t nv = vars_ ? vars_->size() : 0;
  for (const Exponents& e : degmat_) {
    if (e.size() != nv)
      fail(ErrorKind::invalid_argument, "exponent row width mismatch");
    for (int x : e)
      if (x < 0) fail(ErrorKind::invalid_argument, "negative exponent");
  }
  canonicalize();
}

void Polynomial::canonicalize() {
  // mpq values built from raw numerator/denominator pairs must be
  // reduced before GMP arithmetic and comparisons are reliable.
  for (Rational& c : coeffs_) c.canonicalize();
  std::vector<size_t> order(degmat_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    return monomial_before(degmat_[i], degmat_[j]);
  });
  std::vector<Exponents> deg;
  std::vector<Rational> co;
  deg.reserve(order.size());
  co.reserve(order.size());
  for (size_t idx : order) {
    if (!deg.empty() && deg.back() == degmat_[idx]) {
      co.back() += coeffs_[idx];
    } else {
      deg.push_back(degmat_[idx]);
      co.push_back(coeffs_[idx]);
    }
  }
  degmat_.clear();
  coeffs_.clear();
  for (size_t i = 0; i < deg.size(); ++i) {
    if (co[i] != 0) {
      degmat_.push_back(std::move(deg[i]));
      coeffs_.push_back(std::move(co[i]));
    }
  }
}

Polynomial Polynomial::zero(VarTablePtr vars) {
  return Polynomial(std::move(vars), {}, {});
}

Polynomial Polynomial::constant(VarTablePtr vars, const Rational& c) {
  if (c == 0) return zero(std::move(vars));
  Exponents e(vars->size(), 0);
  return Polynomial(std::move(vars), {e}, {c});
}

Polynomial Polynomial::variable(VarTablePtr vars, size_t index) {
  if (index >= vars->size()) fail(ErrorKind::invalid_argument, "variable index out of range");
  Exponents e(vars->size(), 0);
  e[index] = 1;
  return Polynomial(std::move(vars), {e}, {1});
}

Polynomial Polynomial::monomial(VarTablePtr vars, const Exponents& e, const Rational& c) {
  return Polynomial(std::move(vars), {e}, {c});
}

bool Polynomial::is_constant() const {
  return degmat_.empty() || (degmat_.size() == 1 && total_degree(degmat_[0]) == 0);
}

int Polynomial::degree() const {
  if (degmat_.empty()) return -1;
  return total_degree(degmat_.back());
}

int Polynomial::degree_in(size_t var) const {
  int d = 0;
  for (const Exponents& e : degmat_) d = std::max(d, e[var]);
  return d;
}

Rational Polynomial::coeff_of(const Exponents& e) const {
  for (size_t i = 0; i < degmat_.size(); ++i)
    if (degmat_[i] == e) return coeffs_[i];
  return Rational(0);
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (Rational& c : r.coeffs_) c = -c;
  return r;
}

static bool same_table(const VarTablePtr& a, const VarTablePtr& b) {
  if (a == b) return true;
  if (!a || !b) return (a ? a->size() : 0) == (b ? b->size() : 0);
  return a->names() == b->names();
}

std::pair<Polynomial, Polynomial> align(const Polynomial& a, const Polynomial& b) {
  if (same_table(a.vars(), b.vars())) {
    if (a.vars() || !b.vars()) {
      // Widen the empty-table side if needed.
      if (!a.vars() && b.vars())
        return {a.remap(b.vars(), {}), b};
      return {a, b};
    }
    return {a, b.remap(a.vars(), {})};
  }
  std::vector<std::string> merged = a.vars() ? a.vars()->names() : std::vector<std::string>{};
  std::vector<size_t> bmap;
  if (b.vars()) {
    bmap.reserve(b.vars()->size());
    for (const std::string& n : b.vars()->names()) {
      auto it = std::find(merged.begin(), merged.end(), n);
      if (it == merged.end()) {
        merged.push_back(n);
        bmap.push_back(merged.size() - 1);
      } else {
        bmap.push_back(static_cast<size_t>(it - merged.begin()));
      }
    }
  }
  VarTablePtr table = VarTable::internal(merged);
  std::vector<size_t> amap(a.vars() ? a.vars()->size() : 0);
  std::iota(amap.begin(), amap.end(), 0);
  return {a.remap(table, amap), b.remap(table, bmap)};
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  auto [a, b] = align(*this, rhs);
  std::vector<Exponents> deg = a.degmat_;
  std::vector<Rational> co = a.coeffs_;
  deg.insert(deg.end(), b.degmat_.begin(), b.degmat_.end());
  co.insert(co.end(), b.coeffs_.begin(), b.coeffs_.end());
  *this = Polynomial(a.vars_, std::move(deg), std::move(co));
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) { return *this += -rhs; }

Polynomial& Polynomial::operator*=(const Polynomial& rhs) {
  auto [a, b] = align(*this, rhs);
  std::map<Exponents, Rational> acc;
  for (size_t i = 0; i < a.degmat_.size(); ++i) {
    for (size_t j = 0; j < b.degmat_.size(); ++j) {
      Exponents e = a.degmat_[i];
      for (size_t v = 0; v < e.size(); ++v) e[v] += b.degmat_[j][v];
      acc[std::move(e)] += a.coeffs_[i] * b.coeffs_[j];
    }
  }
  std::vector<Exponents> deg;
  std::vector<Rational> co;
  deg.reserve(acc.size());
  co.reserve(acc.size());
  for (auto& [e, c] : acc) {
    deg.push_back(e);
    co.push_back(c);
  }
  *this = Polynomial(a.vars_, std::move(deg), std::move(co));
  return *this;
}

Polynomial Polynomial::operator*(const Rational& c) const {
  Rational cc = c;
  cc.canonicalize();
  if (cc == 0) return zero(vars_);
  Polynomial r = *this;
  for (Rational& x : r.coeffs_) x *= cc;
  return r;
}

bool Polynomial::operator==(const Polynomial& rhs) const {
  auto [a, b] = align(*this, rhs);
  return a.degmat_ == b.degmat_ && a.coeffs_ == b.coeffs_;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) fail(ErrorKind::invalid_argument, "negative power");
  Polynomial r = constant(vars_, 1);
  for (int i = 0; i < e; ++i) r *= *this;
  return r;
}

Polynomial Polynomial::diff(size_t var) const {
  if (vars_ && var >= vars_->size())
    fail(ErrorKind::invalid_argument, "variable index out of range");
  std::vector<Exponents> deg;
  std::vector<Rational> co;
  for (size_t i = 0; i < degmat_.size(); ++i) {
    if (degmat_[i][var] == 0) continue;
    Exponents e = degmat_[i];
    co.push_back(coeffs_[i] * e[var]);
    e[var] -= 1;
    deg.push_back(std::move(e));
  }
  return Polynomial(vars_, std::move(deg), std::move(co));
}

Rational Polynomial::eval(const std::vector<Rational>& point) const {
  if (vars_ && point.size() != vars_->size())
    fail(ErrorKind::invalid_argument, "evaluation point has wrong dimension");
  std::vector<Rational> pt = point;
  for (Rational& v : pt) v.canonicalize();
  Rational acc(0);
  for (size_t i = 0; i < degmat_.size(); ++i) {
    Rational t = coeffs_[i];
    for (size_t v = 0; v < degmat_[i].size(); ++v)
      if (degmat_[i][v] != 0) t *= rat_pow(pt[v], degmat_[i][v]);
    acc += t;
  }
  return acc;
}

double Polynomial::eval(const std::vector<double>& point) const {
  if (vars_ && point.size() != vars_->size())
    fail(ErrorKind::invalid_argument, "evaluation point has wrong dimension");
  double acc = 0;
  for (size_t i = 0; i < degmat_.size(); ++i) {
    double t = rat_to_double(coeffs_[i]);
    for (size_t v = 0; v < degmat_[i].size(); ++v)
      for (int k = 0; k < degmat_[i][v]; ++k) t *= point[v];
    acc += t;
  }
  return acc;
}

Polynomial Polynomial::substitute(const std::vector<std::pair<size_t, Rational>>& values) const {
  std::vector<Exponents> deg;
  std::vector<Rational> co;
  for (size_t i = 0; i < degmat_.size(); ++i) {
    Exponents e = degmat_[i];
    Rational c = coeffs_[i];
    for (const auto& [v, val] : values) {
      if (e[v] != 0) {
        Rational vv = val;
        vv.canonicalize();
        c *= rat_pow(vv, e[v]);
        e[v] = 0;
      }
    }
    deg.push_back(std::move(e));
    co.push_back(std::move(c));
  }
  return Polynomial(vars_, std::move(deg), std::move(co));
}

Polynomial Polynomial::remap(VarTablePtr new_vars, const std::vector<size_t>& map) const {
  size_t old_n = vars_ ? vars_->size() : 0;
  if (map.size() != old_n)
    fail(ErrorKind::invalid_argument, "remap table has wrong size");
  std::vector<Exponents> deg;
  deg.reserve(degmat_.size());
  for (const Exponents& e : degmat_) {
    Exponents ne(new_vars->size(), 0);
    for (size_t v = 0; v < old_n; ++v) {
      if (e[v] != 0) {
        if (map[v] >= ne.size())
          fail(ErrorKind::invalid_argument, "remap index out of range");
        ne[map[v]] += e[v];
      }
    }
    deg.push_back(std::move(ne));
  }
  return Polynomial(std::move(new_vars), std::move(deg), coeffs_);
}

std::string Polynomial::str() const {
  if (degmat_.empty()) return "0";
  std::ostringstream out;
  for (size_t i = 0; i < degmat_.size(); ++i) {
    Rational c = coeffs_[i];
    bool neg = c < 0;
    if (i == 0) {
      if (neg) out << "-";
    } else {
      out << (neg ? " - " : " + ");
    }
    Rational a = neg ? Rational(-c) : c;
    bool has_vars = total_degree(degmat_[i]) > 0;
    bool unit = (a == 1);
    if (!unit || !has_vars) out << rat_to_string(a);
    bool first = !(!unit || !has_vars);
    for (size_t v = 0; v < degmat_[i].size(); ++v) {
      int e = degmat_[i][v];
      if (e == 0) continue;
      if (!first) out << "*";
      first = false;
      out << vars_->name(v);
      if (e > 1) out << "^" << e;
    }
  }
  return out.str();
}

PolyMatrix::PolyMatrix(size_t rows, size_t cols, VarTablePtr vars, bool symmetric)
    : rows_(rows), cols_(cols), symmetric_(symmetric), vars_(std::move(vars)) {
  if (symmetric_ && rows_ != cols_)
    fail(ErrorKind::invalid_argument, "symmetric matrix must be square");
  entries_.assign(rows_ * cols_, Polynomial::zero(vars_));
}

Polynomial& PolyMatrix::at(size_t i, size_t j) {
  if (i >= rows_ || j >= cols_) fail(ErrorKind::invalid_argument, "matrix index out of range");
  return entries_[i * cols_ + j];
}

const Polynomial& PolyMatrix::at(size_t i, size_t j) const {
  if (i >= rows_ || j >= cols_) fail(ErrorKind::invalid_argument, "matrix index out of range");
  return entries_[i * cols_ + j];
}

void PolyMatrix::set(size_t i, size_t j, Polynomial p) {
  at(i, j) = std::move(p);
  if (symmetric_ && i != j) at(j, i) = at(i, j);
}

void PolyMatrix::validate() const {
  if (!symmetric_) return;
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = i + 1; j < cols_; ++j)
      if (at(i, j) != at(j, i))
        fail(ErrorKind::domain, "matrix marked symmetric has unequal entries");
}

static void monomials_of_degree(size_t nvars, int degree, size_t var, Exponents& cur,
                                std::vector<Exponents>& out) {
  if (var + 1 == nvars) {
    cur[var] = degree;
    out.push_back(cur);
    cur[var] = 0;
    return;
  }
  // Highest power on the earliest variable first, matching the term order.
  for (int d = degree; d >= 0; --d) {
    cur[var] = d;
    monomials_of_degree(nvars, degree - d, var + 1, cur, out);
  }
  cur[var] = 0;
}

std::vector<Exponents> monomial_exponents(size_t nvars, const std::vector<int>& degrees) {
  std::vector<Exponents> out;
  Exponents cur(nvars, 0);
  for (int d : degrees) {
    if (d < 0) fail(ErrorKind::invalid_argument, "negative degree");
    if (nvars == 0) {
      if (d == 0) out.push_back({});
      continue;
    }
    monomials_of_degree(nvars, d, 0, cur, out);
  }
  return out;
}

std::vector<Polynomial> monomials(VarTablePtr vars, const std::vector<int>& degrees) {
  std::vector<Polynomial> out;
  for (const Exponents& e : monomial_exponents(vars->size(), degrees))
    out.push_back(Polynomial::monomial(vars, e));
  return out;
}

std::vector<Polynomial> mpmonomials(VarTablePtr vars,
                                    const std::vector<std::vector<size_t>>& partitions,
                                    const std::vector<std::vector<int>>& degrees) {
  if (partitions.size() != degrees.size())
    fail(ErrorKind::invalid_argument, "partition/degree list size mismatch");
  size_t nparts = partitions.size();
  std::vector<std::vector<Exponents>> per_block(nparts);
  for (size_t p = 0; p < nparts; ++p) {
    for (size_t v : partitions[p])
      if (v >= vars->size())
        fail(ErrorKind::invalid_argument, "partition variable index out of range");
    per_block[p] = monomial_exponents(partitions[p].size(), degrees[p]);
    if (per_block[p].empty())
      fail(ErrorKind::invalid_argument, "empty degree list for a partition");
  }
  std::vector<Polynomial> out;
  std::vector<size_t> pick(nparts, 0);
  // Last partition varies slowest; the first runs fastest.
  while (true) {
    Exponents e(vars->size(), 0);
    for (size_t p = 0; p < nparts; ++p)
      for (size_t k = 0; k < partitions[p].size(); ++k)
        e[partitions[p][k]] += per_block[p][pick[p]][k];
    out.push_back(Polynomial::monomial(vars, e));
    size_t p = 0;
    while (p < nparts) {
      if (++pick[p] < per_block[p].size()) break;
      pick[p] = 0;
      ++p;
    }
    if (p == nparts) break;
  }
  return out;
}

}  // namespace sumsq
