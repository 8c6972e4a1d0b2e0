#include "sumsq/program.hpp"

#include <algorithm>
#include <set>

#include "sumsq/error.hpp"

namespace sumsq {

size_t tri_size(size_t m) { return m * (m + 1) / 2; }

std::vector<std::pair<size_t, size_t>> tri_pairs(size_t m) {
  std::vector<std::pair<size_t, size_t>> out;
  out.reserve(tri_size(m));
  for (size_t a = 0; a < m; ++a)
    for (size_t b = a; b < m; ++b) out.emplace_back(a, b);
  return out;
}

// Row-major upper-triangle offset of (a, b), a <= b, in an m x m matrix.
static size_t tri_index(size_t m, size_t a, size_t b) {
  return a * m - a * (a - 1) / 2 + (b - a);
}

SosProgram::SosProgram(const std::vector<std::string>& indep_names,
                       const std::vector<std::string>& dec_names) {
  VarTable::make(indep_names);  // validates names
  indep_names_ = indep_names;
  for (const std::string& n : dec_names) sosdecvar(n);
}

// Digits of a generated coeff_k name, or 0 when the suffix is not a
// canonical positive integer.
static size_t coeff_suffix(const std::string& name) {
  std::string s = name.substr(6);
  if (s.empty() || s.size() > 18 || s[0] == '0') return 0;
  for (char ch : s)
    if (ch < '0' || ch > '9') return 0;
  return static_cast<size_t>(std::stoull(s));
}

// Exponent rows keep the independent-variable count at the time the
// entity was declared, so widths may be shorter than the final list
// when the Mvar pool grew later. Within one entity all rows agree.
// Returns the common width (min_width when Z is empty).
static size_t check_basis_rows(const std::vector<Exponents>& Z, size_t min_width,
                               size_t max_width, const std::string& where) {
  size_t width = Z.empty() ? min_width : Z.front().size();
  if (width < min_width || width > max_width)
    fail(ErrorKind::invalid_argument,
         where + ": exponent row width does not match the independent variable count");
  for (const Exponents& z : Z) {
    if (z.size() != width)
      fail(ErrorKind::invalid_argument, where + ": exponent rows have mixed widths");
    for (int e : z)
      if (e < 0) fail(ErrorKind::invalid_argument, where + ": negative exponent");
  }
  for (size_t r = 0; r + 1 < Z.size(); ++r)
    if (!monomial_before(Z[r], Z[r + 1]))
      fail(ErrorKind::invalid_argument, where + ": rows not sorted in term order");
  return width;
}

SosProgram SosProgram::from_parts(std::vector<std::string> indep_names, size_t mvar_count,
                                  std::vector<std::string> dec_names,
                                  std::vector<ProgramVar> vars,
                                  std::vector<Constraint> constraints,
                                  std::vector<Rational> objective,
                                  Rational objective_offset, bool has_objective,
                                  size_t next_coeff) {
  if (mvar_count > indep_names.size())
    fail(ErrorKind::invalid_argument,
         "mvar count exceeds the independent variable list");
  size_t user_n = indep_names.size() - mvar_count;
  VarTable::make({indep_names.begin(), indep_names.begin() + user_n});
  for (size_t i = 0; i < mvar_count; ++i)
    if (indep_names[user_n + i] != "Mvar_" + std::to_string(i + 1))
      fail(ErrorKind::invalid_argument,
           "generated variable pool must be named Mvar_1..Mvar_" +
               std::to_string(mvar_count));

  if (next_coeff < 1)
    fail(ErrorKind::invalid_argument, "next_coeff must be at least 1");
  std::set<std::string> seen(indep_names.begin(), indep_names.end());
  for (const std::string& n : dec_names) {
    if (n.empty()) fail(ErrorKind::invalid_argument, "empty decision variable name");
    if (n.rfind("Mvar_", 0) == 0)
      fail(ErrorKind::invalid_argument,
           "decision variable name '" + n + "' uses a reserved prefix");
    if (!seen.insert(n).second)
      fail(ErrorKind::invalid_argument, "variable name '" + n + "' already in use");
    if (n.rfind("coeff_", 0) == 0) {
      size_t k = coeff_suffix(n);
      if (k == 0 || k >= next_coeff)
        fail(ErrorKind::invalid_argument,
             "generated name '" + n + "' is not below the next_coeff counter");
    }
  }

  size_t cursor = 0;
  for (size_t i = 0; i < vars.size(); ++i) {
    const ProgramVar& v = vars[i];
    std::string where = "program variable " + std::to_string(i);
    if (v.name.empty()) fail(ErrorKind::invalid_argument, where + ": empty name");
    if (v.Z.empty()) fail(ErrorKind::invalid_argument, where + ": empty basis");
    check_basis_rows(v.Z, user_n, indep_names.size(), where);
    if (v.idx_lo != cursor)
      fail(ErrorKind::invalid_argument, where + ": coefficient range out of order");
    if (v.idx_hi < v.idx_lo || v.idx_hi > dec_names.size())
      fail(ErrorKind::invalid_argument, where + ": coefficient range out of bounds");
    size_t span = v.idx_hi - v.idx_lo;
    size_t m = v.Z.size();
    size_t want = 0;
    switch (v.kind) {
      case VarKind::poly:
      case VarKind::sos:
        if (v.rows != 1 || v.cols != 1 || v.symmetric)
          fail(ErrorKind::invalid_argument, where + ": scalar variable with matrix shape");
        want = v.kind == VarKind::poly ? m : tri_size(m);
        break;
      case VarKind::polymatrix:
        if (v.rows == 0 || v.cols == 0)
          fail(ErrorKind::invalid_argument, where + ": empty matrix shape");
        if (v.symmetric && v.rows != v.cols)
          fail(ErrorKind::invalid_argument, where + ": symmetric variable must be square");
        want = (v.symmetric ? tri_size(v.rows) : v.rows * v.cols) * m;
        break;
      case VarKind::sosmatrix:
        if (v.rows == 0 || v.rows != v.cols || !v.symmetric)
          fail(ErrorKind::invalid_argument,
               where + ": sos matrix variable must be square and symmetric");
        want = tri_size(v.rows * m);
        break;
    }
    if (span != want)
      fail(ErrorKind::invalid_argument,
           where + ": coefficient count " + std::to_string(span) +
               " does not match the basis (expected " + std::to_string(want) + ")");
    cursor = v.idx_hi;
  }
  if (cursor != dec_names.size())
    fail(ErrorKind::invalid_argument,
         "program variables cover " + std::to_string(cursor) + " of " +
             std::to_string(dec_names.size()) + " decision coefficients");

  for (size_t i = 0; i < constraints.size(); ++i) {
    const Constraint& c = constraints[i];
    std::string where = "constraint " + std::to_string(i);
    size_t width = check_basis_rows(c.Z, user_n, indep_names.size(), where);
    if (c.cols.size() != c.Z.size() || c.b.size() != c.Z.size())
      fail(ErrorKind::invalid_argument, where + ": row arrays have mismatched lengths");
    for (const auto& col : c.cols)
      for (const auto& [k, coef] : col) {
        if (k >= dec_names.size())
          fail(ErrorKind::invalid_argument,
               where + ": decision index " + std::to_string(k) + " out of range");
        if (coef == 0)
          fail(ErrorKind::invalid_argument, where + ": stores a zero coefficient");
      }
    if (c.kind == ConstraintKind::matrixineq) {
      if (c.mrows == 0)
        fail(ErrorKind::invalid_argument,
             where + ": matrix inequality needs a positive dimension");
      if (c.mrows > mvar_count)
        fail(ErrorKind::invalid_argument,
             where + ": matrix dimension exceeds the Mvar pool");
      if (c.option != BasisOption::sparsemultipartite)
        fail(ErrorKind::invalid_argument,
             where + ": matrix inequality requires the multipartite basis");
    } else if (c.mrows != 0) {
      fail(ErrorKind::invalid_argument,
           where + ": matrix dimension on a scalar constraint");
    }
    if (c.option == BasisOption::sparsemultipartite) {
      if (c.partitions.empty())
        fail(ErrorKind::invalid_argument, where + ": multipartite basis needs partitions");
      std::set<size_t> used;
      size_t bound = c.Z.empty() ? indep_names.size() : width;
      for (const auto& group : c.partitions) {
        if (group.empty())
          fail(ErrorKind::invalid_argument, where + ": empty partition group");
        for (size_t v : group) {
          if (v >= bound)
            fail(ErrorKind::invalid_argument,
                 where + ": partition index " + std::to_string(v) + " out of range");
          if (!used.insert(v).second)
            fail(ErrorKind::invalid_argument,
                 where + ": partition repeats variable index " + std::to_string(v));
        }
      }
    } else if (!c.partitions.empty()) {
      fail(ErrorKind::invalid_argument,
           where + ": partitions without the multipartite basis");
    }
  }

  if (has_objective) {
    if (objective.size() != dec_names.size())
      fail(ErrorKind::invalid_argument,
           "objective length does not match the decision variable count");
  } else if (!objective.empty() || objective_offset != 0) {
    fail(ErrorKind::invalid_argument, "objective data present without has_objective");
  }

  SosProgram p;
  p.indep_names_ = std::move(indep_names);
  p.mvar_count_ = mvar_count;
  p.dec_names_ = std::move(dec_names);
  p.vars_ = std::move(vars);
  p.constraints_ = std::move(constraints);
  p.objective_ = std::move(objective);
  p.objective_offset_ = std::move(objective_offset);
  p.has_objective_ = has_objective;
  p.next_coeff_ = next_coeff;
  return p;
}

Polynomial SosProgram::indep(const std::string& name) const {
  for (size_t i = 0; i < indep_names_.size(); ++i)
    if (indep_names_[i] == name) return indep(i);
  fail(ErrorKind::invalid_argument, "unknown independent variable '" + name + "'");
}

Polynomial SosProgram::indep(size_t index) const {
  if (index >= indep_names_.size())
    fail(ErrorKind::invalid_argument, "independent variable index out of range");
  auto t = VarTable::internal({indep_names_[index]});
  return Polynomial::variable(t, 0);
}

std::optional<size_t> SosProgram::decvar_index(const std::string& name) const {
  for (size_t i = 0; i < dec_names_.size(); ++i)
    if (dec_names_[i] == name) return i;
  return std::nullopt;
}

Polynomial SosProgram::decvar_poly(size_t index) const {
  if (index >= dec_names_.size())
    fail(ErrorKind::invalid_argument, "decision variable index out of range");
  auto t = VarTable::internal({dec_names_[index]});
  return Polynomial::variable(t, 0);
}

std::string SosProgram::fresh_coeff_name() {
  return "coeff_" + std::to_string(next_coeff_++);
}

size_t SosProgram::add_decvar(const std::string& name) {
  dec_names_.push_back(name);
  return dec_names_.size() - 1;
}

void SosProgram::ensure_mvars(size_t count) {
  while (mvar_count_ < count) {
    ++mvar_count_;
    indep_names_.push_back("Mvar_" + std::to_string(mvar_count_));
  }
}

Polynomial SosProgram::sosdecvar(const std::string& name) {
  if (name.empty()) fail(ErrorKind::invalid_argument, "empty decision variable name");
  if (name.rfind("coeff_", 0) == 0 || name.rfind("Mvar_", 0) == 0)
    fail(ErrorKind::invalid_argument,
         "decision variable name '" + name + "' uses a reserved prefix");
  if (std::find(indep_names_.begin(), indep_names_.end(), name) != indep_names_.end() ||
      decvar_index(name))
    fail(ErrorKind::invalid_argument, "variable name '" + name + "' already in use");
  size_t k = add_decvar(name);
  ProgramVar v;
  v.name = name;
  v.kind = VarKind::poly;
  v.Z = {Exponents(indep_names_.size(), 0)};
  v.idx_lo = k;
  v.idx_hi = k + 1;
  vars_.push_back(v);
  return decvar_poly(k);
}

std::vector<Exponents> SosProgram::basis_exponents(const std::vector<Polynomial>& Z) const {
  if (Z.empty()) fail(ErrorKind::invalid_argument, "empty monomial basis");
  std::vector<Exponents> rows;
  for (const Polynomial& p : Z) {
    if (p.term_count() != 1)
      fail(ErrorKind::invalid_argument, "basis entries must be single monomials");
    Exponents e(indep_names_.size(), 0);
    const Exponents& src = p.degmat()[0];
    for (size_t v = 0; v < src.size(); ++v) {
      if (src[v] == 0) continue;
      const std::string& n = p.vars()->name(v);
      auto it = std::find(indep_names_.begin(), indep_names_.end(), n);
      if (it == indep_names_.end())
        fail(ErrorKind::invalid_argument,
             "basis monomial uses non-independent variable '" + n + "'");
      e[static_cast<size_t>(it - indep_names_.begin())] = src[v];
    }
    rows.push_back(std::move(e));
  }
  std::sort(rows.begin(), rows.end(), monomial_before);
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

Polynomial SosProgram::handle_for_range(size_t lo, size_t hi,
                                        const std::vector<Exponents>& Z,
                                        VarKind) const {
  // Plain polynomial variable: sum of coeff_k * Z_k.
  std::vector<std::string> names = indep_names_;
  for (size_t k = lo; k < hi; ++k) names.push_back(dec_names_[k]);
  auto t = VarTable::internal(names);
  size_t ni = indep_names_.size();
  std::vector<Exponents> deg;
  std::vector<Rational> co;
  for (size_t k = 0; k < Z.size(); ++k) {
    Exponents e(t->size(), 0);
    std::copy(Z[k].begin(), Z[k].end(), e.begin());
    e[ni + k] = 1;
    deg.push_back(std::move(e));
    co.push_back(1);
  }
  return Polynomial(t, std::move(deg), std::move(co));
}

Polynomial SosProgram::sospolyvar(const std::vector<Polynomial>& Z, bool wscoeff) {
  std::vector<Exponents> rows = basis_exponents(Z);
  size_t lo = dec_names_.size();
  for (size_t k = 0; k < rows.size(); ++k) add_decvar(fresh_coeff_name());
  size_t hi = dec_names_.size();
  ProgramVar v;
  v.name = "polyvar_" + std::to_string(vars_.size() + 1);
  v.kind = VarKind::poly;
  v.Z = rows;
  v.wscoeff = wscoeff;
  v.idx_lo = lo;
  v.idx_hi = hi;
  vars_.push_back(v);
  return handle_for_range(lo, hi, rows, VarKind::poly);
}

Polynomial SosProgram::sossosvar(const std::vector<Polynomial>& Z, bool wscoeff) {
  std::vector<Exponents> rows = basis_exponents(Z);
  size_t m = rows.size();
  size_t lo = dec_names_.size();
  for (size_t k = 0; k < tri_size(m); ++k) add_decvar(fresh_coeff_name());
  size_t hi = dec_names_.size();
  ProgramVar v;
  v.name = "sosvar_" + std::to_string(vars_.size() + 1);
  v.kind = VarKind::sos;
  v.Z = rows;
  v.wscoeff = wscoeff;
  v.idx_lo = lo;
  v.idx_hi = hi;
  vars_.push_back(v);

  std::vector<std::string> names = indep_names_;
  for (size_t k = lo; k < hi; ++k) names.push_back(dec_names_[k]);
  auto t = VarTable::internal(names);
  size_t ni = indep_names_.size();
  std::vector<Exponents> deg;
  std::vector<Rational> co;
  size_t pos = 0;
  for (auto [a, b] : tri_pairs(m)) {
    Exponents e(t->size(), 0);
    for (size_t vv = 0; vv < ni; ++vv) e[vv] = rows[a][vv] + rows[b][vv];
    e[ni + pos] = 1;
    deg.push_back(std::move(e));
    co.push_back(a == b ? 1 : 2);
    ++pos;
  }
  return Polynomial(t, std::move(deg), std::move(co));
}

PolyMatrix SosProgram::sospolymatrixvar(const std::vector<Polynomial>& Z, size_t rows,
                                        size_t cols, bool symmetric) {
  if (rows == 0 || cols == 0) fail(ErrorKind::invalid_argument, "empty matrix variable");
  if (symmetric && rows != cols)
    fail(ErrorKind::invalid_argument, "symmetric matrix variable must be square");
  std::vector<Exponents> basis = basis_exponents(Z);
  size_t m = basis.size();
  size_t entries = symmetric ? tri_size(rows) : rows * cols;
  size_t lo = dec_names_.size();
  for (size_t k = 0; k < entries * m; ++k) add_decvar(fresh_coeff_name());
  size_t hi = dec_names_.size();
  ProgramVar v;
  v.name = "polymatrixvar_" + std::to_string(vars_.size() + 1);
  v.kind = VarKind::polymatrix;
  v.Z = basis;
  v.rows = rows;
  v.cols = cols;
  v.symmetric = symmetric;
  v.idx_lo = lo;
  v.idx_hi = hi;
  vars_.push_back(v);

  auto table = VarTable::internal(indep_names_);
  PolyMatrix out(rows, cols, table, symmetric);
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) {
      if (symmetric && j < i) continue;
      size_t entry = symmetric ? tri_index(rows, i, j) : i * cols + j;
      out.set(i, j, handle_for_range(lo + entry * m, lo + (entry + 1) * m, basis,
                                     VarKind::poly));
    }
  }
  return out;
}

PolyMatrix SosProgram::sossosmatrixvar(const std::vector<Polynomial>& Z, size_t rows) {
  if (rows == 0) fail(ErrorKind::invalid_argument, "empty matrix variable");
  std::vector<Exponents> basis = basis_exponents(Z);
  size_t m = basis.size();
  size_t N = rows * m;  // stacked basis (I kron Z)
  size_t lo = dec_names_.size();
  for (size_t k = 0; k < tri_size(N); ++k) add_decvar(fresh_coeff_name());
  size_t hi = dec_names_.size();
  ProgramVar v;
  v.name = "sosmatrixvar_" + std::to_string(vars_.size() + 1);
  v.kind = VarKind::sosmatrix;
  v.Z = basis;
  v.rows = rows;
  v.cols = rows;
  v.symmetric = true;
  v.idx_lo = lo;
  v.idx_hi = hi;
  vars_.push_back(v);

  std::vector<std::string> names = indep_names_;
  for (size_t k = lo; k < hi; ++k) names.push_back(dec_names_[k]);
  auto t = VarTable::internal(names);
  size_t ni = indep_names_.size();
  PolyMatrix out(rows, rows, t, true);
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = i; j < rows; ++j) {
      std::vector<Exponents> deg;
      std::vector<Rational> co;
      for (size_t k = 0; k < m; ++k) {
        for (size_t l = 0; l < m; ++l) {
          size_t p = i * m + k, q = j * m + l;
          size_t entry = tri_index(N, std::min(p, q), std::max(p, q));
          Exponents e(t->size(), 0);
          for (size_t vv = 0; vv < ni; ++vv) e[vv] = basis[k][vv] + basis[l][vv];
          e[ni + entry] = 1;
          deg.push_back(std::move(e));
          co.push_back(1);
        }
      }
      out.set(i, j, Polynomial(t, std::move(deg), std::move(co)));
    }
  }
  return out;
}

Constraint SosProgram::make_equation(const Polynomial& expr, ConstraintKind kind) const {
  Constraint c;
  c.kind = kind;
  const VarTablePtr& t = expr.vars();
  size_t nv = t ? t->size() : 0;
  // Classify each variable of the expression's table.
  std::vector<int> dec_of(nv, -1), ind_of(nv, -1);
  for (size_t v = 0; v < nv; ++v) {
    const std::string& n = t->name(v);
    if (auto d = decvar_index(n)) {
      dec_of[v] = static_cast<int>(*d);
      continue;
    }
    auto it = std::find(indep_names_.begin(), indep_names_.end(), n);
    if (it == indep_names_.end())
      fail(ErrorKind::domain, "expression uses unknown variable '" + n + "'");
    ind_of[v] = static_cast<int>(it - indep_names_.begin());
  }
  std::map<Exponents, std::pair<std::map<size_t, Rational>, Rational>> rows;
  for (size_t i = 0; i < expr.term_count(); ++i) {
    const Exponents& e = expr.degmat()[i];
    Exponents ind(indep_names_.size(), 0);
    int dec = -1, decdeg = 0;
    for (size_t v = 0; v < nv; ++v) {
      if (e[v] == 0) continue;
      if (dec_of[v] >= 0) {
        decdeg += e[v];
        dec = dec_of[v];
      } else {
        ind[ind_of[v]] = e[v];
      }
    }
    if (decdeg > 1)
      fail(ErrorKind::domain,
           "constraint is bilinear in decision variables (term " +
               Polynomial::monomial(t, e, expr.coeffs()[i]).str() + ")");
    auto& slot = rows[ind];
    if (decdeg == 1)
      slot.first[static_cast<size_t>(dec)] += expr.coeffs()[i];
    else
      slot.second += expr.coeffs()[i];
  }
  for (auto& [z, data] : rows) {
    c.Z.push_back(z);
    for (auto it = data.first.begin(); it != data.first.end();)
      it = (it->second == 0) ? data.first.erase(it) : std::next(it);
    c.cols.push_back(std::move(data.first));
    c.b.push_back(-data.second);
  }
  // Map iteration is lexicographic on exponent rows; re-sort into the
  // graded-lex term order.
  std::vector<size_t> order(c.Z.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return monomial_before(c.Z[a], c.Z[b]); });
  Constraint sorted = c;
  for (size_t i = 0; i < order.size(); ++i) {
    sorted.Z[i] = c.Z[order[i]];
    sorted.cols[i] = c.cols[order[i]];
    sorted.b[i] = c.b[order[i]];
  }
  return sorted;
}

void SosProgram::soseq(const Polynomial& expr) {
  constraints_.push_back(make_equation(expr, ConstraintKind::eq));
}

void SosProgram::add_ineq(const Polynomial& expr, BasisOption option,
                          std::vector<std::vector<size_t>> partitions,
                          ConstraintKind kind, MatrixIneqMode mode, size_t mrows) {
  Constraint c = make_equation(expr, kind);
  c.option = option;
  c.partitions = std::move(partitions);
  c.mmode = mode;
  c.mrows = mrows;
  constraints_.push_back(std::move(c));
}

void SosProgram::sosineq(const Polynomial& expr) {
  add_ineq(expr, BasisOption::none, {}, ConstraintKind::ineq,
           MatrixIneqMode::quadraticMineq, 0);
}

void SosProgram::sosineq_sparse(const Polynomial& expr) {
  add_ineq(expr, BasisOption::sparse, {}, ConstraintKind::ineq,
           MatrixIneqMode::quadraticMineq, 0);
}

void SosProgram::sosineq_multipartite(
    const Polynomial& expr, const std::vector<std::vector<std::string>>& partitions) {
  std::vector<std::vector<size_t>> parts;
  std::set<size_t> seen;
  for (const auto& group : partitions) {
    std::vector<size_t> idxs;
    for (const std::string& n : group) {
      auto it = std::find(indep_names_.begin(), indep_names_.end(), n);
      if (it == indep_names_.end())
        fail(ErrorKind::invalid_argument, "unknown partition variable '" + n + "'");
      size_t idx = static_cast<size_t>(it - indep_names_.begin());
      if (!seen.insert(idx).second)
        fail(ErrorKind::invalid_argument, "partition variable '" + n + "' repeated");
      idxs.push_back(idx);
    }
    if (!idxs.empty()) parts.push_back(std::move(idxs));
  }
  if (parts.empty()) fail(ErrorKind::invalid_argument, "empty partition list");
  // Every independent variable of the expression must be covered.
  Constraint probe = make_equation(expr, ConstraintKind::ineq);
  for (const Exponents& z : probe.Z)
    for (size_t v = 0; v < z.size(); ++v)
      if (z[v] != 0 && !seen.count(v))
        fail(ErrorKind::invalid_argument,
             "variable '" + indep_names_[v] + "' not covered by the partition");
  add_ineq(expr, BasisOption::sparsemultipartite, std::move(parts),
           ConstraintKind::ineq, MatrixIneqMode::quadraticMineq, 0);
}

void SosProgram::sosineq_range(const Polynomial& expr, const Rational& lo,
                               const Rational& hi) {
  Rational lo_c = lo, hi_c = hi;
  lo_c.canonicalize();
  hi_c.canonicalize();
  if (!(lo_c < hi_c))
    fail(ErrorKind::invalid_argument, "range bounds must satisfy lo < hi");
  Constraint probe = make_equation(expr, ConstraintKind::ineq);
  int var = -1;
  int deg = 0;
  for (const Exponents& z : probe.Z) {
    for (size_t v = 0; v < z.size(); ++v) {
      if (z[v] == 0) continue;
      if (var >= 0 && var != static_cast<int>(v))
        fail(ErrorKind::invalid_argument,
             "range option requires a univariate expression");
      var = static_cast<int>(v);
      deg = std::max(deg, z[v]);
    }
  }
  if (var < 0) {
    // No independent variable: the range is irrelevant.
    sosineq(expr);
    return;
  }
  // expr = s0 + (x - lo)(hi - x) s1 with SOS slacks of matching degree.
  int d0 = deg + (deg % 2);
  int d1 = std::max(deg - 2, 0);
  d1 += d1 % 2;
  Polynomial x = indep(static_cast<size_t>(var));
  std::vector<int> degs0, degs1;
  for (int d = 0; d <= d0 / 2; ++d) degs0.push_back(d);
  for (int d = 0; d <= d1 / 2; ++d) degs1.push_back(d);
  auto xt = x.vars();
  std::vector<Polynomial> Z0, Z1;
  for (int d : degs0) Z0.push_back(Polynomial::monomial(xt, Exponents{d}));
  for (int d : degs1) Z1.push_back(Polynomial::monomial(xt, Exponents{d}));
  Polynomial s0 = sossosvar(Z0);
  Polynomial s1 = sossosvar(Z1);
  Polynomial weight =
      (x - Polynomial::constant(xt, lo_c)) * (Polynomial::constant(xt, hi_c) - x);
  soseq(expr - s0 - weight * s1);
}

void SosProgram::sosmatrixineq(const PolyMatrix& M, MatrixIneqMode mode) {
  if (M.rows() != M.cols())
    fail(ErrorKind::invalid_argument, "matrix inequality requires a square matrix");
  for (size_t i = 0; i < M.rows(); ++i)
    for (size_t j = i + 1; j < M.cols(); ++j)
      if (M.at(i, j) != M.at(j, i))
        fail(ErrorKind::domain, "matrix inequality requires a symmetric matrix");
  size_t r = M.rows();
  ensure_mvars(r);
  size_t user_n = indep_names_.size() - mvar_count_;
  std::vector<Polynomial> y;
  for (size_t i = 0; i < r; ++i) y.push_back(indep(user_n + i));
  Polynomial expr = Polynomial::zero(y[0].vars());
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < r; ++j) expr += y[i] * y[j] * M.at(i, j);

  // Partition: the matrix's own independent variables, then the Mvar
  // block (homogeneous of degree 2, so its basis is exactly degree 1).
  Constraint probe = make_equation(expr, ConstraintKind::ineq);
  std::set<size_t> xvars;
  for (const Exponents& z : probe.Z)
    for (size_t v = 0; v < z.size(); ++v)
      if (z[v] != 0 && v < user_n) xvars.insert(v);
  std::vector<std::vector<size_t>> parts;
  if (!xvars.empty()) parts.emplace_back(xvars.begin(), xvars.end());
  std::vector<size_t> yblock;
  for (size_t i = 0; i < r; ++i) yblock.push_back(user_n + i);
  parts.push_back(std::move(yblock));
  add_ineq(expr, BasisOption::sparsemultipartite, std::move(parts),
           ConstraintKind::matrixineq, mode, r);
}

void SosProgram::sossetobj(const Polynomial& objective) {
  Constraint eq = make_equation(objective, ConstraintKind::eq);
  std::vector<Rational> w(dec_names_.size(), Rational(0));
  Rational offset(0);
  for (size_t j = 0; j < eq.Z.size(); ++j) {
    if (total_degree(eq.Z[j]) != 0)
      fail(ErrorKind::domain, "objective must not involve independent variables");
    for (const auto& [k, coef] : eq.cols[j]) w[k] = coef;
    offset = -eq.b[j];
  }
  objective_ = std::move(w);
  objective_offset_ = offset;
  has_objective_ = true;
}

VarTablePtr SosProgram::handle_table() const {
  std::vector<std::string> names = indep_names_;
  names.insert(names.end(), dec_names_.begin(), dec_names_.end());
  return VarTable::internal(names);
}

}  // namespace sumsq
