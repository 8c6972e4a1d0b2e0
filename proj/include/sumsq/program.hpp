#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sumsq/polynomial.hpp"

namespace sumsq {

enum class VarKind { poly, sos, polymatrix, sosmatrix };
enum class ConstraintKind { eq, ineq, matrixineq };

// Gram basis policy for inequality constraints.
enum class BasisOption { none, sparse, sparsemultipartite };

enum class MatrixIneqMode { quadraticMineq, Mineq };

// Declared program variable. `idx` is the half-open range of its
// scalar coefficients inside the decision vector.
struct ProgramVar {
  std::string name;
  VarKind kind = VarKind::poly;
  std::vector<Exponents> Z;  // monomial basis over the independent table
  size_t rows = 1, cols = 1;
  bool symmetric = false;
  bool wscoeff = false;
  size_t idx_lo = 0, idx_hi = 0;
};

// Constraint in equation form: column j pairs the decision-variable
// coefficients cols[j] and constant b[j] with monomial row Z[j], read
// as  sum_k cols[j][k]*c_k = b[j]  plus the Gram terms added later.
struct Constraint {
  ConstraintKind kind = ConstraintKind::eq;
  BasisOption option = BasisOption::none;
  std::vector<std::vector<size_t>> partitions;  // independent-var indices per block
  MatrixIneqMode mmode = MatrixIneqMode::quadraticMineq;
  size_t mrows = 0;  // matrix dimension for matrixineq

  std::vector<Exponents> Z;  // support over the independent table, sorted
  std::vector<std::map<size_t, Rational>> cols;
  std::vector<Rational> b;
};

// Builder for a sum-of-squares program: declare variables, add
// equality/inequality constraints, optionally set a linear objective.
class SosProgram {
 public:
  explicit SosProgram(const std::vector<std::string>& indep_names,
                      const std::vector<std::string>& dec_names = {});

  // Rebuilds a program from its stored state, e.g. after
  // deserialization. Enforces the same invariants the builder
  // maintains: name rules, the Mvar pool naming, consecutive
  // coefficient ranges covering the decision vector, per-kind
  // coefficient counts, sorted constraint supports, and objective
  // sizing. Violations raise invalid_argument errors.
  static SosProgram from_parts(std::vector<std::string> indep_names, size_t mvar_count,
                               std::vector<std::string> dec_names,
                               std::vector<ProgramVar> vars,
                               std::vector<Constraint> constraints,
                               std::vector<Rational> objective, Rational objective_offset,
                               bool has_objective, size_t next_coeff);

  // Independent variables (user variables plus any generated Mvar_k),
  // each as a polynomial handle.
  Polynomial indep(const std::string& name) const;
  Polynomial indep(size_t index) const;
  const std::vector<std::string>& indep_names() const { return indep_names_; }
  size_t indep_count() const { return indep_names_.size(); }
  size_t mvar_count() const { return mvar_count_; }

  // Decision variables.
  size_t decvar_count() const { return dec_names_.size(); }
  const std::vector<std::string>& decvar_names() const { return dec_names_; }
  std::optional<size_t> decvar_index(const std::string& name) const;
  Polynomial decvar_poly(size_t index) const;

  // Declares one named scalar decision variable.
  Polynomial sosdecvar(const std::string& name);

  // Declares a polynomial variable with the given monomial basis; the
  // basis is deduplicated and sorted. With wscoeff the generated
  // coeff_k names are reported for by-name retrieval.
  Polynomial sospolyvar(const std::vector<Polynomial>& Z, bool wscoeff = false);

  // Declares a sum-of-squares variable over basis Z. The m(m+1)/2
  // Gram coefficients enter row-major on the upper triangle and
  // off-diagonal coefficients appear doubled in the expansion.
  Polynomial sossosvar(const std::vector<Polynomial>& Z, bool wscoeff = false);

  // Matrix-valued variants.
  PolyMatrix sospolymatrixvar(const std::vector<Polynomial>& Z, size_t rows,
                              size_t cols, bool symmetric = false);
  PolyMatrix sossosmatrixvar(const std::vector<Polynomial>& Z, size_t rows);

  // expr == 0. Rejects terms bilinear in decision variables.
  void soseq(const Polynomial& expr);

  // expr is a sum of squares (heuristic basis).
  void sosineq(const Polynomial& expr);
  // expr is a sum of squares with a Newton polytope basis.
  void sosineq_sparse(const Polynomial& expr);
  // Multipartite Newton basis; partitions name disjoint groups
  // covering the independent variables of expr.
  void sosineq_multipartite(const Polynomial& expr,
                            const std::vector<std::vector<std::string>>& partitions);
  // expr >= 0 on [lo, hi]; expr must involve at most one independent
  // variable. Rewritten as expr = s0 + (x-lo)(hi-x)*s1 with fresh SOS
  // variables s0, s1.
  void sosineq_range(const Polynomial& expr, const Rational& lo, const Rational& hi);

  // M(x) is an SOS matrix. quadraticMineq works on y'My over the
  // shared Mvar pool; Mineq constrains M = (I kron Z)' Q (I kron Z)
  // over a shared basis Z.
  void sosmatrixineq(const PolyMatrix& M,
                     MatrixIneqMode mode = MatrixIneqMode::quadraticMineq);

  // Minimized objective, affine in decision variables.
  void sossetobj(const Polynomial& objective);

  bool has_objective() const { return has_objective_; }
  const std::vector<Rational>& objective() const { return objective_; }
  const Rational& objective_offset() const { return objective_offset_; }

  const std::vector<ProgramVar>& program_vars() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  // Fresh-name counter for generated coeff_k names.
  size_t next_coeff() const { return next_coeff_; }

  // Full internal table: independent variables first, then all
  // decision variables, used to host returned handles.
  VarTablePtr handle_table() const;

 private:
  SosProgram() = default;

  std::vector<std::string> indep_names_;  // user vars then Mvar pool
  size_t mvar_count_ = 0;
  std::vector<std::string> dec_names_;
  std::vector<ProgramVar> vars_;
  std::vector<Constraint> constraints_;
  std::vector<Rational> objective_;
  Rational objective_offset_ = 0;
  bool has_objective_ = false;
  size_t next_coeff_ = 1;  // suffix for generated coeff_k names

  friend struct ProgramEquationBuilder;

  std::string fresh_coeff_name();
  size_t add_decvar(const std::string& name);
  void ensure_mvars(size_t count);
  std::vector<Exponents> basis_exponents(const std::vector<Polynomial>& Z) const;
  Polynomial handle_for_range(size_t lo, size_t hi, const std::vector<Exponents>& Z,
                              VarKind kind) const;
  Constraint make_equation(const Polynomial& expr, ConstraintKind kind) const;
  void add_ineq(const Polynomial& expr, BasisOption option,
                std::vector<std::vector<size_t>> partitions, ConstraintKind kind,
                MatrixIneqMode mode, size_t mrows);
};

// Upper-triangle helpers shared by the compiler and extraction: pairs
// (a, b), a <= b, listed row-major.
size_t tri_size(size_t m);
std::vector<std::pair<size_t, size_t>> tri_pairs(size_t m);

}  // namespace sumsq
