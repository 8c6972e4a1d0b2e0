#include "sumsq/extract.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sumsq/error.hpp"

namespace sumsq {

namespace {

Rational pow10(int k) {
  Rational p = rat_pow(Rational(10), k >= 0 ? k : -k);
  if (k < 0) p = 1 / p;
  return p;
}

void ensure_solved(const SdpSolution& sol) {
  const auto& r = sol.report;
  if (r.pinf) fail(ErrorKind::domain, "program is not solved: primal infeasible");
  if (r.dinf) fail(ErrorKind::domain, "program is not solved: dual infeasible");
  if (r.numerr == 2) fail(ErrorKind::domain, "program is not solved: solver failed numerically");
}

const BlockInfo* find_block(const SdpProblem& sdp, bool from_constraint, size_t index) {
  for (const auto& blk : sdp.blocks)
    if (blk.from_constraint == from_constraint && blk.index == index) return &blk;
  return nullptr;
}

Eigen::MatrixXd block_matrix(const BlockInfo& blk, const std::vector<double>& dv) {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(blk.size, blk.size);
  const auto pairs = tri_pairs(blk.size);
  for (size_t p = 0; p < pairs.size(); ++p) {
    const auto [a, b] = pairs[p];
    Q(a, b) = Q(b, a) = dv[blk.decl_lo + p];
  }
  return Q;
}

GramCertificate empty_certificate(const SosProgram& prog, size_t mrows) {
  GramCertificate cert;
  cert.vars = VarTable::internal(prog.indep_names());
  cert.mrows = mrows ? mrows : 1;
  cert.H = PolyMatrix(0, cert.mrows, cert.vars);
  return cert;
}

}  // namespace

Rational round_significant(double v, int digits) {
  if (digits < 1 || digits > 17)
    fail(ErrorKind::invalid_argument, "digits must lie in [1, 17]");
  if (!std::isfinite(v))
    fail(ErrorKind::numeric, "cannot round a non-finite value");
  if (v == 0.0) return Rational(0);

  const bool neg = v < 0;
  Rational r = rat_from_double(std::abs(v));
  int e = static_cast<int>(std::floor(std::log10(std::abs(v))));
  while (r < pow10(e)) --e;
  while (r >= pow10(e + 1)) ++e;

  const int shift = digits - 1 - e;
  Rational scaled = r * pow10(shift);
  Integer floor_part;
  mpz_fdiv_q(floor_part.get_mpz_t(), mpq_numref(scaled.get_mpq_t()),
             mpq_denref(scaled.get_mpq_t()));
  const Rational frac = scaled - Rational(floor_part);
  Integer n = floor_part;
  const Rational half(1, 2);
  if (frac > half || (frac == half && mpz_odd_p(floor_part.get_mpz_t()))) n += 1;

  Rational out = Rational(n) * pow10(-shift);
  out.canonicalize();
  return neg ? Rational(-out) : out;
}

Polynomial sosgetsol(const SosProgram& prog, const SdpProblem& sdp,
                     const SdpSolution& sol, const Polynomial& expr, int digits) {
  if (digits < 1 || digits > 17)
    fail(ErrorKind::invalid_argument, "digits must lie in [1, 17]");
  ensure_solved(sol);

  const VarTablePtr table = expr.vars();
  std::vector<bool> used(table ? table->size() : 0, false);
  for (const auto& e : expr.degmat())
    for (size_t v = 0; v < e.size(); ++v)
      if (e[v] > 0) used[v] = true;

  const std::vector<double> dv = decl_values(sdp, sol.x);
  std::vector<std::pair<size_t, Rational>> values;
  for (size_t v = 0; v < used.size(); ++v) {
    if (!used[v]) continue;
    const std::string& name = table->name(v);
    if (auto k = prog.decvar_index(name)) {
      values.emplace_back(v, rat_from_double(dv[*k]));
      continue;
    }
    const auto& indep = prog.indep_names();
    if (std::find(indep.begin(), indep.end(), name) == indep.end())
      fail(ErrorKind::invalid_argument,
           "expression uses '" + name + "', which is not a variable of this program");
  }
  if (values.empty()) return expr;

  const Polynomial substituted = expr.substitute(values);
  std::vector<Rational> rounded;
  rounded.reserve(substituted.coeffs().size());
  for (const Rational& c : substituted.coeffs())
    rounded.push_back(round_significant(rat_to_double(c), digits));
  return Polynomial(substituted.vars(), substituted.degmat(), std::move(rounded));
}

GramCertificate make_certificate(const Eigen::MatrixXd& Q, std::vector<Exponents> Z,
                                 VarTablePtr vars, size_t mrows) {
  if (Q.rows() != Q.cols())
    fail(ErrorKind::invalid_argument, "Gram matrix must be square");
  if (mrows == 0) mrows = 1;
  if (static_cast<size_t>(Q.rows()) != mrows * Z.size())
    fail(ErrorKind::invalid_argument, "Gram matrix size does not match mrows * |Z|");

  GramCertificate cert;
  cert.Q = 0.5 * (Q + Q.transpose());
  cert.Z = std::move(Z);
  cert.vars = std::move(vars);
  cert.mrows = mrows;

  const size_t n = cert.Q.rows();
  const size_t m = cert.Z.size();
  if (n == 0) {
    cert.H = PolyMatrix(0, mrows, cert.vars);
    return cert;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert.Q);
  const Eigen::VectorXd lam = es.eigenvalues();
  const double lam_max = std::max(0.0, lam.maxCoeff());
  const double rank_tol = 1e-8 * lam_max;

  std::vector<size_t> kept;  // decreasing eigenvalue
  for (size_t i = n; i-- > 0;)
    if (lam(i) > rank_tol) kept.push_back(i);

  if (mrows == 1) {
    for (size_t i : kept) {
      const double s = std::sqrt(lam(i));
      std::vector<Rational> coeffs;
      coeffs.reserve(m);
      for (size_t k = 0; k < m; ++k)
        coeffs.push_back(rat_from_double(s * es.eigenvectors()(k, i)));
      cert.factors.emplace_back(cert.vars, cert.Z, std::move(coeffs));
    }
    cert.H = PolyMatrix(cert.factors.size(), 1, cert.vars);
    for (size_t i = 0; i < cert.factors.size(); ++i)
      cert.H.set(i, 0, cert.factors[i]);
    return cert;
  }

  cert.H = PolyMatrix(kept.size(), mrows, cert.vars);
  for (size_t r = 0; r < kept.size(); ++r) {
    const size_t i = kept[r];
    const double s = std::sqrt(lam(i));
    for (size_t c = 0; c < mrows; ++c) {
      std::vector<Rational> coeffs;
      coeffs.reserve(m);
      for (size_t k = 0; k < m; ++k)
        coeffs.push_back(rat_from_double(s * es.eigenvectors()(c * m + k, i)));
      cert.H.set(r, c, Polynomial(cert.vars, cert.Z, std::move(coeffs)));
    }
  }
  return cert;
}

GramCertificate gram_of_constraint(const SosProgram& prog, const SdpProblem& sdp,
                                   const SdpSolution& sol, size_t index) {
  if (index >= prog.constraints().size())
    fail(ErrorKind::invalid_argument, "constraint index out of range");
  const Constraint& con = prog.constraints()[index];
  if (con.kind == ConstraintKind::eq)
    fail(ErrorKind::domain,
         "constraint " + std::to_string(index) + " is an equality; it has no Gram block");

  const BlockInfo* blk = find_block(sdp, true, index);
  if (!blk) return empty_certificate(prog, con.mrows);

  const std::vector<double> dv = decl_values(sdp, sol.x);
  return make_certificate(block_matrix(*blk, dv), blk->Z,
                          VarTable::internal(prog.indep_names()), blk->mrows);
}

GramCertificate gram_of_variable(const SosProgram& prog, const SdpProblem& sdp,
                                 const SdpSolution& sol, size_t index) {
  if (index >= prog.program_vars().size())
    fail(ErrorKind::invalid_argument, "variable index out of range");
  const ProgramVar& pv = prog.program_vars()[index];
  if (pv.kind != VarKind::sos && pv.kind != VarKind::sosmatrix)
    fail(ErrorKind::domain,
         "variable '" + pv.name + "' is not declared as a sum of squares");

  const BlockInfo* blk = find_block(sdp, false, index);
  if (!blk) return empty_certificate(prog, pv.kind == VarKind::sosmatrix ? pv.rows : 1);

  const std::vector<double> dv = decl_values(sdp, sol.x);
  return make_certificate(block_matrix(*blk, dv), blk->Z,
                          VarTable::internal(prog.indep_names()), blk->mrows);
}

std::pair<double, std::vector<double>> residuals(const SosProgram& prog,
                                                 const SdpProblem& sdp,
                                                 const SdpSolution& sol) {
  const std::vector<double> dv = decl_values(sdp, sol.x);

  double sq = 0.0;
  for (size_t j = 0; j < sdp.rows.size(); ++j) {
    double r = -rat_to_double(sdp.b[j]);
    for (const auto& [k, coef] : sdp.rows[j]) r += rat_to_double(coef) * dv[k];
    sq += r * r;
  }
  const double primal = std::sqrt(sq);

  std::vector<double> recon;
  recon.reserve(prog.constraints().size());
  for (size_t ci = 0; ci < prog.constraints().size(); ++ci) {
    const Constraint& con = prog.constraints()[ci];
    std::map<Exponents, double> delta;
    for (size_t j = 0; j < con.Z.size(); ++j) {
      double val = -rat_to_double(con.b[j]);
      for (const auto& [k, coef] : con.cols[j]) val += rat_to_double(coef) * dv[k];
      delta[con.Z[j]] += val;
    }
    if (const BlockInfo* blk = find_block(sdp, true, ci)) {
      const size_t m = blk->Z.size();
      const auto pairs = tri_pairs(blk->size);
      const std::vector<size_t>* yblock =
          con.kind == ConstraintKind::matrixineq ? &con.partitions.back() : nullptr;
      for (size_t p = 0; p < pairs.size(); ++p) {
        const auto [a, b] = pairs[p];
        const double w = a == b ? 1.0 : 2.0;
        Exponents e;
        if (yblock) {
          e = blk->Z[a % m];
          const Exponents& eb = blk->Z[b % m];
          for (size_t v = 0; v < e.size(); ++v) e[v] += eb[v];
          e[(*yblock)[a / m]] += 1;
          e[(*yblock)[b / m]] += 1;
        } else {
          e = blk->Z[a];
          const Exponents& eb = blk->Z[b];
          for (size_t v = 0; v < e.size(); ++v) e[v] += eb[v];
        }
        delta[e] -= w * dv[blk->decl_lo + p];
      }
    }
    double worst = 0.0;
    for (const auto& [e, val] : delta) worst = std::max(worst, std::abs(val));
    recon.push_back(worst);
  }
  return {primal, recon};
}

}  // namespace sumsq
