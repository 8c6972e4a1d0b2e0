#include "sumsq/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include "sumsq/error.hpp"

namespace sumsq {

namespace {

std::vector<bool> used_mask(const Polynomial& p) {
  std::vector<bool> used(p.vars() ? p.vars()->size() : 0, false);
  for (const Exponents& e : p.degmat())
    for (size_t v = 0; v < e.size(); ++v)
      if (e[v] > 0) used[v] = true;
  return used;
}

void ensure_numeric(const Polynomial& p, const std::string& what) {
  const std::vector<bool> used = used_mask(p);
  for (size_t v = 0; v < used.size(); ++v) {
    if (!used[v]) continue;
    const std::string& n = p.vars()->name(v);
    if (n.rfind("coeff_", 0) == 0 || n.rfind("Mvar_", 0) == 0)
      fail(ErrorKind::domain,
           what + " must be numeric; it contains the decision variable '" + n + "'");
  }
}

// Drops unused table columns so generated coeff_k names never leak
// into a fresh program's independent variables.
Polynomial compress(const Polynomial& p) {
  const std::vector<bool> used = used_mask(p);
  std::vector<std::string> names;
  std::vector<size_t> keep;
  for (size_t v = 0; v < used.size(); ++v)
    if (used[v]) {
      keep.push_back(v);
      names.push_back(p.vars()->name(v));
    }
  VarTablePtr t = VarTable::internal(names);
  std::vector<Exponents> deg;
  deg.reserve(p.term_count());
  for (const Exponents& e : p.degmat()) {
    Exponents ne(keep.size(), 0);
    for (size_t j = 0; j < keep.size(); ++j) ne[j] = e[keep[j]];
    deg.push_back(std::move(ne));
  }
  return Polynomial(std::move(t), std::move(deg), p.coeffs());
}

// Removes terms whose coefficient is negligible next to the largest
// one; solver output carries such float noise.
Polynomial drop_noise(const Polynomial& p, double rel) {
  double top = 0;
  for (const Rational& c : p.coeffs())
    top = std::max(top, std::fabs(rat_to_double(c)));
  if (top == 0) return p;
  std::vector<Exponents> deg;
  std::vector<Rational> coef;
  for (size_t t = 0; t < p.term_count(); ++t)
    if (std::fabs(rat_to_double(p.coeffs()[t])) >= rel * top) {
      deg.push_back(p.degmat()[t]);
      coef.push_back(p.coeffs()[t]);
    }
  return Polynomial(p.vars(), std::move(deg), std::move(coef));
}

const BlockInfo* find_block(const SdpProblem& sdp, bool from_constraint,
                            size_t index, size_t* position = nullptr) {
  for (size_t i = 0; i < sdp.blocks.size(); ++i)
    if (sdp.blocks[i].from_constraint == from_constraint &&
        sdp.blocks[i].index == index) {
      if (position) *position = i;
      return &sdp.blocks[i];
    }
  return nullptr;
}

enum class Verdict { solved, primal_infeasible, dual_infeasible };

Verdict run_program(const SosProgram& prog, const SolveOptions& opts,
                    SdpProblem& sdp, SdpSolution& sol) {
  sdp = assemble(prog);
  sol = sdp_solve(sdp, opts);
  const SolveReport& r = sol.report;
  if (r.pinf) return Verdict::primal_infeasible;
  if (r.dinf) return Verdict::dual_infeasible;
  if (r.numerr == 2) fail(ErrorKind::numeric, "SDP solver failed numerically");
  if (r.numerr == 1 && r.feasratio != 1.0)
    fail(ErrorKind::numeric,
         "SDP solver stopped at the iteration limit without converging");
  return Verdict::solved;
}

Integer round_nearest_even(const Rational& v) {
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), mpq_numref(v.get_mpq_t()), mpq_denref(v.get_mpq_t()));
  Rational frac = v - Rational(fl);
  const Rational half(1, 2);
  if (frac > half || (frac == half && mpz_odd_p(fl.get_mpz_t()))) fl += 1;
  return fl;
}

std::vector<Integer> schedule_from_lcm(const Integer& L) {
  std::set<Integer> s;
  Integer pw = 1;
  for (int k = 0; k <= 20; ++k) {
    s.insert(pw);
    if (L != 1) s.insert(Integer(L * pw));
    pw *= 2;
  }
  return std::vector<Integer>(s.begin(), s.end());
}

Integer coeff_denominator_lcm(const Polynomial& p, Integer L = 1) {
  for (const Rational& c : p.coeffs())
    mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), mpq_denref(c.get_mpq_t()));
  return L;
}

// Exact twin of the float certificate, filled from Qnum / D.
void attach_twin(GramCertificate& gram, const RationalCertificate& rc) {
  const size_t n = rc.Qnum.size();
  gram.exact = true;
  gram.Q_exact.assign(n, std::vector<Rational>(n));
  for (size_t a = 0; a < n; ++a)
    for (size_t b = 0; b < n; ++b) {
      Rational q(rc.Qnum[a][b]);
      q /= Rational(rc.D);
      q.canonicalize();
      gram.Q_exact[a][b] = q;
    }
}

// The assembled rows of a pure findsos program mention only the Gram
// entries of its single block; rewritten over tri positions they form
// the exact system Z'QZ = p.
GramSystem system_from_problem(const SdpProblem& sdp, const BlockInfo& blk) {
  GramSystem sys;
  sys.rows.resize(sdp.rows.size());
  sys.rhs.resize(sdp.rows.size());
  const size_t ntri = tri_size(blk.size);
  for (size_t j = 0; j < sdp.rows.size(); ++j) {
    sys.rhs[j] = -sdp.b[j];
    for (const auto& [k, coef] : sdp.rows[j]) {
      if (k < blk.decl_lo || k >= blk.decl_lo + ntri)
        fail(ErrorKind::numeric, "unexpected column in a findsos program");
      Rational w = -coef;
      w.canonicalize();
      sys.rows[j][k - blk.decl_lo] = w;
    }
  }
  return sys;
}

void attach_exact(SosCertificate& out, const SosProgram& prog,
                  const SdpProblem& sdp, const std::vector<Integer>& schedule) {
  const BlockInfo* blk = find_block(sdp, true, 0);
  if (!blk) {
    RationalCertificate rc;
    rc.vars = out.gram.vars;
    rc.mrows = out.gram.mrows;
    out.exact = rc;
    out.gram.exact = true;
    return;
  }
  (void)prog;
  GramSystem sys = system_from_problem(sdp, *blk);
  auto rc = rational_round(out.gram.Q, blk->Z, out.gram.vars, sys, schedule,
                           blk->mrows);
  if (!rc) {
    out.status = CertStatus::rounding_failed;
    return;
  }
  attach_twin(out.gram, *rc);
  out.exact = std::move(rc);
}

SosCertificate constant_certificate(const Polynomial& p, CertMode mode) {
  SosCertificate out;
  out.gram.vars = p.vars() ? p.vars() : VarTable::internal({});
  out.gram.H = PolyMatrix(0, 1, out.gram.vars);
  const size_t width = p.vars() ? p.vars()->size() : 0;
  if (p.is_zero()) {
    out.status = CertStatus::found;
  } else {
    const Rational c = p.coeffs()[0];
    if (c < 0) {
      out.status = CertStatus::infeasible;
      return out;
    }
    Eigen::MatrixXd Q(1, 1);
    Q(0, 0) = rat_to_double(c);
    out.gram = make_certificate(Q, {Exponents(width, 0)}, out.gram.vars);
    out.status = CertStatus::found;
    if (mode == CertMode::rational) {
      RationalCertificate rc;
      rc.Qnum = {{Integer(c.get_num())}};
      rc.D = c.get_den();
      rc.Z = out.gram.Z;
      rc.vars = out.gram.vars;
      attach_twin(out.gram, rc);
      out.exact = std::move(rc);
    }
    return out;
  }
  if (mode == CertMode::rational) {
    RationalCertificate rc;
    rc.vars = out.gram.vars;
    out.exact = std::move(rc);
    out.gram.exact = true;
  }
  return out;
}

std::optional<std::vector<double>> recover_minimizer(const SdpProblem& sdp,
                                                     const SdpSolution& sol,
                                                     bool from_constraint,
                                                     size_t index, size_t nvars) {
  size_t bi = 0;
  const BlockInfo* blk = find_block(sdp, from_constraint, index, &bi);
  if (!blk || blk->mrows != 1 || bi >= sol.S.size()) return std::nullopt;
  const Eigen::MatrixXd& S = sol.S[bi];
  if (S.rows() == 0) return std::nullopt;

  long a0 = -1;
  std::vector<long> av(nvars, -1);
  for (size_t k = 0; k < blk->Z.size(); ++k) {
    const Exponents& e = blk->Z[k];
    const int deg = total_degree(e);
    if (deg == 0) a0 = static_cast<long>(k);
    if (deg == 1)
      for (size_t v = 0; v < e.size(); ++v)
        if (e[v] == 1) av[v] = static_cast<long>(k);
  }
  if (a0 < 0) return std::nullopt;

  // Rank-one test on the moments the extraction reads: the principal
  // submatrix over the constant and degree-one basis rows.
  std::vector<long> idx = {a0};
  for (size_t v = 0; v < nvars; ++v)
    if (av[v] >= 0) idx.push_back(av[v]);
  Eigen::MatrixXd sub(idx.size(), idx.size());
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j < idx.size(); ++j) sub(i, j) = S(idx[i], idx[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
  const Eigen::Index n = sub.rows();
  const double l1 = es.eigenvalues()(n - 1);
  const double l2 = n > 1 ? es.eigenvalues()(n - 2) : 0.0;
  if (l1 <= 0 || l2 > 1e-6 * l1) return std::nullopt;
  const double mass = S(a0, a0);
  if (mass <= 1e-8 * l1) return std::nullopt;

  std::vector<double> pt(nvars, 0.0);
  for (size_t v = 0; v < nvars; ++v)
    if (av[v] >= 0) pt[v] = S(a0, av[v]) / mass;
  return pt;
}

std::string fresh_name(const std::vector<std::string>& taken, std::string base) {
  while (std::find(taken.begin(), taken.end(), base) != taken.end()) base += "_";
  return base;
}

}  // namespace

GramSystem gram_system(const Polynomial& p, const std::vector<Exponents>& Z) {
  const size_t width = p.vars() ? p.vars()->size() : 0;
  for (const Exponents& e : Z)
    if (e.size() != width)
      fail(ErrorKind::invalid_argument, "basis width does not match the table");
  ZZInfo zz = build_zz(Z);
  GramSystem sys;
  sys.rows.resize(zz.ZZ.size());
  sys.rhs.resize(zz.ZZ.size());
  for (size_t p_idx = 0; p_idx < zz.row_of_pair.size(); ++p_idx)
    sys.rows[zz.row_of_pair[p_idx]][p_idx] = zz.weight_of_pair[p_idx];
  std::set<Exponents> covered(zz.ZZ.begin(), zz.ZZ.end());
  for (size_t j = 0; j < zz.ZZ.size(); ++j) sys.rhs[j] = p.coeff_of(zz.ZZ[j]);
  for (size_t i = 0; i < p.term_count(); ++i)
    if (!covered.count(p.degmat()[i])) {
      sys.rows.emplace_back();
      sys.rhs.push_back(p.coeffs()[i]);
    }
  return sys;
}

std::vector<Integer> denominator_schedule(const Polynomial& p) {
  return schedule_from_lcm(coeff_denominator_lcm(p));
}

std::vector<Integer> denominator_schedule(const PolyMatrix& M) {
  Integer L = 1;
  for (size_t i = 0; i < M.rows(); ++i)
    for (size_t j = 0; j < M.cols(); ++j) L = coeff_denominator_lcm(M.at(i, j), L);
  return schedule_from_lcm(L);
}

bool rational_psd(std::vector<std::vector<Rational>> A) {
  const size_t n = A.size();
  for (const auto& row : A)
    if (row.size() != n) fail(ErrorKind::invalid_argument, "matrix must be square");
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (A[i][j] != A[j][i])
        fail(ErrorKind::invalid_argument, "matrix must be symmetric");

  for (size_t k = 0; k < n; ++k) {
    const Rational piv = A[k][k];
    if (piv < 0) return false;
    if (piv == 0) {
      for (size_t i = k + 1; i < n; ++i)
        if (A[i][k] != 0) return false;
      continue;
    }
    for (size_t i = k + 1; i < n; ++i) {
      if (A[i][k] == 0) continue;
      Rational f = A[i][k] / piv;
      for (size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
    }
  }
  return true;
}

std::optional<RationalCertificate> rational_round(
    const Eigen::MatrixXd& Q, std::vector<Exponents> Z, VarTablePtr vars,
    const GramSystem& system, const std::vector<Integer>& schedule, size_t mrows) {
  if (mrows == 0) mrows = 1;
  const size_t n = Q.rows();
  if (Q.cols() != Q.rows() || n != mrows * Z.size())
    fail(ErrorKind::invalid_argument, "Gram matrix size does not match mrows * |Z|");
  if (system.rows.size() != system.rhs.size())
    fail(ErrorKind::invalid_argument, "system rows and rhs differ in length");
  const size_t ntri = tri_size(n);
  const auto pairs = tri_pairs(n);

  std::vector<long> owner(ntri, -1);
  for (size_t j = 0; j < system.rows.size(); ++j) {
    if (system.rows[j].empty()) {
      if (system.rhs[j] != 0) return std::nullopt;
      continue;
    }
    for (const auto& [pos, w] : system.rows[j]) {
      if (pos >= ntri)
        fail(ErrorKind::invalid_argument, "system references a position outside Q");
      if (owner[pos] != -1)
        fail(ErrorKind::invalid_argument, "system rows must not share Gram positions");
      owner[pos] = static_cast<long>(j);
      if (w <= 0) fail(ErrorKind::invalid_argument, "system weights must be positive");
    }
  }

  for (const Integer& D : schedule) {
    if (D <= 0) fail(ErrorKind::invalid_argument, "denominators must be positive");
    std::vector<Rational> q(ntri);
    for (size_t p = 0; p < ntri; ++p) {
      Rational v = rat_from_double(Q(pairs[p].first, pairs[p].second));
      v *= Rational(D);
      q[p] = Rational(round_nearest_even(v)) / Rational(D);
      q[p].canonicalize();
    }
    for (size_t j = 0; j < system.rows.size(); ++j) {
      if (system.rows[j].empty()) continue;
      Rational got = 0, W = 0;
      for (const auto& [pos, w] : system.rows[j]) {
        got += w * q[pos];
        W += w;
      }
      const Rational defect = system.rhs[j] - got;
      if (defect == 0) continue;
      const Rational delta = defect / W;
      for (const auto& [pos, w] : system.rows[j]) {
        q[pos] += delta;
        q[pos].canonicalize();
      }
    }
    // Positions outside every row are unconstrained; the rounded value
    // stands.
    std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n, Rational(0)));
    for (size_t p = 0; p < ntri; ++p)
      A[pairs[p].first][pairs[p].second] = A[pairs[p].second][pairs[p].first] = q[p];
    if (!rational_psd(A)) continue;

    RationalCertificate rc;
    rc.Z = std::move(Z);
    rc.vars = std::move(vars);
    rc.mrows = mrows;
    rc.D = 1;
    for (size_t p = 0; p < ntri; ++p)
      mpz_lcm(rc.D.get_mpz_t(), rc.D.get_mpz_t(),
              mpq_denref(q[p].get_mpq_t()));
    rc.Qnum.assign(n, std::vector<Integer>(n));
    for (size_t a = 0; a < n; ++a)
      for (size_t b = 0; b < n; ++b) {
        Rational scaled = A[a][b] * Rational(rc.D);
        scaled.canonicalize();
        rc.Qnum[a][b] = scaled.get_num();
      }
    return rc;
  }
  return std::nullopt;
}

SosCertificate findsos(const Polynomial& p, CertMode mode, const SolveOptions& opts) {
  ensure_numeric(p, "findsos input");
  if (p.is_constant()) return constant_certificate(p, mode);

  const Polynomial pc = compress(p);
  SosProgram prog(pc.vars()->names());
  prog.sosineq_sparse(pc);

  SosCertificate out;
  SdpProblem sdp;
  SdpSolution sol;
  if (run_program(prog, opts, sdp, sol) != Verdict::solved) {
    out.status = CertStatus::infeasible;
    return out;
  }
  out.gram = gram_of_constraint(prog, sdp, sol, 0);
  out.status = CertStatus::found;
  if (mode == CertMode::rational)
    attach_exact(out, prog, sdp, denominator_schedule(pc));
  return out;
}

SosCertificate findsos(const PolyMatrix& M, CertMode mode, const SolveOptions& opts) {
  if (M.rows() == 0 || M.rows() != M.cols())
    fail(ErrorKind::invalid_argument, "matrix must be square and nonempty");
  for (size_t i = 0; i < M.rows(); ++i)
    for (size_t j = i + 1; j < M.cols(); ++j)
      if (M.at(i, j) != M.at(j, i))
        fail(ErrorKind::invalid_argument, "matrix must be symmetric");
  for (size_t i = 0; i < M.rows(); ++i)
    for (size_t j = 0; j < M.cols(); ++j) ensure_numeric(M.at(i, j), "findsos input");
  if (M.rows() == 1) return findsos(M.at(0, 0), mode, opts);

  // Constant symmetric matrix: PSD is decidable exactly.
  bool constant = true;
  for (size_t i = 0; i < M.rows() && constant; ++i)
    for (size_t j = 0; j < M.cols() && constant; ++j)
      if (!M.at(i, j).is_constant()) constant = false;
  const size_t width = M.vars() ? M.vars()->size() : 0;
  if (constant) {
    const size_t r = M.rows();
    std::vector<std::vector<Rational>> A(r, std::vector<Rational>(r));
    Eigen::MatrixXd Q(r, r);
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < r; ++j) {
        const Exponents zero(width, 0);
        A[i][j] = M.at(i, j).coeff_of(zero);
        Q(i, j) = rat_to_double(A[i][j]);
      }
    SosCertificate out;
    if (!rational_psd(A)) {
      out.status = CertStatus::infeasible;
      return out;
    }
    VarTablePtr vars = M.vars() ? M.vars() : VarTable::internal({});
    out.gram = make_certificate(Q, {Exponents(width, 0)}, vars, r);
    out.status = CertStatus::found;
    if (mode == CertMode::rational) {
      RationalCertificate rc;
      rc.Z = out.gram.Z;
      rc.vars = vars;
      rc.mrows = r;
      rc.D = 1;
      for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j)
          mpz_lcm(rc.D.get_mpz_t(), rc.D.get_mpz_t(),
                  mpq_denref(A[i][j].get_mpq_t()));
      rc.Qnum.assign(r, std::vector<Integer>(r));
      for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) {
          Rational scaled = A[i][j] * Rational(rc.D);
          scaled.canonicalize();
          rc.Qnum[i][j] = scaled.get_num();
        }
      attach_twin(out.gram, rc);
      out.exact = std::move(rc);
    }
    return out;
  }

  SosProgram prog(M.vars()->names());
  prog.sosmatrixineq(M);

  SosCertificate out;
  SdpProblem sdp;
  SdpSolution sol;
  if (run_program(prog, opts, sdp, sol) != Verdict::solved) {
    out.status = CertStatus::infeasible;
    return out;
  }
  out.gram = gram_of_constraint(prog, sdp, sol, 0);
  out.status = CertStatus::found;
  if (mode == CertMode::rational)
    attach_exact(out, prog, sdp, denominator_schedule(M));
  return out;
}

SosCertificate sos_matrix_decompose(const PolyMatrix& M, CertMode mode,
                                    const SolveOptions& opts) {
  return findsos(M, mode, opts);
}

std::optional<Polynomial> findlyap(const std::vector<Polynomial>& f,
                                   VarTablePtr states, int degree, double eps,
                                   const SolveOptions& opts) {
  if (!states || states->size() == 0)
    fail(ErrorKind::invalid_argument, "empty state variable table");
  if (f.size() != states->size())
    fail(ErrorKind::invalid_argument,
         "vector field and state dimensions differ");
  if (degree < 2 || degree % 2 != 0)
    fail(ErrorKind::invalid_argument, "degree must be a positive even integer");
  if (!(eps > 0) || !std::isfinite(eps))
    fail(ErrorKind::invalid_argument, "eps must be positive");
  for (const Polynomial& fi : f) {
    ensure_numeric(fi, "vector field");
    const std::vector<bool> used = used_mask(fi);
    for (size_t v = 0; v < used.size(); ++v)
      if (used[v] && !states->index_of(fi.vars()->name(v)))
        fail(ErrorKind::invalid_argument,
             "vector field uses '" + fi.vars()->name(v) +
                 "', which is not a state variable");
  }

  const size_t nx = states->size();
  SosProgram prog(states->names());
  std::vector<int> vdegrees;
  for (int d = 2; d <= degree; d += 2) vdegrees.push_back(d);
  VarTablePtr base = VarTable::internal(states->names());
  Polynomial V = prog.sospolyvar(monomials(base, vdegrees));

  Polynomial norm2 = Polynomial::zero(base);
  for (size_t i = 0; i < nx; ++i) {
    Polynomial xi = Polynomial::variable(base, i);
    norm2 += xi * xi;
  }
  prog.sosineq(V - norm2 * rat_from_double(eps));

  Polynomial vdot = Polynomial::zero(V.vars());
  for (size_t i = 0; i < nx; ++i) vdot -= V.diff(i) * f[i];
  prog.sosineq(vdot);

  SdpProblem sdp;
  SdpSolution sol;
  if (run_program(prog, opts, sdp, sol) != Verdict::solved) return std::nullopt;
  return compress(drop_noise(sosgetsol(prog, sdp, sol, V, 12), 1e-10));
}

BoundResult findbound(const Polynomial& f, const SolveOptions& opts) {
  ensure_numeric(f, "findbound input");
  BoundResult out;
  out.vars = f.vars() ? f.vars() : VarTable::internal({});
  if (f.is_constant()) {
    out.bound = f.is_zero() ? 0.0 : rat_to_double(f.coeffs()[0]);
    out.minimizer = std::vector<double>(out.vars->size(), 0.0);
    return out;
  }

  const Polynomial fc = compress(f);
  const std::string gname = fresh_name(fc.vars()->names(), "gam");
  SosProgram prog(fc.vars()->names());
  Polynomial gam = prog.sosdecvar(gname);
  prog.sosineq(fc - gam);
  prog.sossetobj(-gam);

  SdpProblem sdp;
  SdpSolution sol;
  if (run_program(prog, opts, sdp, sol) != Verdict::solved) {
    out.bound = -std::numeric_limits<double>::infinity();
    return out;
  }
  const std::vector<double> dv = decl_values(sdp, sol.x);
  out.bound = dv[*prog.decvar_index(gname)];

  auto pt = recover_minimizer(sdp, sol, true, 0, fc.vars()->size());
  if (pt) {
    // Re-express over f's own table; untouched variables sit at zero.
    std::vector<double> full(out.vars->size(), 0.0);
    for (size_t v = 0; v < fc.vars()->size(); ++v)
      full[*out.vars->index_of(fc.vars()->name(v))] = (*pt)[v];
    out.minimizer = std::move(full);
  }
  return out;
}

BoundResult findbound_constrained(const Polynomial& f,
                                  const std::vector<Polynomial>& ineqs,
                                  const std::vector<Polynomial>& eqs, int degree,
                                  const SolveOptions& opts) {
  ensure_numeric(f, "findbound input");
  for (const Polynomial& g : ineqs) ensure_numeric(g, "inequality constraint");
  for (const Polynomial& h : eqs) ensure_numeric(h, "equality constraint");
  if (ineqs.empty() && eqs.empty()) return findbound(f, opts);
  if (degree < 2 || degree % 2 != 0)
    fail(ErrorKind::invalid_argument, "degree must be a positive even integer");
  int need = std::max(f.degree(), 0);
  for (const Polynomial& g : ineqs) need = std::max(need, g.degree());
  for (const Polynomial& h : eqs) need = std::max(need, h.degree());
  if (degree < need)
    fail(ErrorKind::invalid_argument,
         "degree " + std::to_string(degree) + " is too small; the data has degree " +
             std::to_string(need));
  if (ineqs.size() > 20)
    fail(ErrorKind::invalid_argument,
         "too many inequalities for the product expansion");

  std::vector<std::string> names = f.vars() ? f.vars()->names()
                                            : std::vector<std::string>{};
  auto add_names = [&names](const Polynomial& q) {
    if (!q.vars()) return;
    for (const std::string& n : q.vars()->names())
      if (std::find(names.begin(), names.end(), n) == names.end())
        names.push_back(n);
  };
  for (const Polynomial& g : ineqs) add_names(g);
  for (const Polynomial& h : eqs) add_names(h);

  BoundResult out;
  out.vars = VarTable::internal(names);

  const std::string gname = fresh_name(names, "gam");
  SosProgram prog(names);
  Polynomial gam = prog.sosdecvar(gname);
  VarTablePtr base = VarTable::internal(names);

  auto degree_list = [](int hi) {
    std::vector<int> ds;
    for (int d = 0; d <= hi; ++d) ds.push_back(d);
    return ds;
  };

  Polynomial expr = f - gam;
  const size_t sigma0_index = prog.program_vars().size();
  expr -= prog.sossosvar(monomials(base, degree_list(degree / 2)));

  for (size_t mask = 1; mask < (size_t{1} << ineqs.size()); ++mask) {
    int dT = 0;
    Polynomial prod = Polynomial::constant(base, 1);
    for (size_t i = 0; i < ineqs.size(); ++i)
      if (mask & (size_t{1} << i)) {
        dT += std::max(ineqs[i].degree(), 0);
        prod *= ineqs[i];
      }
    if (dT > degree) continue;
    Polynomial sigma = prog.sossosvar(monomials(base, degree_list((degree - dT) / 2)));
    expr -= sigma * prod;
  }
  for (const Polynomial& h : eqs) {
    Polynomial lam =
        prog.sospolyvar(monomials(base, degree_list(degree - std::max(h.degree(), 0))));
    expr -= lam * h;
  }
  prog.soseq(expr);
  prog.sossetobj(-gam);

  SdpProblem sdp;
  SdpSolution sol;
  if (run_program(prog, opts, sdp, sol) != Verdict::solved) {
    out.bound = -std::numeric_limits<double>::infinity();
    return out;
  }
  const std::vector<double> dv = decl_values(sdp, sol.x);
  out.bound = dv[*prog.decvar_index(gname)];
  out.minimizer = recover_minimizer(sdp, sol, false, sigma0_index, names.size());
  return out;
}

}  // namespace sumsq
