#include "sumsq/demos.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <utility>

#include "sumsq/error.hpp"

namespace sumsq {

namespace {

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return std::string(buf);
}

// Largest coefficient magnitude of a - b over the aligned tables.
double max_coeff_gap(const Polynomial& a, const Polynomial& b) {
  auto [aa, bb] = align(a, b);
  Polynomial d = aa - bb;
  double worst = 0.0;
  for (const Rational& c : d.coeffs())
    worst = std::max(worst, std::fabs(rat_to_double(c)));
  return worst;
}

Polynomial sum_of_factor_squares(const GramCertificate& g) {
  Polynomial s = Polynomial::zero(g.vars);
  for (const Polynomial& f : g.factors) s += f * f;
  return s;
}

// x' A x over the first A.rows() variables of the table.
Polynomial quad_form(VarTablePtr vars, const Eigen::MatrixXd& A) {
  Polynomial out = Polynomial::zero(vars);
  size_t n = static_cast<size_t>(A.rows());
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = a; b < n; ++b) {
      double v = (a == b) ? A(a, a) : A(a, b) + A(b, a);
      if (v == 0.0) continue;
      Exponents e(vars->size(), 0);
      e[a] += 1;
      e[b] += 1;
      out += Polynomial::monomial(vars, e, rat_from_double(v));
    }
  }
  return out;
}

struct Solved {
  SdpProblem sdp;
  SdpSolution sol;
  std::vector<double> dv;  // declaration-order values, set when feasible
  bool feasible = false;
  std::string note;
};

Solved run(const SosProgram& prog, const SolveOptions& opts) {
  Solved s;
  s.sdp = assemble(prog);
  s.sol = sdp_solve(s.sdp, opts);
  const SolveReport& rep = s.sol.report;
  if (rep.numerr >= 2) fail(ErrorKind::numeric, "SDP solver failed numerically");
  if (rep.pinf != 0) {
    s.note = "infeasible";
    return s;
  }
  if (rep.dinf != 0) {
    s.note = "unbounded";
    return s;
  }
  if (rep.numerr == 1 && rep.feasratio != 1.0)
    fail(ErrorKind::numeric,
         "SDP solver stopped at the iteration limit without converging");
  s.feasible = true;
  s.note = "feasible";
  s.dv = decl_values(s.sdp, s.sol.x);
  return s;
}

Polynomial onto(const Polynomial& p, VarTablePtr table) {
  std::vector<size_t> map(p.vars()->size());
  for (size_t i = 0; i < map.size(); ++i) {
    auto at = table->index_of(p.vars()->name(i));
    if (!at) fail(ErrorKind::invalid_argument, "variable missing from the target table");
    map[i] = *at;
  }
  return p.remap(table, map);
}

Polynomial goldstein_price(VarTablePtr T) {
  Polynomial a = poly_parse("x1 + x2 + 1", T);
  Polynomial b = poly_parse("19 - 14*x1 + 3*x1^2 - 14*x2 + 6*x1*x2 + 3*x2^2", T);
  Polynomial c = poly_parse("2*x1 - 3*x2", T);
  Polynomial d = poly_parse("18 - 32*x1 + 12*x1^2 + 48*x2 - 36*x1*x2 + 27*x2^2", T);
  Polynomial one = Polynomial::constant(T, 1);
  return (one + a * a * b) * (Polynomial::constant(T, 30) + c * c * d);
}

std::vector<Polynomial> demo2_field(VarTablePtr T) {
  // Third equation scaled by x3^2 + 1 so every component is polynomial;
  // the first two carry the same factor to keep one common system.
  Polynomial t = poly_parse("x3^2 + 1", T);
  Polynomial f1 = t * poly_parse("-x1^3 - x1*x3^2", T);
  Polynomial f2 = t * poly_parse("-x2 - x1^2*x2", T);
  Polynomial f3 = t * poly_parse("-x3 + 3*x1^2*x3", T) - poly_parse("3*x3", T);
  return {f1, f2, f3};
}

// Real symmetric embeddings of M* E_ii M - gamma^2 E_ii for the 4x4
// uncertain interconnection M = U V*.
std::vector<Eigen::MatrixXd> demo5_blocks(double gamma) {
  using C = std::complex<double>;
  const C j(0.0, 1.0);
  double alpha = 3.0 + std::sqrt(3.0);
  double beta = std::sqrt(3.0) - 1.0;
  double a = std::sqrt(2.0 / alpha);
  double b = 1.0 / std::sqrt(alpha);
  double c = b;
  double d = -std::sqrt(beta / alpha);
  C f = (1.0 + j) * std::sqrt(1.0 / (alpha * beta));

  Eigen::MatrixXcd U(4, 2), V(4, 2);
  U << C(a), C(0.0), C(b), C(b), C(c), j * c, C(d), f;
  V << C(0.0), C(a), C(b), C(-b), C(c), -j * c, -j * f, C(-d);
  Eigen::MatrixXcd M = U * V.adjoint();

  std::vector<Eigen::MatrixXd> out;
  for (int i = 0; i < 4; ++i) {
    Eigen::MatrixXcd H = M.row(i).adjoint() * M.row(i);
    H(i, i) -= gamma * gamma;
    Eigen::MatrixXd A(8, 8);
    A.topLeftCorner(4, 4) = H.real();
    A.topRightCorner(4, 4) = -H.imag();
    A.bottomLeftCorner(4, 4) = H.imag();
    A.bottomRightCorner(4, 4) = H.real();
    out.push_back(A);
  }
  return out;
}

std::vector<std::string> var_names(const std::string& stem, int count) {
  std::vector<std::string> names;
  for (int i = 1; i <= count; ++i) names.push_back(stem + std::to_string(i));
  return names;
}

PolyMatrix demo9_matrix() {
  auto T = VarTable::make({"x1", "x2", "x3"});
  Polynomial P11 = poly_parse("x1^4 + x1^2*x2^2 + x1^2*x3^2", T);
  Polynomial P12 = poly_parse("x1*x2*x3^2 - x1^3*x2", T) -
                   poly_parse("x1*x2", T) * poly_parse("x2^2 + 2*x3^2", T);
  Polynomial P22 = poly_parse("x1^2*x2^2 + x2^2*x3^2", T) +
                   poly_parse("x2^2 + 2*x3^2", T).pow(2);
  PolyMatrix P(2, 2, T, true);
  P.set(0, 0, P11);
  P.set(0, 1, P12);
  P.set(1, 0, P12);
  P.set(1, 1, P22);
  return P;
}

int check_demo7_n(const DemoOptions& opts) {
  int n = opts.demo7_n;
  if (n < 1) fail(ErrorKind::invalid_argument, "demo 7 needs n >= 1");
  if (n > 13 && !opts.demo7_allow_large)
    fail(ErrorKind::invalid_argument,
         "demo 7 with n > 13 builds a very large program; pass the override to proceed");
  return n;
}

struct Demo7Handles {
  SosProgram prog;
  size_t gam_index = 0;
};

Demo7Handles build_demo7(int n) {
  auto T = VarTable::make({"x"});
  Demo7Handles h{SosProgram({"x"}), 0};
  Polynomial gam = h.prog.sosdecvar("gam");
  h.gam_index = *h.prog.decvar_index("gam");
  std::vector<int> lower(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) lower[static_cast<size_t>(k)] = k;
  Polynomial p = h.prog.sospolyvar(monomials(T, lower));
  p += gam * Polynomial::monomial(T, {n}, 1);
  Polynomial one = Polynomial::constant(T, 1);
  h.prog.sosineq_range(one + p, -1, 1);
  h.prog.sosineq_range(one - p, -1, 1);
  h.prog.sossetobj(-gam);
  return h;
}

struct Demo8Handles {
  SosProgram prog;
  Polynomial P;
  size_t ia = 0, ib = 0, ic = 0;
};

Demo8Handles build_demo8() {
  auto T = VarTable::make({"x"});
  Demo8Handles h{SosProgram({"x"}), Polynomial(), 0, 0, 0};
  Polynomial a = h.prog.sosdecvar("a");
  Polynomial b = h.prog.sosdecvar("b");
  Polynomial c = h.prog.sosdecvar("c");
  h.ia = *h.prog.decvar_index("a");
  h.ib = *h.prog.decvar_index("b");
  h.ic = *h.prog.decvar_index("c");
  Polynomial x = Polynomial::variable(T, 0);
  h.P = a + b * x + c * x * x;
  h.prog.sosineq_range(h.P, 0, 5);
  h.prog.sosineq_range(h.P - Polynomial::constant(T, 1), 4, 5);
  // Objective integrates P against the moments (1, 1, 5/4) of [0, 5]
  // scaled by 1/5, the uniform density on the interval.
  h.prog.sossetobj(a + b + c * Rational(5, 4));
  return h;
}

struct Demo2Handles {
  SosProgram prog;
  Polynomial V;
};

Demo2Handles build_demo2() {
  auto T = VarTable::make({"x1", "x2", "x3"});
  Demo2Handles h{SosProgram({"x1", "x2", "x3"}), Polynomial()};
  h.V = h.prog.sospolyvar({poly_parse("x1^2", T), poly_parse("x2^2", T),
                           poly_parse("x3^2", T)});
  Polynomial sumsq = poly_parse("x1^2 + x2^2 + x3^2", T);
  h.prog.sosineq(h.V - sumsq);
  auto f = demo2_field(T);
  Polynomial vdot = Polynomial::zero(h.V.vars());
  for (size_t k = 0; k < 3; ++k) {
    auto at = h.V.vars()->index_of(T->name(k));
    vdot += h.V.diff(*at) * f[k];
  }
  h.prog.sosineq(-vdot);
  return h;
}

SosProgram build_demo4(int m) {
  if (m < 0) fail(ErrorKind::invalid_argument, "demo 4 needs m >= 0");
  auto T = VarTable::make(var_names("x", 5));
  SosProgram prog(T->names());
  const int J[5][5] = {{1, -1, 1, 1, -1},
                       {-1, 1, -1, 1, 1},
                       {1, -1, 1, -1, 1},
                       {1, 1, -1, 1, -1},
                       {-1, 1, 1, -1, 1}};
  Polynomial q = Polynomial::zero(T);
  for (size_t i = 0; i < 5; ++i) {
    for (size_t j = 0; j < 5; ++j) {
      Exponents e(5, 0);
      e[i] += 2;
      e[j] += 2;
      q += Polynomial::monomial(T, e, J[i][j]);
    }
  }
  Polynomial s = Polynomial::zero(T);
  for (size_t i = 0; i < 5; ++i) s += Polynomial::variable(T, i).pow(2);
  prog.sosineq(s.pow(m) * q);
  return prog;
}

SosProgram build_demo5(double gamma) {
  auto T = VarTable::make(var_names("x", 8));
  SosProgram prog(T->names());
  auto blocks = demo5_blocks(gamma);
  std::vector<Polynomial> A;
  for (const auto& B : blocks) A.push_back(quad_form(T, B));

  std::vector<Polynomial> lin = monomials(T, {1});
  std::vector<Polynomial> Q;
  for (int i = 0; i < 4; ++i) Q.push_back(prog.sossosvar(lin));
  std::vector<Polynomial> one{Polynomial::constant(T, 1)};

  Polynomial expr = Polynomial::zero(T);
  for (size_t i = 0; i < 4; ++i) expr -= Q[i] * A[i];
  for (size_t i = 0; i < 4; ++i) {
    for (size_t j = i + 1; j < 4; ++j) {
      Polynomial r = prog.sossosvar(one);
      expr -= r * (A[i] * A[j]);
    }
  }
  // The refutation stays homogeneous quartic: subtracting ||x||^4
  // forces strict negativity somewhere whenever all A_i(x) >= 0 at an
  // x != 0.
  Polynomial nx = Polynomial::zero(T);
  for (size_t v = 0; v < 8; ++v) nx += Polynomial::variable(T, v).pow(2);
  expr -= nx * nx;
  prog.sosineq(expr);
  return prog;
}

SosProgram build_demo6(double gamma) {
  auto T = VarTable::make(var_names("x", 5));
  SosProgram prog(T->names());
  Polynomial f = poly_parse(
      "2.5 - 0.5*x1*x2 - 0.5*x2*x3 - 0.5*x3*x4 - 0.5*x4*x5 - 0.5*x5*x1", T);
  Polynomial gmf = Polynomial::constant(T, rat_from_double(gamma)) - f;
  Polynomial p1 = prog.sossosvar(monomials(T, {0, 1}));
  Polynomial expr = p1 * gmf - gmf * gmf;
  for (size_t i = 0; i < 5; ++i) {
    Polynomial pi = prog.sospolyvar(monomials(T, {0, 1, 2}));
    expr += pi * (Polynomial::variable(T, i).pow(2) - Polynomial::constant(T, 1));
  }
  prog.sosineq(expr);
  return prog;
}

struct Demo10Handles {
  SosProgram prog;
};

Demo10Handles build_demo10() {
  auto T = VarTable::make({"x1", "x2"});
  Demo10Handles h{SosProgram({"x1", "x2"})};
  Polynomial p = poly_parse("x1^2 + x2^2", T);
  Polynomial g0 = poly_parse("2*x1", T);
  Polynomial one = Polynomial::constant(T, 1);
  Polynomial s = h.prog.sossosvar(monomials(T, {0, 1, 2}));
  Polynomial g1 = h.prog.sospolyvar(monomials(T, {2, 3}));
  // Containment of {p <= gamma} in {g0 + g1 <= theta} with
  // gamma = theta = 1, certified by [[theta^2 - s*(gamma - p), g],
  // [g, 1]] being an SOS matrix.
  Polynomial P11 = one - s * (one - p);
  Polynomial P12 = g0 + g1;
  VarTablePtr H = h.prog.handle_table();
  PolyMatrix P(2, 2, H, true);
  P.set(0, 0, onto(P11, H));
  P.set(0, 1, onto(P12, H));
  P.set(1, 0, onto(P12, H));
  P.set(1, 1, onto(one, H));
  h.prog.sosmatrixineq(P);
  return h;
}

DemoResult demo1(const DemoOptions& opts) {
  DemoResult r;
  r.id = 1;
  r.lines.push_back("demo 1: sum of squares test");
  auto T = VarTable::make({"x1", "x2"});
  Polynomial p = poly_parse("2*x1^4 + 2*x1^3*x2 - x1^2*x2^2 + 5*x2^4", T);
  r.polys.emplace_back("p", pretty(p, opts.digits));
  SosCertificate cert = findsos(p, CertMode::floating, opts.solve);
  r.feasible = cert.status == CertStatus::found;
  if (!r.feasible) {
    r.lines.push_back("p is not a sum of squares over its Newton basis");
    return r;
  }
  double resid = max_coeff_gap(sum_of_factor_squares(cert.gram), p);
  r.values.emplace_back("residual", resid);
  r.lines.push_back("p is a sum of " + std::to_string(cert.gram.factors.size()) +
                    " squares over " + std::to_string(cert.gram.Z.size()) +
                    " monomials");
  for (size_t i = 0; i < cert.gram.factors.size(); ++i)
    r.lines.push_back("  f" + std::to_string(i + 1) + " = " +
                      pretty(cert.gram.factors[i], opts.digits));
  r.lines.push_back("reconstruction residual = " + fmt(resid, 3));
  r.verified = resid <= 1e-6;
  return r;
}

DemoResult demo2(const DemoOptions& opts) {
  DemoResult r;
  r.id = 2;
  r.lines.push_back("demo 2: Lyapunov function search");
  Demo2Handles h = build_demo2();
  Solved s = run(h.prog, opts.solve);
  r.feasible = s.feasible;
  if (!s.feasible) {
    r.lines.push_back("no Lyapunov function in the chosen basis (" + s.note + ")");
    return r;
  }
  Polynomial Vs = sosgetsol(h.prog, s.sdp, s.sol, h.V, 12);
  r.polys.emplace_back("V", pretty(Vs, opts.digits));
  r.lines.push_back("V = " + pretty(Vs, opts.digits));

  auto T = VarTable::make({"x1", "x2", "x3"});
  Polynomial sumsq = poly_parse("x1^2 + x2^2 + x3^2", T);
  SosCertificate pos = findsos(Vs - sumsq, CertMode::floating, opts.solve);
  auto f = demo2_field(T);
  Polynomial vdot = Polynomial::zero(Vs.vars());
  for (size_t k = 0; k < 3; ++k) {
    auto at = Vs.vars()->index_of(T->name(k));
    vdot += Vs.diff(*at) * f[k];
  }
  SosCertificate dec = findsos(-vdot, CertMode::floating, opts.solve);
  bool ok_pos = pos.status == CertStatus::found;
  bool ok_dec = dec.status == CertStatus::found;
  r.lines.push_back(std::string("V - (x1^2 + x2^2 + x3^2) is SOS: ") +
                    (ok_pos ? "yes" : "no"));
  r.lines.push_back(std::string("-dV/dt is SOS along the flow: ") +
                    (ok_dec ? "yes" : "no"));
  r.verified = ok_pos && ok_dec;
  return r;
}

DemoResult demo3(const DemoOptions& opts) {
  DemoResult r;
  r.id = 3;
  r.lines.push_back("demo 3: global lower bound of the Goldstein-Price function");
  auto T = VarTable::make({"x1", "x2"});
  Polynomial f = goldstein_price(T);
  BoundResult b = findbound(f, opts.solve);
  r.feasible = std::isfinite(b.bound);
  if (!r.feasible) {
    r.lines.push_back("relaxation is unbounded below");
    return r;
  }
  r.values.emplace_back("bound", b.bound);
  r.lines.push_back("largest gamma with f - gamma SOS: " + fmt(b.bound, 10));
  bool min_ok = false;
  if (b.minimizer) {
    const auto& pt = *b.minimizer;
    double x1 = pt[*b.vars->index_of("x1")];
    double x2 = pt[*b.vars->index_of("x2")];
    r.values.emplace_back("x1", x1);
    r.values.emplace_back("x2", x2);
    r.lines.push_back("minimizer: (" + fmt(x1, 6) + ", " + fmt(x2, 6) + ")");
    min_ok = std::fabs(x1 - 0.0) <= 1e-3 && std::fabs(x2 + 1.0) <= 1e-3;
  } else {
    r.lines.push_back("minimizer not recovered (moment matrix not rank one)");
  }
  r.verified = std::fabs(b.bound - 3.0) <= 1e-4 && min_ok;
  return r;
}

DemoResult demo4(const DemoOptions& opts) {
  DemoResult r;
  r.id = 4;
  r.lines.push_back("demo 4: matrix copositivity");
  int m = opts.demo4_m;
  SosProgram prog = build_demo4(m);
  Solved s = run(prog, opts.solve);
  r.feasible = s.feasible;
  r.values.emplace_back("m", static_cast<double>(m));
  r.lines.push_back("(x1^2+...+x5^2)^" + std::to_string(m) +
                    " * R(x) sum of squares: " + (s.feasible ? "yes" : "no"));
  if (s.feasible)
    r.lines.push_back("J is copositive");
  else
    r.lines.push_back("multiplier power m = " + std::to_string(m) +
                      " does not decide copositivity");
  r.verified = (m == 0) ? !s.feasible : s.feasible;
  return r;
}

DemoResult demo5(const DemoOptions& opts) {
  DemoResult r;
  r.id = 5;
  r.lines.push_back("demo 5: upper bound of the structured singular value");
  if (!opts.demo5_bisect) {
    double gamma = opts.demo5_gamma;
    SosProgram prog = build_demo5(gamma);
    Solved s = run(prog, opts.solve);
    r.feasible = s.feasible;
    r.values.emplace_back("gamma", gamma);
    r.lines.push_back("gamma = " + fmt(gamma, 6) + ": " +
                      (s.feasible ? std::string("mu < gamma certified")
                                  : "not certified (" + s.note + ")"));
    if (gamma >= 0.8724)
      r.verified = s.feasible;
    else if (gamma <= 0.8723)
      r.verified = !s.feasible;
    else
      r.verified = true;
    return r;
  }
  double lo = 0.8, hi = 1.0;
  while (hi - lo > 1e-4) {
    double mid = 0.5 * (lo + hi);
    SosProgram prog = build_demo5(mid);
    Solved s = run(prog, opts.solve);
    r.lines.push_back("gamma = " + fmt(mid, 6) + ": " +
                      (s.feasible ? "feasible" : "infeasible"));
    if (s.feasible)
      hi = mid;
    else
      lo = mid;
  }
  r.feasible = true;
  r.values.emplace_back("lo", lo);
  r.values.emplace_back("hi", hi);
  r.lines.push_back("mu bound bracketed in (" + fmt(lo, 6) + ", " + fmt(hi, 6) + "]");
  double mid = 0.5 * (lo + hi);
  r.verified = (hi - lo) <= 1e-4 + 1e-12 && mid >= 0.8715 && mid <= 0.8730;
  return r;
}

DemoResult demo6(const DemoOptions& opts) {
  DemoResult r;
  r.id = 6;
  r.lines.push_back("demo 6: MAX CUT relaxation on the 5-cycle");
  double gamma = opts.demo6_gamma;
  SosProgram prog = build_demo6(gamma);
  Solved s = run(prog, opts.solve);
  r.feasible = s.feasible;
  r.values.emplace_back("gamma", gamma);
  r.lines.push_back("f <= " + fmt(gamma, 6) + " on {-1,1}^5: " +
                    (s.feasible ? std::string("certified")
                                : "not certified (" + s.note + ")"));
  if (gamma >= 4.0)
    r.verified = s.feasible;
  else
    r.verified = !s.feasible;
  return r;
}

DemoResult demo7(const DemoOptions& opts) {
  DemoResult r;
  r.id = 7;
  r.lines.push_back("demo 7: Chebyshev polynomial via coefficient maximization");
  int n = check_demo7_n(opts);
  Demo7Handles h = build_demo7(n);
  Solved s = run(h.prog, opts.solve);
  r.feasible = s.feasible;
  if (!s.feasible) {
    r.lines.push_back("program " + s.note);
    return r;
  }
  double gamma = s.dv[h.gam_index];
  double expected = std::ldexp(1.0, n - 1);
  r.values.emplace_back("n", static_cast<double>(n));
  r.values.emplace_back("gamma", gamma);
  r.values.emplace_back("expected", expected);
  r.lines.push_back("n = " + std::to_string(n) +
                    ", largest leading coefficient = " + fmt(gamma, 10));
  r.lines.push_back("2^(n-1) = " + fmt(expected, 10));
  r.verified = std::fabs(gamma - expected) <= 1e-3 * expected;
  return r;
}

DemoResult demo8(const DemoOptions& opts) {
  DemoResult r;
  r.id = 8;
  r.lines.push_back("demo 8: bound on a linear functional over nonnegative quadratics");
  Demo8Handles h = build_demo8();
  Solved s = run(h.prog, opts.solve);
  r.feasible = s.feasible;
  if (!s.feasible) {
    r.lines.push_back("program " + s.note);
    return r;
  }
  double a = s.dv[h.ia], b = s.dv[h.ib], c = s.dv[h.ic];
  double bound = a + b + 1.25 * c;
  r.values.emplace_back("bound", bound);
  r.values.emplace_back("a", a);
  r.values.emplace_back("b", b);
  r.values.emplace_back("c", c);
  Polynomial Ps = sosgetsol(h.prog, s.sdp, s.sol, h.P, 12);
  r.polys.emplace_back("P", pretty(Ps, opts.digits));
  r.lines.push_back("minimal integral value = " + fmt(bound, 10) +
                    " (exact optimum 1/37 = " + fmt(1.0 / 37.0, 10) + ")");
  r.lines.push_back("P = " + pretty(Ps, opts.digits));
  double t0 = 121.0 / 1369.0, t1 = -264.0 / 1369.0, t2 = 144.0 / 1369.0;
  bool coeffs_ok = std::fabs(a - t0) <= 1e-3 && std::fabs(b - t1) <= 1e-3 &&
                   std::fabs(c - t2) <= 1e-3;
  r.verified = std::fabs(bound - 1.0 / 37.0) <= 1e-5 && coeffs_ok;
  return r;
}

DemoResult demo9(const DemoOptions& opts) {
  DemoResult r;
  r.id = 9;
  r.lines.push_back("demo 9: sum of squares matrix decomposition");
  PolyMatrix P = demo9_matrix();
  SosCertificate cert = findsos(P, CertMode::floating, opts.solve);
  r.feasible = cert.status == CertStatus::found;
  if (!r.feasible) {
    r.lines.push_back("P is not an SOS matrix");
    return r;
  }
  const PolyMatrix& H = cert.gram.H;
  double resid = 0.0;
  for (size_t i = 0; i < 2; ++i) {
    for (size_t j = 0; j < 2; ++j) {
      Polynomial hij = Polynomial::zero(H.vars());
      for (size_t k = 0; k < H.rows(); ++k) hij += H.at(k, i) * H.at(k, j);
      resid = std::max(resid, max_coeff_gap(hij, P.at(i, j)));
    }
  }
  r.values.emplace_back("residual", resid);
  r.lines.push_back("P = H'H with H of size " + std::to_string(H.rows()) + " x 2");
  for (size_t k = 0; k < H.rows(); ++k)
    r.lines.push_back("  H" + std::to_string(k + 1) + " = [" +
                      pretty(H.at(k, 0), opts.digits) + ",  " +
                      pretty(H.at(k, 1), opts.digits) + "]");
  r.lines.push_back("max coefficient residual of H'H - P = " + fmt(resid, 3));
  r.verified = resid <= 1e-5;
  return r;
}

DemoResult demo10(const DemoOptions& opts) {
  DemoResult r;
  r.id = 10;
  r.lines.push_back("demo 10: set containment certificate");
  Demo10Handles h = build_demo10();
  Solved s = run(h.prog, opts.solve);
  r.feasible = s.feasible;
  r.lines.push_back(std::string("{x : x1^2 + x2^2 <= 1} inside "
                                "{x : g(x) <= 1}: ") +
                    (s.feasible ? std::string("certified")
                                : "not certified (" + s.note + ")"));
  r.verified = s.feasible;
  return r;
}

}  // namespace

std::string pretty(const Polynomial& p, int digits) {
  if (p.is_zero()) return "0";
  std::string out;
  for (size_t t = 0; t < p.term_count(); ++t) {
    double cv = rat_to_double(p.coeffs()[t]);
    const Exponents& e = p.degmat()[t];
    std::string mono;
    for (size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += p.vars()->name(v);
      if (e[v] > 1) mono += "^" + std::to_string(e[v]);
    }
    std::string coef = fmt(std::fabs(cv), digits);
    std::string piece;
    if (mono.empty())
      piece = coef;
    else if (coef == "1")
      piece = mono;
    else
      piece = coef + "*" + mono;
    if (out.empty())
      out = (cv < 0 ? "-" : "") + piece;
    else
      out += (cv < 0 ? " - " : " + ") + piece;
  }
  return out;
}

SosProgram build_demo_program(int id, const DemoOptions& opts) {
  switch (id) {
    case 1: {
      auto T = VarTable::make({"x1", "x2"});
      SosProgram prog({"x1", "x2"});
      prog.sosineq(poly_parse("2*x1^4 + 2*x1^3*x2 - x1^2*x2^2 + 5*x2^4", T));
      return prog;
    }
    case 2:
      return build_demo2().prog;
    case 3: {
      auto T = VarTable::make({"x1", "x2"});
      SosProgram prog({"x1", "x2"});
      Polynomial gam = prog.sosdecvar("gam");
      prog.sosineq(goldstein_price(T) - gam);
      prog.sossetobj(-gam);
      return prog;
    }
    case 4:
      return build_demo4(opts.demo4_m);
    case 5:
      return build_demo5(opts.demo5_gamma);
    case 6:
      return build_demo6(opts.demo6_gamma);
    case 7:
      return build_demo7(check_demo7_n(opts)).prog;
    case 8:
      return build_demo8().prog;
    case 9: {
      SosProgram prog({"x1", "x2", "x3"});
      prog.sosmatrixineq(demo9_matrix());
      return prog;
    }
    case 10:
      return build_demo10().prog;
    default:
      fail(ErrorKind::invalid_argument, "demo id must lie in 1..10");
  }
}

DemoResult run_demo(int id, const DemoOptions& opts) {
  switch (id) {
    case 1: return demo1(opts);
    case 2: return demo2(opts);
    case 3: return demo3(opts);
    case 4: return demo4(opts);
    case 5: return demo5(opts);
    case 6: return demo6(opts);
    case 7: return demo7(opts);
    case 8: return demo8(opts);
    case 9: return demo9(opts);
    case 10: return demo10(opts);
    default: fail(ErrorKind::invalid_argument, "demo id must lie in 1..10");
  }
}

}  // namespace sumsq
