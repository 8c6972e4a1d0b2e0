#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sumsq/error.hpp"
#include "sumsq/program.hpp"

using namespace sumsq;

namespace {

Polynomial parse_over(const SosProgram& prog, const std::string& text) {
  return poly_parse(text, prog.handle_table());
}

}  // namespace

TEST_CASE("program construction and scalar decision variables") {
  SosProgram prog({"x", "y"}, {"gam"});
  CHECK(prog.indep_count() == 2);
  CHECK(prog.decvar_count() == 1);
  CHECK(prog.decvar_index("gam") == size_t{0});
  CHECK(prog.decvar_poly(0).str() == "gam");

  CHECK_THROWS_AS(prog.sosdecvar("gam"), Error);
  CHECK_THROWS_AS(prog.sosdecvar("x"), Error);
  CHECK_THROWS_AS(prog.sosdecvar("coeff_9"), Error);
  CHECK_THROWS_AS(prog.sosdecvar("Mvar_1"), Error);
  CHECK_THROWS_AS(SosProgram({"x", "x"}), Error);
}

TEST_CASE("sospolyvar declares one coefficient per basis monomial") {
  SosProgram prog({"x", "y"});
  auto Z = monomials(prog.indep("x").vars(), {0, 1});
  // The basis is interpreted over the program's variables.
  Polynomial V = prog.sospolyvar(Z, true);
  CHECK(prog.decvar_count() == 2);
  CHECK(prog.decvar_index("coeff_1") == size_t{0});
  CHECK(prog.decvar_index("coeff_2") == size_t{1});
  CHECK(V == parse_over(prog, "coeff_1 + coeff_2*x"));
  CHECK(prog.program_vars().back().wscoeff);
  CHECK(prog.program_vars().back().kind == VarKind::poly);

  // Duplicated basis rows collapse.
  auto x = prog.indep("x");
  Polynomial W = prog.sospolyvar({x, x});
  CHECK(prog.program_vars().back().Z.size() == 1);
  CHECK(prog.decvar_count() == 3);

  CHECK_THROWS_AS(prog.sospolyvar({x + x * x}), Error);
  CHECK_THROWS_AS(prog.sospolyvar({}), Error);
}

TEST_CASE("sossosvar expansion doubles off-diagonal coefficients") {
  SosProgram prog({"x", "y"});
  auto t = prog.indep("x").vars();
  Polynomial s = prog.sossosvar({prog.indep("x"), prog.indep("y")});
  CHECK(prog.decvar_count() == 3);
  CHECK(s == parse_over(prog, "coeff_1*x^2 + 2*coeff_2*x*y + coeff_3*y^2"));
  CHECK(prog.program_vars().back().kind == VarKind::sos);
  CHECK(prog.program_vars().back().idx_lo == 0);
  CHECK(prog.program_vars().back().idx_hi == 3);
}

TEST_CASE("sospolymatrixvar layouts") {
  SosProgram prog({"x"});
  auto one = monomials(prog.indep("x").vars(), {0});
  PolyMatrix Q = prog.sospolymatrixvar(one, 2, 2, true);
  // Symmetric 2x2 over the constant basis: three distinct scalars.
  CHECK(prog.decvar_count() == 3);
  CHECK(Q.at(0, 0) == parse_over(prog, "coeff_1"));
  CHECK(Q.at(0, 1) == parse_over(prog, "coeff_2"));
  CHECK(Q.at(1, 0) == Q.at(0, 1));
  CHECK(Q.at(1, 1) == parse_over(prog, "coeff_3"));

  PolyMatrix R = prog.sospolymatrixvar(one, 2, 2, false);
  CHECK(prog.decvar_count() == 7);
  CHECK(R.at(1, 0) != R.at(0, 1));

  CHECK_THROWS_AS(prog.sospolymatrixvar(one, 2, 3, true), Error);
}

TEST_CASE("sossosmatrixvar ties entries to one stacked Gram matrix") {
  SosProgram prog({"x"});
  auto x = prog.indep("x");
  auto t = x.vars();
  std::vector<Polynomial> Z = {Polynomial::constant(t, 1), x};
  PolyMatrix M = prog.sossosmatrixvar(Z, 2);
  // Stacked basis has 4 rows, so 10 Gram coefficients.
  CHECK(prog.decvar_count() == 10);
  CHECK(M.symmetric());
  CHECK(M.at(0, 1) == M.at(1, 0));

  // Substituting any numeric Gram matrix must reproduce
  // entry (i,j) = Z' Q_ij Z for the matching block of Q.
  std::vector<std::pair<size_t, Rational>> assign;
  std::vector<std::vector<Rational>> Qfull(4, std::vector<Rational>(4));
  size_t pos = 0;
  for (auto [a, b] : tri_pairs(4)) {
    Rational val(static_cast<int>(pos) + 1, 2);
    Qfull[a][b] = val;
    Qfull[b][a] = val;
    ++pos;
  }
  auto table = M.at(0, 0).vars();
  for (size_t i = 0; i < prog.decvar_count(); ++i) {
    auto idx = table->index_of(prog.decvar_names()[i]);
    REQUIRE(idx);
  }
  for (size_t i = 0; i < 2; ++i) {
    for (size_t j = 0; j < 2; ++j) {
      Polynomial entry = M.at(i, j);
      // Substitute the Gram values into the handle.
      std::vector<std::pair<size_t, Rational>> subs;
      size_t p = 0;
      for (auto [a, b] : tri_pairs(4)) {
        auto idx = entry.vars()->index_of("coeff_" + std::to_string(p + 1));
        if (idx) subs.push_back({*idx, Qfull[a][b]});
        ++p;
      }
      Polynomial got = entry.substitute(subs);
      Polynomial want = Polynomial::zero(t);
      for (size_t k = 0; k < 2; ++k)
        for (size_t l = 0; l < 2; ++l)
          want += Polynomial::monomial(t, Exponents{int(k) + int(l)},
                                       Qfull[i * 2 + k][j * 2 + l]);
      CHECK(got == want.remap(got.vars(), {*got.vars()->index_of("x")}));
    }
  }
}

TEST_CASE("soseq builds the documented equation form") {
  SosProgram prog({"x"}, {"a", "b"});
  Polynomial a = prog.decvar_poly(0), b = prog.decvar_poly(1);
  Polynomial x = prog.indep("x");
  prog.soseq(a * x + b * x * x * Polynomial::constant(x.vars(), 2) -
             Polynomial::constant(x.vars(), 3) * x +
             Polynomial::constant(x.vars(), Rational(1, 2)));
  const Constraint& c = prog.constraints().back();
  REQUIRE(c.Z.size() == 3);
  CHECK(c.Z[0] == Exponents{0});
  CHECK(c.Z[1] == Exponents{1});
  CHECK(c.Z[2] == Exponents{2});
  CHECK(c.b[0] == Rational(-1, 2));
  CHECK(c.b[1] == 3);
  CHECK(c.b[2] == 0);
  CHECK(c.cols[0].empty());
  CHECK(c.cols[1].at(0) == 1);
  CHECK(c.cols[2].at(1) == 2);

  CHECK_THROWS_AS(prog.soseq(a * b), Error);
  CHECK_THROWS_AS(prog.soseq(a * a), Error);
}

TEST_CASE("sosineq accepts the zero polynomial") {
  SosProgram prog({"x"});
  prog.sosineq(Polynomial::zero(prog.indep("x").vars()));
  CHECK(prog.constraints().back().Z.empty());
  CHECK(prog.constraints().back().kind == ConstraintKind::ineq);
}

TEST_CASE("range inequalities rewrite through SOS slacks") {
  SosProgram prog({"x"}, {"a"});
  Polynomial x = prog.indep("x");
  Polynomial expr = x * x + prog.decvar_poly(0);
  size_t nvars_before = prog.program_vars().size();
  prog.sosineq_range(expr, 0, 2);
  // Two fresh SOS slacks: degree-2 (basis 1, x) and degree-0 (basis 1).
  REQUIRE(prog.program_vars().size() == nvars_before + 2);
  const ProgramVar& s0 = prog.program_vars()[nvars_before];
  const ProgramVar& s1 = prog.program_vars()[nvars_before + 1];
  CHECK(s0.kind == VarKind::sos);
  CHECK(s0.Z.size() == 2);
  CHECK(s1.Z.size() == 1);
  const Constraint& c = prog.constraints().back();
  CHECK(c.kind == ConstraintKind::eq);
  REQUIRE(c.Z.size() == 3);

  // Odd degree rounds the slack degrees up to even.
  SosProgram prog2({"x"});
  Polynomial x2 = prog2.indep("x");
  prog2.sosineq_range(x2 * x2 * x2 + Polynomial::constant(x2.vars(), 1), -1, 1);
  const ProgramVar& t0 = prog2.program_vars()[0];
  const ProgramVar& t1 = prog2.program_vars()[1];
  CHECK(t0.Z.size() == 3);  // 1, x, x^2
  CHECK(t1.Z.size() == 2);  // 1, x

  CHECK_THROWS_AS(prog.sosineq_range(expr, 2, 2), Error);
  CHECK_THROWS_AS(prog.sosineq_range(expr, 3, 1), Error);
  SosProgram prog3({"x", "y"});
  Polynomial xy = prog3.indep("x") * prog3.indep("y");
  CHECK_THROWS_AS(prog3.sosineq_range(xy, 0, 1), Error);
}

TEST_CASE("multipartite option validates partitions") {
  SosProgram prog({"x", "y"});
  Polynomial p = prog.indep("x").pow(2) * prog.indep("y").pow(2);
  CHECK_NOTHROW(prog.sosineq_multipartite(p, {{"x"}, {"y"}}));
  CHECK(prog.constraints().back().partitions ==
        std::vector<std::vector<size_t>>{{0}, {1}});
  CHECK_THROWS_AS(prog.sosineq_multipartite(p, {{"x"}, {"x"}}), Error);
  CHECK_THROWS_AS(prog.sosineq_multipartite(p, {{"x"}, {"z"}}), Error);
  CHECK_THROWS_AS(prog.sosineq_multipartite(p, {{"x"}}), Error);
}

TEST_CASE("matrix inequalities share the Mvar pool") {
  SosProgram prog({"x"});
  auto t = prog.indep("x").vars();
  PolyMatrix M(2, 2, t, true);
  M.set(0, 0, poly_parse("x^2", t));
  M.set(0, 1, poly_parse("x", t));
  M.set(1, 1, Polynomial::constant(t, 1));
  prog.sosmatrixineq(M);
  CHECK(prog.mvar_count() == 2);
  const Constraint& c = prog.constraints().back();
  CHECK(c.kind == ConstraintKind::matrixineq);
  CHECK(c.mrows == 2);
  REQUIRE(c.partitions.size() == 2);
  CHECK(c.partitions[0] == std::vector<size_t>{0});
  CHECK(c.partitions[1] == std::vector<size_t>{1, 2});

  PolyMatrix M3(3, 3, t, true);
  M3.set(0, 0, Polynomial::constant(t, 1));
  M3.set(1, 1, Polynomial::constant(t, 1));
  M3.set(2, 2, Polynomial::constant(t, 1));
  prog.sosmatrixineq(M3, MatrixIneqMode::Mineq);
  CHECK(prog.mvar_count() == 3);

  PolyMatrix bad(2, 2, t, false);
  bad.at(0, 1) = poly_parse("x", t);
  CHECK_THROWS_AS(prog.sosmatrixineq(bad), Error);
  PolyMatrix rect(2, 3, t, false);
  CHECK_THROWS_AS(prog.sosmatrixineq(rect), Error);
}

TEST_CASE("objective is affine in decision variables only") {
  SosProgram prog({"x"}, {"gam", "b"});
  prog.sossetobj(-prog.decvar_poly(0));
  CHECK(prog.has_objective());
  CHECK(prog.objective() == std::vector<Rational>{-1, 0});
  CHECK(prog.objective_offset() == 0);

  prog.sossetobj(prog.decvar_poly(0) + Polynomial::constant(prog.handle_table(), 1));
  CHECK(prog.objective() == std::vector<Rational>{1, 0});
  CHECK(prog.objective_offset() == 1);

  CHECK_THROWS_AS(prog.sossetobj(prog.indep("x")), Error);
  CHECK_THROWS_AS(prog.sossetobj(prog.decvar_poly(0) * prog.decvar_poly(1)), Error);
}
