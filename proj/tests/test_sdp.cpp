#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "sumsq/error.hpp"
#include "sumsq/program.hpp"
#include "sumsq/sdp.hpp"
#include "sumsq/sdpa.hpp"

using namespace sumsq;

namespace {

// Hand-built problem: free columns first, then one PSD block per
// entry of sizes; rows/cost given in declaration coordinates.
SdpProblem make_problem(size_t nfree, const std::vector<size_t>& sizes) {
  SdpProblem P;
  P.n_free = nfree;
  P.n_user_dec = nfree;
  size_t decl = nfree;
  for (size_t k = 0; k < sizes.size(); ++k) {
    BlockInfo blk;
    blk.from_constraint = false;
    blk.index = k;
    blk.size = sizes[k];
    blk.mrows = 1;
    blk.decl_lo = decl;
    decl += tri_size(sizes[k]);
    P.psd_sizes.push_back(sizes[k]);
    P.blocks.push_back(blk);
  }
  P.n_decl = decl;
  P.c.assign(decl, Rational(0));
  P.rr.resize(decl);
  for (size_t i = 0; i < decl; ++i) P.rr[i] = i;
  return P;
}

void add_row(SdpProblem& P, std::map<size_t, Rational> row, Rational rhs) {
  P.rows.push_back(std::move(row));
  P.b.push_back(std::move(rhs));
}

struct Kkt {
  double primal_inf = 0;   // ||Ax-b||inf over given rows
  double min_eig_x = 0, min_eig_s = 0;
};

Kkt kkt_of(const SdpProblem& P, const SdpSolution& sol) {
  Kkt k;
  std::vector<double> dv = decl_values(P, sol.x);
  for (size_t j = 0; j < P.n_rows(); ++j) {
    double acc = -rat_to_double(P.b[j]);
    for (const auto& [d, w] : P.rows[j]) acc += rat_to_double(w) * dv[d];
    k.primal_inf = std::max(k.primal_inf, std::abs(acc));
  }
  k.min_eig_x = k.min_eig_s = 1e300;
  for (size_t b = 0; b < sol.X.size(); ++b) {
    if (sol.X[b].rows() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(sol.X[b],
                                                      Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.S[b],
                                                      Eigen::EigenvaluesOnly);
    k.min_eig_x = std::min(
        k.min_eig_x, ex.eigenvalues().minCoeff() / (1.0 + sol.X[b].norm()));
    k.min_eig_s = std::min(
        k.min_eig_s, es.eigenvalues().minCoeff() / (1.0 + sol.S[b].norm()));
  }
  return k;
}

double objective(const SdpProblem& P, const SdpSolution& sol) {
  std::vector<double> dv = decl_values(P, sol.x);
  double acc = 0;
  for (size_t d = 0; d < P.n_decl; ++d) acc += rat_to_double(P.c[d]) * dv[d];
  return acc;
}

}  // namespace

TEST_CASE("one-by-one closed forms") {
  // min x s.t. x = 2, x in PSD(1): solution x = 2, y = 1, slack 0.
  SdpProblem P = make_problem(0, {1});
  P.c[0] = 1;
  add_row(P, {{0, Rational(1)}}, Rational(2));
  SdpSolution sol = sdp_solve(P);
  CHECK(sol.report.pinf == 0);
  CHECK(sol.report.dinf == 0);
  CHECK(sol.report.numerr == 0);
  CHECK(sol.report.feasratio == doctest::Approx(1.0));
  CHECK(sol.x[0] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(sol.y[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.S[0](0, 0) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(sol.report.residual_norm <= 1e-7);
  CHECK(sol.report.gap <= 1e-7);
}

TEST_CASE("primal infeasibility is certified") {
  // x = -1 with x in PSD(1): Farkas ray through the interior-point run.
  SdpProblem P = make_problem(0, {1});
  add_row(P, {{0, Rational(1)}}, Rational(-1));
  SdpSolution sol = sdp_solve(P);
  CHECK(sol.report.pinf == 1);
  CHECK(sol.report.feasratio == doctest::Approx(-1.0));

  // Contradictory rows are caught by the exact rational preprocessing.
  SdpProblem Q = make_problem(0, {1});
  add_row(Q, {{0, Rational(1)}}, Rational(1));
  add_row(Q, {{0, Rational(1)}}, Rational(2));
  SdpSolution sq = sdp_solve(Q);
  CHECK(sq.report.pinf == 1);
  CHECK(sq.report.numerr == 0);
  CHECK(sq.report.iterations == 0);
  REQUIRE(!sq.report.warnings.empty());
}

TEST_CASE("dual infeasibility is certified") {
  // Unconstrained min of -x over PSD(1) is unbounded.
  SdpProblem P = make_problem(0, {1});
  P.c[0] = -1;
  SdpSolution sol = sdp_solve(P);
  CHECK(sol.report.dinf == 1);
  CHECK(sol.report.feasratio == doctest::Approx(-1.0));

  // min -X11 with only X22 pinned leaves X11 free to grow.
  SdpProblem Q = make_problem(0, {2});
  Q.c[0] = -1;
  add_row(Q, {{2, Rational(1)}}, Rational(1));
  SdpSolution sq = sdp_solve(Q);
  CHECK(sq.report.dinf == 1);

  // Free variable with nonzero cost outside every row.
  SdpProblem R = make_problem(1, {1});
  R.c[0] = 1;
  add_row(R, {{1, Rational(1)}}, Rational(1));
  SdpSolution sr = sdp_solve(R);
  CHECK(sr.report.dinf == 1);
}

TEST_CASE("linear-only problems bypass the cone machinery") {
  // a + b = 3, a - b = 1, minimize a: the equalities pin (2, 1).
  SdpProblem P = make_problem(2, {});
  P.c[0] = 1;
  add_row(P, {{0, Rational(1)}, {1, Rational(1)}}, Rational(3));
  add_row(P, {{0, Rational(1)}, {1, Rational(-1)}}, Rational(1));
  SdpSolution sol = sdp_solve(P);
  CHECK(sol.report.feasratio == doctest::Approx(1.0));
  CHECK(sol.x[0] == doctest::Approx(2.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));
  CHECK(sol.report.residual_norm <= 1e-9);

  // Dropping the second row leaves the objective unbounded below.
  SdpProblem Q = make_problem(2, {});
  Q.c[0] = 1;
  add_row(Q, {{0, Rational(1)}, {1, Rational(1)}}, Rational(3));
  SdpSolution sq = sdp_solve(Q);
  CHECK(sq.report.dinf == 1);
}

TEST_CASE("duplicate rows are dropped with a warning") {
  SdpProblem P = make_problem(0, {1});
  P.c[0] = 1;
  add_row(P, {{0, Rational(1)}}, Rational(2));
  add_row(P, {{0, Rational(2)}}, Rational(4));
  SdpSolution sol = sdp_solve(P);
  CHECK(sol.report.feasratio == doctest::Approx(1.0));
  CHECK(sol.x[0] == doctest::Approx(2.0).epsilon(1e-7));
  REQUIRE(sol.report.warnings.size() == 1);
  CHECK(sol.report.warnings[0].find("dependent") != std::string::npos);
  // Both multipliers are reported, the dropped one as zero.
  CHECK(sol.y.size() == 2);
  CHECK(sol.y[1] == 0.0);
}

TEST_CASE("random solvable instances meet the advertised accuracy") {
  std::mt19937 rng(20240817);
  std::uniform_int_distribution<int> coef(-4, 4);
  auto q4 = [&] {  // random rational in quarters, exact arithmetic
    Rational r(coef(rng), 4);
    r.canonicalize();
    return r;
  };
  // Exact rational L*L' + (3/10)*I, strictly positive definite.
  auto psd_entries = [&](size_t s) {
    std::vector<std::vector<Rational>> L(s, std::vector<Rational>(s));
    for (auto& rowv : L)
      for (Rational& v : rowv) v = q4();
    std::vector<std::vector<Rational>> X(s, std::vector<Rational>(s));
    for (size_t a = 0; a < s; ++a)
      for (size_t b2 = 0; b2 < s; ++b2) {
        Rational acc(0);
        for (size_t t = 0; t < s; ++t) acc += L[a][t] * L[b2][t];
        if (a == b2) acc += Rational(3, 10);
        X[a][b2] = acc;
      }
    return X;
  };
  int solved = 0, trials = 0;
  auto run_instance = [&](size_t nfree, std::vector<size_t> sizes, size_t m) {
    ++trials;
    SdpProblem P = make_problem(nfree, sizes);
    // Random sparse-ish rational rows in declaration coordinates.
    for (size_t j = 0; j < m; ++j) {
      std::map<size_t, Rational> row;
      for (size_t d = 0; d < P.n_decl; ++d)
        if (static_cast<size_t>(rng() % 3) == 0) {
          int v = coef(rng);
          if (v != 0) row[d] = Rational(v);
        }
      if (row.empty()) row[rng() % P.n_decl] = Rational(1);
      add_row(P, row, Rational(0));  // rhs patched below
    }
    // Interior primal witness; b computed exactly so that dependent
    // rows stay consistent under the rational preprocessing.
    std::vector<Rational> xstar(P.n_decl, Rational(0));
    for (size_t f = 0; f < nfree; ++f) xstar[f] = q4();
    for (size_t k = 0; k < P.blocks.size(); ++k) {
      size_t s = P.blocks[k].size;
      auto X = psd_entries(s);
      auto pairs = tri_pairs(s);
      for (size_t q = 0; q < pairs.size(); ++q)
        xstar[P.blocks[k].decl_lo + q] = X[pairs[q].first][pairs[q].second];
    }
    for (size_t j = 0; j < m; ++j) {
      Rational acc(0);
      for (const auto& [d, w] : P.rows[j]) acc += w * xstar[d];
      P.b[j] = acc;
    }
    // Interior dual witness: c = A'y + svec(S), S strictly PSD.
    std::vector<Rational> ystar(m);
    for (size_t j = 0; j < m; ++j) ystar[j] = q4();
    std::vector<Rational> cvec(P.n_decl, Rational(0));
    for (size_t j = 0; j < m; ++j)
      for (const auto& [d, w] : P.rows[j]) cvec[d] += w * ystar[j];
    for (size_t k = 0; k < P.blocks.size(); ++k) {
      size_t s = P.blocks[k].size;
      auto S = psd_entries(s);
      auto pairs = tri_pairs(s);
      for (size_t q = 0; q < pairs.size(); ++q) {
        auto [a, b2] = pairs[q];
        cvec[P.blocks[k].decl_lo + q] += Rational(a == b2 ? 1 : 2) * S[a][b2];
      }
    }
    for (size_t d = 0; d < P.n_decl; ++d) P.c[d] = cvec[d];

    SdpSolution sol = sdp_solve(P);
    if (sol.report.feasratio == 1.0 && sol.report.numerr == 0) ++solved;
    CHECK(sol.report.pinf == 0);
    CHECK(sol.report.dinf == 0);
    CHECK(sol.report.numerr == 0);
    CHECK(sol.report.gap <= 1e-7);
    Kkt k = kkt_of(P, sol);
    double bmax = 1.0;
    for (const Rational& r : P.b)
      bmax = std::max(bmax, 1.0 + std::abs(rat_to_double(r)));
    CHECK(k.primal_inf <= 1e-6 * bmax);
    CHECK(k.min_eig_x >= -1e-8);
    CHECK(k.min_eig_s >= -1e-8);
  };
  for (int t = 0; t < 90; ++t) {
    size_t nfree = rng() % 3;
    std::vector<size_t> sizes = {1 + rng() % 6};
    if (rng() % 2) sizes.push_back(1 + rng() % 4);
    size_t m = 1 + rng() % 12;
    run_instance(nfree, sizes, m);
  }
  for (int t = 0; t < 12; ++t)
    run_instance(rng() % 2, {5 + rng() % 11}, 20 + rng() % 41);
  CHECK(solved == trials);
}

TEST_CASE("assembled feasibility program solves") {
  SosProgram prog({"x", "y"});
  prog.sosineq_sparse(
      poly_parse("4*x^4*y^6 + x^2 - x*y^2 + y^2", prog.handle_table()));
  SdpProblem P = assemble(prog);
  SdpSolution sol = sdp_solve(P);
  CHECK(sol.report.feasratio == doctest::Approx(1.0));
  Kkt k = kkt_of(P, sol);
  CHECK(k.primal_inf <= 1e-7);
  CHECK(k.min_eig_x >= -1e-8);
}

TEST_CASE("identical inputs produce identical runs") {
  SdpProblem P = make_problem(1, {3});
  P.c[0] = 1;
  add_row(P, {{0, Rational(1)}, {1, Rational(1)}, {4, Rational(2)}},
          Rational(3));
  add_row(P, {{3, Rational(1)}, {6, Rational(1)}}, Rational(2));
  add_row(P, {{0, Rational(-1)}, {2, Rational(1)}}, Rational(0));
  SdpSolution a = sdp_solve(P);
  SdpSolution b = sdp_solve(P);
  CHECK(a.report.iterations == b.report.iterations);
  REQUIRE(a.x.size() == b.x.size());
  for (size_t i = 0; i < a.x.size(); ++i) CHECK(a.x[i] == b.x[i]);
  for (size_t i = 0; i < a.y.size(); ++i) CHECK(a.y[i] == b.y[i]);
}

TEST_CASE("iteration limit reports numerr 1 with the best iterate") {
  SdpProblem P = make_problem(1, {3});
  P.c[0] = 1;
  add_row(P, {{0, Rational(1)}, {1, Rational(1)}, {4, Rational(2)}},
          Rational(3));
  add_row(P, {{3, Rational(1)}, {6, Rational(1)}}, Rational(2));
  SolveOptions opt;
  opt.max_iter = 2;
  SdpSolution sol = sdp_solve(P, opt);
  CHECK(sol.report.iterations == 2);
  CHECK(sol.report.numerr == 1);
  CHECK(sol.x.size() == P.n_free + tri_size(3));
}

TEST_CASE("option validation") {
  SdpProblem P = make_problem(0, {1});
  add_row(P, {{0, Rational(1)}}, Rational(1));
  SolveOptions bad;
  bad.tol = 0;
  CHECK_THROWS_AS(sdp_solve(P, bad), Error);
  bad = SolveOptions{};
  bad.step_frac = 1.0;
  CHECK_THROWS_AS(sdp_solve(P, bad), Error);
  bad = SolveOptions{};
  bad.max_iter = 0;
  CHECK_THROWS_AS(sdp_solve(P, bad), Error);
  SdpProblem broken = make_problem(0, {1});
  add_row(broken, {{5, Rational(1)}}, Rational(1));
  CHECK_THROWS_AS(sdp_solve(broken), Error);
}

TEST_CASE("declaration values invert the svec scaling") {
  SdpProblem P = make_problem(1, {2});
  add_row(P, {{0, Rational(1)}}, Rational(5));
  add_row(P, {{1, Rational(1)}}, Rational(2));   // X11
  add_row(P, {{2, Rational(1)}}, Rational(1));   // X12
  add_row(P, {{3, Rational(1)}}, Rational(3));   // X22
  SdpSolution sol = sdp_solve(P);
  REQUIRE(sol.report.feasratio == doctest::Approx(1.0));
  std::vector<double> dv = decl_values(P, sol.x);
  CHECK(dv[0] == doctest::Approx(5.0).epsilon(1e-7));
  CHECK(dv[1] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(dv[2] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(dv[3] == doctest::Approx(3.0).epsilon(1e-7));
  // The raw solver vector carries sqrt(2) on the off-diagonal.
  CHECK(sol.x[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("sdpa export format and byte-stable round trip") {
  SosProgram prog({"x"}, {"gam"});
  auto Z = monomials(prog.indep("x").vars(), {0, 1});
  Polynomial s = prog.sossosvar(Z);
  prog.sosineq(poly_parse("x^2 + 2*x + 3", prog.handle_table()) - s -
               prog.decvar_poly(0));
  prog.sossetobj(-prog.decvar_poly(0));
  SdpProblem P = assemble(prog);

  std::string text = sdpa_export(P);
  SdpaData d = sdpa_parse(text);
  CHECK(d.m == P.n_rows());
  REQUIRE(d.block_sizes.size() == 1 + P.blocks.size());
  CHECK(d.block_sizes[0] == -static_cast<long>(P.n_free));
  CHECK(d.b.size() == d.m);
  for (size_t j = 0; j < d.m; ++j)
    CHECK(d.b[j] == rat_to_double(P.b[j]));

  SdpProblem Q = sdpa_to_problem(d);
  CHECK(sdpa_export(Q) == text);  // data reproduced exactly

  SdpSolution sp = sdp_solve(P);
  SdpSolution sq = sdp_solve(Q);
  CHECK(sp.report.feasratio == sq.report.feasratio);
  CHECK(objective(P, sp) == doctest::Approx(objective(Q, sq)).epsilon(1e-6));
}

TEST_CASE("sdpa parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(sdpa_parse("\"c\"\n1\n1\n1\n1\n1 1 2 1 5\n"),
                       doctest::Contains("line 6"), Error);
  CHECK_THROWS_WITH_AS(sdpa_parse("1\n1\n-2\n1\n1 1 1 2 5\n"),
                       doctest::Contains("diagonal"), Error);
  CHECK_THROWS_WITH_AS(sdpa_parse("1\n1\n2\n1\n1 1 oops 2 5\n"),
                       doctest::Contains("expected"), Error);
  CHECK_THROWS_WITH_AS(sdpa_parse("2\n1\n2\n1\n"),
                       doctest::Contains("unexpected end"), Error);
  CHECK_THROWS_WITH_AS(sdpa_parse("1\n1\n2\n1\n1 4 1 1 5\n"),
                       doctest::Contains("block number"), Error);
}

TEST_CASE("solution text round trip") {
  std::vector<double> x = {1.5, -2.25, 3e-9};
  std::vector<double> y = {0.0, 7.125};
  auto [xi, yi] = sdpa_import_solution(sdpa_format_solution(x, y));
  CHECK(xi == x);
  CHECK(yi == y);
  auto [xa, ya] = sdpa_import_solution("x = { 1, 2 }\ny = {3}\n");
  CHECK(xa == std::vector<double>{1.0, 2.0});
  CHECK(ya == std::vector<double>{3.0});
  CHECK_THROWS_AS(sdpa_import_solution("xVec = {1}\n"), Error);
  CHECK_THROWS_AS(sdpa_import_solution("xVec = {1}\nyVec = {2"), Error);
}
