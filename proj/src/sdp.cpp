#include "sumsq/sdp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "sumsq/error.hpp"

namespace sumsq {

namespace {

struct Prep {
  bool infeasible = false;
  std::vector<size_t> kept;  // independent rows, ascending input order
  size_t dropped = 0;
};

// Exact rational elimination over the sparse rows: selects a maximal
// linearly independent subset and certifies dropped rows consistent.
// Entries carrying more bits than this make the elimination
// impractical (fractions compound along pivots); such systems keep
// every nonempty row and leave rank handling to the pivoted Schur
// factorization.
constexpr size_t kExactElimBits = 96;

size_t coeff_bits(const Rational& v) {
  return std::max(mpz_sizeinbase(v.get_num().get_mpz_t(), 2),
                  mpz_sizeinbase(v.get_den().get_mpz_t(), 2));
}

Prep reduce_rows(const SdpProblem& P) {
  size_t bits = 0;
  for (size_t j = 0; j < P.n_rows() && bits <= kExactElimBits; ++j) {
    for (const auto& [k, v] : P.rows[j]) bits = std::max(bits, coeff_bits(v));
    bits = std::max(bits, coeff_bits(P.b[j]));
  }
  if (bits > kExactElimBits) {
    Prep out;
    for (size_t j = 0; j < P.n_rows(); ++j) {
      bool empty = true;
      for (const auto& [k, v] : P.rows[j])
        if (v != 0) {
          empty = false;
          break;
        }
      if (!empty) {
        out.kept.push_back(j);
      } else if (P.b[j] != 0) {
        out.infeasible = true;
        return out;
      } else {
        ++out.dropped;
      }
    }
    return out;
  }

  struct Work {
    std::map<size_t, Rational> row;
    Rational rhs;
    size_t orig = 0;
  };
  std::vector<Work> work(P.n_rows());
  for (size_t j = 0; j < P.n_rows(); ++j) {
    for (const auto& [k, v] : P.rows[j])
      if (v != 0) work[j].row[k] = v;
    work[j].rhs = P.b[j];
    work[j].orig = j;
  }
  Prep out;
  std::vector<char> done(work.size(), 0);
  size_t remaining = work.size();
  while (remaining > 0) {
    size_t best = SIZE_MAX;
    for (size_t j = 0; j < work.size(); ++j)
      if (!done[j] &&
          (best == SIZE_MAX || work[j].row.size() < work[best].row.size()))
        best = j;
    done[best] = 1;
    --remaining;
    if (work[best].row.empty()) {
      if (work[best].rhs != 0) {
        out.infeasible = true;
        return out;
      }
      ++out.dropped;
      continue;
    }
    out.kept.push_back(work[best].orig);
    const size_t col = work[best].row.begin()->first;
    const Rational piv = work[best].row.begin()->second;
    for (size_t j = 0; j < work.size(); ++j) {
      if (done[j]) continue;
      auto it = work[j].row.find(col);
      if (it == work[j].row.end()) continue;
      Rational f = it->second / piv;
      work[j].row.erase(it);
      for (const auto& [k2, v2] : work[best].row) {
        if (k2 == col) continue;
        Rational upd = work[j].row.count(k2) ? work[j].row[k2] : Rational(0);
        upd -= f * v2;
        if (upd == 0)
          work[j].row.erase(k2);
        else
          work[j].row[k2] = upd;
      }
      work[j].rhs -= f * work[best].rhs;
    }
  }
  std::sort(out.kept.begin(), out.kept.end());
  return out;
}

// Location of one declaration coordinate inside the solver layout.
struct Loc {
  bool in_cone = false;
  size_t fidx = 0;             // position among the free variables
  size_t blk = 0, a = 0, b = 0;  // block and matrix entry for cone vars
  size_t svec = 0;             // offset inside the cone svec segment
};

struct Fdata {
  size_t m = 0;       // kept rows
  size_t nfu = 0;     // free columns surviving the zero-column prune
  size_t ncone = 0;   // total svec length
  size_t K = 0;       // sum of block orders
  std::vector<size_t> bs, boff;
  std::vector<std::vector<std::pair<size_t, size_t>>> pairs;
  Eigen::MatrixXd A;  // m x (nfu + ncone)
  Eigen::VectorXd b, c;
  struct Ent {
    size_t blk, r, c;
    double v;  // natural symmetric-matrix entry, mirrored implicitly
  };
  std::vector<std::vector<Ent>> rowent;
  std::vector<Eigen::MatrixXd> C;
};

const double kRt2 = std::sqrt(2.0);

Eigen::MatrixXd smat(const Fdata& F, size_t k, const Eigen::VectorXd& cone) {
  const size_t mdim = F.bs[k];
  Eigen::MatrixXd M(mdim, mdim);
  for (size_t p = 0; p < F.pairs[k].size(); ++p) {
    auto [a, b] = F.pairs[k][p];
    double v = cone[F.boff[k] + p];
    if (a == b)
      M(a, a) = v;
    else
      M(a, b) = M(b, a) = v / kRt2;
  }
  return M;
}

void svec_into(const Fdata& F, size_t k, const Eigen::MatrixXd& M,
               Eigen::VectorXd& cone) {
  for (size_t p = 0; p < F.pairs[k].size(); ++p) {
    auto [a, b] = F.pairs[k][p];
    cone[F.boff[k] + p] = (a == b) ? M(a, a) : kRt2 * 0.5 * (M(a, b) + M(b, a));
  }
}

class Ipm {
 public:
  Ipm(const Fdata& F, const SolveOptions& opt) : F_(F), opt_(opt) {}

  void run() {
    init_point();
    double best = std::numeric_limits<double>::infinity();
    int stalled = 0;
    while (true) {
      measure();
      if (opt_.verbose)
        std::fprintf(stderr,
                     "it %3d  mu %9.2e  prinf %9.2e  duinf %9.2e  gap %9.2e\n",
                     iterations, mu_, prinf, duinf, relgap);
      if (prinf <= opt_.feas_tol && duinf <= opt_.feas_tol &&
          std::min(relgap, gap) <= opt_.tol) {
        solved = true;
        break;
      }
      if (iterations >= 1 && detect_infeasible()) break;
      const double merit = std::max({prinf, duinf, std::min(relgap, gap)});
      if (merit < 0.9 * best) {
        best = merit;
        stalled = 0;
      } else if (++stalled >= 25) {
        numerr = std::max(numerr, 1);
        break;
      }
      if (iterations >= opt_.max_iter) {
        numerr = std::max(numerr, 1);
        break;
      }
      if (!step()) break;
      ++iterations;
    }
    // Near-degenerate instances leave the primal residual on a plateau
    // that the Schur solve cannot push below once complementarity has
    // collapsed; a complementary, dual-feasible iterate whose primal
    // residual sits within a modest factor of the target is still a
    // solution, reported at reduced accuracy.
    if (!solved && pinf == 0 && dinf == 0 && numerr == 1 &&
        duinf <= opt_.feas_tol && std::min(relgap, gap) <= opt_.tol &&
        prinf <= 1e3 * opt_.feas_tol) {
      solved = true;
      reduced_accuracy = true;
    }
  }

  // iterates
  Eigen::VectorXd xf, y;
  std::vector<Eigen::MatrixXd> X, S;
  int iterations = 0;
  int numerr = 0, pinf = 0, dinf = 0;
  bool solved = false;
  bool reduced_accuracy = false;
  double prinf = 0, duinf = 0, relgap = 0, gap = 0, resnorm = 0;

 private:
  const Fdata& F_;
  SolveOptions opt_;
  double bnorm_ = 0, cnorm_ = 0, mu_ = 0;
  Eigen::VectorXd rp_, rd_;  // current residuals
  std::vector<Eigen::MatrixXd> Sinv_;

  Eigen::VectorXd xall() const {
    Eigen::VectorXd v(F_.nfu + F_.ncone);
    v.head(F_.nfu) = xf;
    Eigen::VectorXd cone(F_.ncone);
    for (size_t k = 0; k < F_.bs.size(); ++k) svec_into(F_, k, X[k], cone);
    v.tail(F_.ncone) = cone;
    return v;
  }

  Eigen::VectorXd scone() const {
    Eigen::VectorXd cone(F_.ncone);
    for (size_t k = 0; k < F_.bs.size(); ++k) svec_into(F_, k, S[k], cone);
    return cone;
  }

  void init_point() {
    xf = Eigen::VectorXd::Zero(F_.nfu);
    y = Eigen::VectorXd::Zero(F_.m);
    bnorm_ = F_.b.norm();
    cnorm_ = F_.c.norm();
    std::vector<double> maxA(F_.bs.size(), 0.0);
    double maxratio = 0.0;
    for (size_t j = 0; j < F_.m; ++j) {
      maxratio = std::max(
          maxratio, (1.0 + std::abs(F_.b[j])) / (1.0 + F_.A.row(j).norm()));
      std::vector<double> sq(F_.bs.size(), 0.0);
      for (const auto& e : F_.rowent[j])
        sq[e.blk] += e.v * e.v * (e.r == e.c ? 1.0 : 2.0);
      for (size_t k = 0; k < sq.size(); ++k)
        maxA[k] = std::max(maxA[k], std::sqrt(sq[k]));
    }
    X.clear();
    S.clear();
    for (size_t k = 0; k < F_.bs.size(); ++k) {
      double mk = static_cast<double>(F_.bs[k]);
      double xi = std::max({10.0, std::sqrt(mk), mk * maxratio});
      double eta = std::max({10.0, std::sqrt(mk),
                             (1.0 + std::max(F_.C[k].norm(), maxA[k])) /
                                 std::sqrt(mk)});
      X.push_back(xi * Eigen::MatrixXd::Identity(F_.bs[k], F_.bs[k]));
      S.push_back(eta * Eigen::MatrixXd::Identity(F_.bs[k], F_.bs[k]));
    }
  }

  void measure() {
    Eigen::VectorXd x = xall();
    rp_ = F_.b - F_.A * x;
    rd_ = F_.c - F_.A.transpose() * y;
    rd_.tail(F_.ncone) -= scone();
    double pobj = F_.c.dot(x), dobj = F_.b.dot(y);
    double gapabs = 0;
    for (size_t k = 0; k < F_.bs.size(); ++k)
      gapabs += X[k].cwiseProduct(S[k]).sum();
    mu_ = F_.K > 0 ? gapabs / static_cast<double>(F_.K) : 0.0;
    prinf = rp_.norm() / (1.0 + bnorm_);
    duinf = rd_.norm() / (1.0 + cnorm_);
    relgap = std::abs(gapabs) / (1.0 + std::abs(pobj) + std::abs(dobj));
    gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    resnorm = rp_.norm();
  }

  bool detect_infeasible() {
    double by = F_.b.dot(y);
    if (std::isfinite(by) && by > 0) {
      Eigen::VectorXd v = F_.A.transpose() * (y / by);
      double bad = F_.nfu > 0 ? v.head(F_.nfu).lpNorm<Eigen::Infinity>() : 0.0;
      for (size_t k = 0; k < F_.bs.size() && bad <= opt_.feas_tol; ++k) {
        Eigen::MatrixXd V = smat(F_, k, v.tail(F_.ncone));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            V, Eigen::EigenvaluesOnly);
        bad = std::max(bad, es.eigenvalues().maxCoeff());
      }
      if (bad <= opt_.feas_tol) {
        pinf = 1;
        return true;
      }
    }
    Eigen::VectorXd x = xall();
    double cx = F_.c.dot(x);
    if (std::isfinite(cx) && cx < 0) {
      double bad = (F_.A * (x / -cx)).lpNorm<Eigen::Infinity>();
      if (bad <= opt_.feas_tol) {
        dinf = 1;
        return true;
      }
    }
    return false;
  }

  // Largest alpha with M + alpha*dM staying PSD, over all blocks.
  double steplen(const std::vector<Eigen::MatrixXd>& M,
                 const std::vector<Eigen::MatrixXd>& dM) {
    double amax = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < M.size(); ++k) {
      Eigen::LLT<Eigen::MatrixXd> llt(M[k]);
      if (llt.info() != Eigen::Success) return 0.0;
      Eigen::MatrixXd L = llt.matrixL();
      Eigen::MatrixXd T = L.triangularView<Eigen::Lower>().solve(dM[k]);
      T = L.triangularView<Eigen::Lower>()
              .solve(T.transpose())
              .transpose();
      T = 0.5 * (T + T.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T,
                                                        Eigen::EigenvaluesOnly);
      double lmin = es.eigenvalues().minCoeff();
      if (lmin < -1e-14) amax = std::min(amax, -1.0 / lmin);
    }
    return amax;
  }

  // One predictor-corrector step; false on numerical breakdown.
  bool step() {
    const size_t nb = F_.bs.size();
    Sinv_.assign(nb, Eigen::MatrixXd());
    for (size_t k = 0; k < nb; ++k) {
      Eigen::LLT<Eigen::MatrixXd> llt(S[k]);
      if (llt.info() != Eigen::Success) {
        numerr = 2;
        return false;
      }
      Sinv_[k] =
          llt.solve(Eigen::MatrixXd::Identity(F_.bs[k], F_.bs[k]));
      Sinv_[k] = 0.5 * (Sinv_[k] + Sinv_[k].transpose()).eval();
    }

    // Schur complement M_ij = tr(A_i X A_j Sinv), one block at a time.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(F_.m, F_.m);
    std::vector<Eigen::MatrixXd> W(nb);
    for (size_t j = 0; j < F_.m; ++j) {
      std::vector<char> used(nb, 0);
      for (const auto& e : F_.rowent[j]) {
        if (!used[e.blk]) {
          W[e.blk] = Eigen::MatrixXd::Zero(F_.bs[e.blk], F_.bs[e.blk]);
          used[e.blk] = 1;
        }
        W[e.blk].noalias() +=
            e.v * (X[e.blk].col(e.r) * Sinv_[e.blk].row(e.c));
        if (e.r != e.c)
          W[e.blk].noalias() +=
              e.v * (X[e.blk].col(e.c) * Sinv_[e.blk].row(e.r));
      }
      for (size_t i = 0; i <= j; ++i) {
        double acc = 0;
        for (const auto& e : F_.rowent[i]) {
          if (!used[e.blk]) continue;
          acc += e.v * (W[e.blk](e.r, e.c) +
                        (e.r != e.c ? W[e.blk](e.c, e.r) : 0.0));
        }
        M(i, j) = M(j, i) = M(j, i) + acc;
      }
    }

    const size_t dim = F_.m + F_.nfu;
    Eigen::MatrixXd Kmat = Eigen::MatrixXd::Zero(dim, dim);
    Kmat.topLeftCorner(F_.m, F_.m) = M;
    if (F_.nfu > 0) {
      Kmat.topRightCorner(F_.m, F_.nfu) = F_.A.leftCols(F_.nfu);
      Kmat.bottomLeftCorner(F_.nfu, F_.m) =
          F_.A.leftCols(F_.nfu).transpose();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Kmat);

    std::vector<Eigen::MatrixXd> Rdm(nb), zero;
    for (size_t k = 0; k < nb; ++k)
      Rdm[k] = smat(F_, k, rd_.tail(F_.ncone));

    Eigen::VectorXd dy, dxf;
    std::vector<Eigen::MatrixXd> dX(nb), dS(nb);
    auto solve_dir = [&](double sigmu,
                         const std::vector<Eigen::MatrixXd>& G) {
      Eigen::VectorXd t(F_.ncone);
      for (size_t k = 0; k < nb; ++k) {
        Eigen::MatrixXd E =
            0.5 * (X[k] * Rdm[k] * Sinv_[k] + Sinv_[k] * Rdm[k] * X[k]);
        Eigen::MatrixXd T = sigmu * Sinv_[k] - X[k] - E;
        if (!G.empty()) T -= G[k];
        svec_into(F_, k, T, t);
      }
      Eigen::VectorXd rhs(dim);
      rhs.head(F_.m) = rp_ - F_.A.rightCols(F_.ncone) * t;
      if (F_.nfu > 0) rhs.tail(F_.nfu) = rd_.head(F_.nfu);
      Eigen::VectorXd sol = qr.solve(rhs);
      sol += qr.solve(rhs - Kmat * sol);
      dy = sol.head(F_.m);
      dxf = sol.tail(F_.nfu);
      Eigen::VectorXd v = F_.A.rightCols(F_.ncone).transpose() * dy;
      for (size_t k = 0; k < nb; ++k) {
        dS[k] = Rdm[k] - smat(F_, k, v);
        Eigen::MatrixXd E =
            0.5 * (X[k] * dS[k] * Sinv_[k] + Sinv_[k] * dS[k] * X[k]);
        dX[k] = sigmu * Sinv_[k] - X[k] - E;
        if (!G.empty()) dX[k] -= G[k];
        dX[k] = 0.5 * (dX[k] + dX[k].transpose()).eval();
        dS[k] = 0.5 * (dS[k] + dS[k].transpose()).eval();
      }
    };

    // Predictor: pure Newton step toward complementarity zero.
    solve_dir(0.0, zero);
    double ap = std::min(1.0, steplen(X, dX));
    double ad = std::min(1.0, steplen(S, dS));
    double mu_aff = 0;
    for (size_t k = 0; k < nb; ++k)
      mu_aff += (X[k] + ap * dX[k]).cwiseProduct(S[k] + ad * dS[k]).sum();
    mu_aff = std::max(mu_aff / static_cast<double>(F_.K), 0.0);
    double sigma = std::clamp(std::pow(mu_aff / std::max(mu_, 1e-300), 3.0),
                              0.0, 1.0);

    // Corrector with the Mehrotra second-order term.
    std::vector<Eigen::MatrixXd> G(nb);
    for (size_t k = 0; k < nb; ++k) {
      Eigen::MatrixXd P = dX[k] * dS[k] * Sinv_[k];
      G[k] = 0.5 * (P + P.transpose());
    }
    solve_dir(sigma * mu_, G);
    ap = std::min(1.0, opt_.step_frac * steplen(X, dX));
    ad = std::min(1.0, opt_.step_frac * steplen(S, dS));
    if (ap < 1e-10 && ad < 1e-10) {
      numerr = std::max(numerr, 1);
      return false;
    }
    xf += ap * dxf;
    y += ad * dy;
    bool ok = true;
    for (size_t k = 0; k < nb; ++k) {
      X[k] = (X[k] + ap * dX[k]).eval();
      X[k] = 0.5 * (X[k] + X[k].transpose()).eval();
      S[k] = (S[k] + ad * dS[k]).eval();
      S[k] = 0.5 * (S[k] + S[k].transpose()).eval();
      ok = ok && X[k].allFinite() && S[k].allFinite();
    }
    ok = ok && xf.allFinite() && y.allFinite();
    if (!ok) {
      numerr = 2;
      return false;
    }
    return true;
  }
};

void validate(const SdpProblem& P, const SolveOptions& opt) {
  if (!(opt.tol > 0) || !(opt.feas_tol > 0))
    fail(ErrorKind::invalid_argument, "tolerances must be positive");
  if (!(opt.step_frac > 0 && opt.step_frac < 1))
    fail(ErrorKind::invalid_argument, "step_frac must lie in (0,1)");
  if (opt.max_iter < 1)
    fail(ErrorKind::invalid_argument, "max_iter must be at least 1");
  if (P.rows.size() != P.b.size())
    fail(ErrorKind::invalid_argument, "row/right-hand-side count mismatch");
  if (P.c.size() != P.n_decl || P.rr.size() != P.n_decl)
    fail(ErrorKind::invalid_argument,
         "declaration count inconsistent with objective or layout");
  size_t cone = 0;
  for (const BlockInfo& blk : P.blocks) cone += tri_size(blk.size);
  if (P.n_free + cone != P.n_decl)
    fail(ErrorKind::invalid_argument, "cone layout inconsistent with columns");
  for (const auto& row : P.rows)
    for (const auto& [k, v] : row)
      if (k >= P.n_decl)
        fail(ErrorKind::invalid_argument, "row references unknown column");
}

}  // namespace

std::vector<double> decl_values(const SdpProblem& p,
                                const std::vector<double>& x) {
  if (x.size() != p.n_decl)
    fail(ErrorKind::invalid_argument, "primal vector length mismatch");
  std::vector<double> out(p.n_decl, 0.0);
  std::vector<char> cone(p.n_decl, 0);
  for (const BlockInfo& blk : p.blocks) {
    auto pairs = tri_pairs(blk.size);
    for (size_t q = 0; q < pairs.size(); ++q) {
      size_t decl = blk.decl_lo + q;
      double v = x[p.rr[decl]];
      out[decl] = pairs[q].first == pairs[q].second ? v : v / kRt2;
      cone[decl] = 1;
    }
  }
  for (size_t k = 0; k < p.n_decl; ++k)
    if (!cone[k]) out[k] = x[p.rr[k]];
  return out;
}

SdpSolution sdp_solve(const SdpProblem& P, const SolveOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  validate(P, opts);
  SdpSolution sol;
  sol.y.assign(P.n_rows(), 0.0);
  auto finish = [&](SdpSolution& s) -> SdpSolution& {
    s.report.cpusec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    // Residual and duality gap over the full original row set, in
    // decl coordinates.
    std::vector<double> dv = decl_values(P, s.x);
    double sq = 0;
    for (size_t j = 0; j < P.n_rows(); ++j) {
      double acc = -rat_to_double(P.b[j]);
      for (const auto& [k, v] : P.rows[j]) acc += rat_to_double(v) * dv[k];
      sq += acc * acc;
    }
    s.report.residual_norm = std::sqrt(sq);
    double pobj = 0, dobj = 0;
    for (size_t k = 0; k < P.n_decl; ++k)
      if (P.c[k] != 0) pobj += rat_to_double(P.c[k]) * dv[k];
    for (size_t j = 0; j < P.n_rows(); ++j)
      dobj += rat_to_double(P.b[j]) * s.y[j];
    s.report.gap =
        std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    return s;
  };

  // Cost blocks and the decl -> solver location map.
  const size_t nb = P.blocks.size();
  std::vector<Loc> loc(P.n_decl);
  size_t ncone = 0;
  std::vector<size_t> boff(nb, 0);
  for (size_t k = 0; k < nb; ++k) {
    boff[k] = ncone;
    ncone += tri_size(P.blocks[k].size);
  }
  {
    std::vector<char> placed(P.n_decl, 0);
    for (size_t k = 0; k < nb; ++k) {
      auto pairs = tri_pairs(P.blocks[k].size);
      for (size_t q = 0; q < pairs.size(); ++q) {
        Loc& L = loc[P.blocks[k].decl_lo + q];
        L.in_cone = true;
        L.blk = k;
        L.a = pairs[q].first;
        L.b = pairs[q].second;
        L.svec = boff[k] + q;
        placed[P.blocks[k].decl_lo + q] = 1;
      }
    }
    size_t fidx = 0;
    for (size_t d = 0; d < P.n_decl; ++d)
      if (!placed[d]) loc[d].fidx = fidx++;
  }

  std::vector<Eigen::MatrixXd> Cblk;
  for (size_t k = 0; k < nb; ++k)
    Cblk.push_back(
        Eigen::MatrixXd::Zero(P.blocks[k].size, P.blocks[k].size));
  std::vector<double> cfree_full(P.n_free, 0.0);
  for (size_t d = 0; d < P.n_decl; ++d) {
    double cv = rat_to_double(P.c[d]);
    if (cv == 0) continue;
    const Loc& L = loc[d];
    if (!L.in_cone) {
      cfree_full[L.fidx] = cv;
    } else if (L.a == L.b) {
      Cblk[L.blk](L.a, L.a) = cv;
    } else {
      Cblk[L.blk](L.a, L.b) = Cblk[L.blk](L.b, L.a) = cv * 0.5;
    }
  }

  // Exact preprocessing.
  Prep prep = reduce_rows(P);
  auto zero_blocks = [&](SdpSolution& s) {
    s.x.assign(P.n_free + ncone, 0.0);
    for (size_t k = 0; k < nb; ++k) {
      s.X.push_back(Eigen::MatrixXd::Zero(P.blocks[k].size, P.blocks[k].size));
      s.S.push_back(Cblk[k]);
    }
  };
  if (prep.infeasible) {
    zero_blocks(sol);
    sol.report.pinf = 1;
    sol.report.feasratio = -1.0;
    sol.report.warnings.push_back(
        "equality rows are inconsistent (exact rank check)");
    return finish(sol);
  }
  if (prep.dropped > 0)
    sol.report.warnings.push_back(
        "dropped " + std::to_string(prep.dropped) +
        " linearly dependent equality rows");

  // Free columns never touched by a kept row are pinned to zero; a
  // nonzero objective on such a column makes the problem unbounded.
  std::vector<char> used_free(P.n_free, 0);
  for (size_t j : prep.kept)
    for (const auto& [k, v] : P.rows[j])
      if (!loc[k].in_cone && v != 0) used_free[loc[k].fidx] = 1;
  for (size_t f = 0; f < P.n_free; ++f)
    if (!used_free[f] && cfree_full[f] != 0.0) {
      zero_blocks(sol);
      sol.report.dinf = 1;
      sol.report.feasratio = -1.0;
      sol.report.warnings.push_back(
          "free variable outside every equality has a nonzero cost");
      return finish(sol);
    }
  std::vector<long> freecol(P.n_free, -1);
  size_t nfu = 0;
  for (size_t f = 0; f < P.n_free; ++f)
    if (used_free[f]) freecol[f] = static_cast<long>(nfu++);

  // Float data over the kept rows.
  Fdata F;
  F.m = prep.kept.size();
  F.nfu = nfu;
  F.ncone = ncone;
  F.boff = boff;
  F.C = Cblk;
  for (size_t k = 0; k < nb; ++k) {
    F.bs.push_back(P.blocks[k].size);
    F.K += P.blocks[k].size;
    F.pairs.push_back(tri_pairs(P.blocks[k].size));
  }
  F.A = Eigen::MatrixXd::Zero(F.m, nfu + ncone);
  F.b = Eigen::VectorXd::Zero(F.m);
  F.c = Eigen::VectorXd::Zero(nfu + ncone);
  F.rowent.resize(F.m);
  for (size_t f = 0; f < P.n_free; ++f)
    if (freecol[f] >= 0) F.c[freecol[f]] = cfree_full[f];
  for (size_t k = 0; k < nb; ++k) {
    for (size_t p = 0; p < F.pairs[k].size(); ++p) {
      auto [a, b] = F.pairs[k][p];
      F.c[nfu + boff[k] + p] =
          a == b ? Cblk[k](a, a) : kRt2 * Cblk[k](a, b);
    }
  }
  for (size_t r = 0; r < F.m; ++r) {
    size_t j = prep.kept[r];
    F.b[r] = rat_to_double(P.b[j]);
    for (const auto& [d, coef] : P.rows[j]) {
      double cv = rat_to_double(coef);
      const Loc& L = loc[d];
      if (!L.in_cone) {
        F.A(r, freecol[L.fidx]) = cv;
      } else {
        F.A(r, nfu + L.svec) = L.a == L.b ? cv : cv / kRt2;
        F.rowent[r].push_back(
            {L.blk, L.a, L.b, L.a == L.b ? cv : cv * 0.5});
      }
    }
  }

  // Equilibration: unit-norm rows, right-hand side and cost pulled
  // toward one. Undone on every returned quantity.
  Eigen::VectorXd rowscale = Eigen::VectorXd::Ones(F.m);
  for (size_t r = 0; r < F.m; ++r) {
    const double nrm = F.A.row(r).norm();
    if (nrm > 0) rowscale[r] = nrm;
    F.A.row(r) /= rowscale[r];
    F.b[r] /= rowscale[r];
    for (auto& e : F.rowent[r]) e.v /= rowscale[r];
  }
  const double bscale =
      F.m > 0 ? std::max(1.0, F.b.lpNorm<Eigen::Infinity>()) : 1.0;
  const double cscale =
      F.c.size() > 0 ? std::max(1.0, F.c.lpNorm<Eigen::Infinity>()) : 1.0;
  F.b /= bscale;
  F.c /= cscale;
  for (auto& Ck : F.C) Ck /= cscale;

  // Trivial and linear-only branches.
  if (F.m == 0) {
    zero_blocks(sol);
    bool ok = true;
    for (size_t k = 0; k < nb; ++k) {
      if (F.bs[k] == 0) continue;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Cblk[k],
                                                        Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() <
          -opts.feas_tol * (1.0 + Cblk[k].norm()))
        ok = false;
    }
    sol.report.dinf = ok ? 0 : 1;
    sol.report.feasratio = ok ? 1.0 : -1.0;
    return finish(sol);
  }
  if (ncone == 0) {
    Eigen::MatrixXd Af = F.A.leftCols(nfu);
    Eigen::VectorXd xv = Af.colPivHouseholderQr().solve(F.b);
    Eigen::VectorXd yv =
        Af.transpose().colPivHouseholderQr().solve(F.c);
    double dres = (Af.transpose() * yv - F.c).norm();
    sol.x.assign(P.n_free + ncone, 0.0);
    for (size_t f = 0; f < P.n_free; ++f)
      if (freecol[f] >= 0) sol.x[f] = xv[freecol[f]] * bscale;
    for (size_t r = 0; r < F.m; ++r)
      sol.y[prep.kept[r]] = yv[r] * cscale / rowscale[r];
    if (dres > opts.feas_tol * (1.0 + F.c.norm())) {
      sol.report.dinf = 1;
      sol.report.feasratio = -1.0;
    } else {
      sol.report.feasratio = 1.0;
      sol.report.gap = std::abs(F.c.dot(xv) - F.b.dot(yv)) /
                       (1.0 + std::abs(F.c.dot(xv)) + std::abs(F.b.dot(yv)));
    }
    return finish(sol);
  }

  // Interior-point phase.
  Ipm ipm(F, opts);
  ipm.run();
  sol.report.iterations = ipm.iterations;
  sol.report.numerr = ipm.numerr;
  sol.report.pinf = ipm.pinf;
  sol.report.dinf = ipm.dinf;
  sol.report.gap = ipm.gap;
  if (ipm.solved)
    sol.report.feasratio = 1.0;
  else if (ipm.pinf || ipm.dinf)
    sol.report.feasratio = -1.0;
  else
    sol.report.feasratio = 0.0;
  if (ipm.reduced_accuracy)
    sol.report.warnings.push_back(
        "primal residual above target; solution accepted at reduced accuracy");

  sol.x.assign(P.n_free + ncone, 0.0);
  for (size_t f = 0; f < P.n_free; ++f)
    if (freecol[f] >= 0) sol.x[f] = ipm.xf[freecol[f]] * bscale;
  Eigen::VectorXd cone(ncone);
  for (size_t k = 0; k < nb; ++k) svec_into(F, k, ipm.X[k], cone);
  for (size_t i = 0; i < ncone; ++i) sol.x[P.n_free + i] = cone[i] * bscale;
  for (size_t r = 0; r < F.m; ++r)
    sol.y[prep.kept[r]] = ipm.y[r] * cscale / rowscale[r];
  sol.X = ipm.X;
  sol.S = ipm.S;
  for (size_t k = 0; k < nb; ++k) {
    sol.X[k] *= bscale;
    sol.S[k] *= cscale;
  }
  return finish(sol);
}

}  // namespace sumsq
