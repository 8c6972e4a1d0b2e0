#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sumsq/compile.hpp"

namespace sumsq {

struct SolveOptions {
  double tol = 1e-8;       // relative duality-gap tolerance
  double feas_tol = 1e-8;  // primal/dual residual tolerance
  int max_iter = 100;
  double step_frac = 0.98;  // fraction of the maximal cone step
  bool verbose = false;
};

struct SolveReport {
  int iterations = 0;
  double residual_norm = 0.0;  // ||Ax - b|| at the returned iterate
  double gap = 0.0;            // |c'x - b'y| / (1 + |c'x| + |b'y|)
  double feasratio = 0.0;      // +1 solved, -1 infeasibility certificate
  int pinf = 0;
  int dinf = 0;
  int numerr = 0;  // 0 clean, 1 limit reached, 2 numerical failure
  double cpusec = 0.0;
  std::vector<std::string> warnings;
};

struct SdpSolution {
  // Primal vector in solver layout: free coordinates first, then the
  // PSD blocks in svec form (off-diagonal entries carry sqrt(2)).
  std::vector<double> x;
  // One multiplier per input equality row; rows dropped by the
  // rank-revealing preprocessing keep a zero multiplier.
  std::vector<double> y;
  std::vector<Eigen::MatrixXd> X;  // primal PSD blocks
  std::vector<Eigen::MatrixXd> S;  // dual slack blocks
  SolveReport report;
};

// Infeasible-start primal-dual interior-point solve of
//   minimize c'x  subject to  Ax = b,  x in (free) x (PSD blocks).
SdpSolution sdp_solve(const SdpProblem& p, const SolveOptions& opts = {});

// Maps a solver-layout primal vector back onto declaration
// coordinates: plain Gram matrix entries, svec scaling removed.
std::vector<double> decl_values(const SdpProblem& p, const std::vector<double>& x);

}  // namespace sumsq
