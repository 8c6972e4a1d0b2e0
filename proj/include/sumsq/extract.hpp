#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "sumsq/sdp.hpp"

namespace sumsq {

// Positive-semidefinite witness for one Gram block: the referenced
// polynomial equals Z' Q Z, or M = (I kron Z)' Q (I kron Z) when
// mrows > 1.
struct GramCertificate {
  Eigen::MatrixXd Q;          // mrows*|Z| square, symmetric
  std::vector<Exponents> Z;   // per-copy basis over `vars`
  VarTablePtr vars;
  size_t mrows = 1;

  // Scalar case: sum of factors[i]^2 reconstructs the polynomial;
  // one factor per numerically nonzero eigenvalue of Q.
  std::vector<Polynomial> factors;
  // Matrix case: M = H' H with H of shape rank(Q) x mrows.
  PolyMatrix H;

  // Exact twin, filled by the rational certification path.
  bool exact = false;
  std::vector<std::vector<Rational>> Q_exact;
};

// Rounds to `digits` significant decimal digits, ties to even, as an
// exact rational. digits must lie in [1, 17].
Rational round_significant(double v, int digits);

// Substitutes the solved decision-variable values into expr and
// presents each coefficient with `digits` significant decimal digits.
// An expression without decision variables is returned unchanged.
Polynomial sosgetsol(const SosProgram& prog, const SdpProblem& sdp,
                     const SdpSolution& sol, const Polynomial& expr,
                     int digits = 5);

// Gram certificate of an inequality constraint (by position among
// prog.constraints()) or of a declared SOS variable (by position among
// prog.program_vars()).
GramCertificate gram_of_constraint(const SosProgram& prog, const SdpProblem& sdp,
                                   const SdpSolution& sol, size_t index);
GramCertificate gram_of_variable(const SosProgram& prog, const SdpProblem& sdp,
                                 const SdpSolution& sol, size_t index);

// Builds factors (or H) for a symmetric Q over basis Z by symmetric
// eigendecomposition, keeping eigenvalues above 1e-8 * max eigenvalue.
GramCertificate make_certificate(const Eigen::MatrixXd& Q,
                                 std::vector<Exponents> Z, VarTablePtr vars,
                                 size_t mrows = 1);

// (||Ax - b||_2, per-constraint max coefficient mismatch between the
// substituted constraint polynomial and its Gram expansion).
std::pair<double, std::vector<double>> residuals(const SosProgram& prog,
                                                 const SdpProblem& sdp,
                                                 const SdpSolution& sol);

}  // namespace sumsq
