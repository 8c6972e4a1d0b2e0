#pragma once

#include <map>
#include <optional>
#include <vector>

#include "sumsq/extract.hpp"

namespace sumsq {

enum class CertMode { floating, rational };

enum class CertStatus {
  found,            // certificate returned
  infeasible,       // the SDP has no solution, p is not SOS over this basis
  rounding_failed,  // feasible in floats, but no denominator gave an exact PSD matrix
};

// Exact witness: p = (1/D) * Z' Qnum Z with Qnum integer PSD.
struct RationalCertificate {
  std::vector<std::vector<Integer>> Qnum;
  Integer D = 1;
  std::vector<Exponents> Z;
  VarTablePtr vars;
  size_t mrows = 1;
};

struct SosCertificate {
  CertStatus status = CertStatus::infeasible;
  GramCertificate gram;                      // set when status == found
  std::optional<RationalCertificate> exact;  // set in rational mode when found
};

struct BoundResult {
  double bound = 0;  // -infinity when the relaxation is unbounded
  VarTablePtr vars;
  std::optional<std::vector<double>> minimizer;  // indexed like vars
};

// Decides whether p (or the symmetric polynomial matrix M) is a sum of
// squares, over a Newton polytope basis. Rational mode additionally
// rounds the floating solution to an exact certificate.
SosCertificate findsos(const Polynomial& p, CertMode mode = CertMode::floating,
                       const SolveOptions& opts = {});
SosCertificate findsos(const PolyMatrix& M, CertMode mode = CertMode::floating,
                       const SolveOptions& opts = {});

// Matrix decomposition M = H'H; same pipeline as the matrix findsos.
SosCertificate sos_matrix_decompose(const PolyMatrix& M,
                                    CertMode mode = CertMode::floating,
                                    const SolveOptions& opts = {});

// Searches for a Lyapunov function of the system x' = f(x) with
// monomials of even degree 2..degree: V - eps*sum(x_i^2) and
// -<grad V, f> both SOS. Returns nothing when the program is
// infeasible.
std::optional<Polynomial> findlyap(const std::vector<Polynomial>& f,
                                   VarTablePtr states, int degree,
                                   double eps = 1e-6,
                                   const SolveOptions& opts = {});

// Largest gamma with f - gamma SOS; minimizer recovered when the dual
// moment block has numerical rank one.
BoundResult findbound(const Polynomial& f, const SolveOptions& opts = {});

// Schmuedgen relaxation on {g_i >= 0, h_j = 0}: f - gamma equals
// sigma_0 + sum lambda_j h_j + sum sigma_T prod_{i in T} g_i over all
// nonempty subsets T with total g-degree <= degree.
BoundResult findbound_constrained(const Polynomial& f,
                                  const std::vector<Polynomial>& ineqs,
                                  const std::vector<Polynomial>& eqs, int degree,
                                  const SolveOptions& opts = {});

// Affine description of Z'QZ = p over the upper-triangle positions of
// Q: sum_p rows[j][p] * q_p = rhs[j], with disjoint row supports.
struct GramSystem {
  std::vector<std::map<size_t, Rational>> rows;
  std::vector<Rational> rhs;
};

// System for a scalar polynomial over basis Z (exponent rows as wide
// as p's table).
GramSystem gram_system(const Polynomial& p, const std::vector<Exponents>& Z);

// 2^k and L*2^k for k = 0..20, ascending, where L is the lcm of the
// coefficient denominators.
std::vector<Integer> denominator_schedule(const Polynomial& p);
std::vector<Integer> denominator_schedule(const PolyMatrix& M);

// Rounds D*Q to integers for each D in the schedule, restores the
// affine constraints by the exact minimum-Frobenius-change correction,
// and returns the first candidate that passes the exact PSD test.
std::optional<RationalCertificate> rational_round(
    const Eigen::MatrixXd& Q, std::vector<Exponents> Z, VarTablePtr vars,
    const GramSystem& system, const std::vector<Integer>& schedule,
    size_t mrows = 1);

// Exact LDL' positive-semidefiniteness test; zero pivots require a
// zero column below them.
bool rational_psd(std::vector<std::vector<Rational>> A);

}  // namespace sumsq
