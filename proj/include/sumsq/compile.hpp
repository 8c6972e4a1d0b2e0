#pragma once

#include <map>
#include <string>
#include <vector>

#include "sumsq/program.hpp"

namespace sumsq {

enum class ReductionMethod { full, newton, multipartite, heuristic };

// Monomial basis for one Gram block.
struct GramBasis {
  std::vector<Exponents> Z;
  ReductionMethod method = ReductionMethod::full;
};

// Pairwise products of a basis: ZZ holds the distinct sums sorted in
// term order; pair p (row-major upper triangle) lands on ZZ row
// row_of_pair[p] with integer weight 1 (diagonal) or 2 (off-diagonal).
struct ZZInfo {
  std::vector<Exponents> ZZ;
  std::vector<size_t> row_of_pair;
  std::vector<int> weight_of_pair;
};

ZZInfo build_zz(const std::vector<Exponents>& Z);

// All monomials of degree <= floor(maxdeg/2) of the support.
std::vector<Exponents> full_basis(const std::vector<Exponents>& support);

// Degree window [ceil(mindeg/2), floor(maxdeg/2)] clipped per variable
// to ceil(maxvar/2).
std::vector<Exponents> heuristic_reduce(const std::vector<Exponents>& support);

// Newton polytope basis: { beta : 2*beta in conv(support) }, membership
// decided by exact LP feasibility; candidates come from the heuristic
// box (capped at 200000) prefiltered by an affine-hull test.
std::vector<Exponents> newton_reduce(const std::vector<Exponents>& support);

// Per-block Newton reduction with a Cartesian product basis. Blocks
// after the first must be homogeneous. Product order follows
// mpmonomials: the first partition varies fastest.
std::vector<Exponents> multipartite_reduce(
    const std::vector<Exponents>& support,
    const std::vector<std::vector<size_t>>& partitions);

// One solver cone block and where its entries live in declaration
// coordinates (row-major upper triangle starting at decl_lo).
struct BlockInfo {
  bool from_constraint = false;  // extra Gram slack vs declared variable
  size_t index = 0;              // constraint or program-var index
  size_t size = 0;               // matrix dimension
  size_t decl_lo = 0;
  std::vector<Exponents> Z;  // per-copy basis rows (m rows)
  size_t mrows = 1;          // matrix grouping: size == mrows * Z.size()
  ReductionMethod method = ReductionMethod::full;
};

// SDP in equality form  min c'x  s.t.  Ax = b,  x in (free cone) x
// (PSD blocks). Data is exact: columns are declaration-ordered scalar
// variables (program decision variables, then Gram slack entries), and
// Gram entry columns carry the integer weight (2 off-diagonal) rather
// than the float svec scaling. rr maps declaration positions to the
// solver layout [all free vars, then contiguous PSD blocks].
struct SdpProblem {
  size_t n_decl = 0;
  size_t n_user_dec = 0;
  size_t n_free = 0;
  std::vector<size_t> psd_sizes;
  std::vector<std::map<size_t, Rational>> rows;
  std::vector<Rational> b;
  std::vector<Rational> c;
  bool has_objective = false;
  Rational obj_offset = 0;
  std::vector<size_t> rr;
  std::vector<BlockInfo> blocks;
  std::vector<std::string> notes;

  size_t n_rows() const { return rows.size(); }
};

// Compiles the program into the SDP above. Errors on a program with
// no constraints.
SdpProblem assemble(const SosProgram& prog);

}  // namespace sumsq
