#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sumsq/compile.hpp"

namespace sumsq {

// Raw content of an SDPA sparse file (.dat-s). Block sizes follow the
// format's sign convention: a negative size marks a diagonal block,
// which this toolkit uses to carry the free variables.
struct SdpaEntry {
  size_t matno = 0;  // 0 is the cost matrix, 1..m the constraints
  size_t blkno = 0;  // 1-based block number
  size_t i = 0, j = 0;  // 1-based, i <= j
  double value = 0.0;
};

struct SdpaData {
  size_t m = 0;
  std::vector<long> block_sizes;
  std::vector<double> b;
  std::vector<SdpaEntry> entries;
};

// Serializes the SDP in SDPA sparse format. Constraint matrices hold
// the natural symmetric-matrix coefficients, so an off-diagonal row
// weight w appears as w/2 at one (i, j) position with i < j.
std::string sdpa_export(const SdpProblem& p);

// Parses a .dat-s file; reports malformed input with line numbers.
SdpaData sdpa_parse(const std::string& text);

// Rebuilds a solvable problem: diagonal blocks become free columns,
// PSD blocks become Gram blocks without monomial annotations.
SdpProblem sdpa_to_problem(const SdpaData& d);

// Solution text with one braced vector per line, "xVec = {...}" and
// "yVec = {...}"; the reader also accepts plain "x"/"y" labels.
std::string sdpa_format_solution(const std::vector<double>& x,
                                 const std::vector<double>& y);
std::pair<std::vector<double>, std::vector<double>> sdpa_import_solution(
    const std::string& text);

}  // namespace sumsq
