#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sumsq/certify.hpp"

namespace sumsq {

struct DemoOptions {
  SolveOptions solve;
  int digits = 5;           // significant digits in printed values
  int demo4_m = 1;          // exponent of the (sum of squares) multiplier
  double demo5_gamma = 0.8724;
  bool demo5_bisect = false;  // bisection on [0.8, 1.0] to 1e-4
  double demo6_gamma = 4.0;
  int demo7_n = 3;
  bool demo7_allow_large = false;  // lifts the n <= 13 guard
};

struct DemoResult {
  int id = 0;
  bool feasible = false;  // solver verdict on the demo's main question
  bool verified = false;  // verdict matches the demo's known ground truth
  std::vector<std::string> lines;  // printable report
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::pair<std::string, std::string>> polys;
};

// Demo program as declared in its source write-up; every demo is one
// SosProgram. Options select demo 4's m, demo 5/6's gamma and demo
// 7's n.
SosProgram build_demo_program(int id, const DemoOptions& opts = {});

// Builds, solves, extracts and verifies one demo.
DemoResult run_demo(int id, const DemoOptions& opts = {});

// Decimal rendering of a polynomial with %.*g coefficients, for
// reports; exact printing stays in Polynomial::str.
std::string pretty(const Polynomial& p, int digits = 6);

}  // namespace sumsq
