#pragma once

#include <gmpxx.h>

#include <string>

namespace sumsq {

// Exact arithmetic everywhere except the SDP solver boundary.
using Rational = mpq_class;
using Integer = mpz_class;

// Accepts "p", "p/q" and decimal literals like "3.25" or "-0.001",
// all converted exactly.
Rational rat_from_string(const std::string& text);

// Exact conversion of the binary floating point value.
Rational rat_from_double(double v);

double rat_to_double(const Rational& r);

// Canonical form "p" or "p/q" with q > 1.
std::string rat_to_string(const Rational& r);

// r^e for integer e >= 0.
Rational rat_pow(const Rational& r, int e);

}  // namespace sumsq
