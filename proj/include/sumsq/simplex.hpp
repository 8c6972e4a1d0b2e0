#pragma once

#include <vector>

#include "sumsq/rational.hpp"

namespace sumsq {

// Exact feasibility of { lambda >= 0 : A lambda = b } via phase-one
// simplex with Bland's rule. `cols` holds the columns of A.
bool lp_feasible(const std::vector<std::vector<Rational>>& cols,
                 const std::vector<Rational>& b);

}  // namespace sumsq
