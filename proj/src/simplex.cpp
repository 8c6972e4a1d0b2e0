#include "sumsq/simplex.hpp"

#include "sumsq/error.hpp"

namespace sumsq {

bool lp_feasible(const std::vector<std::vector<Rational>>& cols,
                 const std::vector<Rational>& b) {
  size_t m = b.size();
  size_t n = cols.size();
  for (const auto& c : cols)
    if (c.size() != m) fail(ErrorKind::invalid_argument, "column size mismatch");

  // Tableau [A | I | rhs] with rhs >= 0; artificials start basic and
  // phase one minimizes their sum.
  size_t width = n + m + 1;
  std::vector<std::vector<Rational>> T(m, std::vector<Rational>(width, Rational(0)));
  for (size_t i = 0; i < m; ++i) {
    bool flip = b[i] < 0;
    for (size_t j = 0; j < n; ++j) T[i][j] = flip ? Rational(-cols[j][i]) : cols[j][i];
    T[i][n + i] = 1;
    T[i][width - 1] = flip ? Rational(-b[i]) : b[i];
  }
  std::vector<size_t> basis(m);
  for (size_t i = 0; i < m; ++i) basis[i] = n + i;

  // Reduced-cost row for the artificial objective: sum of all rows.
  std::vector<Rational> z(width, Rational(0));
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < width; ++j) z[j] += T[i][j];
  for (size_t i = 0; i < m; ++i) z[n + i] = 0;

  while (true) {
    // Bland: smallest improving column.
    size_t enter = width;
    for (size_t j = 0; j + 1 < width; ++j) {
      if (j >= n && j < n + m) continue;  // never re-enter artificials
      if (z[j] > 0) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;
    size_t leave = m;
    for (size_t i = 0; i < m; ++i) {
      if (T[i][enter] <= 0) continue;
      if (leave == m) {
        leave = i;
        continue;
      }
      Rational lhs = T[i][width - 1] * T[leave][enter];
      Rational rhs = T[leave][width - 1] * T[i][enter];
      if (lhs < rhs || (lhs == rhs && basis[i] < basis[leave])) leave = i;
    }
    if (leave == m) break;  // phase-one objective is bounded; defensive
    Rational piv = T[leave][enter];
    for (size_t j = 0; j < width; ++j) T[leave][j] /= piv;
    for (size_t i = 0; i < m; ++i) {
      if (i == leave || T[i][enter] == 0) continue;
      Rational f = T[i][enter];
      for (size_t j = 0; j < width; ++j) T[i][j] -= f * T[leave][j];
    }
    Rational fz = z[enter];
    if (fz != 0)
      for (size_t j = 0; j < width; ++j) z[j] -= fz * T[leave][j];
    basis[leave] = enter;
  }

  Rational infeas(0);
  for (size_t i = 0; i < m; ++i)
    if (basis[i] >= n) infeas += T[i][width - 1];
  return infeas == 0;
}

}  // namespace sumsq
