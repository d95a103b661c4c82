#include "smmcts/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace smmcts {

namespace {

constexpr double kEps = 1e-12;

// max c.x  s.t.  A x <= b, x >= 0, with b >= 0 so the slack basis is feasible.
// Dense tableau with Bland's rule. Returns the primal solution and the dual
// prices (reduced costs of the slack columns at optimality).
struct StandardFormSolution {
  std::vector<double> x;
  std::vector<double> dual;
  double objective = 0.0;
};

StandardFormSolution simplex_standard(const std::vector<std::vector<double>>& a,
                                      const std::vector<double>& b,
                                      const std::vector<double>& c) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(c.size());
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(n + m + 1, 0.0));
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][n + m] = b[i];
    basis[i] = n + i;
  }
  for (int j = 0; j < n; ++j) t[m][j] = -c[j];

  for (;;) {
    int enter = -1;
    for (int j = 0; j < n + m; ++j) {
      if (t[m][j] < -kEps) {
        enter = j;
        break;  // Bland: smallest index
      }
    }
    if (enter < 0) break;  // optimal
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (t[i][enter] > kEps) {
        double ratio = t[i][n + m] / t[i][enter];
        if (ratio < best_ratio - kEps ||
            (ratio < best_ratio + kEps && (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = std::min(ratio, best_ratio);
          leave = i;
        }
      }
    }
    if (leave < 0) throw std::runtime_error("simplex: unbounded program");
    const double pivot = t[leave][enter];
    for (double& v : t[leave]) v /= pivot;
    for (int i = 0; i <= m; ++i) {
      if (i == leave || std::abs(t[i][enter]) <= kEps) continue;
      const double f = t[i][enter];
      for (int j = 0; j <= n + m; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  StandardFormSolution sol;
  sol.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) sol.x[basis[i]] = t[i][n + m];
  sol.dual.assign(m, 0.0);
  for (int i = 0; i < m; ++i) sol.dual[i] = std::max(t[m][n + i], 0.0);
  sol.objective = t[m][n + m];
  return sol;
}

}  // namespace

MaximinResult maximin_row(const MatrixGame& m) {
  if (m.rows < 1 || m.cols < 1) throw std::invalid_argument("empty matrix");
  // Shift entries to be >= 1 so the game value is strictly positive. The
  // column player's program  max 1.x  s.t.  M' x <= 1, x >= 0  attains
  // 1/value'; its dual prices u satisfy u >= 0, M'^T u >= 1, sum(u) =
  // 1/value', so u normalized is the row player's maximin strategy.
  double lo = m.payoff[0];
  for (double v : m.payoff) lo = std::min(lo, v);
  const double shift = 1.0 - lo;

  std::vector<std::vector<double>> a(m.rows, std::vector<double>(m.cols));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) a[i][j] = m.at(i, j) + shift;
  const std::vector<double> b(m.rows, 1.0);
  const std::vector<double> c(m.cols, 1.0);

  StandardFormSolution lp = simplex_standard(a, b, c);
  double dual_sum = 0.0;
  for (double u : lp.dual) dual_sum += u;
  if (lp.objective <= 0.0 || dual_sum <= 0.0)
    throw std::runtime_error("simplex: degenerate maximin solution");

  MaximinResult out;
  out.value = 1.0 / lp.objective - shift;
  out.strategy.resize(m.rows);
  for (int i = 0; i < m.rows; ++i) out.strategy[i] = lp.dual[i] / dual_sum;
  return out;
}

}  // namespace smmcts
