#include "smmcts/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "smmcts/lp.hpp"

namespace smmcts {

namespace {

constexpr double kCertTol = 1e-8;

double row_payoff(const MatrixGame& m, int i, std::span<const double> sigma2) {
  double v = 0.0;
  for (int j = 0; j < m.cols; ++j) v += m.at(i, j) * sigma2[j];
  return v;
}

double col_payoff(const MatrixGame& m, std::span<const double> sigma1, int j) {
  double v = 0.0;
  for (int i = 0; i < m.rows; ++i) v += m.at(i, j) * sigma1[i];
  return v;
}

}  // namespace

MatrixSolution solve_matrix(const MatrixGame& m) {
  MaximinResult row = maximin_row(m);

  // The column player's optimum is the row-player maximin of the negated
  // transpose.
  MatrixGame neg(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) neg.at(j, i) = -m.at(i, j);
  MaximinResult col = maximin_row(neg);

  MatrixSolution sol;
  sol.strategy_p1 = MixedStrategy(std::move(row.strategy));
  sol.strategy_p2 = MixedStrategy(std::move(col.strategy));
  sol.value = 0.5 * (row.value - col.value);

  double br1 = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m.rows; ++i) br1 = std::max(br1, row_payoff(m, i, sol.strategy_p2.p));
  double br2 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m.cols; ++j) br2 = std::min(br2, col_payoff(m, sol.strategy_p1.p, j));
  sol.gap1 = br1 - sol.value;
  sol.gap2 = sol.value - br2;
  if (sol.gap1 > kCertTol || sol.gap2 > kCertTol)
    throw std::runtime_error("matrix solution failed equilibrium certification");
  return sol;
}

ValueTree backward_induction(const GameSpec& game) {
  ValueTree vt;
  vt.value.resize(game.nodes.size(), 0.0);
  // BFS order puts children after parents, so a reverse sweep is bottom-up.
  for (int h = game.size() - 1; h >= 0; --h) {
    const auto& nd = game.nodes[h];
    if (nd.terminal()) {
      vt.value[h] = nd.utility;
    } else {
      vt.value[h] = solve_matrix(child_value_matrix(game, vt, h)).value;
    }
  }
  return vt;
}

MatrixGame child_value_matrix(const GameSpec& game, const ValueTree& values, int h) {
  const auto& nd = game.nodes[h];
  MatrixGame m(nd.rows, nd.cols);
  for (int i = 0; i < nd.rows; ++i)
    for (int j = 0; j < nd.cols; ++j) m.at(i, j) = values.value[game.child(h, i, j)];
  return m;
}

BehavioralProfile equilibrium_profile(const GameSpec& game, const ValueTree& values) {
  BehavioralProfile prof;
  prof.p1.resize(game.nodes.size());
  prof.p2.resize(game.nodes.size());
  for (int h = 0; h < game.size(); ++h) {
    if (game.nodes[h].terminal()) continue;
    MatrixSolution sol = solve_matrix(child_value_matrix(game, values, h));
    prof.p1[h] = std::move(sol.strategy_p1.p);
    prof.p2[h] = std::move(sol.strategy_p2.p);
  }
  return prof;
}

BehavioralProfile mix_profile_with_uniform(const GameSpec& game, const BehavioralProfile& profile,
                                           double gamma, int player) {
  BehavioralProfile out = profile;
  auto& side = player == 1 ? out.p1 : out.p2;
  for (int h = 0; h < game.size(); ++h) {
    if (game.nodes[h].terminal() || side[h].empty()) continue;
    const int k = static_cast<int>(side[h].size());
    for (double& x : side[h]) x = gamma / k + (1.0 - gamma) * x;
  }
  return out;
}

BestResponseResult best_response(const GameSpec& game, int fixed_player,
                                 const BehavioralProfile& fixed) {
  if (fixed_player != 1 && fixed_player != 2)
    throw std::invalid_argument("fixed_player must be 1 or 2");
  BestResponseResult out;
  out.profile.p1.resize(game.nodes.size());
  out.profile.p2.resize(game.nodes.size());
  std::vector<double> value(game.nodes.size(), 0.0);
  for (int h = game.size() - 1; h >= 0; --h) {
    const auto& nd = game.nodes[h];
    if (nd.terminal()) {
      value[h] = nd.utility;
      continue;
    }
    const auto& fixed_side = fixed_player == 1 ? fixed.p1 : fixed.p2;
    if (h >= static_cast<int>(fixed_side.size()) ||
        static_cast<int>(fixed_side[h].size()) != (fixed_player == 1 ? nd.rows : nd.cols))
      throw std::runtime_error("fixed strategy missing at an inner node");
    const auto& mix = fixed_side[h];
    if (fixed_player == 1) {
      // player 2 responds, minimizing u1; ties to the lowest action index
      int best_j = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < nd.cols; ++j) {
        double v = 0.0;
        for (int i = 0; i < nd.rows; ++i) v += mix[i] * value[game.child(h, i, j)];
        if (v < best) {
          best = v;
          best_j = j;
        }
      }
      value[h] = best;
      out.profile.p2[h].assign(nd.cols, 0.0);
      out.profile.p2[h][best_j] = 1.0;
    } else {
      int best_i = 0;
      double best = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < nd.rows; ++i) {
        double v = 0.0;
        for (int j = 0; j < nd.cols; ++j) v += mix[j] * value[game.child(h, i, j)];
        if (v > best) {
          best = v;
          best_i = i;
        }
      }
      value[h] = best;
      out.profile.p1[h].assign(nd.rows, 0.0);
      out.profile.p1[h][best_i] = 1.0;
    }
  }
  out.value = value[0];
  return out;
}

double exploitability(const GameSpec& game, const BehavioralProfile& profile_p1) {
  return exploitability(game, backward_induction(game), profile_p1);
}

double exploitability(const GameSpec& game, const ValueTree& values,
                      const BehavioralProfile& profile_p1) {
  return values.value[0] - best_response(game, 1, profile_p1).value;
}

EpsNeReport check_eps_ne(const GameSpec& game, const BehavioralProfile& profile, double eps) {
  EpsNeReport rep;
  const double u = expected_utility(game, profile);
  rep.gap1 = best_response(game, 2, profile).value - u;
  rep.gap2 = u - best_response(game, 1, profile).value;
  rep.ok = rep.gap1 <= eps && rep.gap2 <= eps;
  return rep;
}

BandReport audit_payoff_bands(const GameSpec& game, const ValueTree& values,
                              std::span<const double> node_mean, std::span<const long> node_visits,
                              double eps, double delta, long min_visits) {
  BandReport rep;
  std::vector<BandReport::DepthSummary> depth_acc(game.depth + 1);
  for (int d = 1; d <= game.depth; ++d) depth_acc[d].depth = d;
  for (int h = 0; h < game.size(); ++h) {
    const auto& nd = game.nodes[h];
    if (nd.terminal() || node_visits[h] == 0) continue;
    if (node_visits[h] < min_visits) {
      ++depth_acc[nd.depth].skipped;
      ++rep.skipped;
      continue;
    }
    BandReport::Entry e;
    e.node = h;
    e.depth = nd.depth;
    e.visits = node_visits[h];
    e.mean = node_mean[h];
    e.center = values.value[h];
    e.half_width = (1.0 + game.depth - nd.depth) * eps + delta;
    e.excess = std::abs(e.mean - e.center) - e.half_width;
    e.ok = e.excess <= 0.0;
    if (!e.ok) ++rep.violations;
    ++depth_acc[nd.depth].audited;
    depth_acc[nd.depth].in_band += e.ok;
    if (!rep.worst || e.excess > rep.worst->excess) rep.worst = e;
    rep.entries.push_back(std::move(e));
  }
  for (int d = 1; d <= game.depth; ++d)
    if (depth_acc[d].audited > 0) rep.by_depth.push_back(depth_acc[d]);
  return rep;
}

}  // namespace smmcts
