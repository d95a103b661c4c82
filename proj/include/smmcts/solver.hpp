#pragma once

#include <optional>
#include <span>
#include <vector>

#include "smmcts/game.hpp"
#include "smmcts/policy.hpp"

namespace smmcts {

// Certified Nash equilibrium of a matrix game. The constructor path verifies
// both best-response gaps directly, so any MatrixSolution in flight satisfies
// gap1, gap2 <= 1e-8 regardless of how the LP behaved.
struct MatrixSolution {
  double value = 0.0;
  MixedStrategy strategy_p1;
  MixedStrategy strategy_p2;
  double gap1 = 0.0;  // u1(br, sigma2) - value
  double gap2 = 0.0;  // value - u1(sigma1, br)
};

MatrixSolution solve_matrix(const MatrixGame& m);

// Subgame values v^h for every node (terminal nodes carry their utility).
struct ValueTree {
  std::vector<double> value;
};

ValueTree backward_induction(const GameSpec& game);

// Matrix of the children's values under node `h`.
MatrixGame child_value_matrix(const GameSpec& game, const ValueTree& values, int h);

// Per-node equilibrium strategies recovered from the value recursion.
BehavioralProfile equilibrium_profile(const GameSpec& game, const ValueTree& values);

// Every inner-node strategy of `player` mixed with uniform exploration:
// gamma/k + (1-gamma) * sigma.
BehavioralProfile mix_profile_with_uniform(const GameSpec& game, const BehavioralProfile& profile,
                                           double gamma, int player);

struct BestResponseResult {
  double value = 0.0;          // root expected utility (player 1's) at the response
  BehavioralProfile profile;   // pure responder strategy, ties to the lowest index
};

// Best response of the non-fixed player against `fixed`'s behavioral
// strategy. fixed_player 1 means player 2 responds (minimizing u1).
BestResponseResult best_response(const GameSpec& game, int fixed_player,
                                 const BehavioralProfile& fixed);

// v^{h0} - u1(sigma1, br); non-negative up to solver tolerance.
double exploitability(const GameSpec& game, const BehavioralProfile& profile_p1);
double exploitability(const GameSpec& game, const ValueTree& values,
                      const BehavioralProfile& profile_p1);

struct EpsNeReport {
  bool ok = false;
  double gap1 = 0.0;  // u1(br, sigma2) - u1(sigma)
  double gap2 = 0.0;  // u1(sigma) - u1(sigma1, br)
};

EpsNeReport check_eps_ne(const GameSpec& game, const BehavioralProfile& profile, double eps);

// Payoff-band audit: checks each visited inner node's running mean against
// the depth-indexed interval v^h +- ((1 + D - d) * eps + delta). Nodes with
// fewer than min_visits samples are reported as skipped rather than audited;
// a mean of a handful of draws says nothing about the band (the sample noise
// of a [0,1] mean falls under delta only once visits reach about 1/delta^2).
struct BandReport {
  struct Entry {
    int node = -1;
    int depth = 0;
    long visits = 0;
    double mean = 0.0;
    double center = 0.0;
    double half_width = 0.0;
    double excess = 0.0;  // |mean - center| - half_width; positive = violation
    bool ok = true;
  };
  struct DepthSummary {
    int depth = 0;
    int audited = 0;
    int in_band = 0;
    int skipped = 0;  // below the visit floor
  };

  std::vector<Entry> entries;
  std::vector<DepthSummary> by_depth;
  int violations = 0;
  int skipped = 0;
  std::optional<Entry> worst;  // largest excess among all audited nodes
};

BandReport audit_payoff_bands(const GameSpec& game, const ValueTree& values,
                              std::span<const double> node_mean, std::span<const long> node_visits,
                              double eps, double delta, long min_visits = 1);

}  // namespace smmcts
