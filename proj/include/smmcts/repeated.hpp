#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "smmcts/game.hpp"
#include "smmcts/policy.hpp"

namespace smmcts {

// Snapshot of the trace accumulators at one checkpoint. Observed quantities
// use the payoffs as seen by the players; "clean" quantities use the
// error-free base matrix (identical when no error model is attached).
struct TraceCheckpoint {
  long t = 0;
  double g = 0.0;            // average observed payoff to player 1
  double r1 = 0.0;           // average regret, player 1 (observed payoffs)
  double r2 = 0.0;           // average regret, player 2 (observed payoffs)
  double g_clean = 0.0;
  double clean_gmax_row = 0.0;  // max_i (1/t) sum_s a(i, j_s), base matrix
  double clean_gmin_col = 0.0;  // min_j (1/t) sum_s a(i_s, j), base matrix
  std::vector<double> sigma_hat_1, sigma_hat_2;  // empirical frequencies t_i / t
  std::vector<double> sigma_bar_1, sigma_bar_2;  // average strategies
  int last_i = 0, last_j = 0;
  double last_payoff = 0.0;
};

struct StepRecord {
  std::uint8_t i = 0, j = 0;
  double payoff = 0.0;        // observed
  double clean_payoff = 0.0;  // base matrix entry
};

// Bookkeeping of one repeated matrix game. Accumulators are always
// maintained; per-step records only when record_steps is set (they exist for
// replay-style verification, not for the long batteries).
struct RepeatedGameTrace {
  int m = 0, n = 0;
  long t = 0;
  double eta = 0.0;  // error bound of the generating model, 0 for exact play

  double payoff_sum = 0.0;
  double clean_payoff_sum = 0.0;
  std::vector<double> row_sums;        // sum_s obs(i, j_s) per row i
  std::vector<double> col_sums;        // sum_s obs(i_s, j) per column j
  std::vector<double> clean_row_sums;
  std::vector<double> clean_col_sums;
  std::vector<long> count_p1, count_p2;  // t_i, t_j
  std::vector<long> joint_counts;        // t_ij, row-major
  std::vector<double> sigma_sum_1, sigma_sum_2;
  int last_i = 0, last_j = 0;
  double last_payoff = 0.0;

  bool record_steps = true;
  std::vector<StepRecord> steps;
  std::vector<TraceCheckpoint> checkpoints;

  double cumulative_payoff() const { return payoff_sum; }             // G(t)
  double average_payoff() const { return payoff_sum / t; }            // g(t)
  double max_cumulative_payoff(int player) const;                     // G_max(t)
  double average_regret(int player) const;                            // r(t)
  MixedStrategy empirical_frequencies(int player) const;              // sigma_hat
  MixedStrategy average_strategy(int player) const;                   // sigma_bar
  TraceCheckpoint make_checkpoint() const;
};

// Repeated game whose payoffs may deviate from the base matrix, staying
// within eta of it from step `onset` on. Two built-in perturbation families:
// seeded uniform noise (amplitude min(3*eta, 0.3) before onset, 0.9*eta
// after), and a deterministic checkerboard square wave of amplitude 0.9*eta.
struct ErrorModel {
  enum class Family { DecayingUniform, SquareWave };

  MatrixGame base;
  double eta = 0.0;
  long onset = 1;
  Family family = Family::DecayingUniform;
  std::uint64_t seed = 0;
  long wave_period = 1000;

  void fill_observed(long step, Rng& model_rng, MatrixGame& out) const;
};

struct RepeatedConfig {
  long horizon = 0;
  std::vector<long> checkpoints;  // ascending; the horizon is always snapshotted
  bool record_steps = false;
  std::uint64_t seed = 0;
};

// T steps of simultaneous play. Player 2 receives payoff 1 - a_ij. Full
// payoff vectors (the observed column/row) are offered to both policies;
// regret matching consumes them, Exp3 uses only the realized entry.
RepeatedGameTrace play_repeated(const MatrixGame& m, BanditPolicy& p1, BanditPolicy& p2,
                                const RepeatedConfig& cfg);

// Same loop with payoffs drawn from the error model. Throws if the model
// violates its own eta bound at or after onset.
RepeatedGameTrace play_with_error(const ErrorModel& model, BanditPolicy& p1, BanditPolicy& p2,
                                  const RepeatedConfig& cfg);

struct GapPair {
  double gap1 = 0.0;  // u(br, sigma_hat_2) - v
  double gap2 = 0.0;  // v - u(sigma_hat_1, br)
};

// Equilibrium gaps of the empirical frequencies against exact best
// responses. Internally asserts the identity u(br, sigma_hat_2) = g_max(t)
// computed from the clean accumulators.
GapPair equilibrium_gap(const RepeatedGameTrace& trace, const MatrixGame& m);
GapPair equilibrium_gap(const TraceCheckpoint& cp, const MatrixGame& m, double value);

// max over players and actions of |sigma_hat - sigma_bar|.
double strategy_distance(const RepeatedGameTrace& trace);
double strategy_distance(const TraceCheckpoint& cp);

// Earliest checkpoint from which both gaps stay within 4(c+1)*eps + delta
// through the end of the trace, where c = trace.eta / eps.
std::optional<long> check_eps_equilibrium_onset(const RepeatedGameTrace& trace,
                                                const MatrixGame& m, double eps, double delta);

}  // namespace smmcts
