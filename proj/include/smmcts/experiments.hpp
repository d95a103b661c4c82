#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smmcts/game.hpp"
#include "smmcts/mcts.hpp"
#include "smmcts/repeated.hpp"
#include "smmcts/solver.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace smmcts {

// Runs fn(0..n-1), each cell writing only to its own output slot. threads <= 1
// is the serial reference path; the OpenMP path must produce byte-identical
// results because cells derive their own seeds and never share state.
template <typename F>
void parallel_cells(long n, int threads, F&& fn) {
  if (threads <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < n; ++i) fn(i);
#else
  for (long i = 0; i < n; ++i) fn(i);
#endif
}

enum class PolicyVariant { RM, RMM, Exp3, Exp3M };

const char* to_string(PolicyVariant v);
std::optional<PolicyVariant> parse_policy_variant(const std::string& name);
EngineConfig engine_config(PolicyVariant v, double gamma, std::uint64_t seed);

// Log-spaced checkpoint helpers: powers of ten up to `iters` (plus `iters`
// itself), and log-spaced points inside the final decade [iters/10, iters].
std::vector<long> log_checkpoints(long iters);
std::vector<long> final_decade_checkpoints(long iters, int count);

struct SweepConfig {
  int depth = 2;
  int bf = 2;
  std::vector<PolicyVariant> policies{PolicyVariant::RM, PolicyVariant::RMM};
  std::vector<double> gammas{0.05};
  int games = 10;
  int runs = 10;
  long iters = 100000;
  std::vector<long> checkpoints;  // empty: log_checkpoints(iters)
  std::uint64_t seed = 1;
  int threads = 1;
};

struct SweepRow {
  PolicyVariant policy;
  double gamma;
  int depth, bf, game_id, run_id;
  long iteration;
  double exploitability;
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;  // canonical order: policy, gamma, game, run, iteration
};

SweepResult run_sweep(const SweepConfig& cfg);
std::string sweep_csv(const SweepResult& result);

struct SweepSummaryRow {
  PolicyVariant policy;
  double gamma;
  long iteration;
  double mean_exploitability;
};

std::vector<SweepSummaryRow> sweep_summary(const SweepResult& result);

struct WorstCaseConfig {
  int depth = 2;
  int bf = 2;
  std::vector<double> utilities{0.0, 0.5, 1.0};
  std::uint64_t budget = 10000;  // sampled candidates when full == false
  bool full = false;             // enumerate the whole assignment space
  long eval_iters = 1000;
  int eval_runs = 100;
  double gamma = 0.05;
  std::vector<PolicyVariant> policies{PolicyVariant::RM, PolicyVariant::RMM};
  std::uint64_t seed = 1;
  int threads = 1;
};

struct WorstCaseEntry {
  PolicyVariant policy;
  std::uint64_t candidate = 0;  // sample index or assignment index
  GameSpec game;
  double mean_exploitability = 0.0;  // at eval_iters, averaged over eval_runs
  double exact_value = 0.0;
  double mixed_ne_floor = 0.0;  // exploitability of the gamma-mixed equilibrium
};

struct WorstCaseResult {
  WorstCaseConfig config;
  std::uint64_t candidates_evaluated = 0;
  std::vector<WorstCaseEntry> per_policy;
};

WorstCaseResult run_worstcase(const WorstCaseConfig& cfg);

// Mean exploitability of empirical-frequency profiles over `runs` engine runs
// at the final iteration only.
double mean_final_exploitability(const GameSpec& game, const ValueTree& values, PolicyVariant v,
                                 double gamma, long iters, int runs, std::uint64_t seed);

struct BatteryConfig {
  int seeds = 20;
  long horizon = 100000;
  double gamma = 0.05;
  SelectionKind kind = SelectionKind::RegretMatching;
  int min_size = 2;
  int max_size = 5;
  double eta = 0.0;  // > 0 attaches an error model
  std::optional<ErrorModel::Family> family;
  bool matching_pennies_first = false;
  std::vector<long> checkpoints;  // empty: log_checkpoints(horizon)
  std::uint64_t seed = 1;
  int threads = 1;
};

struct BatteryCheckpointMetrics {
  long t = 0;
  double r1 = 0.0, r2 = 0.0;
  double gap1 = 0.0, gap2 = 0.0;
  double g = 0.0;
  double strategy_distance = 0.0;
  int last_i = 0, last_j = 0;
  double last_payoff = 0.0;
  double gmax = 0.0;  // observed g_max (player 1)
};

struct BatterySeedResult {
  int index = 0;
  int m = 0, n = 0;
  double value = 0.0;
  std::vector<BatteryCheckpointMetrics> checkpoints;
};

struct BatteryResult {
  BatteryConfig config;
  std::vector<BatterySeedResult> seeds;

  // max over seeds and players of r(t) at the checkpoint with time `at`.
  double eps_hat_at(long at) const;
};

BatteryResult run_battery(const BatteryConfig& cfg);

// Trace-export CSV (one trace): step,i,j,payoff,g,gmax,r,gap1,gap2.
std::string battery_seed_csv(const BatterySeedResult& seed);

// Earliest checkpoint from which max(gap1, gap2) stays within `bound`.
std::optional<long> onset_from_checkpoints(const std::vector<BatteryCheckpointMetrics>& cps,
                                           double bound);

struct AuditConfig {
  PolicyVariant policy = PolicyVariant::RM;
  double gamma = 0.05;
  long iterations = 1000000;
  int final_decade_points = 8;
  double eps = 0.1;
  double delta = 0.05;
  std::uint64_t seed = 1;
};

struct AuditResult {
  std::vector<std::pair<long, BandReport>> reports;  // final-decade checkpoints
  double exploitability_final = 0.0;
  double bound = 0.0;  // 2 * D^2 * eps + delta
  bool bands_clear = false;
  bool exploitability_ok = false;
  double game_value = 0.0;
};

AuditResult run_audit(const GameSpec& game, const AuditConfig& cfg);

std::string format_double(double x);

}  // namespace smmcts
