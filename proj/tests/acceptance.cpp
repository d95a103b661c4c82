// Acceptance suite: one check per numbered criterion, each printed as a
// single PASS/FAIL line. Exits non-zero if any criterion fails. Expect a few
// minutes of wall time; the heavy batteries parallelize over seeds/games.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "smmcts/experiments.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

using namespace smmcts;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

int worker_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::string fmt(double x) { return format_double(x); }

// ---------------------------------------------------------------- criterion 1
void criterion_appendix_fixture() {
  const MatrixGame m = MatrixGame::from_rows({{0.4, 0.5}, {0.6, 0.5}});
  const MatrixSolution sol = solve_matrix(m);
  const GameSpec g = single_stage_game(m);
  BehavioralProfile prof;
  prof.p1.assign(g.nodes.size(), {});
  prof.p2.assign(g.nodes.size(), {});
  prof.p1[0] = {1.0, 0.0};
  prof.p2[0] = {1.0, 0.0};
  const double br_vs_col = best_response(g, 2, prof).value;  // u1(br, (1,0))
  const double br_vs_row = best_response(g, 1, prof).value;  // u1((1,0), br)
  const bool pass = std::abs(sol.value - 0.5) <= 1e-9 && std::abs(br_vs_col - 0.6) <= 1e-9 &&
                    std::abs(br_vs_row - 0.4) <= 1e-9 && check_eps_ne(g, prof, 0.2).ok &&
                    !check_eps_ne(g, prof, 0.19).ok;
  report(1, "appendix fixture",
         pass,
         "v=" + fmt(sol.value) + " u1(br,(1,0))=" + fmt(br_vs_col) + " u1((1,0),br)=" +
             fmt(br_vs_row) + " 0.2-NE yes, 0.19-NE no");
}

// ---------------------------------------------------------------- criterion 2
void criterion_lp_oracle() {
  Rng rng(20240601);
  double worst_value_err = 0.0, worst_gap = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const MatrixGame m =
        oracles::random_matrix(1 + rng.next_below(4), 1 + rng.next_below(4), rng);
    const double expected = oracles::support_enumeration_value(m);
    const MatrixSolution sol = solve_matrix(m);
    worst_value_err = std::max(worst_value_err, std::abs(sol.value - expected));
    worst_gap = std::max({worst_gap, sol.gap1, sol.gap2});
  }
  report(2, "LP oracle equivalence on 1000 matrices", worst_value_err <= 1e-8 && worst_gap <= 1e-8,
         "max |value error|=" + fmt(worst_value_err) + ", max certification gap=" +
             fmt(worst_gap));
}

// --------------------------------------------------------- criteria 3, 4, 5
struct HannanBatteryOutcome {
  BatteryResult rm;
  BatteryResult exp3;
  // measured bound: max regret over the battery plus the stated 0.05 slack
  double eps_hat_rm = 0.0;
  double eps_hat_exp3 = 0.0;
};

HannanBatteryOutcome run_hannan_batteries() {
  BatteryConfig cfg;
  cfg.seeds = 20;
  cfg.horizon = 1000000;
  cfg.gamma = 0.05;
  cfg.seed = 424242;
  cfg.threads = worker_threads();
  cfg.checkpoints = final_decade_checkpoints(cfg.horizon, 8);
  cfg.checkpoints.push_back(100000);

  HannanBatteryOutcome out;
  cfg.kind = SelectionKind::RegretMatching;
  out.rm = run_battery(cfg);
  cfg.kind = SelectionKind::Exp3;
  out.exp3 = run_battery(cfg);
  out.eps_hat_rm = out.rm.eps_hat_at(100000) + 0.05;
  out.eps_hat_exp3 = out.exp3.eps_hat_at(100000) + 0.05;
  return out;
}

void criterion_hannan_regret(const HannanBatteryOutcome& out) {
  auto count_ok = [](const BatteryResult& battery) {
    int ok = 0;
    for (const auto& seed : battery.seeds)
      for (const auto& cp : seed.checkpoints)
        if (cp.t == 100000) ok += cp.r1 <= 0.1 && cp.r2 <= 0.1;
    return ok;
  };
  const int rm_ok = count_ok(out.rm);
  const int exp3_ok = count_ok(out.exp3);
  report(3, "Hannan-consistency battery at T=1e5", rm_ok >= 19 && exp3_ok >= 19,
         "r(T)<=0.1 for rm " + std::to_string(rm_ok) + "/20, exp3 " + std::to_string(exp3_ok) +
             "/20; max r + 0.05 slack: eps_hat rm=" + fmt(out.eps_hat_rm) + " exp3=" +
             fmt(out.eps_hat_exp3));
}

void criterion_strategy_agreement(const HannanBatteryOutcome& out) {
  auto count_ok = [](const BatteryResult& battery) {
    int ok = 0;
    for (const auto& seed : battery.seeds)
      for (const auto& cp : seed.checkpoints)
        if (cp.t == 100000) ok += cp.strategy_distance <= 0.01;
    return ok;
  };
  const int rm_ok = count_ok(out.rm);
  const int exp3_ok = count_ok(out.exp3);
  report(4, "empirical vs average strategies at T=1e5", rm_ok >= 19 && exp3_ok >= 19,
         "max|emp-avg|<=0.01 for rm " + std::to_string(rm_ok) + "/20, exp3 " +
             std::to_string(exp3_ok) + "/20");
}

void criterion_equilibrium_gaps(const HannanBatteryOutcome& out) {
  const double bound = 4.0 * (0.05 + 0.05) + 0.05;
  auto count_ok = [&](const BatteryResult& battery) {
    int ok = 0;
    for (const auto& seed : battery.seeds) {
      bool all = true;
      for (const auto& cp : seed.checkpoints)
        if (cp.t >= 100000) all = all && std::max(cp.gap1, cp.gap2) <= bound;
      ok += all;
    }
    return ok;
  };
  const int rm_ok = count_ok(out.rm);
  const int exp3_ok = count_ok(out.exp3);
  report(5, "equilibrium gaps over the final decade of T=1e6", rm_ok >= 19 && exp3_ok >= 19,
         "gaps<=" + fmt(bound) + " for rm " + std::to_string(rm_ok) + "/20, exp3 " +
             std::to_string(exp3_ok) + "/20");
}

// ---------------------------------------------------------------- criterion 6
void criterion_error_games(double eps_hat) {
  const double eta = 0.05, gamma = 0.05;
  const double band = eta + gamma + 0.05;
  const double onset_bound = 4.0 * (eta / eps_hat + 1.0) * eps_hat + 0.05;
  int band_ok = 0, onset_ok = 0, total = 0;
  for (ErrorModel::Family family :
       {ErrorModel::Family::DecayingUniform, ErrorModel::Family::SquareWave}) {
    BatteryConfig cfg;
    cfg.seeds = 10;
    cfg.horizon = 1000000;
    cfg.gamma = gamma;
    cfg.eta = eta;
    cfg.family = family;
    cfg.seed = family == ErrorModel::Family::DecayingUniform ? 777 : 778;
    cfg.threads = worker_threads();
    cfg.checkpoints = final_decade_checkpoints(cfg.horizon, 8);
    const BatteryResult battery = run_battery(cfg);
    for (const auto& seed : battery.seeds) {
      ++total;
      bool in_band = true;
      for (const auto& cp : seed.checkpoints)
        if (cp.t >= cfg.horizon / 10)
          in_band = in_band && cp.g >= seed.value - band && cp.g <= seed.value + band;
      band_ok += in_band;
      onset_ok += onset_from_checkpoints(seed.checkpoints, onset_bound).has_value();
    }
  }
  report(6, "repeated games with error eta=0.05 (both families)",
         band_ok == total && onset_ok == total,
         "payoff band +-" + fmt(band) + " " + std::to_string(band_ok) + "/" +
             std::to_string(total) + ", onset at bound " + fmt(onset_bound) + " " +
             std::to_string(onset_ok) + "/" + std::to_string(total));
}

// ---------------------------------------------------------------- criterion 7
void criterion_convergence_trends() {
  SweepConfig cfg;
  cfg.depth = 2;
  cfg.bf = 2;
  cfg.policies = {PolicyVariant::RM, PolicyVariant::RMM, PolicyVariant::Exp3,
                  PolicyVariant::Exp3M};
  cfg.gammas = {0.05};
  cfg.games = 10;
  cfg.runs = 10;
  cfg.iters = 100000;
  cfg.seed = 20250801;
  cfg.threads = worker_threads();
  const SweepResult sweep = run_sweep(cfg);

  // (a) mean exploitability strictly decreases across checkpoints from 1e3 on
  bool decreasing = true;
  std::string trend_note;
  for (PolicyVariant v : cfg.policies) {
    std::vector<double> means;
    for (const SweepSummaryRow& row : sweep_summary(sweep))
      if (row.policy == v && row.iteration >= 1000) means.push_back(row.mean_exploitability);
    for (std::size_t k = 1; k < means.size(); ++k) decreasing = decreasing && means[k] < means[k - 1];
    if (v == PolicyVariant::RM)
      trend_note = "rm means " + fmt(means[0]) + "->" + fmt(means.back());
  }

  // (b) per game, RMM's final mean is at least RM's in >= 8/10 games
  std::map<int, double> rm_final, rmm_final;
  for (const SweepRow& row : sweep.rows) {
    if (row.iteration != cfg.iters) continue;
    if (row.policy == PolicyVariant::RM) rm_final[row.game_id] += row.exploitability;
    if (row.policy == PolicyVariant::RMM) rmm_final[row.game_id] += row.exploitability;
  }
  int rmm_slower = 0;
  for (int game = 0; game < cfg.games; ++game)
    rmm_slower += rmm_final[game] >= rm_final[game];
  report(7, "scaled Figure-2 protocol", decreasing && rmm_slower >= 8,
         std::string("means strictly decreasing from 1e3: ") + (decreasing ? "yes" : "NO") +
             "; rmm final >= rm in " + std::to_string(rmm_slower) + "/10 games; " + trend_note);
}

// ---------------------------------------------------------------- criterion 8
void criterion_worstcase_floor() {
  WorstCaseConfig cfg;
  cfg.depth = 2;
  cfg.bf = 2;
  cfg.utilities = {0.0, 0.5, 1.0};
  cfg.budget = 10000;
  cfg.eval_iters = 1000;
  cfg.eval_runs = 20;
  cfg.gamma = 0.05;
  cfg.policies = {PolicyVariant::RM};
  cfg.seed = 31337;
  cfg.threads = worker_threads();
  const WorstCaseResult result = run_worstcase(cfg);
  const WorstCaseEntry& worst = result.per_policy[0];

  const ValueTree values = backward_induction(worst.game);
  const double long_run = mean_final_exploitability(worst.game, values, PolicyVariant::RM, 0.05,
                                                    1000000, 5, 99991);
  const double diff = std::abs(long_run - worst.mixed_ne_floor);
  report(8, "worst-case floor consistency", diff <= 0.01,
         "worst candidate " + std::to_string(worst.candidate) + " (mean expl " +
             fmt(worst.mean_exploitability) + " at 1e3 iters), floor " +
             fmt(worst.mixed_ne_floor) + ", RM at 1e6 " + fmt(long_run) + ", |diff| " +
             fmt(diff));
}

// ---------------------------------------------------------------- criterion 9
void criterion_subgame_perfection(double eps_hat) {
  int expl_ok = 0, bands_ok = 0, total = 0;
  std::string worst_note;
  double worst_margin = -1.0;
  for (int depth : {2, 3}) {
    for (int k = 0; k < 5; ++k) {
      ++total;
      RandomGameParams p;
      p.depth = depth;
      p.branching = 2;
      p.seed = derive_seed(6100, {static_cast<std::uint64_t>(depth), static_cast<std::uint64_t>(k)});
      const GameSpec game = generate_random_game(p);
      AuditConfig cfg;
      cfg.policy = PolicyVariant::RM;
      cfg.gamma = 0.05;
      cfg.iterations = 1000000;
      cfg.eps = eps_hat;
      cfg.delta = 0.05;
      cfg.seed = derive_seed(6200, {static_cast<std::uint64_t>(depth), static_cast<std::uint64_t>(k)});
      const AuditResult audit = run_audit(game, cfg);
      expl_ok += audit.exploitability_ok;
      bands_ok += audit.bands_clear;
      const double margin = audit.bound - audit.exploitability_final;
      if (worst_margin < 0.0 || margin < worst_margin) {
        worst_margin = margin;
        worst_note = "tightest: depth " + std::to_string(depth) + " expl " +
                     fmt(audit.exploitability_final) + " vs bound " + fmt(audit.bound);
      }
    }
  }
  report(9, "subgame-perfection surrogate at eps_hat=" + fmt(eps_hat),
         expl_ok == total && bands_ok == total,
         "exploitability bound " + std::to_string(expl_ok) + "/" + std::to_string(total) +
             ", zero band violations " + std::to_string(bands_ok) + "/" + std::to_string(total) +
             "; " + worst_note);
}

// --------------------------------------------------------------- criterion 10
void criterion_engine_invariants() {
  bool conservation = true, range = true, completion = true, coverage = true;
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
    for (int depth : {2, 3}) {
      RandomGameParams p;
      p.depth = depth;
      p.branching = 2;
      p.seed = seed;
      const GameSpec game = generate_random_game(p);
      EngineConfig cfg;
      cfg.gamma = 0.6;  // completeness needs real exploration at this budget
      cfg.seed = seed;
      SearchTree tree(game, cfg);
      const long budget = 100 * static_cast<long>(game.inner_count());
      tree.run(budget);

      long full_expansion = 0;
      for (int h = 0; h < game.size(); ++h)
        if (!game.nodes[h].terminal()) full_expansion += game.nodes[h].rows * game.nodes[h].cols;
      completion = completion && tree.expansions() == full_expansion &&
                   tree.last_expansion_iteration() <= budget;
      for (long c : tree.node(0).joint_counts) coverage = coverage && c >= 1;

      for (int h = 0; h < game.size(); ++h) {
        const auto& nd = game.nodes[h];
        const SearchNode& sn = tree.node(h);
        if (!sn.in_tree || nd.terminal()) continue;
        long joint_total = 0;
        for (long c : sn.joint_counts) joint_total += c;
        conservation = conservation && joint_total == sn.decisions &&
                       sn.decisions == sn.visits + sn.expanded - (h == 0 ? 0 : 1);
        if (sn.visits > 0) {
          const double mean = sn.reward_sum / sn.visits;
          range = range && mean >= -1e-12 && mean <= 1.0 + 1e-12;
        }
        for (int i = 0; i < nd.rows; ++i) {
          for (int j = 0; j < nd.cols; ++j) {
            const int c = game.child(h, i, j);
            const SearchNode& cn = tree.node(c);
            const long tij = sn.joint_counts[static_cast<std::size_t>(i) * nd.cols + j];
            if (game.nodes[c].terminal()) {
              conservation = conservation && (!cn.in_tree || cn.visits == 1);
            } else if (cn.in_tree) {
              conservation = conservation && tij == cn.visits + cn.expanded;
            }
          }
        }
      }
    }
  }

  SweepConfig cfg;
  cfg.games = 3;
  cfg.runs = 3;
  cfg.iters = 10000;
  cfg.seed = 5150;
  cfg.policies = {PolicyVariant::RM, PolicyVariant::Exp3M};
  cfg.threads = 1;
  const std::string serial = sweep_csv(run_sweep(cfg));
  cfg.threads = 2;
  const std::string two = sweep_csv(run_sweep(cfg));
  cfg.threads = 3;
  const std::string three = sweep_csv(run_sweep(cfg));
  const bool bytes = serial == two && serial == three;

  report(10, "engine invariants and bit-exact reproducibility",
         conservation && range && completion && coverage && bytes,
         std::string("conservation ") + (conservation ? "ok" : "BROKEN") + ", X/n in range " +
             (range ? "ok" : "BROKEN") + ", expansion ceases " + (completion ? "ok" : "NO") +
             ", root coverage " + (coverage ? "ok" : "NO") + ", CSV identical for 1/2/3 threads " +
             (bytes ? "yes" : "NO"));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();

  criterion_appendix_fixture();
  criterion_lp_oracle();

  const HannanBatteryOutcome hannan = run_hannan_batteries();
  criterion_hannan_regret(hannan);
  criterion_strategy_agreement(hannan);
  criterion_equilibrium_gaps(hannan);
  criterion_error_games(hannan.eps_hat_rm);
  criterion_convergence_trends();
  criterion_worstcase_floor();
  criterion_subgame_perfection(hannan.eps_hat_rm);
  criterion_engine_invariants();

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d/10 criteria passed in %.1fs\n", 10 - g_failures, elapsed);
  return g_failures == 0 ? 0 : 1;
}
