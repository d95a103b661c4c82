// Command-line harness: exact solving, convergence sweeps, worst-case search,
// repeated-game batteries, and payoff-band audits. Subcommand outputs are
// deterministic functions of (inputs, seed) regardless of --threads.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smmcts/experiments.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace {

using namespace smmcts;

int default_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<PolicyVariant> parse_policies(const std::vector<std::string>& names) {
  std::vector<PolicyVariant> out;
  for (const std::string& n : names) {
    auto v = parse_policy_variant(n);
    if (!v) throw CLI::ValidationError("--policy", "unknown policy variant: " + n);
    out.push_back(*v);
  }
  return out;
}

std::vector<long> parse_checkpoints(const std::string& spec, long iters) {
  if (spec == "log") return log_checkpoints(iters);
  std::vector<long> cps;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t next = spec.find(',', pos);
    if (next == std::string::npos) next = spec.size();
    cps.push_back(std::stol(spec.substr(pos, next - pos)));
    pos = next + 1;
  }
  long prev = 0;
  for (long c : cps) {
    if (c <= prev) throw CLI::ValidationError("--checkpoints", "must be increasing");
    prev = c;
  }
  return cps;
}

int cmd_solve(const std::string& game_path, const std::string& out_path, bool dump_profile) {
  GameSpec game = load_game(game_path);
  ValueTree values = backward_induction(game);
  std::printf("value %s\n", format_double(values.value[0]).c_str());
  std::string table = "node,depth,value\n";
  for (int h = 0; h < game.size(); ++h) {
    if (game.nodes[h].terminal()) continue;
    table += std::to_string(h) + ',' + std::to_string(game.nodes[h].depth) + ',' +
             format_double(values.value[h]) + '\n';
  }
  if (!out_path.empty()) {
    write_file(out_path, table);
  } else {
    std::fputs(table.c_str(), stdout);
  }
  if (dump_profile) {
    BehavioralProfile ne = equilibrium_profile(game, values);
    std::string dump = "node,player,action,prob\n";
    for (int h = 0; h < game.size(); ++h) {
      for (std::size_t a = 0; a < ne.p1[h].size(); ++a)
        dump += std::to_string(h) + ",1," + std::to_string(a + 1) + ',' +
                format_double(ne.p1[h][a]) + '\n';
      for (std::size_t a = 0; a < ne.p2[h].size(); ++a)
        dump += std::to_string(h) + ",2," + std::to_string(a + 1) + ',' +
                format_double(ne.p2[h][a]) + '\n';
    }
    std::fputs(dump.c_str(), stdout);
  }
  return 0;
}

int cmd_sweep(const SweepConfig& cfg, const std::string& out_path) {
  SweepResult result = run_sweep(cfg);
  const std::string csv = sweep_csv(result);
  if (!out_path.empty()) {
    write_file(out_path, csv);
  } else {
    std::fputs(csv.c_str(), stdout);
  }
  std::fprintf(stderr, "mean exploitability per checkpoint\n");
  for (const SweepSummaryRow& row : sweep_summary(result))
    std::fprintf(stderr, "  %-6s gamma=%-6s t=%-9ld %s\n", to_string(row.policy),
                 format_double(row.gamma).c_str(), row.iteration,
                 format_double(row.mean_exploitability).c_str());
  return 0;
}

int cmd_worstcase(const WorstCaseConfig& cfg, const std::string& out_prefix) {
  WorstCaseResult result = run_worstcase(cfg);
  std::printf("evaluated %llu candidate games\n",
              static_cast<unsigned long long>(result.candidates_evaluated));
  for (const WorstCaseEntry& e : result.per_policy) {
    std::printf("%s: candidate %llu  mean exploitability %s  value %s  mixed-NE floor %s\n",
                to_string(e.policy), static_cast<unsigned long long>(e.candidate),
                format_double(e.mean_exploitability).c_str(),
                format_double(e.exact_value).c_str(), format_double(e.mixed_ne_floor).c_str());
    if (!out_prefix.empty()) {
      const std::string path = out_prefix + "_" + to_string(e.policy) + ".game.json";
      save_game(e.game, path);
      std::printf("  wrote %s\n", path.c_str());
    }
  }
  return 0;
}

int cmd_bandit(BatteryConfig cfg, const std::vector<SelectionKind>& kinds,
               const std::string& out_prefix, double onset_delta) {
  bool all_ok = true;
  for (SelectionKind kind : kinds) {
    cfg.kind = kind;
    const char* name = kind == SelectionKind::RegretMatching ? "rm" : "exp3";
    BatteryResult result = run_battery(cfg);
    const double eps_hat = result.eps_hat_at(cfg.horizon);
    const double regret_bound = cfg.gamma + 0.05;
    const double gap_bound = 4.0 * regret_bound + 0.05;

    int regret_ok = 0, dist_ok = 0, gaps_ok = 0, band_ok = 0, onset_ok = 0;
    for (const BatterySeedResult& seed : result.seeds) {
      const BatteryCheckpointMetrics& last = seed.checkpoints.back();
      regret_ok += last.r1 <= regret_bound && last.r2 <= regret_bound;
      dist_ok += last.strategy_distance <= 0.01;
      gaps_ok += std::max(last.gap1, last.gap2) <= gap_bound;
      if (cfg.eta > 0.0) {
        const double band = cfg.eta + cfg.gamma + 0.05;
        band_ok += std::abs(last.g - seed.value) <= band;
        const double c = cfg.eta / eps_hat;
        onset_ok += onset_from_checkpoints(seed.checkpoints,
                                           4.0 * (c + 1.0) * eps_hat + onset_delta)
                        .has_value();
      }
      if (!out_prefix.empty())
        write_file(out_prefix + "_" + name + "_seed" + std::to_string(seed.index) + ".csv",
                   battery_seed_csv(seed));
    }
    const int need = cfg.seeds - 1;  // one straggler seed allowed
    bool ok = regret_ok >= need && dist_ok >= need && gaps_ok >= need;
    std::printf("%s battery: eps_hat=%s regret<=%s %d/%d, |emp-avg|<=0.01 %d/%d, gaps<=%s %d/%d\n",
                name, format_double(eps_hat).c_str(), format_double(regret_bound).c_str(),
                regret_ok, cfg.seeds, dist_ok, cfg.seeds, format_double(gap_bound).c_str(),
                gaps_ok, cfg.seeds);
    if (cfg.eta > 0.0) {
      ok = ok && band_ok >= need && onset_ok >= need;
      std::printf("%s battery (eta=%s): payoff band %d/%d, onset found %d/%d\n", name,
                  format_double(cfg.eta).c_str(), band_ok, cfg.seeds, onset_ok, cfg.seeds);
    }
    std::printf("%s battery: %s\n", name, ok ? "PASS" : "FAIL");
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 2;
}

int cmd_audit(const std::string& game_path, int depth, int bf, std::uint64_t game_seed,
              const AuditConfig& cfg) {
  GameSpec game;
  if (!game_path.empty()) {
    game = load_game(game_path);
  } else {
    RandomGameParams p;
    p.depth = depth;
    p.branching = bf;
    p.seed = game_seed;
    game = generate_random_game(p);
  }
  AuditResult result = run_audit(game, cfg);
  std::printf("game value %s, audited %zu checkpoints in the final decade\n",
              format_double(result.game_value).c_str(), result.reports.size());
  for (const auto& [t, rep] : result.reports) {
    std::printf("t=%ld violations=%d", t, rep.violations);
    for (const auto& d : rep.by_depth)
      std::printf("  depth %d: %d/%d in band", d.depth, d.in_band, d.audited);
    if (rep.worst)
      std::printf("  worst node %d (excess %s)", rep.worst->node,
                  format_double(rep.worst->excess).c_str());
    std::printf("\n");
  }
  std::printf("final exploitability %s vs bound 2*D^2*eps+delta = %s: %s\n",
              format_double(result.exploitability_final).c_str(),
              format_double(result.bound).c_str(),
              result.exploitability_ok ? "within" : "EXCEEDED");
  return result.bands_clear && result.exploitability_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous-move MCTS with Hannan-consistent selection"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_path;
  int threads = default_threads();
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_option("--out", out_path, "output path (or prefix)");
  app.add_option("--threads", threads, "worker threads")->capture_default_str();

  auto* solve = app.add_subcommand("solve", "backward induction of a game file");
  std::string solve_game;
  bool solve_profile = false;
  solve->add_option("--game", solve_game, "game JSON file")->required();
  solve->add_flag("--profile", solve_profile, "dump an equilibrium profile");

  auto* sweep = app.add_subcommand("sweep", "exploitability curves on random games");
  SweepConfig sweep_cfg;
  std::vector<std::string> sweep_policies{"rm", "rmm"};
  std::string sweep_cps = "log";
  sweep->add_option("--depth", sweep_cfg.depth)->capture_default_str();
  sweep->add_option("--bf", sweep_cfg.bf)->capture_default_str();
  sweep->add_option("--gamma", sweep_cfg.gammas, "exploration (repeatable)")->capture_default_str();
  sweep->add_option("--policy", sweep_policies, "rm|rmm|exp3|exp3m (repeatable)")
      ->capture_default_str();
  sweep->add_option("--games", sweep_cfg.games)->capture_default_str();
  sweep->add_option("--runs", sweep_cfg.runs)->capture_default_str();
  sweep->add_option("--iters", sweep_cfg.iters)->capture_default_str();
  sweep->add_option("--checkpoints", sweep_cps, "log or comma list")->capture_default_str();

  auto* worst = app.add_subcommand("worstcase", "search for hard games");
  WorstCaseConfig worst_cfg;
  std::vector<std::string> worst_policies{"rm", "rmm"};
  std::string worst_utilities = "0,0.5,1";
  worst->add_option("--depth", worst_cfg.depth)->capture_default_str();
  worst->add_option("--bf", worst_cfg.bf)->capture_default_str();
  worst->add_option("--utilities", worst_utilities, "comma list")->capture_default_str();
  worst->add_option("--budget", worst_cfg.budget)->capture_default_str();
  worst->add_flag("--full", worst_cfg.full, "enumerate the whole space");
  worst->add_option("--eval-iters", worst_cfg.eval_iters)->capture_default_str();
  worst->add_option("--eval-runs", worst_cfg.eval_runs)->capture_default_str();
  worst->add_option("--gamma", worst_cfg.gamma)->capture_default_str();
  worst->add_option("--policy", worst_policies)->capture_default_str();

  auto* bandit = app.add_subcommand("bandit", "repeated-game property battery");
  BatteryConfig bandit_cfg;
  std::vector<std::string> bandit_policies{"rm", "exp3"};
  std::string bandit_family = "uniform";
  double onset_delta = 0.05;
  bandit->add_option("--seeds", bandit_cfg.seeds)->capture_default_str();
  bandit->add_option("--horizon", bandit_cfg.horizon)->capture_default_str();
  bandit->add_option("--gamma", bandit_cfg.gamma)->capture_default_str();
  bandit->add_option("--policy", bandit_policies, "rm|exp3 (repeatable)")->capture_default_str();
  bandit->add_option("--eta", bandit_cfg.eta, "error bound; > 0 attaches a model")
      ->capture_default_str();
  bandit->add_option("--family", bandit_family, "uniform|squarewave")->capture_default_str();
  bandit->add_flag("--matching-pennies", bandit_cfg.matching_pennies_first,
                   "seed 0 plays matching pennies");

  auto* audit = app.add_subcommand("audit", "payoff-band audit of one MCTS run");
  AuditConfig audit_cfg;
  std::string audit_game;
  std::string audit_policy = "rm";
  int audit_depth = 2, audit_bf = 2;
  std::uint64_t audit_game_seed = 7;
  audit->add_option("--game", audit_game, "game JSON file (otherwise generated)");
  audit->add_option("--depth", audit_depth)->capture_default_str();
  audit->add_option("--bf", audit_bf)->capture_default_str();
  audit->add_option("--game-seed", audit_game_seed)->capture_default_str();
  audit->add_option("--iters", audit_cfg.iterations)->capture_default_str();
  audit->add_option("--gamma", audit_cfg.gamma)->capture_default_str();
  audit->add_option("--policy", audit_policy, "rm|rmm|exp3|exp3m")->capture_default_str();
  audit->add_option("--eps", audit_cfg.eps, "measured Hannan bound")->capture_default_str();
  audit->add_option("--delta", audit_cfg.delta)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve) return cmd_solve(solve_game, out_path, solve_profile);
    if (*sweep) {
      sweep_cfg.policies = parse_policies(sweep_policies);
      sweep_cfg.checkpoints = parse_checkpoints(sweep_cps, sweep_cfg.iters);
      sweep_cfg.seed = seed;
      sweep_cfg.threads = threads;
      return cmd_sweep(sweep_cfg, out_path);
    }
    if (*worst) {
      worst_cfg.policies = parse_policies(worst_policies);
      worst_cfg.utilities.clear();
      std::size_t pos = 0;
      while (pos < worst_utilities.size()) {
        std::size_t next = worst_utilities.find(',', pos);
        if (next == std::string::npos) next = worst_utilities.size();
        worst_cfg.utilities.push_back(std::stod(worst_utilities.substr(pos, next - pos)));
        pos = next + 1;
      }
      worst_cfg.seed = seed;
      worst_cfg.threads = threads;
      return cmd_worstcase(worst_cfg, out_path);
    }
    if (*bandit) {
      std::vector<SelectionKind> kinds;
      for (const std::string& p : bandit_policies) {
        if (p == "rm") kinds.push_back(SelectionKind::RegretMatching);
        else if (p == "exp3") kinds.push_back(SelectionKind::Exp3);
        else throw std::invalid_argument("unknown bandit policy: " + p);
      }
      if (bandit_cfg.eta > 0.0) {
        if (bandit_family == "uniform") bandit_cfg.family = ErrorModel::Family::DecayingUniform;
        else if (bandit_family == "squarewave") bandit_cfg.family = ErrorModel::Family::SquareWave;
        else throw std::invalid_argument("unknown error family: " + bandit_family);
      }
      bandit_cfg.seed = seed;
      bandit_cfg.threads = threads;
      return cmd_bandit(bandit_cfg, kinds, out_path, onset_delta);
    }
    if (*audit) {
      auto v = parse_policy_variant(audit_policy);
      if (!v) throw std::invalid_argument("unknown policy variant: " + audit_policy);
      audit_cfg.policy = *v;
      audit_cfg.seed = seed;
      return cmd_audit(audit_game, audit_depth, audit_bf, audit_game_seed, audit_cfg);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
