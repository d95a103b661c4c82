#include "smmcts/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace smmcts {

const char* to_string(PolicyVariant v) {
  switch (v) {
    case PolicyVariant::RM: return "rm";
    case PolicyVariant::RMM: return "rmm";
    case PolicyVariant::Exp3: return "exp3";
    case PolicyVariant::Exp3M: return "exp3m";
  }
  return "?";
}

std::optional<PolicyVariant> parse_policy_variant(const std::string& name) {
  if (name == "rm") return PolicyVariant::RM;
  if (name == "rmm") return PolicyVariant::RMM;
  if (name == "exp3") return PolicyVariant::Exp3;
  if (name == "exp3m") return PolicyVariant::Exp3M;
  return std::nullopt;
}

EngineConfig engine_config(PolicyVariant v, double gamma, std::uint64_t seed) {
  EngineConfig cfg;
  cfg.gamma = gamma;
  cfg.seed = seed;
  cfg.selection = (v == PolicyVariant::RM || v == PolicyVariant::RMM)
                      ? SelectionKind::RegretMatching
                      : SelectionKind::Exp3;
  cfg.retval = (v == PolicyVariant::RMM || v == PolicyVariant::Exp3M) ? RetValVariant::Mean
                                                                      : RetValVariant::Sample;
  return cfg;
}

std::vector<long> log_checkpoints(long iters) {
  std::vector<long> cps;
  for (long c = 1; c <= iters && c > 0; c *= 10) cps.push_back(c);
  if (cps.empty() || cps.back() != iters) cps.push_back(iters);
  return cps;
}

std::vector<long> final_decade_checkpoints(long iters, int count) {
  std::vector<long> cps;
  const double lo = std::log10(std::max<long>(1, iters / 10));
  const double hi = std::log10(static_cast<double>(iters));
  for (int k = 0; k < count; ++k) {
    const double x = count == 1 ? hi : lo + (hi - lo) * k / (count - 1);
    cps.push_back(static_cast<long>(std::llround(std::pow(10.0, x))));
  }
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  if (cps.back() != iters) cps.push_back(iters);
  return cps;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

// Runs one engine cell and reports exploitability of the empirical-frequency
// profile at each checkpoint.
std::vector<double> engine_cell(const GameSpec& game, const ValueTree& values,
                                const EngineConfig& cfg, const std::vector<long>& checkpoints) {
  SearchTree tree(game, cfg);
  std::vector<double> out;
  out.reserve(checkpoints.size());
  long done = 0;
  for (long cp : checkpoints) {
    if (cp > done) {
      tree.run(cp - done);
      done = cp;
    }
    out.push_back(exploitability(game, values, tree.extract_profile(ProfileKind::EmpiricalFrequencies)));
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  if (cfg.games < 1 || cfg.runs < 1 || cfg.iters < 1)
    throw std::invalid_argument("sweep counts must be >= 1");
  for (double g : cfg.gammas)
    if (g <= 0.0 || g >= 1.0) throw std::invalid_argument("gamma must be in (0,1)");
  const std::vector<long> cps = cfg.checkpoints.empty() ? log_checkpoints(cfg.iters)
                                                        : cfg.checkpoints;

  std::vector<GameSpec> games(cfg.games);
  std::vector<ValueTree> values(cfg.games);
  parallel_cells(cfg.games, cfg.threads, [&](long g) {
    RandomGameParams p;
    p.depth = cfg.depth;
    p.branching = cfg.bf;
    p.seed = derive_seed(cfg.seed, {0xA11CEU, static_cast<std::uint64_t>(g)});
    games[g] = generate_random_game(p);
    values[g] = backward_induction(games[g]);
  });

  const long cells_per_combo = static_cast<long>(cfg.games) * cfg.runs;
  const long combos = static_cast<long>(cfg.policies.size()) * cfg.gammas.size();
  const long total = combos * cells_per_combo;
  std::vector<std::vector<double>> cell_expl(total);

  parallel_cells(total, cfg.threads, [&](long cell) {
    const long combo = cell / cells_per_combo;
    const long inner = cell % cells_per_combo;
    const int pi = static_cast<int>(combo / cfg.gammas.size());
    const int gi = static_cast<int>(combo % cfg.gammas.size());
    const int game_id = static_cast<int>(inner / cfg.runs);
    const int run_id = static_cast<int>(inner % cfg.runs);
    const std::uint64_t run_seed =
        derive_seed(cfg.seed, {0xCE11U, static_cast<std::uint64_t>(pi),
                               static_cast<std::uint64_t>(gi), static_cast<std::uint64_t>(game_id),
                               static_cast<std::uint64_t>(run_id)});
    cell_expl[cell] =
        engine_cell(games[game_id], values[game_id],
                    engine_config(cfg.policies[pi], cfg.gammas[gi], run_seed), cps);
  });

  SweepResult result;
  result.config = cfg;
  result.config.checkpoints = cps;
  result.rows.reserve(total * cps.size());
  for (long cell = 0; cell < total; ++cell) {
    const long combo = cell / cells_per_combo;
    const long inner = cell % cells_per_combo;
    const int pi = static_cast<int>(combo / cfg.gammas.size());
    const int gi = static_cast<int>(combo % cfg.gammas.size());
    const int game_id = static_cast<int>(inner / cfg.runs);
    const int run_id = static_cast<int>(inner % cfg.runs);
    for (std::size_t c = 0; c < cps.size(); ++c) {
      result.rows.push_back({cfg.policies[pi], cfg.gammas[gi], cfg.depth, cfg.bf, game_id, run_id,
                             cps[c], cell_expl[cell][c]});
    }
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "policy,gamma,depth,bf,game_id,run_id,iteration,exploitability\n";
  for (const SweepRow& r : result.rows) {
    out += to_string(r.policy);
    out += ',';
    out += format_double(r.gamma);
    out += ',';
    out += std::to_string(r.depth);
    out += ',';
    out += std::to_string(r.bf);
    out += ',';
    out += std::to_string(r.game_id);
    out += ',';
    out += std::to_string(r.run_id);
    out += ',';
    out += std::to_string(r.iteration);
    out += ',';
    out += format_double(r.exploitability);
    out += '\n';
  }
  return out;
}

std::vector<SweepSummaryRow> sweep_summary(const SweepResult& result) {
  std::vector<SweepSummaryRow> summary;
  for (PolicyVariant pv : result.config.policies) {
    for (double gamma : result.config.gammas) {
      for (long cp : result.config.checkpoints) {
        double sum = 0.0;
        long count = 0;
        for (const SweepRow& r : result.rows) {
          if (r.policy == pv && r.gamma == gamma && r.iteration == cp) {
            sum += r.exploitability;
            ++count;
          }
        }
        if (count > 0) summary.push_back({pv, gamma, cp, sum / count});
      }
    }
  }
  return summary;
}

double mean_final_exploitability(const GameSpec& game, const ValueTree& values, PolicyVariant v,
                                 double gamma, long iters, int runs, std::uint64_t seed) {
  double sum = 0.0;
  for (int r = 0; r < runs; ++r) {
    SearchTree tree(game, engine_config(v, gamma, derive_seed(seed, {static_cast<std::uint64_t>(r)})));
    tree.run(iters);
    sum += exploitability(game, values, tree.extract_profile(ProfileKind::EmpiricalFrequencies));
  }
  return sum / runs;
}

WorstCaseResult run_worstcase(const WorstCaseConfig& cfg) {
  if (!cfg.full && cfg.budget == 0) throw std::invalid_argument("budget must be positive");
  if (cfg.eval_iters < 1 || cfg.eval_runs < 1)
    throw std::invalid_argument("evaluation parameters must be >= 1");
  GameEnumerator enumerator(cfg.depth, cfg.bf, cfg.utilities);
  const std::uint64_t candidates = cfg.full ? enumerator.total() : cfg.budget;

  struct Best {
    double score = -1.0;
    std::uint64_t candidate = 0;
  };
  std::vector<Best> best(cfg.policies.size());

  // Stream candidates in blocks: parallel evaluation inside a block, serial
  // argmax scan after it, so the result never depends on scheduling.
  constexpr std::uint64_t kBlock = 2048;
  std::vector<std::vector<double>> block_scores(kBlock);
  for (std::uint64_t start = 0; start < candidates; start += kBlock) {
    const std::uint64_t stop = std::min(candidates, start + kBlock);
    parallel_cells(static_cast<long>(stop - start), cfg.threads, [&](long off) {
      const std::uint64_t c = start + static_cast<std::uint64_t>(off);
      const GameSpec game =
          cfg.full ? enumerator.at(c)
                   : random_assignment_game(cfg.depth, cfg.bf, cfg.utilities,
                                            derive_seed(cfg.seed, {0x5A3EU, c}));
      const ValueTree values = backward_induction(game);
      std::vector<double>& scores = block_scores[off];
      scores.assign(cfg.policies.size(), 0.0);
      for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
        scores[p] = mean_final_exploitability(
            game, values, cfg.policies[p], cfg.gamma, cfg.eval_iters, cfg.eval_runs,
            derive_seed(cfg.seed, {0xE7A1U, c, static_cast<std::uint64_t>(p)}));
      }
    });
    for (std::uint64_t c = start; c < stop; ++c) {
      const auto& scores = block_scores[c - start];
      for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
        if (scores[p] > best[p].score) best[p] = {scores[p], c};
      }
    }
  }

  WorstCaseResult result;
  result.config = cfg;
  result.candidates_evaluated = candidates;
  for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
    WorstCaseEntry e;
    e.policy = cfg.policies[p];
    e.candidate = best[p].candidate;
    e.game = cfg.full ? enumerator.at(e.candidate)
                      : random_assignment_game(cfg.depth, cfg.bf, cfg.utilities,
                                               derive_seed(cfg.seed, {0x5A3EU, e.candidate}));
    e.mean_exploitability = best[p].score;
    const ValueTree values = backward_induction(e.game);
    e.exact_value = values.value[0];
    const BehavioralProfile ne = equilibrium_profile(e.game, values);
    e.mixed_ne_floor =
        exploitability(e.game, values, mix_profile_with_uniform(e.game, ne, cfg.gamma, 1));
    result.per_policy.push_back(std::move(e));
  }
  return result;
}

namespace {

std::unique_ptr<BanditPolicy> make_policy(SelectionKind kind, int arms, double gamma) {
  if (kind == SelectionKind::RegretMatching)
    return std::make_unique<RegretMatchingPolicy>(arms, gamma);
  return std::make_unique<Exp3Policy>(arms, gamma);
}

MatrixGame battery_matrix(const BatteryConfig& cfg, int index) {
  if (cfg.matching_pennies_first && index == 0)
    return MatrixGame::from_rows({{1.0, 0.0}, {0.0, 1.0}});
  Rng rng(derive_seed(cfg.seed, {0xBA77U, static_cast<std::uint64_t>(index)}));
  const int span = cfg.max_size - cfg.min_size + 1;
  MatrixGame m(cfg.min_size + rng.next_below(span), cfg.min_size + rng.next_below(span));
  for (double& x : m.payoff) x = rng.next_unit();
  return m;
}

}  // namespace

BatteryResult run_battery(const BatteryConfig& cfg) {
  if (cfg.seeds < 1 || cfg.horizon < 1) throw std::invalid_argument("battery needs seeds and steps");
  const std::vector<long> cps =
      cfg.checkpoints.empty() ? log_checkpoints(cfg.horizon) : cfg.checkpoints;

  BatteryResult result;
  result.config = cfg;
  result.config.checkpoints = cps;
  result.seeds.resize(cfg.seeds);

  parallel_cells(cfg.seeds, cfg.threads, [&](long k) {
    const MatrixGame m = battery_matrix(cfg, static_cast<int>(k));
    const double value = solve_matrix(m).value;

    auto p1 = make_policy(cfg.kind, m.rows, cfg.gamma);
    auto p2 = make_policy(cfg.kind, m.cols, cfg.gamma);

    RepeatedConfig rc;
    rc.horizon = cfg.horizon;
    rc.checkpoints = cps;
    rc.record_steps = false;
    rc.seed = derive_seed(cfg.seed, {0x917EU, static_cast<std::uint64_t>(k)});

    RepeatedGameTrace trace;
    if (cfg.eta > 0.0 && cfg.family) {
      ErrorModel model;
      model.base = m;
      model.eta = cfg.eta;
      model.family = *cfg.family;
      model.seed = derive_seed(cfg.seed, {0xE44U, static_cast<std::uint64_t>(k)});
      trace = play_with_error(model, *p1, *p2, rc);
    } else {
      trace = play_repeated(m, *p1, *p2, rc);
    }

    BatterySeedResult& out = result.seeds[k];
    out.index = static_cast<int>(k);
    out.m = m.rows;
    out.n = m.cols;
    out.value = value;
    for (const TraceCheckpoint& cp : trace.checkpoints) {
      BatteryCheckpointMetrics met;
      met.t = cp.t;
      met.r1 = cp.r1;
      met.r2 = cp.r2;
      const GapPair gaps = equilibrium_gap(cp, m, value);
      met.gap1 = gaps.gap1;
      met.gap2 = gaps.gap2;
      met.g = cp.g;
      met.strategy_distance = strategy_distance(cp);
      met.last_i = cp.last_i;
      met.last_j = cp.last_j;
      met.last_payoff = cp.last_payoff;
      met.gmax = cp.r1 + cp.g;  // g_max = r + g by definition
      out.checkpoints.push_back(met);
    }
  });
  return result;
}

double BatteryResult::eps_hat_at(long at) const {
  double worst = 0.0;
  bool found = false;
  for (const BatterySeedResult& seed : seeds) {
    for (const BatteryCheckpointMetrics& cp : seed.checkpoints) {
      if (cp.t == at) {
        worst = std::max({worst, cp.r1, cp.r2});
        found = true;
      }
    }
  }
  if (!found) throw std::invalid_argument("no checkpoint at the requested step");
  return worst;
}

std::string battery_seed_csv(const BatterySeedResult& seed) {
  std::string out = "step,i,j,payoff,g,gmax,r,gap1,gap2\n";
  for (const BatteryCheckpointMetrics& cp : seed.checkpoints) {
    out += std::to_string(cp.t);
    out += ',';
    out += std::to_string(cp.last_i + 1);
    out += ',';
    out += std::to_string(cp.last_j + 1);
    out += ',';
    out += format_double(cp.last_payoff);
    out += ',';
    out += format_double(cp.g);
    out += ',';
    out += format_double(cp.gmax);
    out += ',';
    out += format_double(cp.r1);
    out += ',';
    out += format_double(cp.gap1);
    out += ',';
    out += format_double(cp.gap2);
    out += '\n';
  }
  return out;
}

std::optional<long> onset_from_checkpoints(const std::vector<BatteryCheckpointMetrics>& cps,
                                           double bound) {
  std::optional<long> onset;
  for (const BatteryCheckpointMetrics& cp : cps) {
    if (std::max(cp.gap1, cp.gap2) <= bound) {
      if (!onset) onset = cp.t;
    } else {
      onset.reset();
    }
  }
  return onset;
}

AuditResult run_audit(const GameSpec& game, const AuditConfig& cfg) {
  const ValueTree values = backward_induction(game);
  const std::vector<long> cps = final_decade_checkpoints(cfg.iterations, cfg.final_decade_points);

  SearchTree tree(game, engine_config(cfg.policy, cfg.gamma, cfg.seed));
  AuditResult result;
  result.game_value = values.value[0];
  long done = 0;
  result.bands_clear = true;
  for (long cp : cps) {
    if (cp > done) {
      tree.run(cp - done);
      done = cp;
    }
    const std::vector<double> means = tree.node_means();
    const std::vector<long> visits = tree.node_visits();
    BandReport rep = audit_payoff_bands(game, values, {means.data(), means.size()},
                                        {visits.data(), visits.size()}, cfg.eps, cfg.delta);
    result.bands_clear = result.bands_clear && rep.violations == 0;
    result.reports.emplace_back(cp, std::move(rep));
  }
  result.exploitability_final =
      exploitability(game, values, tree.extract_profile(ProfileKind::EmpiricalFrequencies));
  result.bound = 2.0 * game.depth * game.depth * cfg.eps + cfg.delta;
  result.exploitability_ok = result.exploitability_final <= result.bound;
  return result;
}

}  // namespace smmcts
