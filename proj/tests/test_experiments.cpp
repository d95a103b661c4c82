#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "smmcts/experiments.hpp"

using namespace smmcts;

TEST_CASE("policy variant names round-trip") {
  for (PolicyVariant v :
       {PolicyVariant::RM, PolicyVariant::RMM, PolicyVariant::Exp3, PolicyVariant::Exp3M}) {
    auto parsed = parse_policy_variant(to_string(v));
    REQUIRE(parsed);
    CHECK(*parsed == v);
  }
  CHECK_FALSE(parse_policy_variant("ucb"));
}

TEST_CASE("engine configs carry the selection and return variants") {
  EngineConfig rmm = engine_config(PolicyVariant::RMM, 0.05, 1);
  CHECK(rmm.selection == SelectionKind::RegretMatching);
  CHECK(rmm.retval == RetValVariant::Mean);
  EngineConfig e3 = engine_config(PolicyVariant::Exp3, 0.05, 1);
  CHECK(e3.selection == SelectionKind::Exp3);
  CHECK(e3.retval == RetValVariant::Sample);
}

TEST_CASE("checkpoint schedules") {
  CHECK(log_checkpoints(100000) == std::vector<long>({1, 10, 100, 1000, 10000, 100000}));
  CHECK(log_checkpoints(25000) == std::vector<long>({1, 10, 100, 1000, 10000, 25000}));
  const auto fd = final_decade_checkpoints(1000000, 8);
  CHECK(fd.front() >= 100000);
  CHECK(fd.back() == 1000000);
  for (std::size_t k = 1; k < fd.size(); ++k) CHECK(fd[k] > fd[k - 1]);
}

TEST_CASE("sweep CSV is byte-identical across thread counts") {
  SweepConfig cfg;
  cfg.games = 3;
  cfg.runs = 2;
  cfg.iters = 3000;
  cfg.seed = 12;
  cfg.policies = {PolicyVariant::RM, PolicyVariant::Exp3};

  cfg.threads = 1;
  const std::string serial = sweep_csv(run_sweep(cfg));
  cfg.threads = 2;
  const std::string two = sweep_csv(run_sweep(cfg));
  cfg.threads = 3;
  const std::string three = sweep_csv(run_sweep(cfg));
  CHECK(serial == two);
  CHECK(serial == three);
  CHECK(serial.substr(0, serial.find('\n')) ==
        "policy,gamma,depth,bf,game_id,run_id,iteration,exploitability");
}

TEST_CASE("sweep rows cover the full grid in canonical order") {
  SweepConfig cfg;
  cfg.games = 2;
  cfg.runs = 2;
  cfg.iters = 100;
  cfg.seed = 4;
  cfg.policies = {PolicyVariant::RM};
  cfg.threads = 2;
  const SweepResult result = run_sweep(cfg);
  const auto cps = log_checkpoints(100);
  REQUIRE(result.rows.size() == 2 * 2 * cps.size());
  std::size_t r = 0;
  for (int game = 0; game < 2; ++game)
    for (int run = 0; run < 2; ++run)
      for (long cp : cps) {
        CHECK(result.rows[r].game_id == game);
        CHECK(result.rows[r].run_id == run);
        CHECK(result.rows[r].iteration == cp);
        CHECK(result.rows[r].exploitability >= -1e-8);
        ++r;
      }
  // summary means exist for every checkpoint
  CHECK(sweep_summary(result).size() == cps.size());
}

TEST_CASE("tiny worst-case search: full enumeration is deterministic and floors check out") {
  WorstCaseConfig cfg;
  cfg.depth = 1;
  cfg.bf = 2;
  cfg.utilities = {0.0, 1.0};
  cfg.full = true;
  cfg.eval_iters = 300;
  cfg.eval_runs = 8;
  cfg.policies = {PolicyVariant::RM};
  cfg.seed = 9;
  cfg.threads = 2;
  const WorstCaseResult a = run_worstcase(cfg);
  const WorstCaseResult b = run_worstcase(cfg);
  CHECK(a.candidates_evaluated == 16);  // 2^4 assignments
  REQUIRE(a.per_policy.size() == 1);
  CHECK(a.per_policy[0].candidate == b.per_policy[0].candidate);
  CHECK(a.per_policy[0].mean_exploitability == b.per_policy[0].mean_exploitability);

  // the floor equals the exactly computed exploitability of the mixed optimum
  const WorstCaseEntry& e = a.per_policy[0];
  const ValueTree values = backward_induction(e.game);
  const BehavioralProfile ne = equilibrium_profile(e.game, values);
  const double floor =
      exploitability(e.game, values, mix_profile_with_uniform(e.game, ne, cfg.gamma, 1));
  CHECK(e.mixed_ne_floor == doctest::Approx(floor));
  CHECK(e.exact_value == doctest::Approx(values.value[0]));
  // matching pennies is among the candidates, so the worst score is nontrivial
  CHECK(e.mean_exploitability > 0.0);
}

TEST_CASE("constant games score zero exploitability in the worst-case search") {
  WorstCaseConfig cfg;
  cfg.depth = 1;
  cfg.bf = 2;
  cfg.utilities = {0.5};
  cfg.full = true;
  cfg.eval_iters = 100;
  cfg.eval_runs = 4;
  cfg.policies = {PolicyVariant::RM};
  cfg.seed = 2;
  const WorstCaseResult result = run_worstcase(cfg);
  CHECK(result.per_policy[0].mean_exploitability == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(result.per_policy[0].mixed_ne_floor == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("battery runs are thread-invariant and expose measured regret") {
  BatteryConfig cfg;
  cfg.seeds = 4;
  cfg.horizon = 20000;
  cfg.seed = 8;
  cfg.matching_pennies_first = true;

  cfg.threads = 1;
  const BatteryResult serial = run_battery(cfg);
  cfg.threads = 2;
  const BatteryResult parallel = run_battery(cfg);
  REQUIRE(serial.seeds.size() == 4);
  for (std::size_t k = 0; k < serial.seeds.size(); ++k)
    CHECK(battery_seed_csv(serial.seeds[k]) == battery_seed_csv(parallel.seeds[k]));

  CHECK(serial.seeds[0].m == 2);  // matching pennies leads the battery
  CHECK(serial.seeds[0].value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(serial.eps_hat_at(20000) >= 0.0);
  CHECK(serial.eps_hat_at(20000) <= 0.1);
  CHECK_THROWS(serial.eps_hat_at(777));

  const std::string csv = battery_seed_csv(serial.seeds[0]);
  CHECK(csv.substr(0, csv.find('\n')) == "step,i,j,payoff,g,gmax,r,gap1,gap2");
}

TEST_CASE("battery onsets exist for generous bounds") {
  BatteryConfig cfg;
  cfg.seeds = 3;
  cfg.horizon = 50000;
  cfg.seed = 5;
  const BatteryResult result = run_battery(cfg);
  for (const BatterySeedResult& seed : result.seeds) {
    const auto onset = onset_from_checkpoints(seed.checkpoints, 4 * 0.1 + 0.05);
    CHECK(onset.has_value());
  }
}

TEST_CASE("audit of a depth-1 game reduces to the leaf band") {
  const GameSpec g = single_stage_game(MatrixGame::from_rows({{1, 0}, {0, 1}}));
  AuditConfig cfg;
  cfg.iterations = 50000;
  cfg.eps = 0.1;
  cfg.delta = 0.05;
  cfg.seed = 3;
  const AuditResult result = run_audit(g, cfg);
  CHECK(result.game_value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(result.bound == doctest::Approx(2 * 1 * 1 * 0.1 + 0.05));
  CHECK(result.bands_clear);
  for (const auto& [t, rep] : result.reports) {
    REQUIRE(rep.entries.size() == 1);
    CHECK(rep.entries[0].half_width == doctest::Approx(0.1 + 0.05));
  }
  CHECK(result.exploitability_ok);
}

TEST_CASE("parallel_cells serial and OpenMP paths agree") {
  std::vector<long> serial(257), parallel(257);
  parallel_cells(257, 1, [&](long i) { serial[i] = i * i; });
  parallel_cells(257, 3, [&](long i) { parallel[i] = i * i; });
  CHECK(serial == parallel);
}
