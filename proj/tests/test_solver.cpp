#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "smmcts/solver.hpp"

using namespace smmcts;

namespace {

const MatrixGame kAppendixMatrix = MatrixGame::from_rows({{0.4, 0.5}, {0.6, 0.5}});

BehavioralProfile pure_profile(const GameSpec& g, int row, int col) {
  BehavioralProfile prof;
  prof.p1.resize(g.nodes.size());
  prof.p2.resize(g.nodes.size());
  prof.p1[0].assign(g.nodes[0].rows, 0.0);
  prof.p1[0][row] = 1.0;
  prof.p2[0].assign(g.nodes[0].cols, 0.0);
  prof.p2[0][col] = 1.0;
  return prof;
}

}  // namespace

TEST_CASE("appendix matrix: value and optimal strategies certified") {
  MatrixSolution sol = solve_matrix(kAppendixMatrix);
  CHECK(sol.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.gap1 <= 1e-8);
  CHECK(sol.gap2 <= 1e-8);
  CHECK(sol.strategy_p1.is_distribution());
  CHECK(sol.strategy_p2.is_distribution());
}

TEST_CASE("matching pennies solves to the uniform equilibrium") {
  MatrixSolution sol = solve_matrix(MatrixGame::from_rows({{1, 0}, {0, 1}}));
  CHECK(sol.value == doctest::Approx(0.5).epsilon(1e-10));
  for (double p : sol.strategy_p1.p) CHECK(p == doctest::Approx(0.5).epsilon(1e-8));
  for (double p : sol.strategy_p2.p) CHECK(p == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("random matrices match the support-enumeration oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const MatrixGame m =
        oracles::random_matrix(1 + rng.next_below(4), 1 + rng.next_below(4), rng);
    const double expected = oracles::support_enumeration_value(m);
    MatrixSolution sol = solve_matrix(m);
    CHECK(std::abs(sol.value - expected) <= 1e-8);
    CHECK(sol.gap1 <= 1e-8);
    CHECK(sol.gap2 <= 1e-8);
  }
}

TEST_CASE("value is equivariant under positive scale and shift") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const MatrixGame m = oracles::random_matrix(2 + rng.next_below(3), 2 + rng.next_below(3), rng);
    const double a = 0.25 + 2.0 * rng.next_unit();
    const double b = -1.0 + 2.0 * rng.next_unit();
    MatrixGame scaled = m;
    for (double& x : scaled.payoff) x = a * x + b;
    const double base = solve_matrix(m).value;
    MatrixSolution sol = solve_matrix(scaled);
    CHECK(sol.value == doctest::Approx(a * base + b).epsilon(1e-8));
    CHECK(sol.gap1 <= 1e-8);
    CHECK(sol.gap2 <= 1e-8);
  }
}

TEST_CASE("backward induction equals solve_matrix on a single stage") {
  const GameSpec g = single_stage_game(kAppendixMatrix);
  ValueTree vt = backward_induction(g);
  CHECK(vt.value[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("constant games have constant subgame values") {
  RandomGameParams p;
  p.depth = 3;
  p.branching = 2;
  p.utility_set = {0.7};
  p.seed = 5;
  const GameSpec g = generate_random_game(p);
  ValueTree vt = backward_induction(g);
  for (double v : vt.value) CHECK(v == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("saddle-point games agree with the pure minimax oracle") {
  int found = 0;
  for (std::uint64_t seed = 0; found < 10 && seed < 500; ++seed) {
    RandomGameParams p;
    p.depth = 2;
    p.branching = 2;
    p.utility_set = {0.0, 0.25, 0.5, 0.75, 1.0};
    p.seed = derive_seed(31, {seed});
    const GameSpec g = generate_random_game(p);
    auto pure = oracles::pure_minimax_value(g);
    if (!pure) continue;
    ++found;
    ValueTree vt = backward_induction(g);
    CHECK(vt.value[0] == doctest::Approx(*pure).epsilon(1e-9));
  }
  CHECK(found == 10);
}

TEST_CASE("value recursion is consistent at every node") {
  RandomGameParams p;
  p.depth = 3;
  p.branching = 2;
  p.seed = 404;
  const GameSpec g = generate_random_game(p);
  ValueTree vt = backward_induction(g);
  for (int h = 0; h < g.size(); ++h) {
    if (g.nodes[h].terminal()) continue;
    const double direct = solve_matrix(child_value_matrix(g, vt, h)).value;
    CHECK(vt.value[h] == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("raising a single terminal utility never lowers the root value") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    RandomGameParams p;
    p.depth = 2;
    p.branching = 2;
    p.seed = derive_seed(88, {static_cast<std::uint64_t>(trial)});
    GameSpec g = generate_random_game(p);
    const double before = backward_induction(g).value[0];
    std::vector<int> terminals;
    for (int h = 0; h < g.size(); ++h)
      if (g.nodes[h].terminal()) terminals.push_back(h);
    auto& u = g.nodes[terminals[rng.next_below(static_cast<int>(terminals.size()))]].utility;
    u = std::min(1.0, u + 0.3);
    const double after = backward_induction(g).value[0];
    CHECK(after >= before - 1e-9);
  }
}

TEST_CASE("best responses on the appendix fixture") {
  const GameSpec g = single_stage_game(kAppendixMatrix);
  CHECK(best_response(g, 2, pure_profile(g, 0, 0)).value == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(best_response(g, 1, pure_profile(g, 0, 0)).value == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("responding to the exact equilibrium recovers the value") {
  RandomGameParams p;
  p.depth = 2;
  p.branching = 3;
  p.seed = 61;
  const GameSpec g = generate_random_game(p);
  ValueTree vt = backward_induction(g);
  const BehavioralProfile ne = equilibrium_profile(g, vt);
  CHECK(best_response(g, 1, ne).value == doctest::Approx(vt.value[0]).epsilon(1e-8));
  CHECK(best_response(g, 2, ne).value == doctest::Approx(vt.value[0]).epsilon(1e-8));
}

TEST_CASE("best response throws when the fixed strategy is missing") {
  const GameSpec g = single_stage_game(kAppendixMatrix);
  BehavioralProfile empty;
  empty.p1.resize(g.nodes.size());
  empty.p2.resize(g.nodes.size());
  CHECK_THROWS(best_response(g, 1, empty));
}

TEST_CASE("exploitability basics") {
  const GameSpec g = single_stage_game(kAppendixMatrix);
  ValueTree vt = backward_induction(g);
  const BehavioralProfile ne = equilibrium_profile(g, vt);
  CHECK(exploitability(g, ne) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(exploitability(g, vt, pure_profile(g, 0, 0)) == doctest::Approx(0.1).epsilon(1e-12));

  for (int trial = 0; trial < 10; ++trial) {
    RandomGameParams p;
    p.depth = 2;
    p.branching = 2;
    p.seed = derive_seed(16, {static_cast<std::uint64_t>(trial)});
    const GameSpec rg = generate_random_game(p);
    CHECK(exploitability(rg, uniform_profile(rg)) >= -1e-8);
  }
}

TEST_CASE("epsilon equilibrium checks on the appendix profile") {
  const GameSpec g = single_stage_game(kAppendixMatrix);
  const BehavioralProfile prof = pure_profile(g, 0, 0);
  CHECK(check_eps_ne(g, prof, 0.2).ok);
  CHECK_FALSE(check_eps_ne(g, prof, 0.19).ok);

  ValueTree vt = backward_induction(g);
  CHECK(check_eps_ne(g, equilibrium_profile(g, vt), 1e-8).ok);

  const GameSpec mp = single_stage_game(MatrixGame::from_rows({{1, 0}, {0, 1}}));
  CHECK(check_eps_ne(mp, uniform_profile(mp), 1e-9).ok);
}

TEST_CASE("payoff bands accept exact play and use the leaf width at depth D") {
  RandomGameParams p;
  p.depth = 2;
  p.branching = 2;
  p.seed = 100;
  const GameSpec g = generate_random_game(p);
  ValueTree vt = backward_induction(g);

  std::vector<long> visits(g.nodes.size(), 100);
  BandReport rep = audit_payoff_bands(g, vt, {vt.value.data(), vt.value.size()},
                                      {visits.data(), visits.size()}, 0.0, 1e-6);
  CHECK(rep.violations == 0);

  const double eps = 0.1, delta = 0.05;
  BandReport rep2 = audit_payoff_bands(g, vt, {vt.value.data(), vt.value.size()},
                                       {visits.data(), visits.size()}, eps, delta);
  for (const auto& e : rep2.entries) {
    if (e.depth == g.depth) CHECK(e.half_width == doctest::Approx(eps + delta));
    if (e.depth == 1) CHECK(e.half_width == doctest::Approx(2 * eps + delta));
  }

  std::vector<double> means = vt.value;
  for (int h = 0; h < g.size(); ++h) {
    if (!g.nodes[h].terminal() && g.nodes[h].depth == g.depth) {
      means[h] = vt.value[h] + eps + delta + 0.01;
      break;
    }
  }
  BandReport rep3 = audit_payoff_bands(g, vt, {means.data(), means.size()},
                                       {visits.data(), visits.size()}, eps, delta);
  CHECK(rep3.violations == 1);
  CHECK(rep3.worst->excess > 0.0);
}
