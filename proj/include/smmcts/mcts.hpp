#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "smmcts/game.hpp"
#include "smmcts/policy.hpp"
#include "smmcts/rng.hpp"

namespace smmcts {

enum class SelectionKind { RegretMatching, Exp3 };
enum class RetValVariant { Sample, Mean };

struct EngineConfig {
  SelectionKind selection = SelectionKind::RegretMatching;
  RetValVariant retval = RetValVariant::Sample;
  double gamma = 0.05;
  // When set, counterfactual entries use the child's raw reward sum instead
  // of its mean. Kept for experimentation; the mean is the default because
  // regrets must stay commensurate with utilities in [0, 1].
  bool counterfactual_uses_sum = false;
  std::uint64_t seed = 0;
};

// Value sent up the simulation path: the sample itself, or the node's
// running mean after the update.
double retval(double u1, double reward_sum, long visits, RetValVariant variant);

enum class ProfileKind { EmpiricalFrequencies, AverageStrategy };

// Search statistics for one game node. Joint-action bookkeeping counts every
// decision made at the node (expansion picks and selection samples alike);
// reward_sum/visits follow the simulation algorithm's update discipline,
// which touches a node only on the selection path and touches the new leaf
// on expansion.
struct SearchNode {
  bool in_tree = false;
  double reward_sum = 0.0;  // X_h
  long visits = 0;          // n_h
  int expanded = 0;
  std::vector<std::uint8_t> pair_expanded;  // m*n flags
  std::vector<long> joint_counts;           // t_ij
  std::vector<long> action_counts_p1;       // t_i
  std::vector<long> action_counts_p2;       // t_j
  long decisions = 0;                       // iterations that picked a joint action here
  std::variant<RegretMatchingState, Exp3State> policy_p1;
  std::variant<RegretMatchingState, Exp3State> policy_p2;
  Rng rng{0};
};

// One search tree over an immutable GameSpec. Single-owner: drive one
// simulation at a time; parallelism belongs across independent trees.
class SearchTree {
 public:
  // The game must outlive the tree; only statistics are stored here.
  SearchTree(const GameSpec& game, const EngineConfig& cfg);
  SearchTree(GameSpec&&, const EngineConfig&) = delete;

  // One simulation from the root: expansion of at most one new leaf, policy
  // updates at every visited inner node, reward/visit updates along the
  // selection path. Returns the value propagated out of the root.
  double run_simulation();
  void run(long iterations);

  const GameSpec& game() const { return *game_; }
  const SearchNode& node(int id) const { return nodes_[id]; }
  long iterations() const { return iterations_; }
  long expansions() const { return expansions_; }
  long last_expansion_iteration() const { return last_expansion_iteration_; }
  double root_value_estimate() const;

  BehavioralProfile extract_profile(ProfileKind kind) const;
  std::vector<double> node_means() const;
  std::vector<long> node_visits() const;

  // Counterfactual payoff vector feeding the regret update at `h` for
  // `player`, given the sampled joint action and the returned value. Exposed
  // for tests.
  std::vector<double> counterfactual_values(int h, int player, int own_action, int opp_action,
                                            double u1) const;

 private:
  double simulate(int h);
  void init_node(int h);
  void record_decision(SearchNode& sn, int cols, int i, int j);
  MixedStrategy selection_law(const SearchNode& sn, int player) const;
  MixedStrategy expansion_marginal(const SearchNode& sn, int rows, int cols, int player) const;
  void update_policies(int h, int i1, int j2, double u1, const MixedStrategy& law1,
                       const MixedStrategy& law2);
  double child_estimate(int h, int i, int j, double fallback) const;

  const GameSpec* game_;
  EngineConfig cfg_;
  std::vector<SearchNode> nodes_;
  std::vector<double> scratch_;
  long iterations_ = 0;
  long expansions_ = 0;
  long last_expansion_iteration_ = 0;
};

// Uniform-random playout from `h` to a terminal; returns its utility.
double rollout(const GameSpec& game, int h, Rng& rng);

}  // namespace smmcts
