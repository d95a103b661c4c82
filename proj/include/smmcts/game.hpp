#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smmcts/rng.hpp"

namespace smmcts {

// Payoff matrix of a single-stage simultaneous-move game, row-major.
// Entries are player 1's payoff; player 2 receives 1 - a_ij in normalized
// games (and -a_ij in general zero-sum use, which only flips argmin/argmax).
struct MatrixGame {
  int rows = 0;
  int cols = 0;
  std::vector<double> payoff;

  MatrixGame() = default;
  MatrixGame(int m, int n) : rows(m), cols(n), payoff(static_cast<std::size_t>(m) * n, 0.0) {}

  double at(int i, int j) const { return payoff[static_cast<std::size_t>(i) * cols + j]; }
  double& at(int i, int j) { return payoff[static_cast<std::size_t>(i) * cols + j]; }

  static MatrixGame from_rows(const std::vector<std::vector<double>>& entries);
};

// Explicit tree of a finite zero-sum game with perfect information and
// simultaneous moves. Nodes are stored in BFS order with contiguous child
// blocks; node 0 is the root. Terminal utilities are player 1's and must lie
// in [0, 1]. The structure is immutable after construction and safe to share
// across threads.
struct GameSpec {
  struct Node {
    int rows = 0;          // player 1's action count, 0 marks a terminal
    int cols = 0;          // player 2's action count
    int first_child = -1;  // child for joint action (i, j) at first_child + i*cols + j
    int depth = 0;         // root is depth 1
    double utility = 0.0;  // terminals only
    bool terminal() const { return rows == 0; }
  };

  std::vector<Node> nodes;
  int depth = 0;  // deepest inner level

  int size() const { return static_cast<int>(nodes.size()); }
  int child(int h, int i, int j) const {
    const Node& nd = nodes[h];
    return nd.first_child + i * nd.cols + j;
  }
  std::size_t inner_count() const;
  std::size_t terminal_count() const;

  // Throws std::runtime_error on any violated structural invariant
  // (non-tree links, utilities outside [0, 1], bad depth bookkeeping).
  void validate() const;
};

// Per-node mixed strategies for both players, indexed by node id. An empty
// vector means "undefined at this node". uniform_filled lists nodes where a
// profile extraction had to fall back to uniform.
struct BehavioralProfile {
  std::vector<std::vector<double>> p1;
  std::vector<std::vector<double>> p2;
  std::vector<int> uniform_filled;
};

struct RandomGameParams {
  int depth = 1;
  int branching = 1;
  std::vector<double> utility_set;  // empty: continuous uniform on [0, 1)
  std::uint64_t seed = 0;
};

// Complete uniform tree shape with unset terminal utilities.
GameSpec uniform_tree_shape(int depth, int branching);

// Seed-deterministic random game: identical params produce a bit-identical
// tree. Utilities are drawn in node-id (BFS) order.
GameSpec generate_random_game(const RandomGameParams& params);

// One uniform assignment of the utility set to the terminals of the uniform
// (depth, branching) shape, drawn from `seed`.
GameSpec random_assignment_game(int depth, int branching, std::span<const double> utilities,
                                std::uint64_t seed);

// Streams every assignment of the utility set to terminal positions exactly
// once, in odometer order over BFS terminal positions.
class GameEnumerator {
 public:
  GameEnumerator(int depth, int branching, std::vector<double> utilities);

  std::optional<GameSpec> next();
  // Number of assignments |utilities|^terminals; throws on uint64 overflow.
  std::uint64_t total() const;
  // Rebuild the k-th assignment directly (mixed-radix digits of `index`).
  GameSpec at(std::uint64_t index) const;

 private:
  GameSpec shape_;
  std::vector<double> utilities_;
  std::vector<int> terminal_ids_;
  std::vector<int> digits_;
  bool started_ = false;
  bool done_ = false;
};

// Seeded uniform subsample of the assignment space; budget must be positive.
std::vector<GameSpec> sample_games(int depth, int branching, const std::vector<double>& utilities,
                                   std::size_t budget, std::uint64_t seed);

// Expected utility of the profile for player 1 (single weighted tree walk).
// Throws if the profile is undefined at a node reached with positive
// probability.
double expected_utility(const GameSpec& game, const BehavioralProfile& profile);

BehavioralProfile uniform_profile(const GameSpec& game);

// Depth-1 game whose root matrix is `m` (terminals are the entries).
GameSpec single_stage_game(const MatrixGame& m);

// Root-level value matrix view of a depth-1 game.
MatrixGame root_matrix(const GameSpec& game);

// JSON game files: {"depth": D, "root": node} where a node is either
// {"terminal": u} or {"rows": m, "cols": n, "children": [[node, ...], ...]}
// with children[i][j] the child under joint action (i+1, j+1).
std::string game_to_json_string(const GameSpec& game);
GameSpec game_from_json_string(const std::string& text);
void save_game(const GameSpec& game, const std::string& path);
GameSpec load_game(const std::string& path);

}  // namespace smmcts
