#include "smmcts/game.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace smmcts {

namespace {

constexpr std::size_t kMaxNodes = 100'000'000;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

}  // namespace

MatrixGame MatrixGame::from_rows(const std::vector<std::vector<double>>& entries) {
  MatrixGame m(static_cast<int>(entries.size()),
               entries.empty() ? 0 : static_cast<int>(entries.front().size()));
  for (int i = 0; i < m.rows; ++i) {
    if (static_cast<int>(entries[i].size()) != m.cols)
      throw std::invalid_argument("ragged matrix rows");
    for (int j = 0; j < m.cols; ++j) m.at(i, j) = entries[i][j];
  }
  return m;
}

std::size_t GameSpec::inner_count() const {
  std::size_t c = 0;
  for (const Node& nd : nodes) c += !nd.terminal();
  return c;
}

std::size_t GameSpec::terminal_count() const { return nodes.size() - inner_count(); }

void GameSpec::validate() const {
  require(!nodes.empty(), "game has no nodes");
  require(nodes[0].depth == 1, "root must be at depth 1");
  std::vector<int> indegree(nodes.size(), 0);
  int max_inner_depth = 0;
  for (std::size_t h = 0; h < nodes.size(); ++h) {
    const Node& nd = nodes[h];
    if (nd.terminal()) {
      require(nd.utility >= 0.0 && nd.utility <= 1.0, "terminal utility outside [0,1]");
      continue;
    }
    require(nd.rows >= 1 && nd.cols >= 1, "inner node with empty action set");
    max_inner_depth = std::max(max_inner_depth, nd.depth);
    for (int i = 0; i < nd.rows; ++i) {
      for (int j = 0; j < nd.cols; ++j) {
        int c = child(static_cast<int>(h), i, j);
        require(c > 0 && c < static_cast<int>(nodes.size()), "child index out of range");
        require(nodes[c].depth == nd.depth + 1, "child depth mismatch");
        ++indegree[c];
      }
    }
  }
  for (std::size_t h = 1; h < nodes.size(); ++h)
    require(indegree[h] == 1, "state graph is not a tree");
  require(indegree[0] == 0, "root has a parent");
  require(depth == max_inner_depth, "declared depth disagrees with the tree");
}

GameSpec uniform_tree_shape(int depth, int branching) {
  if (depth < 1 || branching < 1) throw std::invalid_argument("depth and branching must be >= 1");
  // total nodes: sum_{d=0..depth} (b^2)^d
  unsigned __int128 total = 0, level = 1;
  const unsigned __int128 bb =
      static_cast<unsigned __int128>(branching) * static_cast<unsigned __int128>(branching);
  for (int d = 0; d <= depth; ++d) {
    total += level;
    level *= bb;
    if (total > kMaxNodes) throw std::invalid_argument("game too large to materialize");
  }
  GameSpec g;
  g.depth = depth;
  g.nodes.reserve(static_cast<std::size_t>(total));
  g.nodes.push_back({});
  g.nodes[0].depth = 1;
  for (std::size_t h = 0; h < g.nodes.size(); ++h) {
    if (g.nodes[h].depth > depth) continue;  // terminal level
    g.nodes[h].rows = g.nodes[h].cols = branching;
    g.nodes[h].first_child = static_cast<int>(g.nodes.size());
    for (int c = 0; c < branching * branching; ++c) {
      GameSpec::Node nd;
      nd.depth = g.nodes[h].depth + 1;
      g.nodes.push_back(nd);
    }
  }
  return g;
}

GameSpec generate_random_game(const RandomGameParams& params) {
  GameSpec g = uniform_tree_shape(params.depth, params.branching);
  Rng rng(params.seed);
  const int k = static_cast<int>(params.utility_set.size());
  for (auto& nd : g.nodes) {
    if (!nd.terminal()) continue;
    nd.utility = k == 0 ? rng.next_unit() : params.utility_set[rng.next_below(k)];
    if (nd.utility < 0.0 || nd.utility > 1.0)
      throw std::invalid_argument("utility_set entry outside [0,1]");
  }
  return g;
}

GameSpec random_assignment_game(int depth, int branching, std::span<const double> utilities,
                                std::uint64_t seed) {
  RandomGameParams p;
  p.depth = depth;
  p.branching = branching;
  p.utility_set.assign(utilities.begin(), utilities.end());
  p.seed = seed;
  if (p.utility_set.empty()) throw std::invalid_argument("utility set must be non-empty");
  return generate_random_game(p);
}

GameEnumerator::GameEnumerator(int depth, int branching, std::vector<double> utilities)
    : shape_(uniform_tree_shape(depth, branching)), utilities_(std::move(utilities)) {
  if (utilities_.empty()) throw std::invalid_argument("utility set must be non-empty");
  for (double u : utilities_)
    if (u < 0.0 || u > 1.0) throw std::invalid_argument("utility_set entry outside [0,1]");
  for (int h = 0; h < shape_.size(); ++h)
    if (shape_.nodes[h].terminal()) terminal_ids_.push_back(h);
  digits_.assign(terminal_ids_.size(), 0);
}

std::uint64_t GameEnumerator::total() const {
  std::uint64_t t = 1;
  const std::uint64_t k = utilities_.size();
  for (std::size_t i = 0; i < terminal_ids_.size(); ++i) {
    if (t > UINT64_MAX / k) throw std::overflow_error("assignment space exceeds 2^64");
    t *= k;
  }
  return t;
}

std::optional<GameSpec> GameEnumerator::next() {
  if (done_) return std::nullopt;
  if (started_) {
    // odometer increment, rightmost digit fastest
    int pos = static_cast<int>(digits_.size()) - 1;
    const int k = static_cast<int>(utilities_.size());
    while (pos >= 0) {
      if (++digits_[pos] < k) break;
      digits_[pos] = 0;
      --pos;
    }
    if (pos < 0) {
      done_ = true;
      return std::nullopt;
    }
  }
  started_ = true;
  GameSpec g = shape_;
  for (std::size_t t = 0; t < terminal_ids_.size(); ++t)
    g.nodes[terminal_ids_[t]].utility = utilities_[digits_[t]];
  return g;
}

GameSpec GameEnumerator::at(std::uint64_t index) const {
  GameSpec g = shape_;
  const std::uint64_t k = utilities_.size();
  for (std::size_t t = terminal_ids_.size(); t-- > 0;) {
    g.nodes[terminal_ids_[t]].utility = utilities_[index % k];
    index /= k;
  }
  if (index != 0) throw std::out_of_range("assignment index out of range");
  return g;
}

std::vector<GameSpec> sample_games(int depth, int branching, const std::vector<double>& utilities,
                                   std::size_t budget, std::uint64_t seed) {
  if (budget == 0) throw std::invalid_argument("budget must be positive");
  std::vector<GameSpec> out;
  out.reserve(budget);
  for (std::size_t k = 0; k < budget; ++k)
    out.push_back(random_assignment_game(depth, branching, utilities, derive_seed(seed, {k})));
  return out;
}

namespace {

double walk_expected(const GameSpec& g, const BehavioralProfile& prof, int h, double weight) {
  const GameSpec::Node& nd = g.nodes[h];
  if (nd.terminal()) return weight * nd.utility;
  const auto& s1 = prof.p1[h];
  const auto& s2 = prof.p2[h];
  if (static_cast<int>(s1.size()) != nd.rows || static_cast<int>(s2.size()) != nd.cols)
    throw std::runtime_error("profile undefined at a reachable state");
  double total = 0.0;
  for (int i = 0; i < nd.rows; ++i) {
    if (s1[i] == 0.0) continue;
    for (int j = 0; j < nd.cols; ++j) {
      if (s2[j] == 0.0) continue;
      total += walk_expected(g, prof, g.child(h, i, j), weight * s1[i] * s2[j]);
    }
  }
  return total;
}

}  // namespace

double expected_utility(const GameSpec& game, const BehavioralProfile& profile) {
  if (profile.p1.size() < game.nodes.size() || profile.p2.size() < game.nodes.size())
    throw std::runtime_error("profile undefined at a reachable state");
  return walk_expected(game, profile, 0, 1.0);
}

BehavioralProfile uniform_profile(const GameSpec& game) {
  BehavioralProfile prof;
  prof.p1.resize(game.nodes.size());
  prof.p2.resize(game.nodes.size());
  for (int h = 0; h < game.size(); ++h) {
    const auto& nd = game.nodes[h];
    if (nd.terminal()) continue;
    prof.p1[h].assign(nd.rows, 1.0 / nd.rows);
    prof.p2[h].assign(nd.cols, 1.0 / nd.cols);
  }
  return prof;
}

GameSpec single_stage_game(const MatrixGame& m) {
  if (m.rows < 1 || m.cols < 1) throw std::invalid_argument("empty matrix");
  GameSpec g;
  g.depth = 1;
  GameSpec::Node root;
  root.rows = m.rows;
  root.cols = m.cols;
  root.first_child = 1;
  root.depth = 1;
  g.nodes.push_back(root);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      GameSpec::Node t;
      t.depth = 2;
      t.utility = m.at(i, j);
      g.nodes.push_back(t);
    }
  }
  g.validate();
  return g;
}

MatrixGame root_matrix(const GameSpec& game) {
  const auto& root = game.nodes[0];
  MatrixGame m(root.rows, root.cols);
  for (int i = 0; i < root.rows; ++i) {
    for (int j = 0; j < root.cols; ++j) {
      int c = game.child(0, i, j);
      if (!game.nodes[c].terminal()) throw std::invalid_argument("game is not single-stage");
      m.at(i, j) = game.nodes[c].utility;
    }
  }
  return m;
}

namespace {

using nlohmann::json;

json node_to_json(const GameSpec& g, int h) {
  const auto& nd = g.nodes[h];
  if (nd.terminal()) return json{{"terminal", nd.utility}};
  json rows = json::array();
  for (int i = 0; i < nd.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < nd.cols; ++j) row.push_back(node_to_json(g, g.child(h, i, j)));
    rows.push_back(std::move(row));
  }
  return json{{"rows", nd.rows}, {"cols", nd.cols}, {"children", std::move(rows)}};
}

}  // namespace

std::string game_to_json_string(const GameSpec& game) {
  json j{{"depth", game.depth}, {"root", node_to_json(game, 0)}};
  return j.dump();
}

GameSpec game_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed game file: ") + e.what());
  }
  require(j.is_object() && j.contains("depth") && j.contains("root"),
          "game file must carry depth and root");
  require(j["depth"].is_number_integer(), "depth must be an integer");

  GameSpec g;
  g.depth = j["depth"].get<int>();
  // BFS over the JSON tree so child blocks come out contiguous.
  g.nodes.push_back({});
  g.nodes[0].depth = 1;
  std::vector<std::pair<const json*, int>> queue{{&j["root"], 0}};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const json& src = *queue[q].first;
    const int id = queue[q].second;
    require(src.is_object(), "game node must be an object");
    if (src.contains("terminal")) {
      require(src["terminal"].is_number(), "terminal utility must be a number");
      g.nodes[id].utility = src["terminal"].get<double>();
      continue;
    }
    require(src.contains("rows") && src.contains("cols") && src.contains("children"),
            "inner node needs rows, cols, children");
    const int m = src["rows"].get<int>();
    const int n = src["cols"].get<int>();
    require(m >= 1 && n >= 1, "inner node with empty action set");
    const json& ch = src["children"];
    require(ch.is_array() && static_cast<int>(ch.size()) == m, "children row count mismatch");
    g.nodes[id].rows = m;
    g.nodes[id].cols = n;
    g.nodes[id].first_child = static_cast<int>(g.nodes.size());
    for (int i = 0; i < m; ++i) {
      require(ch[i].is_array() && static_cast<int>(ch[i].size()) == n,
              "missing child entry in row");
      for (int jj = 0; jj < n; ++jj) {
        GameSpec::Node nd;
        nd.depth = g.nodes[id].depth + 1;
        g.nodes.push_back(nd);
        if (g.nodes.size() > kMaxNodes) throw std::runtime_error("game file too large");
        queue.emplace_back(&ch[i][jj], static_cast<int>(g.nodes.size()) - 1);
      }
    }
  }
  g.validate();
  return g;
}

void save_game(const GameSpec& game, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << game_to_json_string(game) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

GameSpec load_game(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open game file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return game_from_json_string(buf.str());
}

}  // namespace smmcts
