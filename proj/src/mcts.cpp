#include "smmcts/mcts.hpp"

#include <stdexcept>

namespace smmcts {

double retval(double u1, double reward_sum, long visits, RetValVariant variant) {
  if (variant == RetValVariant::Sample) return u1;
  if (visits < 1) throw std::invalid_argument("mean return needs at least one visit");
  return reward_sum / static_cast<double>(visits);
}

double rollout(const GameSpec& game, int h, Rng& rng) {
  while (!game.nodes[h].terminal()) {
    const auto& nd = game.nodes[h];
    h = game.child(h, rng.next_below(nd.rows), rng.next_below(nd.cols));
  }
  return game.nodes[h].utility;
}

SearchTree::SearchTree(const GameSpec& game, const EngineConfig& cfg)
    : game_(&game), cfg_(cfg), nodes_(game.nodes.size()) {
  init_node(0);
}

void SearchTree::init_node(int h) {
  SearchNode& sn = nodes_[h];
  sn.in_tree = true;
  sn.rng = Rng(derive_seed(cfg_.seed, {static_cast<std::uint64_t>(h)}));
  const auto& nd = game_->nodes[h];
  if (nd.terminal()) return;
  sn.pair_expanded.assign(static_cast<std::size_t>(nd.rows) * nd.cols, 0);
  sn.joint_counts.assign(static_cast<std::size_t>(nd.rows) * nd.cols, 0);
  sn.action_counts_p1.assign(nd.rows, 0);
  sn.action_counts_p2.assign(nd.cols, 0);
  if (cfg_.selection == SelectionKind::RegretMatching) {
    sn.policy_p1 = RegretMatchingState(nd.rows);
    sn.policy_p2 = RegretMatchingState(nd.cols);
  } else {
    sn.policy_p1 = Exp3State(nd.rows);
    sn.policy_p2 = Exp3State(nd.cols);
  }
}

void SearchTree::record_decision(SearchNode& sn, int cols, int i, int j) {
  ++sn.decisions;
  ++sn.action_counts_p1[i];
  ++sn.action_counts_p2[j];
  ++sn.joint_counts[static_cast<std::size_t>(i) * cols + j];
}

MixedStrategy SearchTree::selection_law(const SearchNode& sn, int player) const {
  const auto& policy = player == 1 ? sn.policy_p1 : sn.policy_p2;
  if (cfg_.selection == SelectionKind::RegretMatching)
    return mix_exploration(rm_strategy(std::get<RegretMatchingState>(policy)), cfg_.gamma);
  return exp3_strategy(std::get<Exp3State>(policy), cfg_.gamma);
}

MixedStrategy SearchTree::expansion_marginal(const SearchNode& sn, int rows, int cols,
                                             int player) const {
  // Marginal law of "pick an unexpanded joint action uniformly".
  const int k = player == 1 ? rows : cols;
  MixedStrategy law;
  law.p.assign(k, 0.0);
  int open = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (!sn.pair_expanded[static_cast<std::size_t>(i) * cols + j]) {
        ++open;
        ++law.p[player == 1 ? i : j];
      }
    }
  }
  for (double& x : law.p) x /= open;
  return law;
}

double SearchTree::child_estimate(int h, int i, int j, double fallback) const {
  const SearchNode& cn = nodes_[game_->child(h, i, j)];
  if (!cn.in_tree || cn.visits == 0) return fallback;
  if (cfg_.counterfactual_uses_sum) return cn.reward_sum;
  return cn.reward_sum / static_cast<double>(cn.visits);
}

std::vector<double> SearchTree::counterfactual_values(int h, int player, int own_action,
                                                      int opp_action, double u1) const {
  const auto& nd = game_->nodes[h];
  const int k = player == 1 ? nd.rows : nd.cols;
  const double realized = player == 1 ? u1 : 1.0 - u1;
  std::vector<double> out(k);
  for (int a = 0; a < k; ++a) {
    if (a == own_action) {
      out[a] = realized;
    } else {
      const int i = player == 1 ? a : opp_action;
      const int j = player == 1 ? opp_action : a;
      const double est = child_estimate(h, i, j, u1);
      out[a] = player == 1 ? est : 1.0 - est;
    }
  }
  return out;
}

void SearchTree::update_policies(int h, int i1, int j2, double u1, const MixedStrategy& law1,
                                 const MixedStrategy& law2) {
  SearchNode& sn = nodes_[h];
  const auto& nd = game_->nodes[h];
  if (cfg_.selection == SelectionKind::RegretMatching) {
    auto& s1 = std::get<RegretMatchingState>(sn.policy_p1);
    scratch_.resize(nd.rows);
    for (int i = 0; i < nd.rows; ++i)
      scratch_[i] = i == i1 ? u1 : child_estimate(h, i, j2, u1);
    rm_update(s1, {scratch_.data(), scratch_.size()}, u1, law1);

    auto& s2 = std::get<RegretMatchingState>(sn.policy_p2);
    scratch_.resize(nd.cols);
    for (int j = 0; j < nd.cols; ++j)
      scratch_[j] = j == j2 ? 1.0 - u1 : 1.0 - child_estimate(h, i1, j, u1);
    rm_update(s2, {scratch_.data(), scratch_.size()}, 1.0 - u1, law2);
  } else {
    exp3_update(std::get<Exp3State>(sn.policy_p1), i1, u1, law1.p[i1], law1);
    exp3_update(std::get<Exp3State>(sn.policy_p2), j2, 1.0 - u1, law2.p[j2], law2);
  }
}

double SearchTree::simulate(int h) {
  const auto& nd = game_->nodes[h];
  if (nd.terminal()) return nd.utility;

  SearchNode& sn = nodes_[h];
  const int mn = nd.rows * nd.cols;
  if (sn.expanded < mn) {
    // Expansion: one previously unselected joint action, chosen uniformly at
    // random. The node's own reward/visit stats are not touched here; the new
    // leaf's are, and the returned value uses the leaf's statistics.
    const MixedStrategy law1 = expansion_marginal(sn, nd.rows, nd.cols, 1);
    const MixedStrategy law2 = expansion_marginal(sn, nd.rows, nd.cols, 2);
    int pick = sn.rng.next_below(mn - sn.expanded);
    int pair = -1;
    for (int idx = 0, open = 0; idx < mn; ++idx) {
      if (!sn.pair_expanded[idx] && open++ == pick) {
        pair = idx;
        break;
      }
    }
    const int i = pair / nd.cols;
    const int j = pair % nd.cols;
    sn.pair_expanded[pair] = 1;
    ++sn.expanded;
    record_decision(sn, nd.cols, i, j);

    const int c = game_->child(h, i, j);
    SearchNode& cn = nodes_[c];
    if (!cn.in_tree) init_node(c);
    const double u1 = rollout(*game_, c, cn.rng);
    cn.reward_sum += u1;
    cn.visits += 1;
    update_policies(h, i, j, u1, law1, law2);
    ++expansions_;
    last_expansion_iteration_ = iterations_;
    return retval(u1, cn.reward_sum, cn.visits, cfg_.retval);
  }

  const MixedStrategy law1 = selection_law(sn, 1);
  const MixedStrategy law2 = selection_law(sn, 2);
  const int i = sn.rng.sample(law1.p);
  const int j = sn.rng.sample(law2.p);
  record_decision(sn, nd.cols, i, j);
  const double u1 = simulate(game_->child(h, i, j));
  sn.reward_sum += u1;
  sn.visits += 1;
  update_policies(h, i, j, u1, law1, law2);
  return retval(u1, sn.reward_sum, sn.visits, cfg_.retval);
}

double SearchTree::run_simulation() {
  ++iterations_;
  return simulate(0);
}

void SearchTree::run(long iterations) {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  for (long s = 0; s < iterations; ++s) run_simulation();
}

double SearchTree::root_value_estimate() const {
  const SearchNode& root = nodes_[0];
  return root.visits > 0 ? root.reward_sum / static_cast<double>(root.visits) : 0.0;
}

BehavioralProfile SearchTree::extract_profile(ProfileKind kind) const {
  BehavioralProfile prof;
  prof.p1.resize(nodes_.size());
  prof.p2.resize(nodes_.size());
  for (int h = 0; h < game_->size(); ++h) {
    const auto& nd = game_->nodes[h];
    if (nd.terminal()) continue;
    const SearchNode& sn = nodes_[h];
    bool filled_uniform = false;
    if (kind == ProfileKind::EmpiricalFrequencies) {
      if (sn.decisions == 0) {
        filled_uniform = true;
      } else {
        prof.p1[h].resize(nd.rows);
        prof.p2[h].resize(nd.cols);
        for (int i = 0; i < nd.rows; ++i)
          prof.p1[h][i] = static_cast<double>(sn.action_counts_p1[i]) / sn.decisions;
        for (int j = 0; j < nd.cols; ++j)
          prof.p2[h][j] = static_cast<double>(sn.action_counts_p2[j]) / sn.decisions;
      }
    } else {
      auto extract = [&](const std::variant<RegretMatchingState, Exp3State>& policy,
                         std::vector<double>& out) {
        if (std::holds_alternative<RegretMatchingState>(policy)) {
          const auto& st = std::get<RegretMatchingState>(policy);
          if (st.iterations == 0) return false;
          out = average_strategy(st).p;
        } else {
          const auto& st = std::get<Exp3State>(policy);
          if (st.iterations == 0) return false;
          out = average_strategy(st).p;
        }
        return true;
      };
      if (!sn.in_tree || !extract(sn.policy_p1, prof.p1[h]) || !extract(sn.policy_p2, prof.p2[h]))
        filled_uniform = true;
    }
    if (filled_uniform) {
      prof.p1[h].assign(nd.rows, 1.0 / nd.rows);
      prof.p2[h].assign(nd.cols, 1.0 / nd.cols);
      prof.uniform_filled.push_back(h);
    }
  }
  return prof;
}

std::vector<double> SearchTree::node_means() const {
  std::vector<double> out(nodes_.size(), 0.0);
  for (std::size_t h = 0; h < nodes_.size(); ++h)
    if (nodes_[h].visits > 0) out[h] = nodes_[h].reward_sum / static_cast<double>(nodes_[h].visits);
  return out;
}

std::vector<long> SearchTree::node_visits() const {
  std::vector<long> out(nodes_.size(), 0);
  for (std::size_t h = 0; h < nodes_.size(); ++h) out[h] = nodes_[h].visits;
  return out;
}

}  // namespace smmcts
