#pragma once

#include <memory>
#include <span>
#include <vector>

#include "smmcts/rng.hpp"

namespace smmcts {

struct MixedStrategy {
  std::vector<double> p;

  MixedStrategy() = default;
  explicit MixedStrategy(std::vector<double> probs) : p(std::move(probs)) {}
  static MixedStrategy uniform(int k) { return MixedStrategy(std::vector<double>(k, 1.0 / k)); }

  int size() const { return static_cast<int>(p.size()); }
  double operator[](int i) const { return p[i]; }
  bool is_distribution(double tol = 1e-9) const;
};

// Cumulative-regret state of regret matching at one decision point.
// strategy_sum accumulates the mixed strategies actually played, for
// average-strategy extraction.
struct RegretMatchingState {
  RegretMatchingState() = default;
  explicit RegretMatchingState(int actions)
      : k(actions), regrets(actions, 0.0), strategy_sum(actions, 0.0) {}

  int k = 0;
  std::vector<double> regrets;
  std::vector<double> strategy_sum;
  long iterations = 0;
};

// Exp3 state: importance-weighted reward-sum estimates and per-action visit
// counts.
struct Exp3State {
  Exp3State() = default;
  explicit Exp3State(int actions)
      : k(actions), reward_sums(actions, 0.0), visit_counts(actions, 0),
        strategy_sum(actions, 0.0) {}

  int k = 0;
  std::vector<double> reward_sums;
  std::vector<long> visit_counts;
  std::vector<double> strategy_sum;
  long iterations = 0;
};

// Regret-matching strategy: probability proportional to positive regret,
// uniform when no regret is positive. This is the unmixed strategy;
// exploration is added separately by mix_exploration.
MixedStrategy rm_strategy(const RegretMatchingState& state);

// Adds the per-action regret increments (alternative - realized), records the
// strategy actually played, and advances the iteration count.
void rm_update(RegretMatchingState& state, std::span<const double> alternative_values,
               double realized, const MixedStrategy& played);

// Exp3 sampling distribution with eta = gamma/k. Reward sums are shifted by
// their maximum before exponentiation, which leaves the distribution
// unchanged but keeps exp() finite. Exploration is built in; do not mix
// again.
MixedStrategy exp3_strategy(const Exp3State& state, double gamma);

// prob_used must be the probability with which `chosen` was actually sampled.
void exp3_update(Exp3State& state, int chosen, double payoff, double prob_used,
                 const MixedStrategy& played);

// gamma/k + (1-gamma) * base, elementwise. Applied to regret matching only.
MixedStrategy mix_exploration(const MixedStrategy& base, double gamma);

MixedStrategy average_strategy(std::span<const double> strategy_sum, long iterations);
MixedStrategy average_strategy(const RegretMatchingState& state);
MixedStrategy average_strategy(const Exp3State& state);

// Feedback for one step of a repeated game. Full-information policies consume
// the whole payoff vector (payoff had each own action been played against the
// opponent's realized action); bandit policies use only the realized entry.
struct StepFeedback {
  std::span<const double> action_payoffs;
  double realized = 0.0;
  int chosen = 0;
};

// A selection policy driven one step at a time: query the sampling law,
// sample, then feed back the observed payoffs. current_law() is pure; the
// marginal law it reports already includes any exploration mixing or wrapper
// coins. Instances are single-owner and carry their own per-step flags.
class BanditPolicy {
 public:
  virtual ~BanditPolicy() = default;
  virtual int arms() const = 0;
  virtual MixedStrategy current_law() const = 0;
  virtual int sample_action(Rng& rng) = 0;
  virtual void update(const StepFeedback& fb) = 0;
};

class RegretMatchingPolicy : public BanditPolicy {
 public:
  RegretMatchingPolicy(int actions, double gamma) : state_(actions), gamma_(gamma) {}

  int arms() const override { return state_.k; }
  MixedStrategy current_law() const override;
  int sample_action(Rng& rng) override;
  void update(const StepFeedback& fb) override;
  const RegretMatchingState& state() const { return state_; }

 private:
  RegretMatchingState state_;
  double gamma_;
  MixedStrategy law_;
};

class Exp3Policy : public BanditPolicy {
 public:
  Exp3Policy(int actions, double gamma) : state_(actions), gamma_(gamma) {}

  int arms() const override { return state_.k; }
  MixedStrategy current_law() const override;
  int sample_action(Rng& rng) override;
  void update(const StepFeedback& fb) override;
  const Exp3State& state() const { return state_; }

 private:
  Exp3State state_;
  double gamma_;
  MixedStrategy law_;
};

// With probability gamma the step is a uniform exploration that leaves the
// inner policy untouched; otherwise the step is delegated entirely.
class GuaranteedExplorationWrapper : public BanditPolicy {
 public:
  GuaranteedExplorationWrapper(std::unique_ptr<BanditPolicy> inner, double gamma);

  int arms() const override { return inner_->arms(); }
  MixedStrategy current_law() const override;
  int sample_action(Rng& rng) override;
  void update(const StepFeedback& fb) override;
  const BanditPolicy& inner() const { return *inner_; }

 private:
  std::unique_ptr<BanditPolicy> inner_;
  double gamma_;
  bool exploring_ = false;
};

// Explores uniformly exactly at the scheduled step numbers (1-based),
// delegating everywhere else. Consumes no randomness beyond the inner
// policy's own draws, so an empty schedule reproduces the unwrapped policy's
// action sequence under the same stream.
class ScheduledExplorationWrapper : public BanditPolicy {
 public:
  ScheduledExplorationWrapper(std::unique_ptr<BanditPolicy> inner, std::vector<long> schedule);

  int arms() const override { return inner_->arms(); }
  MixedStrategy current_law() const override;
  int sample_action(Rng& rng) override;
  void update(const StepFeedback& fb) override;
  const BanditPolicy& inner() const { return *inner_; }

 private:
  bool next_is_scheduled() const;

  std::unique_ptr<BanditPolicy> inner_;
  std::vector<long> schedule_;
  std::size_t cursor_ = 0;
  long step_ = 0;
  bool exploring_ = false;
};

}  // namespace smmcts
