#include "smmcts/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smmcts {

bool MixedStrategy::is_distribution(double tol) const {
  double sum = 0.0;
  for (double x : p) {
    if (x < -tol) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tol;
}

MixedStrategy rm_strategy(const RegretMatchingState& state) {
  if (state.k < 1) throw std::invalid_argument("regret matching needs at least one action");
  double positive_sum = 0.0;
  for (double r : state.regrets) positive_sum += std::max(r, 0.0);
  MixedStrategy out;
  out.p.resize(state.k);
  if (positive_sum > 0.0) {
    for (int i = 0; i < state.k; ++i) out.p[i] = std::max(state.regrets[i], 0.0) / positive_sum;
  } else {
    std::fill(out.p.begin(), out.p.end(), 1.0 / state.k);
  }
  return out;
}

void rm_update(RegretMatchingState& state, std::span<const double> alternative_values,
               double realized, const MixedStrategy& played) {
  if (static_cast<int>(alternative_values.size()) != state.k || played.size() != state.k)
    throw std::invalid_argument("regret update length mismatch");
  for (int i = 0; i < state.k; ++i) {
    state.regrets[i] += alternative_values[i] - realized;
    state.strategy_sum[i] += played.p[i];
  }
  ++state.iterations;
}

MixedStrategy exp3_strategy(const Exp3State& state, double gamma) {
  if (state.k < 1) throw std::invalid_argument("exp3 needs at least one action");
  if (gamma <= 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must be in (0,1]");
  const double eta = gamma / state.k;
  const double shift = *std::max_element(state.reward_sums.begin(), state.reward_sums.end());
  double denom = 0.0;
  MixedStrategy out;
  out.p.resize(state.k);
  for (int i = 0; i < state.k; ++i) {
    out.p[i] = std::exp(eta * (state.reward_sums[i] - shift));
    denom += out.p[i];
  }
  for (int i = 0; i < state.k; ++i)
    out.p[i] = (1.0 - gamma) * out.p[i] / denom + gamma / state.k;
  return out;
}

void exp3_update(Exp3State& state, int chosen, double payoff, double prob_used,
                 const MixedStrategy& played) {
  if (chosen < 0 || chosen >= state.k || played.size() != state.k)
    throw std::invalid_argument("exp3 update out of range");
  if (prob_used <= 0.0) throw std::invalid_argument("prob_used must be positive");
  state.reward_sums[chosen] += payoff / prob_used;
  state.visit_counts[chosen] += 1;
  for (int i = 0; i < state.k; ++i) state.strategy_sum[i] += played.p[i];
  ++state.iterations;
}

MixedStrategy mix_exploration(const MixedStrategy& base, double gamma) {
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must be in [0,1]");
  const int k = base.size();
  MixedStrategy out;
  out.p.resize(k);
  for (int i = 0; i < k; ++i) out.p[i] = gamma / k + (1.0 - gamma) * base.p[i];
  return out;
}

MixedStrategy average_strategy(std::span<const double> strategy_sum, long iterations) {
  if (iterations < 1) throw std::invalid_argument("no iterations to average");
  MixedStrategy out;
  out.p.assign(strategy_sum.begin(), strategy_sum.end());
  double total = 0.0;
  for (double& x : out.p) {
    x /= static_cast<double>(iterations);
    total += x;
  }
  // renormalize the accumulated rounding away
  for (double& x : out.p) x /= total;
  return out;
}

MixedStrategy average_strategy(const RegretMatchingState& state) {
  return average_strategy(state.strategy_sum, state.iterations);
}

MixedStrategy average_strategy(const Exp3State& state) {
  return average_strategy(state.strategy_sum, state.iterations);
}

MixedStrategy RegretMatchingPolicy::current_law() const {
  return mix_exploration(rm_strategy(state_), gamma_);
}

int RegretMatchingPolicy::sample_action(Rng& rng) {
  law_ = current_law();
  return rng.sample(law_.p);
}

void RegretMatchingPolicy::update(const StepFeedback& fb) {
  rm_update(state_, fb.action_payoffs, fb.realized, law_);
}

MixedStrategy Exp3Policy::current_law() const { return exp3_strategy(state_, gamma_); }

int Exp3Policy::sample_action(Rng& rng) {
  law_ = current_law();
  return rng.sample(law_.p);
}

void Exp3Policy::update(const StepFeedback& fb) {
  exp3_update(state_, fb.chosen, fb.realized, law_.p[fb.chosen], law_);
}

GuaranteedExplorationWrapper::GuaranteedExplorationWrapper(std::unique_ptr<BanditPolicy> inner,
                                                           double gamma)
    : inner_(std::move(inner)), gamma_(gamma) {
  if (gamma_ <= 0.0 || gamma_ >= 1.0) throw std::invalid_argument("gamma must be in (0,1)");
}

MixedStrategy GuaranteedExplorationWrapper::current_law() const {
  MixedStrategy law = inner_->current_law();
  const int k = law.size();
  for (int i = 0; i < k; ++i) law.p[i] = gamma_ / k + (1.0 - gamma_) * law.p[i];
  return law;
}

int GuaranteedExplorationWrapper::sample_action(Rng& rng) {
  exploring_ = rng.next_unit() < gamma_;
  if (exploring_) return rng.next_below(arms());
  return inner_->sample_action(rng);
}

void GuaranteedExplorationWrapper::update(const StepFeedback& fb) {
  if (exploring_) return;  // inner state stays untouched on exploration steps
  inner_->update(fb);
}

ScheduledExplorationWrapper::ScheduledExplorationWrapper(std::unique_ptr<BanditPolicy> inner,
                                                         std::vector<long> schedule)
    : inner_(std::move(inner)), schedule_(std::move(schedule)) {
  long prev = 0;
  for (long t : schedule_) {
    if (t <= prev) throw std::invalid_argument("schedule must be strictly increasing");
    prev = t;
  }
}

bool ScheduledExplorationWrapper::next_is_scheduled() const {
  return cursor_ < schedule_.size() && schedule_[cursor_] == step_ + 1;
}

MixedStrategy ScheduledExplorationWrapper::current_law() const {
  if (next_is_scheduled()) return MixedStrategy::uniform(arms());
  return inner_->current_law();
}

int ScheduledExplorationWrapper::sample_action(Rng& rng) {
  ++step_;
  exploring_ = cursor_ < schedule_.size() && schedule_[cursor_] == step_;
  if (exploring_) {
    ++cursor_;
    return rng.next_below(arms());
  }
  return inner_->sample_action(rng);
}

void ScheduledExplorationWrapper::update(const StepFeedback& fb) {
  if (exploring_) return;
  inner_->update(fb);
}

}  // namespace smmcts
