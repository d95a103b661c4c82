#include "smmcts/repeated.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "smmcts/solver.hpp"

namespace smmcts {

namespace {

constexpr double kIdentityTol = 1e-9;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

double RepeatedGameTrace::max_cumulative_payoff(int player) const {
  if (player == 1) {
    double best = -std::numeric_limits<double>::infinity();
    for (double s : row_sums) best = std::max(best, s);
    return best;
  }
  // player 2's payoff for fixed column j is t - sum_s a(i_s, j)
  double best = -std::numeric_limits<double>::infinity();
  for (double s : col_sums) best = std::max(best, t - s);
  return best;
}

double RepeatedGameTrace::average_regret(int player) const {
  if (t == 0) return 0.0;
  // computed as a difference of identically-accumulated sums so that a
  // constant matrix yields exactly zero
  if (player == 1) {
    double best = -std::numeric_limits<double>::infinity();
    for (double s : row_sums) best = std::max(best, s);
    return (best - payoff_sum) / t;
  }
  double worst = std::numeric_limits<double>::infinity();
  for (double s : col_sums) worst = std::min(worst, s);
  return (payoff_sum - worst) / t;
}

MixedStrategy RepeatedGameTrace::empirical_frequencies(int player) const {
  const auto& counts = player == 1 ? count_p1 : count_p2;
  MixedStrategy out;
  out.p.resize(counts.size());
  for (std::size_t a = 0; a < counts.size(); ++a)
    out.p[a] = static_cast<double>(counts[a]) / t;
  return out;
}

MixedStrategy RepeatedGameTrace::average_strategy(int player) const {
  const auto& sums = player == 1 ? sigma_sum_1 : sigma_sum_2;
  return smmcts::average_strategy({sums.data(), sums.size()}, t);
}

TraceCheckpoint RepeatedGameTrace::make_checkpoint() const {
  TraceCheckpoint cp;
  cp.t = t;
  cp.g = payoff_sum / t;
  cp.r1 = average_regret(1);
  cp.r2 = average_regret(2);
  cp.g_clean = clean_payoff_sum / t;
  double best = -std::numeric_limits<double>::infinity();
  for (double s : clean_row_sums) best = std::max(best, s);
  cp.clean_gmax_row = best / t;
  double worst = std::numeric_limits<double>::infinity();
  for (double s : clean_col_sums) worst = std::min(worst, s);
  cp.clean_gmin_col = worst / t;
  cp.sigma_hat_1 = empirical_frequencies(1).p;
  cp.sigma_hat_2 = empirical_frequencies(2).p;
  cp.sigma_bar_1 = average_strategy(1).p;
  cp.sigma_bar_2 = average_strategy(2).p;
  cp.last_i = last_i;
  cp.last_j = last_j;
  cp.last_payoff = last_payoff;
  return cp;
}

void ErrorModel::fill_observed(long step, Rng& model_rng, MatrixGame& out) const {
  out.rows = base.rows;
  out.cols = base.cols;
  out.payoff.resize(base.payoff.size());
  switch (family) {
    case Family::DecayingUniform: {
      const double amp = step < onset ? std::min(3.0 * eta, 0.3) : 0.9 * eta;
      for (std::size_t k = 0; k < base.payoff.size(); ++k) {
        const double noise = amp * (2.0 * model_rng.next_unit() - 1.0);
        out.payoff[k] = clamp01(base.payoff[k] + noise);
      }
      break;
    }
    case Family::SquareWave: {
      const double wave = (step / wave_period) % 2 == 0 ? 1.0 : -1.0;
      for (int i = 0; i < base.rows; ++i) {
        for (int j = 0; j < base.cols; ++j) {
          const double sign = (i + j) % 2 == 0 ? wave : -wave;
          out.at(i, j) = clamp01(base.at(i, j) + 0.9 * eta * sign);
        }
      }
      break;
    }
  }
}

namespace {

RepeatedGameTrace play_core(const MatrixGame& base, const ErrorModel* model, BanditPolicy& p1,
                            BanditPolicy& p2, const RepeatedConfig& cfg) {
  if (p1.arms() != base.rows || p2.arms() != base.cols)
    throw std::invalid_argument("policy size does not match the matrix");
  if (cfg.horizon < 1) throw std::invalid_argument("horizon must be >= 1");

  RepeatedGameTrace trace;
  trace.m = base.rows;
  trace.n = base.cols;
  trace.eta = model ? model->eta : 0.0;
  trace.record_steps = cfg.record_steps;
  trace.row_sums.assign(base.rows, 0.0);
  trace.col_sums.assign(base.cols, 0.0);
  trace.clean_row_sums.assign(base.rows, 0.0);
  trace.clean_col_sums.assign(base.cols, 0.0);
  trace.count_p1.assign(base.rows, 0);
  trace.count_p2.assign(base.cols, 0);
  trace.joint_counts.assign(static_cast<std::size_t>(base.rows) * base.cols, 0);
  trace.sigma_sum_1.assign(base.rows, 0.0);
  trace.sigma_sum_2.assign(base.cols, 0.0);

  Rng rng(cfg.seed);
  Rng model_rng(model ? derive_seed(model->seed, {0x0ddU}) : 0);
  MatrixGame observed = base;
  std::vector<double> fb1(base.rows), fb2(base.cols);

  std::vector<long> cps = cfg.checkpoints;
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  if (cps.empty() || cps.back() != cfg.horizon) cps.push_back(cfg.horizon);
  std::size_t next_cp = 0;
  while (next_cp < cps.size() && cps[next_cp] < 1) ++next_cp;

  for (long s = 1; s <= cfg.horizon; ++s) {
    if (model) {
      model->fill_observed(s, model_rng, observed);
      if (s >= model->onset) {
        for (std::size_t k = 0; k < base.payoff.size(); ++k) {
          const double diff = std::abs(observed.payoff[k] - base.payoff[k]);
          if (!(diff < model->eta || diff == 0.0))
            throw std::runtime_error("error model violated its own eta bound");
        }
      }
    }
    const MatrixGame& played = model ? observed : base;

    const MixedStrategy law1 = p1.current_law();
    const MixedStrategy law2 = p2.current_law();
    for (int i = 0; i < base.rows; ++i) trace.sigma_sum_1[i] += law1.p[i];
    for (int j = 0; j < base.cols; ++j) trace.sigma_sum_2[j] += law2.p[j];

    const int i = p1.sample_action(rng);
    const int j = p2.sample_action(rng);
    const double a_obs = played.at(i, j);
    const double a_clean = base.at(i, j);

    ++trace.t;
    trace.payoff_sum += a_obs;
    trace.clean_payoff_sum += a_clean;
    for (int r = 0; r < base.rows; ++r) {
      trace.row_sums[r] += played.at(r, j);
      trace.clean_row_sums[r] += base.at(r, j);
    }
    for (int c = 0; c < base.cols; ++c) {
      trace.col_sums[c] += played.at(i, c);
      trace.clean_col_sums[c] += base.at(i, c);
    }
    ++trace.count_p1[i];
    ++trace.count_p2[j];
    ++trace.joint_counts[static_cast<std::size_t>(i) * base.cols + j];
    trace.last_i = i;
    trace.last_j = j;
    trace.last_payoff = a_obs;
    if (trace.record_steps)
      trace.steps.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j), a_obs,
                             a_clean});

    for (int r = 0; r < base.rows; ++r) fb1[r] = played.at(r, j);
    p1.update({{fb1.data(), fb1.size()}, a_obs, i});
    for (int c = 0; c < base.cols; ++c) fb2[c] = 1.0 - played.at(i, c);
    p2.update({{fb2.data(), fb2.size()}, 1.0 - a_obs, j});

    while (next_cp < cps.size() && cps[next_cp] == s) {
      trace.checkpoints.push_back(trace.make_checkpoint());
      ++next_cp;
    }
  }
  return trace;
}

}  // namespace

RepeatedGameTrace play_repeated(const MatrixGame& m, BanditPolicy& p1, BanditPolicy& p2,
                                const RepeatedConfig& cfg) {
  return play_core(m, nullptr, p1, p2, cfg);
}

RepeatedGameTrace play_with_error(const ErrorModel& model, BanditPolicy& p1, BanditPolicy& p2,
                                  const RepeatedConfig& cfg) {
  return play_core(model.base, &model, p1, p2, cfg);
}

namespace {

GapPair gaps_from_frequencies(std::span<const double> sigma_hat_1,
                              std::span<const double> sigma_hat_2, const MatrixGame& m,
                              double value, double clean_gmax_row, double clean_gmin_col) {
  double br1 = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m.rows; ++i) {
    double v = 0.0;
    for (int j = 0; j < m.cols; ++j) v += m.at(i, j) * sigma_hat_2[j];
    br1 = std::max(br1, v);
  }
  double br2 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m.cols; ++j) {
    double v = 0.0;
    for (int i = 0; i < m.rows; ++i) v += m.at(i, j) * sigma_hat_1[i];
    br2 = std::min(br2, v);
  }
  // the bookkeeping identity u(br, sigma_hat_2) = g_max(t) on clean payoffs
  if (std::abs(br1 - clean_gmax_row) > kIdentityTol ||
      std::abs(br2 - clean_gmin_col) > kIdentityTol)
    throw std::logic_error("g_max identity violated: trace bookkeeping is broken");
  return {br1 - value, value - br2};
}

}  // namespace

GapPair equilibrium_gap(const RepeatedGameTrace& trace, const MatrixGame& m) {
  if (trace.t < 1) throw std::invalid_argument("empty trace");
  const double value = solve_matrix(m).value;
  const MixedStrategy s1 = trace.empirical_frequencies(1);
  const MixedStrategy s2 = trace.empirical_frequencies(2);
  double gmax = -std::numeric_limits<double>::infinity();
  for (double s : trace.clean_row_sums) gmax = std::max(gmax, s);
  double gmin = std::numeric_limits<double>::infinity();
  for (double s : trace.clean_col_sums) gmin = std::min(gmin, s);
  return gaps_from_frequencies({s1.p.data(), s1.p.size()}, {s2.p.data(), s2.p.size()}, m, value,
                               gmax / trace.t, gmin / trace.t);
}

GapPair equilibrium_gap(const TraceCheckpoint& cp, const MatrixGame& m, double value) {
  return gaps_from_frequencies({cp.sigma_hat_1.data(), cp.sigma_hat_1.size()},
                               {cp.sigma_hat_2.data(), cp.sigma_hat_2.size()}, m, value,
                               cp.clean_gmax_row, cp.clean_gmin_col);
}

double strategy_distance(const RepeatedGameTrace& trace) {
  if (trace.t < 1) throw std::invalid_argument("empty trace");
  double worst = 0.0;
  for (int i = 0; i < trace.m; ++i)
    worst = std::max(worst, std::abs(static_cast<double>(trace.count_p1[i]) / trace.t -
                                     trace.sigma_sum_1[i] / trace.t));
  for (int j = 0; j < trace.n; ++j)
    worst = std::max(worst, std::abs(static_cast<double>(trace.count_p2[j]) / trace.t -
                                     trace.sigma_sum_2[j] / trace.t));
  return worst;
}

double strategy_distance(const TraceCheckpoint& cp) {
  double worst = 0.0;
  for (std::size_t i = 0; i < cp.sigma_hat_1.size(); ++i)
    worst = std::max(worst, std::abs(cp.sigma_hat_1[i] - cp.sigma_bar_1[i]));
  for (std::size_t j = 0; j < cp.sigma_hat_2.size(); ++j)
    worst = std::max(worst, std::abs(cp.sigma_hat_2[j] - cp.sigma_bar_2[j]));
  return worst;
}

std::optional<long> check_eps_equilibrium_onset(const RepeatedGameTrace& trace,
                                                const MatrixGame& m, double eps, double delta) {
  if (eps <= 0.0 || delta <= 0.0) throw std::invalid_argument("eps and delta must be positive");
  const double c = trace.eta / eps;
  const double bound = 4.0 * (c + 1.0) * eps + delta;
  const double value = solve_matrix(m).value;
  std::optional<long> onset;
  for (const TraceCheckpoint& cp : trace.checkpoints) {
    const GapPair g = equilibrium_gap(cp, m, value);
    if (std::max(g.gap1, g.gap2) <= bound) {
      if (!onset) onset = cp.t;
    } else {
      onset.reset();
    }
  }
  return onset;
}

}  // namespace smmcts
