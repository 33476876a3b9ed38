#pragma once

// Monte Carlo engine for a finite network of SUs running PISAP or DISAP.
//
// Iteration 0 (and 1 under the channel constraint) assigns channels uniformly
// at random. Every later iteration computes payoffs, records them, checks
// imitation stability and applies one synchronous policy step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "imitate/model.hpp"
#include "imitate/parallel.hpp"
#include "imitate/policies.hpp"
#include "imitate/rng.hpp"

namespace imitate {

enum class PayoffMode { expected, stochastic };

inline std::string_view to_string(PayoffMode m) {
  return m == PayoffMode::expected ? "expected" : "stochastic";
}

/// Number of consecutive imitation-stable iterations required before a run
/// is declared converged.
inline constexpr std::size_t kConvergenceStreak = 5;

struct SimConfig {
  int n_sus = 50;
  ChannelModel channels{{0.3, 0.5, 0.8}};
  PolicyParams params = PolicyParams::defaults(Policy::pisap);
  Policy policy = Policy::pisap;
  PayoffMode payoff_mode = PayoffMode::expected;
  int slots_per_iteration = 100;  // stochastic mode only
  std::size_t max_iterations = 1000;
  std::uint64_t seed = 1;
  std::size_t runs = 1;
  bool stop_on_convergence = true;
  std::size_t threads = 0;  // batch workers, 0 = hardware concurrency

  void validate() const {
    if (n_sus < 2) throw std::invalid_argument("n_sus must be at least 2");
    if (max_iterations < 2) throw std::invalid_argument("max_iterations must be at least 2");
    if (payoff_mode == PayoffMode::stochastic && slots_per_iteration < 1) {
      throw std::invalid_argument("slots_per_iteration must be at least 1");
    }
    if (runs < 1) throw std::invalid_argument("runs must be at least 1");
    params.validate();
  }
};

/// N = 50 SUs over mu = (0.3, 0.5, 0.8), global PISAP with sigma = 1 and
/// epsilon_u = 0.01, exact expected payoffs.
inline SimConfig reference_config() { return SimConfig{}; }

struct RunTrace {
  std::vector<std::vector<int>> counts;             // [iteration][channel]
  std::vector<std::vector<double>> mean_payoff;     // [iteration][channel], NaN if empty
  std::vector<std::vector<double>> payoffs;         // [iteration][SU]
  std::optional<std::size_t> converged_at;          // first iteration of the stable streak
  NetworkState final_state;
  std::vector<double> final_payoffs;
  std::vector<double> fairness;                     // Jain index of cumulative throughput

  std::size_t iterations() const noexcept { return counts.size(); }
};

namespace detail {

enum StreamTag : std::uint64_t { kInitTag = 1, kStepTag = 2, kPrimaryUserTag = 3, kRunTag = 4 };

inline std::vector<Channel> random_assignment(int n, std::size_t c, std::uint64_t seed,
                                              std::size_t iteration) {
  Rng rng(derive_seed(seed, {kInitTag, iteration}));
  std::vector<Channel> a(static_cast<std::size_t>(n));
  for (auto& ch : a) ch = static_cast<Channel>(rng.below(c));
  return a;
}

// All SUs on a channel see the same primary-user activity in every slot.
inline std::vector<double> stochastic_payoffs(const SimConfig& cfg,
                                              std::span<const Channel> assignment,
                                              std::uint64_t seed, std::size_t iteration) {
  const std::size_t c = cfg.channels.size();
  const auto n = channel_counts(assignment, c);
  std::vector<double> per_channel(c, 0.0);
  for (std::size_t ch = 0; ch < c; ++ch) {
    if (n[ch] == 0) continue;
    Rng rng(derive_seed(seed, {kPrimaryUserTag, iteration, ch}));
    std::binomial_distribution<int> free_slots(cfg.slots_per_iteration, cfg.channels.mu(ch));
    per_channel[ch] = static_cast<double>(free_slots(rng)) /
                      (static_cast<double>(cfg.slots_per_iteration) * n[ch]);
  }
  std::vector<double> u(assignment.size());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = per_channel[assignment[j]];
  return u;
}

inline std::vector<double> payoffs_at(const SimConfig& cfg, std::span<const Channel> assignment,
                                      std::uint64_t seed, std::size_t iteration) {
  return cfg.payoff_mode == PayoffMode::expected
             ? expected_payoffs(cfg.channels, assignment)
             : stochastic_payoffs(cfg, assignment, seed, iteration);
}

inline void record(RunTrace& trace, std::span<const Channel> assignment,
                   std::vector<double> payoffs, std::size_t c) {
  const auto n = channel_counts(assignment, c);
  std::vector<double> mean(c, 0.0);
  for (std::size_t j = 0; j < assignment.size(); ++j) mean[assignment[j]] += payoffs[j];
  for (std::size_t ch = 0; ch < c; ++ch) {
    mean[ch] = n[ch] > 0 ? mean[ch] / n[ch] : std::numeric_limits<double>::quiet_NaN();
  }
  trace.counts.push_back(n);
  trace.mean_payoff.push_back(std::move(mean));
  trace.payoffs.push_back(std::move(payoffs));
}

}  // namespace detail

/// Jain index of every SU's cumulative throughput after each iteration.
inline std::vector<double> fairness_series(const RunTrace& trace) {
  if (trace.payoffs.empty()) throw std::invalid_argument("fairness of an empty trace");
  std::vector<double> cumulative(trace.payoffs.front().size(), 0.0);
  std::vector<double> series;
  series.reserve(trace.payoffs.size());
  for (const auto& u : trace.payoffs) {
    for (std::size_t j = 0; j < u.size(); ++j) cumulative[j] += u[j];
    const bool any = std::any_of(cumulative.begin(), cumulative.end(),
                                 [](double v) { return v > 0.0; });
    series.push_back(any ? jain_index(cumulative) : 1.0);
  }
  return series;
}

/// Runs from an explicit starting state. Under the channel constraint the
/// state must carry one iteration of history (iteration >= 1).
inline RunTrace run_from(const SimConfig& cfg, NetworkState state, std::uint64_t seed,
                         RunTrace trace = {}) {
  cfg.validate();
  if (state.size() != static_cast<std::size_t>(cfg.n_sus)) {
    throw std::invalid_argument("initial state size differs from n_sus");
  }
  const std::size_t c = cfg.channels.size();
  std::size_t streak = 0;
  std::vector<double> u;
  for (std::size_t t = state.iteration;; ++t) {
    u = detail::payoffs_at(cfg, state.channel_now, seed, t);
    detail::record(trace, state.channel_now, u, c);
    const bool stable = is_imitation_stable(state, u, cfg.channels, cfg.params, cfg.policy);
    streak = stable ? streak + 1 : 0;
    if (streak >= kConvergenceStreak && !trace.converged_at) {
      trace.converged_at = t + 1 - kConvergenceStreak;
      if (cfg.stop_on_convergence) break;
    }
    if (t + 1 >= cfg.max_iterations) break;
    state = policy_step(state, u, cfg.channels, cfg.params, cfg.policy,
                        derive_seed(seed, {detail::kStepTag, t}));
  }
  trace.final_state = std::move(state);
  trace.final_payoffs = std::move(u);
  trace.fairness = fairness_series(trace);
  return trace;
}

/// One realization from a uniformly random start.
inline RunTrace run_once(const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::size_t c = cfg.channels.size();
  NetworkState s;
  s.channel_now = detail::random_assignment(cfg.n_sus, c, seed, 0);
  s.channel_prev = s.channel_now;
  s.payoff_prev.assign(s.channel_now.size(), 0.0);
  RunTrace trace;
  if (cfg.params.scope == Scope::same_channel) {
    auto u0 = detail::payoffs_at(cfg, s.channel_now, seed, 0);
    detail::record(trace, s.channel_now, u0, c);
    s.payoff_prev = std::move(u0);
    s.channel_now = detail::random_assignment(cfg.n_sus, c, seed, 1);
    s.iteration = 1;
  }
  return run_from(cfg, std::move(s), seed, std::move(trace));
}

inline std::uint64_t batch_run_seed(std::uint64_t master, std::size_t run) {
  return derive_seed(master, {detail::kRunTag, run});
}

struct RunSummary {
  std::optional<std::size_t> converged_at;
  std::vector<int> final_counts;
  bool epsilon_ne = false;        // final counts are a 2 epsilon_u Nash equilibrium
  bool imitation_stable = false;  // final state is imitation-stable
  std::vector<double> fairness;
};

struct BatchStats {
  std::size_t runs = 0;
  std::size_t converged_runs = 0;
  double converged_at_mean = std::numeric_limits<double>::quiet_NaN();
  double converged_at_stddev = std::numeric_limits<double>::quiet_NaN();
  std::optional<std::size_t> converged_at_max;
  std::vector<double> mean_fairness;  // averaged over the runs reaching each iteration
  std::map<std::vector<int>, std::size_t> final_counts_histogram;
  std::vector<int> final_counts_mode;
  bool converged_all_epsilon_ne = true;
  bool converged_all_stable = true;
  std::vector<RunSummary> per_run;
};

inline RunSummary summarize(const SimConfig& cfg, RunTrace trace) {
  RunSummary s;
  s.converged_at = trace.converged_at;
  s.final_counts = channel_counts(trace.final_state.channel_now, cfg.channels.size());
  s.epsilon_ne = epsilon_ne_check(s.final_counts, cfg.channels, 2.0 * cfg.params.epsilon_u);
  s.imitation_stable = is_imitation_stable(trace.final_state, trace.final_payoffs, cfg.channels,
                                           cfg.params, cfg.policy);
  s.fairness = std::move(trace.fairness);
  return s;
}

/// Deterministic reduction of per-run summaries, in run-index order.
inline BatchStats aggregate(std::vector<RunSummary> per_run) {
  BatchStats b;
  b.runs = per_run.size();
  double sum = 0.0, sum2 = 0.0;
  std::vector<double> fair_sum;
  std::vector<std::size_t> fair_n;
  for (const auto& r : per_run) {
    if (r.converged_at) {
      ++b.converged_runs;
      const auto v = static_cast<double>(*r.converged_at);
      sum += v;
      sum2 += v * v;
      b.converged_at_max = std::max(b.converged_at_max.value_or(0), *r.converged_at);
      b.converged_all_epsilon_ne = b.converged_all_epsilon_ne && r.epsilon_ne;
      b.converged_all_stable = b.converged_all_stable && r.imitation_stable;
    }
    ++b.final_counts_histogram[r.final_counts];
    if (r.fairness.size() > fair_sum.size()) {
      fair_sum.resize(r.fairness.size(), 0.0);
      fair_n.resize(r.fairness.size(), 0);
    }
    for (std::size_t t = 0; t < r.fairness.size(); ++t) {
      fair_sum[t] += r.fairness[t];
      ++fair_n[t];
    }
  }
  if (b.converged_runs > 0) {
    const auto k = static_cast<double>(b.converged_runs);
    b.converged_at_mean = sum / k;
    b.converged_at_stddev = std::sqrt(std::max(0.0, sum2 / k - b.converged_at_mean * b.converged_at_mean));
  }
  b.mean_fairness.resize(fair_sum.size());
  for (std::size_t t = 0; t < fair_sum.size(); ++t) b.mean_fairness[t] = fair_sum[t] / fair_n[t];
  // Ties go to the lexicographically smallest count vector (map order).
  std::size_t best = 0;
  for (const auto& [counts, hits] : b.final_counts_histogram) {
    if (hits > best) {
      best = hits;
      b.final_counts_mode = counts;
    }
  }
  b.per_run = std::move(per_run);
  return b;
}

/// cfg.runs independent realizations with seeds derived from cfg.seed by run
/// index. Results do not depend on cfg.threads.
inline BatchStats run_batch(const SimConfig& cfg) {
  cfg.validate();
  std::vector<RunSummary> per_run(cfg.runs);
  parallel_for(cfg.runs, cfg.threads, [&](std::size_t r) {
    per_run[r] = summarize(cfg, run_once(cfg, batch_run_seed(cfg.seed, r)));
  });
  return aggregate(std::move(per_run));
}

/// N^2 / (mu_min sigma epsilon_u), the order of the expected convergence time.
inline double convergence_bound(const SimConfig& cfg) {
  if (!(cfg.params.epsilon_u > 0.0)) {
    throw std::invalid_argument("convergence bound needs epsilon_u > 0");
  }
  const double n = cfg.n_sus;
  return n * n / (cfg.channels.min() * cfg.params.sigma * cfg.params.epsilon_u);
}

struct BoundReport {
  double bound = 0.0;
  std::size_t runs = 0;
  std::size_t converged_runs = 0;
  std::optional<std::size_t> empirical_max;
  double empirical_mean = std::numeric_limits<double>::quiet_NaN();
  bool violation = false;           // some converged run took longer than the bound
  bool converged_all_epsilon_ne = true;
};

inline BoundReport convergence_bound_check(const SimConfig& cfg) {
  BoundReport rep;
  rep.bound = convergence_bound(cfg);
  const auto stats = run_batch(cfg);
  rep.runs = stats.runs;
  rep.converged_runs = stats.converged_runs;
  rep.empirical_max = stats.converged_at_max;
  rep.empirical_mean = stats.converged_at_mean;
  rep.violation = stats.converged_at_max && static_cast<double>(*stats.converged_at_max) > rep.bound;
  rep.converged_all_epsilon_ne = stats.converged_all_epsilon_ne;
  return rep;
}

}  // namespace imitate
