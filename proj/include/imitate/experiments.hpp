#pragma once

// The reference experiments shared by the acceptance binary and the
// `reproduce` subcommand. Every experiment is deterministic: seeds are pinned
// here and the results do not depend on thread count.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "imitate/dynamics.hpp"
#include "imitate/model.hpp"
#include "imitate/policies.hpp"
#include "imitate/sim.hpp"

namespace imitate {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;
  std::string expected;
};

namespace detail {

inline std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

template <class T>
std::string fmt_list(const std::vector<T>& v, int precision = 6) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(static_cast<double>(v[i]), precision);
  }
  return s + "]";
}

inline std::string fmt_opt(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : std::string("none");
}

}  // namespace detail

inline ChannelModel reference_channels() { return ChannelModel({0.3, 0.5, 0.8}); }

// --- 1 -----------------------------------------------------------------------

inline CriterionResult check_nash_closed_form() {
  const auto x = nash_equilibrium(reference_channels());
  const std::vector<double> want{0.1875, 0.3125, 0.5};
  const double err = sup_distance(x.values(), want);
  return {1, "NE closed form", err <= 1e-12,
          "x* = " + detail::fmt_list(x.vec(), 17) + ", error " + detail::fmt(err),
          "[0.1875, 0.3125, 0.5] within 1e-12"};
}

// --- 2 -----------------------------------------------------------------------

inline constexpr std::uint64_t kEquilibriumSeed = 20240501;

inline CriterionResult check_finite_equilibrium(std::size_t threads = 0) {
  SimConfig cfg = reference_config();
  cfg.runs = 100;
  cfg.seed = kEquilibriumSeed;
  cfg.threads = threads;
  const auto stats = run_batch(cfg);
  const std::vector<int> target{9, 16, 25};
  bool near = stats.final_counts_mode.size() == target.size();
  for (std::size_t i = 0; near && i < target.size(); ++i) {
    near = std::abs(stats.final_counts_mode[i] - target[i]) <= 2;
  }
  const bool ok = near && stats.converged_runs > 0 && stats.converged_all_epsilon_ne;
  return {2, "finite-population equilibrium", ok,
          "mode " + detail::fmt_list(stats.final_counts_mode) + ", converged " +
              std::to_string(stats.converged_runs) + "/" + std::to_string(stats.runs) +
              ", all converged 0.02-NE: " + (stats.converged_all_epsilon_ne ? "yes" : "no"),
          "mode within +-2 of [9, 16, 25]; every converged run a 0.02-NE"};
}

// --- 3 -----------------------------------------------------------------------

inline constexpr std::uint64_t kFairnessSeed = 20240502;
inline constexpr double kFairnessLevel = 0.982;

/// Channel-constrained config used for the fairness comparison. Both rules
/// use sigma = 1, the imitation factor of the mean-field models.
inline SimConfig constrained_config(Policy policy) {
  SimConfig cfg = reference_config();
  cfg.policy = policy;
  cfg.params = PolicyParams::defaults(policy, Scope::same_channel);
  cfg.params.sigma = 1.0;
  return cfg;
}

/// First iteration at which the series reaches `level`.
inline std::optional<std::size_t> first_crossing(const std::vector<double>& series, double level) {
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (series[t] >= level) return t;
  }
  return std::nullopt;
}

struct FairnessOutcome {
  std::optional<std::size_t> pisap_crossing;
  std::optional<std::size_t> disap_crossing;
  std::vector<double> pisap_series;
  std::vector<double> disap_series;
};

inline FairnessOutcome fairness_experiment(std::size_t runs, std::size_t iterations,
                                           std::size_t threads = 0) {
  FairnessOutcome out;
  for (Policy p : {Policy::pisap, Policy::disap}) {
    SimConfig cfg = constrained_config(p);
    cfg.runs = runs;
    cfg.max_iterations = iterations;
    cfg.stop_on_convergence = false;
    cfg.seed = kFairnessSeed;
    cfg.threads = threads;
    auto series = run_batch(cfg).mean_fairness;
    auto crossing = first_crossing(series, kFairnessLevel);
    if (p == Policy::pisap) {
      out.pisap_series = std::move(series);
      out.pisap_crossing = crossing;
    } else {
      out.disap_series = std::move(series);
      out.disap_crossing = crossing;
    }
  }
  return out;
}

inline CriterionResult check_fairness(std::size_t threads = 0) {
  const auto f = fairness_experiment(1000, 300, threads);
  const bool ok = f.pisap_crossing && f.disap_crossing && *f.pisap_crossing <= 250 &&
                  *f.disap_crossing <= 150 && *f.disap_crossing < *f.pisap_crossing;
  return {3, "fairness", ok,
          "Jain >= 0.982 first at PISAP " + detail::fmt_opt(f.pisap_crossing) + ", DISAP " +
              detail::fmt_opt(f.disap_crossing),
          "PISAP <= 250, DISAP <= 150, DISAP strictly earlier"};
}

// --- 4 -----------------------------------------------------------------------

inline std::vector<Mixture> reference_starts() {
  return {Mixture::uniform(3), Mixture({0.6, 0.2, 0.2}), Mixture({0.05, 0.05, 0.9}),
          Mixture({0.9, 0.05, 0.05})};
}

struct ClosedFormErrors {
  double replicator = 0.0;
  double aggregate = 0.0;
};

inline ClosedFormErrors closed_form_errors(const Mixture& x0, const DynamicsConfig& cfg,
                                           const ChannelModel& channels) {
  ClosedFormErrors e;
  const auto rep = integrate(
      [&](std::span<const double> x) { return replicator_rhs(x, cfg, channels); }, x0, cfg);
  const auto agg = integrate(
      [&](std::span<const double> x) { return aggregate_monotone_rhs(x, cfg, channels); }, x0, cfg);
  for (const auto& p : rep) {
    e.replicator = std::max(
        e.replicator, sup_distance(p.x.values(), replicator_closed_form(x0, p.t, cfg, channels).values()));
  }
  for (const auto& p : agg) {
    e.aggregate = std::max(
        e.aggregate, sup_distance(p.x.values(), aggregate_closed_form(x0, p.t, cfg, channels).values()));
  }
  return e;
}

inline CriterionResult check_closed_forms() {
  const auto channels = reference_channels();
  const DynamicsConfig cfg;
  ClosedFormErrors worst;
  for (const auto& x0 : reference_starts()) {
    const auto e = closed_form_errors(x0, cfg, channels);
    worst.replicator = std::max(worst.replicator, e.replicator);
    worst.aggregate = std::max(worst.aggregate, e.aggregate);
  }
  const bool ok = worst.replicator < 1e-8 && worst.aggregate < 1e-8;
  return {4, "closed form vs RK4", ok,
          "max error replicator " + detail::fmt(worst.replicator) + ", aggregate " +
              detail::fmt(worst.aggregate),
          "< 1e-8 over t in [0, 100], dt = 0.01"};
}

// --- 5 -----------------------------------------------------------------------

inline constexpr std::uint64_t kContractionSeed = 20240505;

inline Mixture random_interior(Rng& rng, std::size_t c) {
  std::vector<double> x(c);
  std::exponential_distribution<double> e(1.0);
  for (auto& v : x) v = e(rng) + 1e-6;
  return Mixture::normalized(std::move(x));
}

inline CriterionResult check_contraction() {
  const auto channels = reference_channels();
  const DynamicsConfig cfg;
  const double norm = inf_norm(double_replicator_jacobian(cfg, channels));
  const double analytic = 1.0 - channels.total() / cfg.n_sus;
  const auto ne = nash_equilibrium(channels);
  Rng rng(kContractionSeed);
  std::size_t converged = 0, worst_iters = 0;
  for (int s = 0; s < 100; ++s) {
    Mixture x = random_interior(rng, channels.size());
    std::size_t k = 0;
    while (sup_distance(x.values(), ne.values()) > 1e-9 && k < 100000) {
      x = double_replicator_step(x, cfg, channels).x;
      ++k;
    }
    if (sup_distance(x.values(), ne.values()) <= 1e-9) ++converged;
    worst_iters = std::max(worst_iters, k);
  }
  const bool ok = std::abs(norm - 0.968) <= 1e-12 && std::abs(norm - analytic) <= 1e-12 &&
                  converged == 100;
  return {5, "contraction", ok,
          "||J||_inf = " + detail::fmt(norm, 12) + ", " + std::to_string(converged) +
              "/100 starts within 1e-9 of x* (at most " + std::to_string(worst_iters) +
              " iterations)",
          "||J||_inf = 0.968; all 100 starts converge"};
}

// --- 6 -----------------------------------------------------------------------

inline constexpr std::size_t kApproximationIterations = 300;

inline double approximation_gap(Policy policy, std::size_t iterations) {
  const auto channels = reference_channels();
  const DynamicsConfig cfg;
  const auto u = Mixture::uniform(channels.size());
  const auto exact = constrained_trajectory(policy, u, u, iterations, cfg, channels);
  const auto approx = interleaved_trajectory(policy, u, u, iterations, cfg, channels);
  double gap = 0.0;
  for (std::size_t t = 0; t < exact.size(); ++t) {
    gap = std::max(gap, sup_distance(exact[t].values(), approx[t].values()));
  }
  return gap;
}

inline CriterionResult check_approximation() {
  const double pi = approximation_gap(Policy::pisap, kApproximationIterations);
  const double di = approximation_gap(Policy::disap, kApproximationIterations);
  return {6, "approximation fidelity", pi < 0.05 && di < 0.05,
          "sup-norm gap PI " + detail::fmt(pi) + ", DI " + detail::fmt(di) + " over " +
              std::to_string(kApproximationIterations) + " iterations",
          "< 0.05 from the uniform start"};
}

// --- 7 -----------------------------------------------------------------------

inline constexpr std::uint64_t kConcentrationSeed = 20240507;
inline constexpr double kConcentrationDelta = 0.05;

/// Starting point of the concentration experiment: shares x(0) at iteration
/// 0 and x(1) at iteration 1 with independent choices, so n_j^l = N x1_j x0_l.
struct ConcentrationSetup {
  NetworkState state;       // iteration 1 with full history
  std::vector<double> payoffs_now;
  PolicyParams params;
  DynamicsConfig dynamics;
  Mixture x0, x1;
  Mixture mean_field_x2;    // the exact constrained map's prediction
};

inline ConcentrationSetup concentration_setup(int n_sus) {
  const auto channels = reference_channels();
  const Mixture x0({0.6, 0.2, 0.2}), x1({0.2, 0.2, 0.6});
  const std::size_t c = channels.size();
  ConcentrationSetup s{{}, {}, PolicyParams::defaults(Policy::pisap, Scope::same_channel), {},
                       x0, x1, {}};
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t l = 0; l < c; ++l) {
      const double share = n_sus * x1[j] * x0[l];
      const auto count = static_cast<std::size_t>(std::llround(share));
      if (std::abs(share - static_cast<double>(count)) > 1e-9) {
        throw std::invalid_argument("N x1_j x0_l must be integral");
      }
      s.state.channel_now.insert(s.state.channel_now.end(), count, j);
      s.state.channel_prev.insert(s.state.channel_prev.end(), count, l);
    }
  }
  s.state.payoff_prev = expected_payoffs(channels, s.state.channel_prev);
  s.state.iteration = 1;
  s.payoffs_now = expected_payoffs(channels, s.state.channel_now);
  // Payoffs scale like 1/N; scaling sigma by the largest one keeps the
  // switching probabilities, and therefore the mean field, independent of N.
  const double omega_n = *std::max_element(s.state.payoff_prev.begin(), s.state.payoff_prev.end());
  s.params.sigma = 0.5 / omega_n;
  s.params.omega = omega_n;
  s.params.epsilon_u = 0.0;
  s.dynamics.n_sus = n_sus;
  s.dynamics.sigma = s.params.sigma;
  s.dynamics.omega = omega_n;
  s.mean_field_x2 = constrained_pi_map(MigrationMatrix::independent(x1, x0), x0, s.dynamics,
                                       channels).x;
  return s;
}

struct ConcentrationPoint {
  int n_sus = 0;
  double exceed_probability = 0.0;  // max over channels
  double bound = 0.0;               // C / (N delta)^2
  std::vector<double> mean_p2;
  Mixture mean_field_x2;
};

inline ConcentrationPoint concentration_point(int n_sus, std::size_t seeds,
                                              std::uint64_t master = kConcentrationSeed) {
  const auto channels = reference_channels();
  const auto setup = concentration_setup(n_sus);
  const std::size_t c = channels.size();
  std::vector<std::size_t> exceed(c, 0);
  std::vector<double> mean(c, 0.0);
  for (std::size_t s = 0; s < seeds; ++s) {
    const auto next = policy_step(setup.state, setup.payoffs_now, channels, setup.params,
                                  Policy::pisap, derive_seed(master, {static_cast<std::uint64_t>(n_sus), s}));
    const auto counts = channel_counts(next.channel_now, c);
    for (std::size_t i = 0; i < c; ++i) {
      const double p = static_cast<double>(counts[i]) / n_sus;
      mean[i] += p / static_cast<double>(seeds);
      if (std::abs(p - setup.mean_field_x2[i]) > kConcentrationDelta) ++exceed[i];
    }
  }
  ConcentrationPoint out;
  out.n_sus = n_sus;
  out.exceed_probability =
      static_cast<double>(*std::max_element(exceed.begin(), exceed.end())) / static_cast<double>(seeds);
  const double nd = n_sus * kConcentrationDelta;
  out.bound = static_cast<double>(c) / (nd * nd);
  out.mean_p2 = std::move(mean);
  out.mean_field_x2 = setup.mean_field_x2;
  return out;
}

inline CriterionResult check_concentration() {
  std::vector<ConcentrationPoint> pts;
  for (int n : {50, 200, 800}) pts.push_back(concentration_point(n, 500));
  bool ok = true;
  std::string measured;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k > 0 && pts[k].exceed_probability > pts[k - 1].exceed_probability) ok = false;
    if (!(pts[k].exceed_probability < pts[k].bound)) ok = false;
    if (k) measured += "; ";
    measured += "N=" + std::to_string(pts[k].n_sus) + ": " +
                detail::fmt(pts[k].exceed_probability) + " (bound " + detail::fmt(pts[k].bound) + ")";
  }
  return {7, "concentration", ok, measured,
          "P(|p_i(2) - x_i(2)| > 0.05) nonincreasing in N and below C/(N delta)^2"};
}

// --- 8 -----------------------------------------------------------------------

inline constexpr std::uint64_t kBoundSeed = 20240508;

inline CriterionResult check_convergence_bound(std::size_t threads = 0) {
  SimConfig cfg = reference_config();
  cfg.runs = 1000;
  cfg.seed = kBoundSeed;
  cfg.threads = threads;
  const auto rep = convergence_bound_check(cfg);
  const bool ok = rep.converged_runs == rep.runs && !rep.violation && rep.converged_all_epsilon_ne;
  return {8, "convergence bound", ok,
          "max " + detail::fmt_opt(rep.empirical_max) + ", mean " + detail::fmt(rep.empirical_mean) +
              " iterations, " + std::to_string(rep.converged_runs) + "/" + std::to_string(rep.runs) +
              " converged, bound " + detail::fmt(rep.bound) +
              "; convergence is reached in a much shorter delay than the bound",
          "every run converges below N^2/(mu_min sigma epsilon_u)"};
}

// --- 9 -----------------------------------------------------------------------

struct PropertyTally {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
};

inline constexpr std::uint64_t kPropertySeed = 20240509;
inline constexpr std::size_t kPropertyCases = 10000;

namespace detail {

inline ChannelModel random_channels(Rng& rng, std::size_t max_c = 5) {
  const std::size_t c = 2 + rng.below(max_c - 1);
  std::vector<double> mu(c);
  for (auto& m : mu) m = 0.05 + 0.95 * rng.uniform();
  return ChannelModel(std::move(mu));
}

inline NetworkState random_state(Rng& rng, std::size_t n, std::size_t c,
                                 const ChannelModel& channels) {
  NetworkState s;
  s.channel_now.resize(n);
  s.channel_prev.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    s.channel_now[j] = rng.below(c);
    s.channel_prev[j] = rng.below(c);
  }
  s.payoff_prev = expected_payoffs(channels, s.channel_prev);
  s.iteration = 1 + rng.below(10);
  return s;
}

inline PolicyParams random_params(Rng& rng, Policy policy, Scope scope) {
  PolicyParams p = PolicyParams::defaults(policy, scope);
  p.sigma *= 0.25 + 3.75 * rng.uniform();
  p.epsilon_u = rng.below(4) == 0 ? 0.0 : 0.05 * rng.uniform();
  return p;
}

}  // namespace detail

inline std::vector<PropertyTally> property_suites(std::size_t cases = kPropertyCases,
                                                  std::uint64_t seed = kPropertySeed) {
  std::vector<PropertyTally> out;
  auto suite = [&](std::string name, std::uint64_t tag, const std::function<bool(Rng&)>& body) {
    PropertyTally t{std::move(name), cases, 0};
    for (std::size_t k = 0; k < cases; ++k) {
      Rng rng(derive_seed(seed, {tag, k}));
      if (!body(rng)) ++t.failures;
    }
    out.push_back(std::move(t));
  };

  suite("simplex conservation", 1, [](Rng& rng) {
    const auto channels = detail::random_channels(rng);
    const std::size_t c = channels.size();
    DynamicsConfig cfg;
    cfg.n_sus = 2 + static_cast<int>(rng.below(200));
    const auto x = random_interior(rng, c);
    const auto v = replicator_rhs(x.values(), cfg, channels);
    const auto w = aggregate_monotone_rhs(x.values(), cfg, channels);
    double sv = 0.0, sw = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      sv += v[i];
      sw += w[i];
    }
    const auto y = double_replicator_step(x, cfg, channels).x;
    double sy = 0.0;
    for (double yi : y.values()) sy += yi;
    const auto x1 = random_interior(rng, c);
    const auto step = constrained_pi_map(MigrationMatrix::independent(x1, x), x, cfg, channels);
    const auto s = detail::random_state(rng, static_cast<std::size_t>(cfg.n_sus), c, channels);
    const auto next = policy_step(s, channels, PolicyParams::defaults(Policy::disap, Scope::global),
                                  Policy::disap, rng());
    const auto counts = channel_counts(next.channel_now, c);
    int total = 0;
    for (int n : counts) total += n;
    return std::abs(sv) < 1e-12 && std::abs(sw) < 1e-12 && std::abs(sy - 1.0) < 1e-12 &&
           std::abs(step.m.total() - 1.0) < 1e-12 && total == cfg.n_sus;
  });

  suite("probability range", 2, [](Rng& rng) {
    PolicyParams p = detail::random_params(rng, rng.below(2) ? Policy::pisap : Policy::disap,
                                           Scope::global);
    const double u = rng.uniform(), u1 = rng.uniform(), u2 = rng.uniform();
    const auto d = pisap_decision(u, u1, 1, p);
    const auto [a, b] = disap_decision(u, 0, {std::min(u1, u2), rng.below(3)},
                                       {std::max(u1, u2), rng.below(3)}, p);
    return d.probability >= 0.0 && d.probability <= 1.0 && a.probability >= 0.0 &&
           b.probability >= 0.0 && a.probability + b.probability <= 1.0 + 1e-15;
  });

  suite("gating", 3, [](Rng& rng) {
    PolicyParams p = PolicyParams::defaults(Policy::pisap);
    p.epsilon_u = 0.01 + 0.2 * rng.uniform();
    const double u = rng.uniform();
    // Every sampled payoff is at most u + epsilon_u: nobody may move.
    const double gap = p.epsilon_u * rng.uniform();
    const double t1 = std::min(1.0, u + gap), t2 = std::min(1.0, u + p.epsilon_u * rng.uniform());
    const auto d = pisap_decision(u, t1, 1, p);
    PolicyParams q = PolicyParams::defaults(Policy::disap);
    q.epsilon_u = p.epsilon_u;
    const auto [a, b] = disap_decision(u, 0, {std::min(t1, t2), 1}, {std::max(t1, t2), 2}, q);
    return d.probability == 0.0 && a.probability == 0.0 && b.probability == 0.0;
  });

  suite("imitation only", 4, [](Rng& rng) {
    const auto channels = detail::random_channels(rng);
    const std::size_t c = channels.size();
    const std::size_t n = 2 + rng.below(60);
    const Policy policy = rng.below(2) ? Policy::pisap : Policy::disap;
    const Scope scope = rng.below(2) ? Scope::global : Scope::same_channel;
    const auto params = detail::random_params(rng, policy, scope);
    const auto s = detail::random_state(rng, n, c, channels);
    const auto u = expected_payoffs(channels, s.channel_now);
    std::vector<SuRevision> rev;
    const auto next = policy_step(s, u, channels, params, policy, rng(), &rev);
    const ImitationView view(s, u, c, scope);
    for (std::size_t j = 0; j < n; ++j) {
      bool allowed = next.channel_now[j] == view.strategy(j);
      for (std::size_t k = 0; k < rev[j].num_sampled; ++k) {
        const std::size_t peer = rev[j].sampled[k];
        allowed = allowed || (next.channel_now[j] == view.strategy(peer) &&
                              view.utility(peer) > view.utility(j) + params.epsilon_u);
      }
      if (!allowed) return false;
    }
    return true;
  });

  suite("determinism", 5, [](Rng& rng) {
    const auto channels = detail::random_channels(rng);
    const std::size_t n = 2 + rng.below(60);
    const Policy policy = rng.below(2) ? Policy::pisap : Policy::disap;
    const Scope scope = rng.below(2) ? Scope::global : Scope::same_channel;
    const auto params = detail::random_params(rng, policy, scope);
    const auto s = detail::random_state(rng, n, channels.size(), channels);
    const std::uint64_t step_seed = rng();
    return policy_step(s, channels, params, policy, step_seed) ==
           policy_step(s, channels, params, policy, step_seed);
  });

  suite("fixed points", 6, [](Rng& rng) {
    const auto channels = detail::random_channels(rng);
    const std::size_t c = channels.size();
    DynamicsConfig cfg;
    cfg.n_sus = 2 + static_cast<int>(rng.below(200));
    cfg.sigma = 0.1 + rng.uniform();
    const auto ne = nash_equilibrium(channels);
    const auto v = replicator_rhs(ne.values(), cfg, channels);
    const auto y = double_replicator_step(ne, cfg, channels).x;
    const auto z = double_aggregate_step(ne, cfg, channels).x;
    bool ok = sup_distance(y.values(), ne.values()) < 1e-12 &&
              sup_distance(z.values(), ne.values()) < 1e-12;
    for (double vi : v) ok = ok && std::abs(vi) < 1e-12;
    // An imitation-stable population never moves, whatever the draws.
    const std::size_t n = 2 + rng.below(40);
    const Policy policy = rng.below(2) ? Policy::pisap : Policy::disap;
    const Scope scope = rng.below(2) ? Scope::global : Scope::same_channel;
    auto params = detail::random_params(rng, policy, scope);
    if (rng.below(2)) params.epsilon_u = 1.0;  // guarantees a stable case
    auto s = detail::random_state(rng, n, c, channels);
    s.channel_prev = s.channel_now;
    s.payoff_prev = expected_payoffs(channels, s.channel_now);
    if (is_imitation_stable(s, channels, params, policy)) {
      const auto next = policy_step(s, channels, params, policy, rng());
      ok = ok && next.channel_now == s.channel_now;
    }
    return ok;
  });
  return out;
}

inline CriterionResult check_properties() {
  const auto tallies = property_suites();
  bool ok = true;
  std::string measured;
  for (const auto& t : tallies) {
    ok = ok && t.failures == 0 && t.cases >= 10000;
    if (!measured.empty()) measured += "; ";
    measured += t.name + " " + std::to_string(t.cases - t.failures) + "/" + std::to_string(t.cases);
  }
  return {9, "property suites", ok, measured, "no failures over >= 10^4 cases per suite"};
}

struct Criterion {
  int id;
  double runtime_limit_s;
  std::function<CriterionResult()> run;
};

inline std::vector<Criterion> all_criteria(std::size_t threads = 0) {
  return {
      {1, 0.001, [] { return check_nash_closed_form(); }},
      {2, 30.0, [threads] { return check_finite_equilibrium(threads); }},
      {3, 300.0, [threads] { return check_fairness(threads); }},
      {4, 1.0, [] { return check_closed_forms(); }},
      {5, 1.0, [] { return check_contraction(); }},
      {6, 1.0, [] { return check_approximation(); }},
      {7, 60.0, [] { return check_concentration(); }},
      {8, 300.0, [threads] { return check_convergence_bound(threads); }},
      {9, 60.0, [] { return check_properties(); }},
  };
}

}  // namespace imitate
