#pragma once

// Subcommands of the imitsim tool. Each takes a resolved configuration and
// writes its artifacts under the output directory.

#include <chrono>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imitate/config.hpp"
#include "imitate/experiments.hpp"
#include "imitate/io.hpp"

namespace imitate {

inline int cmd_simulate(const RunConfig& rc, std::ostream& out) {
  const SimConfig& cfg = rc.sim;
  const auto stats = run_batch(cfg);
  const auto trace = run_once(cfg, batch_run_seed(cfg.seed, 0));
  write_file(rc.out / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, trace); });
  write_file(rc.out / "fairness.csv",
             [&](std::ostream& os) { write_fairness_csv(os, stats.mean_fairness); });
  const auto summary = summary_json(cfg, stats);
  write_file(rc.out / "summary.json", [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
  out << "simulate: " << stats.converged_runs << '/' << stats.runs << " runs converged";
  if (stats.converged_runs > 0) {
    out << ", mean iteration " << stats.converged_at_mean << ", max " << *stats.converged_at_max;
  }
  out << ", modal final counts " << summary["final_counts_mode"].dump()
      << ", epsilon-NE " << (summary["epsilon_ne"].get<bool>() ? "yes" : "no") << " -> "
      << rc.out.string() << '\n';
  return 0;
}

inline constexpr double kSettleTolerance = 1e-3;

inline json deviation_report(const RunConfig& rc, const Mixture& x0, const Mixture& x1) {
  const auto& ch = rc.sim.channels;
  const auto& cfg = rc.dynamics;
  const auto ne = nash_equilibrium(ch);
  const std::size_t iters = rc.sim.max_iterations;
  json j;
  j["iterations"] = iters;
  j["x_star"] = ne.vec();
  const auto errs = closed_form_errors(x0, cfg, ch);
  j["replicator_closed_vs_rk4"] = errs.replicator;
  j["aggregate_closed_vs_rk4"] = errs.aggregate;
  const auto gap = [](const std::vector<Mixture>& a, const std::vector<Mixture>& b) {
    double g = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) g = std::max(g, sup_distance(a[t].values(), b[t].values()));
    return g;
  };
  const auto pi = constrained_trajectory(Policy::pisap, x0, x1, iters, cfg, ch);
  j["pi_sup_norm"] = gap(pi, interleaved_trajectory(Policy::pisap, x0, x1, iters, cfg, ch));
  j["settle_tolerance"] = kSettleTolerance;
  j["settle_pi"] = optional_json(settling_index(pi, ne, kSettleTolerance));
  if (cfg.omega == 1.0 && cfg.alpha == 0.0) {
    const auto di = constrained_trajectory(Policy::disap, x0, x1, iters, cfg, ch);
    j["di_sup_norm"] = gap(di, interleaved_trajectory(Policy::disap, x0, x1, iters, cfg, ch));
    j["settle_di"] = optional_json(settling_index(di, ne, kSettleTolerance));
  } else {
    j["di_sup_norm"] = nullptr;
    j["settle_di"] = nullptr;
  }
  return j;
}

inline int cmd_dynamics(const RunConfig& rc, std::ostream& out) {
  const auto& ch = rc.sim.channels;
  const auto& cfg = rc.dynamics;
  const Mixture x0 = rc.x0.value_or(Mixture::uniform(ch.size()));
  const Mixture x1 = rc.x1.value_or(x0);
  const std::size_t iters = rc.sim.max_iterations;
  const auto dir = rc.out;

  const auto rep = integrate([&](std::span<const double> x) { return replicator_rhs(x, cfg, ch); }, x0, cfg);
  const auto agg = integrate([&](std::span<const double> x) { return aggregate_monotone_rhs(x, cfg, ch); }, x0, cfg);
  Trajectory rep_closed, agg_closed;
  for (const auto& p : rep) rep_closed.push_back({p.t, replicator_closed_form(x0, p.t, cfg, ch)});
  for (const auto& p : agg) agg_closed.push_back({p.t, aggregate_closed_form(x0, p.t, cfg, ch)});
  write_file(dir / "replicator_rk4.csv", [&](std::ostream& os) { write_trajectory_csv(os, rep); });
  write_file(dir / "replicator_closed.csv", [&](std::ostream& os) { write_trajectory_csv(os, rep_closed); });
  write_file(dir / "aggregate_rk4.csv", [&](std::ostream& os) { write_trajectory_csv(os, agg); });
  write_file(dir / "aggregate_closed.csv", [&](std::ostream& os) { write_trajectory_csv(os, agg_closed); });

  const bool di_ok = cfg.omega == 1.0 && cfg.alpha == 0.0;
  for (Policy p : {Policy::pisap, Policy::disap}) {
    if (p == Policy::disap && !di_ok) continue;
    const std::string exact = p == Policy::pisap ? "constrained_pi.csv" : "constrained_di.csv";
    const std::string approx = p == Policy::pisap ? "double_replicator.csv" : "double_aggregate.csv";
    const auto xs = constrained_trajectory(p, x0, x1, iters, cfg, ch);
    const auto ys = interleaved_trajectory(p, x0, x1, iters, cfg, ch);
    write_file(dir / exact, [&](std::ostream& os) { write_iterates_csv(os, xs); });
    write_file(dir / approx, [&](std::ostream& os) { write_iterates_csv(os, ys); });
  }
  const auto report = deviation_report(rc, x0, x1);
  write_file(dir / "deviation.json", [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  out << "dynamics: PI gap " << report["pi_sup_norm"].dump() << ", DI gap "
      << report["di_sup_norm"].dump() << ", closed-form error "
      << std::max(report["replicator_closed_vs_rk4"].get<double>(),
                  report["aggregate_closed_vs_rk4"].get<double>());
  if (!di_ok) out << " (double imitation map skipped: needs omega = 1, alpha = 0)";
  out << " -> " << dir.string() << '\n';
  return 0;
}

/// Rounds N x* to integers summing to N (largest remainder).
inline std::vector<int> round_counts(const std::vector<double>& shares, int n) {
  std::vector<int> out(shares.size());
  std::vector<std::pair<double, std::size_t>> rem;
  int used = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double v = shares[i] * n;
    out[i] = static_cast<int>(std::floor(v));
    used += out[i];
    rem.emplace_back(v - out[i], i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (int k = 0; k < n - used; ++k) ++out[rem[static_cast<std::size_t>(k)].second];
  return out;
}

inline json ne_report(const ChannelModel& channels, int n_sus) {
  const auto ne = nash_equilibrium(channels);
  std::vector<double> payoff(ne.size()), scaled(ne.size());
  for (std::size_t i = 0; i < ne.size(); ++i) {
    scaled[i] = ne[i] * n_sus;
    payoff[i] = channels.mu(i) / scaled[i];
  }
  json j;
  j["x_star"] = ne.vec();
  j["payoff"] = payoff;
  j["n_x_star"] = scaled;
  j["rounded_counts"] = round_counts(ne.vec(), n_sus);
  return j;
}

inline int cmd_ne(const RunConfig& rc, std::ostream& out) {
  out << ne_report(rc.sim.channels, rc.sim.n_sus).dump(2) << '\n';
  return 0;
}

inline int cmd_phase(const RunConfig& rc, std::ostream& out) {
  const auto portrait = phase_portrait(rc.sim.channels, rc.dynamics, rc.grid);
  write_file(rc.out / "phase_field.csv", [&](std::ostream& os) { write_phase_field_csv(os, portrait); });
  write_file(rc.out / "phase_trajectories.csv",
             [&](std::ostream& os) { write_phase_trajectories_csv(os, portrait); });
  out << "phase: rest point x_0 = " << portrait.nullcline << " -> " << rc.out.string() << '\n';
  return 0;
}

/// Runs every reference experiment. The report file holds no timings so that
/// reruns are byte-identical; timings go to `out`.
inline int cmd_reproduce(const std::filesystem::path& dir, std::size_t threads, std::ostream& out) {
  std::ostringstream report;
  bool all = true;
  for (const auto& c : all_criteria(threads)) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = c.run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && r.passed;
    report << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name << '\n'
           << "  measured: " << r.measured << '\n'
           << "  expected: " << r.expected << '\n';
    out << (r.passed ? "PASS " : "FAIL ") << r.id << ' ' << r.name << " (" << secs << " s)\n";
  }
  report << (all ? "all criteria passed\n" : "some criteria failed\n");
  write_file(dir / "report.txt", [&](std::ostream& os) { os << report.str(); });
  out << "report -> " << (dir / "report.txt").string() << '\n';
  return all ? 0 : 1;
}

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Imitation-based spectrum access simulator"};
  app.require_subcommand(1);

  std::string config_path;
  Settings flags;
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  static const std::vector<Flag> kFlags{
      {"--mu", "mu", "channel availabilities, comma separated"},
      {"--n", "n", "number of SUs"},
      {"--sigma", "sigma", "imitation factor"},
      {"--epsilon-u", "epsilon_u", "imitation threshold"},
      {"--omega", "omega", "upper payoff bound"},
      {"--alpha", "alpha", "lower payoff bound"},
      {"--exploration", "exploration", "random exploration rate (channel scope)"},
      {"--policy", "policy", "pisap | disap"},
      {"--scope", "scope", "global | channel"},
      {"--payoff", "payoff", "expected | stochastic"},
      {"--slots", "slots", "slots per iteration (stochastic payoffs)"},
      {"--iters", "iters", "iterations per run / map iterations"},
      {"--runs", "runs", "independent runs"},
      {"--seed", "seed", "master seed"},
      {"--out", "out", "output directory"},
      {"--dt", "dt", "RK4 step"},
      {"--t-max", "t_max", "integration horizon"},
      {"--grid", "grid", "phase grid points"},
      {"--x0", "x0", "initial shares"},
      {"--x1", "x1", "shares at iteration 1"},
      {"--stop-on-convergence", "stop_on_convergence", "stop runs once converged"},
      {"--threads", "threads", "batch worker threads"},
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value configuration file");
    for (const auto& f : kFlags) {
      const std::string key = f.key;
      sub->add_option_function<std::string>(
          f.name, [&flags, key](const std::string& v) { flags[key] = v; }, f.help);
    }
  };
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo runs: trace, fairness, summary");
  auto* dynamics = app.add_subcommand("dynamics", "mean-field trajectories and deviation report");
  auto* ne = app.add_subcommand("ne", "print the Nash equilibrium as JSON");
  auto* phase = app.add_subcommand("phase", "two-channel phase portrait");
  auto* reproduce = app.add_subcommand("reproduce", "run every reference experiment");
  for (auto* sub : {simulate, dynamics, ne, phase}) add_common(sub);
  std::string reproduce_out = "reproduce";
  std::size_t reproduce_threads = 0;
  reproduce->add_option("--out", reproduce_out, "output directory");
  reproduce->add_option("--threads", reproduce_threads, "batch worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    if (*reproduce) return cmd_reproduce(reproduce_out, reproduce_threads, out);
    Settings base = config_path.empty() ? Settings{} : load_settings(config_path);
    const RunConfig rc = resolve(overlay(std::move(base), flags));
    if (*simulate) return cmd_simulate(rc, out);
    if (*dynamics) return cmd_dynamics(rc, out);
    if (*ne) return cmd_ne(rc, out);
    return cmd_phase(rc, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace imitate
