#pragma once

// CSV and JSON artifacts written by the command-line tool.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "imitate/dynamics.hpp"
#include "imitate/sim.hpp"

namespace imitate {

using json = nlohmann::ordered_json;

namespace detail {

inline void csv_number(std::ostream& os, double v) {
  if (std::isnan(v)) return;  // empty field
  os << v;
}

}  // namespace detail

/// iteration,channel,count,mean_payoff (mean_payoff empty for idle channels).
inline void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << std::setprecision(12) << "iteration,channel,count,mean_payoff\n";
  for (std::size_t t = 0; t < trace.counts.size(); ++t) {
    for (std::size_t ch = 0; ch < trace.counts[t].size(); ++ch) {
      os << t << ',' << ch << ',' << trace.counts[t][ch] << ',';
      detail::csv_number(os, trace.mean_payoff[t][ch]);
      os << '\n';
    }
  }
}

inline void write_fairness_csv(std::ostream& os, const std::vector<double>& series) {
  os << std::setprecision(12) << "iteration,jain\n";
  for (std::size_t t = 0; t < series.size(); ++t) os << t << ',' << series[t] << '\n';
}

/// t,x_0,...,x_{C-1}
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << std::setprecision(15) << 't';
  const std::size_t c = traj.empty() ? 0 : traj.front().x.size();
  for (std::size_t i = 0; i < c; ++i) os << ",x_" << i;
  os << '\n';
  for (const auto& p : traj) {
    os << p.t;
    for (double v : p.x.values()) os << ',' << v;
    os << '\n';
  }
}

/// iteration,x_0,...,x_{C-1}
inline void write_iterates_csv(std::ostream& os, const std::vector<Mixture>& xs) {
  os << std::setprecision(15) << "iteration";
  const std::size_t c = xs.empty() ? 0 : xs.front().size();
  for (std::size_t i = 0; i < c; ++i) os << ",x_" << i;
  os << '\n';
  for (std::size_t t = 0; t < xs.size(); ++t) {
    os << t;
    for (double v : xs[t].values()) os << ',' << v;
    os << '\n';
  }
}

inline void write_phase_field_csv(std::ostream& os, const PhasePortrait& p) {
  os << std::setprecision(15) << "x_0,replicator_v,aggregate_v\n";
  for (const auto& f : p.field) os << f.x1 << ',' << f.replicator_v << ',' << f.aggregate_v << '\n';
}

inline void write_phase_trajectories_csv(std::ostream& os, const PhasePortrait& p) {
  os << std::setprecision(15) << "dynamic,start,t,x_0\n";
  for (const auto& tr : p.trajectories) {
    for (const auto& [t, x] : tr.points) os << tr.dynamic << ',' << tr.start << ',' << t << ',' << x << '\n';
  }
}

inline json optional_json(const std::optional<std::size_t>& v) {
  return v ? json(*v) : json(nullptr);
}

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

/// Batch summary: converged_at_mean, converged_at_max, bound, final_counts_mode,
/// jain_at {100, 200}, epsilon_ne, followed by descriptive extras.
inline json summary_json(const SimConfig& cfg, const BatchStats& stats) {
  json j;
  j["converged_at_mean"] = number_or_null(stats.converged_at_mean);
  j["converged_at_max"] = optional_json(stats.converged_at_max);
  j["bound"] = cfg.params.epsilon_u > 0.0 ? json(convergence_bound(cfg)) : json(nullptr);
  j["final_counts_mode"] = stats.final_counts_mode;
  json jain = json::object();
  for (std::size_t t : {100u, 200u}) {
    jain[std::to_string(t)] =
        t < stats.mean_fairness.size() ? json(stats.mean_fairness[t]) : json(nullptr);
  }
  j["jain_at"] = jain;
  j["epsilon_ne"] = stats.converged_runs > 0 && stats.converged_all_epsilon_ne;
  j["runs"] = stats.runs;
  j["converged_runs"] = stats.converged_runs;
  j["converged_at_stddev"] = number_or_null(stats.converged_at_stddev);
  json hist = json::array();
  for (const auto& [counts, hits] : stats.final_counts_histogram) {
    hist.push_back({{"counts", counts}, {"runs", hits}});
  }
  j["final_counts_histogram"] = hist;
  j["config"] = {{"n", cfg.n_sus},
                 {"mu", std::vector<double>(cfg.channels.mu().begin(), cfg.channels.mu().end())},
                 {"policy", to_string(cfg.policy)},
                 {"scope", to_string(cfg.params.scope)},
                 {"sigma", cfg.params.sigma},
                 {"epsilon_u", cfg.params.epsilon_u},
                 {"omega", cfg.params.omega},
                 {"alpha", cfg.params.alpha},
                 {"exploration", cfg.params.exploration},
                 {"payoff", to_string(cfg.payoff_mode)},
                 {"slots", cfg.slots_per_iteration},
                 {"iters", cfg.max_iterations},
                 {"runs", cfg.runs},
                 {"seed", cfg.seed},
                 {"stop_on_convergence", cfg.stop_on_convergence}};
  return j;
}

/// Opens `path` for writing, creating parent directories.
inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  auto os = open_output(path);
  writer(os);
  os.flush();
  if (!os) throw std::runtime_error("failed while writing " + path.string());
}

}  // namespace imitate
