#pragma once

// Mean-field (large N) dynamics of the imitation policies.
//
// With pi_i = mu_i / (x_i N) the average payoff pi_bar = sum_i x_i pi_i is the
// constant sum(mu)/N on the simplex, so both unconstrained flows are affine in
// x and have closed forms. Under the channel constraint the state is the
// migration matrix m[j][l] (share on j now that was on l one iteration
// earlier) and the dynamics are exact discrete maps on it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "imitate/model.hpp"
#include "imitate/policies.hpp"

namespace imitate {

struct DynamicsConfig {
  int n_sus = 50;
  double sigma = 1.0;
  double omega = 1.0;
  double alpha = 0.0;
  double dt = 0.01;
  double t_max = 100.0;
  double convergence_tol = 1e-9;

  void validate() const {
    if (n_sus < 1) throw std::invalid_argument("population must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (!(alpha < omega)) throw std::invalid_argument("alpha must be below omega");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be nonnegative");
    if (!(convergence_tol > 0.0)) throw std::invalid_argument("convergence_tol must be positive");
  }
};

/// Floor applied to mean-field shares before renormalizing.
inline constexpr double kInteriorFloor = 1e-15;

/// pi_bar = sum(mu) / N.
inline double mean_payoff(const ChannelModel& channels, const DynamicsConfig& cfg) {
  return channels.total() / cfg.n_sus;
}

/// Expected payoff per channel, mu_i / (x_i N); zero for an empty channel.
inline std::vector<double> channel_payoffs(std::span<const double> x, const ChannelModel& channels,
                                           int n_sus) {
  std::vector<double> pi(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) pi[i] = channels.mu(i) / (x[i] * n_sus);
  }
  return pi;
}

namespace detail {

inline void check_size(std::span<const double> x, const ChannelModel& channels) {
  if (x.size() != channels.size()) throw std::invalid_argument("mixture size mismatch");
}

// mu_i/N - x_i pi_bar, which equals x_i (pi_i - pi_bar) on the simplex and
// stays well defined on its boundary.
inline std::vector<double> affine_drift(std::span<const double> x, const ChannelModel& channels,
                                        int n_sus) {
  const double pi_bar = channels.total() / n_sus;
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = channels.mu(i) / n_sus - x[i] * pi_bar;
  return v;
}

}  // namespace detail

/// Gain of the aggregate monotone flow: [1 + (omega - pi_bar)/(omega - alpha)] / (omega - alpha).
inline double aggregate_gain(const ChannelModel& channels, const DynamicsConfig& cfg) {
  const double range = cfg.omega - cfg.alpha;
  return (1.0 + (cfg.omega - mean_payoff(channels, cfg)) / range) / range;
}

/// Replicator flow dx_i/dt = sigma x_i (pi_i - pi_bar).
inline std::vector<double> replicator_rhs(std::span<const double> x, const DynamicsConfig& cfg,
                                          const ChannelModel& channels) {
  detail::check_size(x, channels);
  auto v = detail::affine_drift(x, channels, cfg.n_sus);
  for (double& vi : v) vi *= cfg.sigma;
  return v;
}

/// Aggregate monotone flow dx_i/dt = sigma g x_i (pi_i - pi_bar), g = aggregate_gain.
inline std::vector<double> aggregate_monotone_rhs(std::span<const double> x,
                                                  const DynamicsConfig& cfg,
                                                  const ChannelModel& channels) {
  detail::check_size(x, channels);
  const double k = cfg.sigma * aggregate_gain(channels, cfg);
  auto v = detail::affine_drift(x, channels, cfg.n_sus);
  for (double& vi : v) vi *= k;
  return v;
}

namespace detail {

inline Mixture relax_towards_ne(const Mixture& x0, double rate, double t,
                                const ChannelModel& channels) {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  check_size(x0.values(), channels);
  const auto ne = nash_equilibrium(channels);
  const double decay = std::exp(-rate * t);
  std::vector<double> x(x0.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (x0[i] - ne[i]) * decay + ne[i];
  return Mixture::normalized(std::move(x));
}

}  // namespace detail

/// x_i(t) = K_i exp(-sigma pi_bar t) + x*_i with K_i = x_i(0) - x*_i.
inline Mixture replicator_closed_form(const Mixture& x0, double t, const DynamicsConfig& cfg,
                                      const ChannelModel& channels) {
  return detail::relax_towards_ne(x0, cfg.sigma * mean_payoff(channels, cfg), t, channels);
}

/// Same relaxation with rate sigma pi_bar g; K_i is taken per channel.
inline Mixture aggregate_closed_form(const Mixture& x0, double t, const DynamicsConfig& cfg,
                                     const ChannelModel& channels) {
  const double rate = cfg.sigma * mean_payoff(channels, cfg) * aggregate_gain(channels, cfg);
  return detail::relax_towards_ne(x0, rate, t, channels);
}

/// C x C matrix of shares, m(j, l) = on channel j now, on channel l one
/// iteration earlier. Row sums are the current mixture, column sums the
/// previous one.
class MigrationMatrix {
 public:
  MigrationMatrix() = default;
  explicit MigrationMatrix(std::size_t c) : c_(c), m_(c * c, 0.0) {}

  /// Validating constructor from nested rows.
  explicit MigrationMatrix(const std::vector<std::vector<double>>& rows) : MigrationMatrix(rows.size()) {
    double total = 0.0;
    for (std::size_t j = 0; j < c_; ++j) {
      if (rows[j].size() != c_) throw std::invalid_argument("migration matrix must be square");
      for (std::size_t l = 0; l < c_; ++l) {
        if (!(rows[j][l] >= 0.0)) throw std::invalid_argument("migration shares must be nonnegative");
        (*this)(j, l) = rows[j][l];
        total += rows[j][l];
      }
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) {
      throw std::invalid_argument("migration shares must sum to 1");
    }
  }

  /// Independent choices: m(j, l) = x_now_j * x_prev_l.
  static MigrationMatrix independent(const Mixture& x_now, const Mixture& x_prev) {
    if (x_now.size() != x_prev.size()) throw std::invalid_argument("mixture size mismatch");
    MigrationMatrix m(x_now.size());
    for (std::size_t j = 0; j < m.c_; ++j) {
      for (std::size_t l = 0; l < m.c_; ++l) m(j, l) = x_now[j] * x_prev[l];
    }
    return m;
  }

  /// Empirical matrix n_j^l / N of a finite network.
  static MigrationMatrix from_state(const NetworkState& s, std::size_t c) {
    MigrationMatrix m(c);
    const double inv = 1.0 / static_cast<double>(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) m(s.channel_now.at(k), s.channel_prev.at(k)) += inv;
    return m;
  }

  std::size_t size() const noexcept { return c_; }
  double& operator()(std::size_t j, std::size_t l) { return m_[j * c_ + l]; }
  double operator()(std::size_t j, std::size_t l) const { return m_[j * c_ + l]; }

  std::vector<double> row_sums() const {
    std::vector<double> r(c_, 0.0);
    for (std::size_t j = 0; j < c_; ++j)
      for (std::size_t l = 0; l < c_; ++l) r[j] += (*this)(j, l);
    return r;
  }
  std::vector<double> column_sums() const {
    std::vector<double> s(c_, 0.0);
    for (std::size_t j = 0; j < c_; ++j)
      for (std::size_t l = 0; l < c_; ++l) s[l] += (*this)(j, l);
    return s;
  }
  double total() const {
    double t = 0.0;
    for (double v : m_) t += v;
    return t;
  }

 private:
  std::size_t c_ = 0;
  std::vector<double> m_;
};

struct ConstrainedStep {
  MigrationMatrix m;  // shares for the new iteration
  Mixture x;          // new mixture (row sums of m)
  bool clamped = false;
};

namespace detail {

// Shared skeleton of both constrained maps: SUs on channel j now that were on
// i before contribute m(j, i) * (1 + growth(pi_i, pi_bar_j)) to the new share
// on i, where pi_bar_j is the mean previous payoff of channel j's occupants.
template <class Growth>
ConstrainedStep constrained_map(const MigrationMatrix& m, const Mixture& x_tm1,
                                const DynamicsConfig& cfg, const ChannelModel& channels,
                                Growth growth) {
  const std::size_t c = channels.size();
  if (m.size() != c || x_tm1.size() != c) throw std::invalid_argument("dimension mismatch");
  if (sup_distance(m.column_sums(), x_tm1.values()) > kSimplexTolerance) {
    throw std::invalid_argument("x(t-1) must equal the column sums of the migration matrix");
  }
  const auto pi = channel_payoffs(x_tm1.values(), channels, cfg.n_sus);
  const auto x_now = m.row_sums();

  ConstrainedStep out{MigrationMatrix(c), {}, false};
  for (std::size_t j = 0; j < c; ++j) {
    if (!(x_now[j] > 0.0)) continue;
    double pi_bar_j = 0.0;
    for (std::size_t k = 0; k < c; ++k) pi_bar_j += m(j, k) * pi[k];
    pi_bar_j /= x_now[j];
    for (std::size_t i = 0; i < c; ++i) {
      double v = m(j, i) * (1.0 + growth(pi[i], pi_bar_j));
      if (v < 0.0) {
        v = 0.0;
        out.clamped = true;
      }
      out.m(i, j) = v;
    }
  }
  if (out.clamped) {
    const double total = out.m.total();
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t j = 0; j < c; ++j) out.m(i, j) /= total;
  }
  out.x = Mixture::normalized(out.m.row_sums());
  return out;
}

}  // namespace detail

/// Exact channel-constrained proportional imitation:
/// m'(i, j) = m(j, i) [1 + sigma (pi_i(t-1) - pi_bar_j)].
inline ConstrainedStep constrained_pi_map(const MigrationMatrix& m, const Mixture& x_tm1,
                                          const DynamicsConfig& cfg,
                                          const ChannelModel& channels) {
  const double sigma = cfg.sigma;
  return detail::constrained_map(m, x_tm1, cfg, channels, [sigma](double pi_i, double pi_bar_j) {
    return sigma * (pi_i - pi_bar_j);
  });
}

/// Exact channel-constrained double imitation with omega = 1, alpha = 0:
/// m'(i, j) = m(j, i) [1 + (2 - pi_bar_j)(pi_i(t-1) - pi_bar_j)].
inline ConstrainedStep constrained_di_map(const MigrationMatrix& m, const Mixture& x_tm1,
                                          const DynamicsConfig& cfg,
                                          const ChannelModel& channels) {
  if (cfg.omega != 1.0 || cfg.alpha != 0.0) {
    throw std::invalid_argument("the double imitation map is defined for omega = 1, alpha = 0");
  }
  return detail::constrained_map(m, x_tm1, cfg, channels, [](double pi_i, double pi_bar_j) {
    return (2.0 - pi_bar_j) * (pi_i - pi_bar_j);
  });
}

struct MapStep {
  Mixture x;
  bool clamped = false;
};

namespace detail {

inline MapStep affine_step(const Mixture& x_prev, double gain, const ChannelModel& channels,
                           int n_sus) {
  check_size(x_prev.values(), channels);
  const auto drift = affine_drift(x_prev.values(), channels, n_sus);
  std::vector<double> y(x_prev.size());
  bool clamped = false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = x_prev[i] + gain * drift[i];
    if (y[i] < 0.0) {
      y[i] = 0.0;
      clamped = true;
    }
  }
  return {Mixture::normalized(std::move(y)), clamped};
}

}  // namespace detail

/// Discrete replicator step x_i + sigma x_i (pi_i - pi_bar); one half of the
/// interleaved approximation of the constrained PISAP dynamic.
inline MapStep double_replicator_step(const Mixture& x_prev, const DynamicsConfig& cfg,
                                      const ChannelModel& channels) {
  return detail::affine_step(x_prev, cfg.sigma, channels, cfg.n_sus);
}

/// Discrete aggregate monotone step x_i + x_i g (pi_i - pi_bar) with
/// g = aggregate_gain (2 - pi_bar for omega = 1, alpha = 0).
inline MapStep double_aggregate_step(const Mixture& x_prev, const DynamicsConfig& cfg,
                                     const ChannelModel& channels) {
  return detail::affine_step(x_prev, aggregate_gain(channels, cfg), channels, cfg.n_sus);
}

using Matrix = std::vector<std::vector<double>>;

/// Jacobian of double_replicator_step: diagonal with entries 1 - sigma pi_bar.
inline Matrix double_replicator_jacobian(const DynamicsConfig& cfg, const ChannelModel& channels) {
  const std::size_t c = channels.size();
  Matrix j(c, std::vector<double>(c, 0.0));
  for (std::size_t i = 0; i < c; ++i) j[i][i] = 1.0 - cfg.sigma * mean_payoff(channels, cfg);
  return j;
}

/// Max absolute row sum.
inline double inf_norm(const Matrix& a) {
  double best = 0.0;
  for (const auto& row : a) {
    double s = 0.0;
    for (double v : row) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

struct TimedMixture {
  double t;
  Mixture x;
};
using Trajectory = std::vector<TimedMixture>;

/// One classical Runge-Kutta step, without any projection.
template <class Rhs>
std::vector<double> rk4_step(Rhs&& rhs, std::span<const double> x, double dt) {
  const std::size_t c = x.size();
  std::vector<double> tmp(c);
  const auto k1 = rhs(x);
  for (std::size_t i = 0; i < c; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
  const auto k2 = rhs(std::span<const double>(tmp));
  for (std::size_t i = 0; i < c; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
  const auto k3 = rhs(std::span<const double>(tmp));
  for (std::size_t i = 0; i < c; ++i) tmp[i] = x[i] + dt * k3[i];
  const auto k4 = rhs(std::span<const double>(tmp));
  std::vector<double> y(c);
  for (std::size_t i = 0; i < c; ++i) {
    y[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return y;
}

/// Fixed-step RK4 over [0, cfg.t_max]; `rhs` maps a span of shares to a
/// velocity vector. States are projected back onto the simplex after each
/// step. Throws std::runtime_error if the integration blows up.
template <class Rhs>
Trajectory integrate(Rhs&& rhs, const Mixture& x0, const DynamicsConfig& cfg) {
  cfg.validate();
  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt));
  Trajectory traj;
  traj.reserve(steps + 1);
  traj.push_back({0.0, x0});
  std::vector<double> x = x0.vec();
  for (std::size_t k = 1; k <= steps; ++k) {
    auto y = rk4_step(rhs, std::span<const double>(x), cfg.dt);
    double sum = 0.0;
    for (double v : y) {
      if (!std::isfinite(v) || v < -1e-9) {
        throw std::runtime_error("integration diverged at step " + std::to_string(k));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw std::runtime_error("integration left the simplex at step " + std::to_string(k));
    }
    auto projected = Mixture::normalized(std::move(y), kInteriorFloor);
    x = projected.vec();
    traj.push_back({static_cast<double>(k) * cfg.dt, std::move(projected)});
  }
  return traj;
}

/// Iterates of a channel-constrained exact map, x(0..iterations). The
/// initial migration matrix assumes independent random choices at t = 0, 1.
inline std::vector<Mixture> constrained_trajectory(Policy policy, const Mixture& x0,
                                                   const Mixture& x1, std::size_t iterations,
                                                   const DynamicsConfig& cfg,
                                                   const ChannelModel& channels) {
  std::vector<Mixture> xs{x0};
  if (iterations >= 1) xs.push_back(x1);
  MigrationMatrix m = MigrationMatrix::independent(x1, x0);
  Mixture x_prev = x0;
  for (std::size_t t = 1; t < iterations; ++t) {
    auto step = policy == Policy::pisap ? constrained_pi_map(m, x_prev, cfg, channels)
                                        : constrained_di_map(m, x_prev, cfg, channels);
    x_prev = Mixture::normalized(step.m.column_sums());
    m = std::move(step.m);
    xs.push_back(std::move(step.x));
  }
  return xs;
}

/// Two interleaved one-step maps, x(t+1) = step(x(t-1)), seeded by x(0), x(1).
inline std::vector<Mixture> interleaved_trajectory(Policy policy, const Mixture& x0,
                                                   const Mixture& x1, std::size_t iterations,
                                                   const DynamicsConfig& cfg,
                                                   const ChannelModel& channels) {
  std::vector<Mixture> xs{x0};
  if (iterations >= 1) xs.push_back(x1);
  for (std::size_t t = 1; t < iterations; ++t) {
    const Mixture& back = xs[t - 1];
    auto step = policy == Policy::pisap ? double_replicator_step(back, cfg, channels)
                                        : double_aggregate_step(back, cfg, channels);
    xs.push_back(std::move(step.x));
  }
  return xs;
}

/// First index from which every later iterate stays within `tol` (sup norm)
/// of `target`.
inline std::optional<std::size_t> settling_index(const std::vector<Mixture>& xs,
                                                 const Mixture& target, double tol) {
  std::optional<std::size_t> idx;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    if (sup_distance(xs[t].values(), target.values()) < tol) {
      if (!idx) idx = t;
    } else {
      idx.reset();
    }
  }
  return idx;
}

struct PhasePoint {
  double x1;              // share on the first channel
  double replicator_v;    // d x1 / dt under the replicator flow
  double aggregate_v;     // d x1 / dt under the aggregate monotone flow
};

struct PhaseTrajectory {
  std::string dynamic;  // "replicator" or "aggregate"
  double start;
  std::vector<std::pair<double, double>> points;  // (t, x1)
};

struct PhasePortrait {
  std::vector<PhasePoint> field;
  double nullcline;  // x1 at which both velocities vanish
  std::vector<PhaseTrajectory> trajectories;
};

/// Velocity field along the edge x = (x1, 1 - x1) of a two-channel simplex,
/// plus closed-form trajectories from evenly spaced starts.
inline PhasePortrait phase_portrait(const ChannelModel& channels, const DynamicsConfig& cfg,
                                    std::size_t grid) {
  if (channels.size() != 2) throw std::invalid_argument("phase portrait needs exactly 2 channels");
  if (grid < 2) throw std::invalid_argument("phase grid needs at least 2 points");
  PhasePortrait out;
  out.nullcline = channels.mu(0) / channels.total();
  for (std::size_t k = 0; k < grid; ++k) {
    const double x1 = static_cast<double>(k) / static_cast<double>(grid - 1);
    const std::vector<double> x{x1, 1.0 - x1};
    out.field.push_back(
        {x1, replicator_rhs(x, cfg, channels)[0], aggregate_monotone_rhs(x, cfg, channels)[0]});
  }
  const auto samples = static_cast<std::size_t>(std::max(1.0, std::floor(cfg.t_max)));
  for (double start : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const Mixture x0({start, 1.0 - start});
    PhaseTrajectory rep{"replicator", start, {}}, agg{"aggregate", start, {}};
    for (std::size_t s = 0; s <= samples; ++s) {
      const double t = cfg.t_max * static_cast<double>(s) / static_cast<double>(samples);
      rep.points.emplace_back(t, replicator_closed_form(x0, t, cfg, channels)[0]);
      agg.points.emplace_back(t, aggregate_closed_form(x0, t, cfg, channels)[0]);
    }
    out.trajectories.push_back(std::move(rep));
    out.trajectories.push_back(std::move(agg));
  }
  return out;
}

}  // namespace imitate
